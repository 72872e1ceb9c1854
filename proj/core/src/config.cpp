// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "isomedia/errors.hpp"
#include "json.hpp"

namespace isomedia {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Spectrum spectrum(const json& j, const char* what) {
  const Vec3 v = vec3(j, what);
  return {v.x, v.y, v.z};
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_spectrum(const json& obj, const char* key, Spectrum& out) {
  if (obj.contains(key)) out = spectrum(obj.at(key), key);
}

Pose pose_from(const json& j) {
  Pose p;
  const double yaw = j.value("yaw_deg", 0.0) * std::numbers::pi / 180.0;
  const double pitch = j.value("pitch_deg", 0.0) * std::numbers::pi / 180.0;
  p.rotation = Mat3::rotation_y(yaw) * Mat3::rotation_x(pitch);
  p.translation = vec3(j.at("position"), "camera position");
  return p;
}

CameraModel camera_from(const json& j, ImageSize size) {
  const std::string kind = j.value("kind", "pinhole");
  if (kind == "pinhole") {
    CameraModel c = CameraModel::pinhole(j.at("focal").get<double>(), size.width, size.height, pose_from(j));
    return c;
  }
  if (kind == "orthographic") {
    const json& e = j.at("extent");
    if (!e.is_array() || e.size() != 2) throw ConfigError("orthographic extent must be [x, y]");
    return CameraModel::orthographic(e[0].get<double>(), e[1].get<double>(), pose_from(j));
  }
  throw ConfigError("unknown camera kind '" + kind + "'");
}

json camera_json(const CameraModel& c) {
  json pose = json::array();
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) pose.push_back(c.pose.rotation(r, k));
  json j = {{"kind", c.kind == CameraKind::kPinhole ? "pinhole" : "orthographic"},
            {"rotation", pose},
            {"position", {c.pose.translation.x, c.pose.translation.y, c.pose.translation.z}}};
  if (c.kind == CameraKind::kPinhole) {
    j["fx"] = c.fx;
    j["fy"] = c.fy;
    j["cx"] = c.cx;
    j["cy"] = c.cy;
  } else {
    j["extent"] = {c.extent_x, c.extent_y};
  }
  return j;
}

}  // namespace

CameraModel camera_from_json_text(const std::string& text, ImageSize size) {
  try {
    const json j = json::parse(text);
    if (!j.contains("rotation")) return camera_from(j, size);
    CameraModel c;
    c.kind = j.at("kind").get<std::string>() == "pinhole" ? CameraKind::kPinhole : CameraKind::kOrthographic;
    const json& r = j.at("rotation");
    for (int i = 0; i < 9; ++i) c.pose.rotation.m[static_cast<std::size_t>(i)] = r.at(static_cast<std::size_t>(i));
    c.pose.translation = vec3(j.at("position"), "camera position");
    if (c.kind == CameraKind::kPinhole) {
      c.fx = j.at("fx");
      c.fy = j.at("fy");
      c.cx = j.at("cx");
      c.cy = j.at("cy");
    } else {
      c.extent_x = j.at("extent").at(0);
      c.extent_y = j.at("extent").at(1);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad camera description: ") + e.what());
  }
}

std::string camera_to_json_text(const CameraModel& camera) { return camera_json(camera).dump(); }

FieldSet ProjectConfig::initial_field() const {
  FieldSet f = FieldSet::make(fields);
  f.medium.sigma_attn = medium.sigma_attn;
  f.medium.sigma_scat = condition == Condition::kHaze ? medium.sigma_attn : medium.sigma_scat;
  f.medium.phi = medium.phi;
  f.validate();
  return f;
}

ProjectConfig parse_config(const std::string& text, const fs::path& base_dir) {
  ProjectConfig cfg;
  cfg.source_hash = fnv1a_hex(text);
  try {
    const json j = json::parse(text, nullptr, true, true);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    cfg.condition = condition_from_string(j.value("condition", std::string("underwater")));
    cfg.seed = j.value("seed", std::uint64_t{0});

    OracleScene& s = cfg.scene;
    s.condition = cfg.condition;
    if (j.contains("scene")) {
      const json& sj = j.at("scene");
      if (sj.contains("image_size")) {
        s.image_size.height = sj.at("image_size").at(0).get<int>();
        s.image_size.width = sj.at("image_size").at(1).get<int>();
      }
      read(sj, "surface_height", s.water_surface_height);
      read_spectrum(sj, "sigma_attn", s.sigma_attn);
      read_spectrum(sj, "sigma_scat", s.sigma_scat);
      read_spectrum(sj, "ambient", s.ambient);
      read_spectrum(sj, "phi", s.phi);
      if (cfg.condition == Condition::kHaze) s.sigma_scat = s.sigma_attn;
      for (const json& b : sj.value("boxes", json::array())) {
        SceneBox box;
        box.lo = vec3(b.at("lo"), "box lo");
        box.hi = vec3(b.at("hi"), "box hi");
        read_spectrum(b, "color", box.color);
        box.texture = texture_from_string(b.value("texture", std::string("solid")));
        read(b, "frequency", box.frequency);
        s.boxes.push_back(box);
      }
      for (const json& a : sj.value("absorbers", json::array())) {
        SceneAbsorber ab;
        ab.lo = vec3(a.at("lo"), "absorber lo");
        ab.hi = vec3(a.at("hi"), "absorber hi");
        read(a, "sigma", ab.sigma);
        s.absorbers.push_back(ab);
      }
      for (const json& c : sj.value("cameras", json::array())) s.cameras.push_back(camera_from(c, s.image_size));
    }

    FieldSet::Options& fo = cfg.fields;
    fo.mode = cfg.condition == Condition::kLowlight ? MediumMode::kPerSample : MediumMode::kPerRayPooled;
    if (j.contains("fields")) {
      const json& fj = j.at("fields");
      read(fj, "object_resolution", fo.object_resolution);
      read(fj, "media_resolution", fo.media_resolution);
      read(fj, "density_scale", fo.density_scale);
      read(fj, "media_scale", fo.media_scale);
      read(fj, "initial_density", fo.initial_density);
      read(fj, "initial_media", fo.initial_media);
      read(fj, "surface_height", fo.surface_height);
      read(fj, "downwelling_resolution", fo.downwelling_resolution);
      if (fj.contains("medium_mode")) fo.mode = medium_mode_from_string(fj.at("medium_mode").get<std::string>());
      if (fj.contains("downwelling"))
        fo.downwelling = downwelling_kind_from_string(fj.at("downwelling").get<std::string>());
      read_spectrum(fj, "sigma_attn", cfg.medium.sigma_attn);
      read_spectrum(fj, "sigma_scat", cfg.medium.sigma_scat);
      read_spectrum(fj, "phi", cfg.medium.phi);
    }

    FitConfig& f = cfg.fit;
    const json fitj = j.value("fit", json::object());
    const std::string profile = fitj.value("profile", std::string("desk"));
    if (profile != "desk" && profile != "full") throw ConfigError("fit.profile must be desk or full, got " + profile);
    f = profile == "full" ? FitConfig::full_profile(cfg.condition) : FitConfig::for_condition(cfg.condition);
    f.seed = cfg.seed;
    read(fitj, "steps", f.steps);
    read(fitj, "lr_init", f.lr_init);
    read(fitj, "lr_final", f.lr_final);
    read(fitj, "batch_rays", f.batch_rays);
    read(fitj, "threads", f.threads);
    read(fitj, "learn_medium", f.learn_medium);
    read(fitj, "learn_media", f.learn_media);
    read(fitj, "learn_phi", f.learn_phi);
    read(fitj, "learn_surface", f.learn_surface);
    read(fitj, "divergence_threshold", f.divergence_threshold);
    if (j.contains("sampler")) {
      read(j.at("sampler"), "n_obj", f.n_obj);
      read(j.at("sampler"), "n_add", f.n_add);
    }
    if (j.contains("loss")) {
      const json& lj = j.at("loss");
      read(lj, "lambda_comp", f.weights.lambda_comp);
      read(lj, "lambda_geo", f.weights.lambda_geo);
      read(lj, "lambda_mutex", f.weights.lambda_mutex);
      read(lj, "lambda_trans", f.weights.lambda_trans);
      read(lj, "nu_tilde", f.ssim.nu_tilde);
      read(lj, "kappa_tilde", f.ssim.kappa_tilde);
      read(lj, "patches", f.ssim.patches);
      read(lj, "patch_size", f.ssim.patch_size);
      read(lj, "bcp_patch", f.bcp_patch);
      read(lj, "bcp_full_ambient", f.bcp_full_ambient);
      read(lj, "bcp_gamma", f.bcp_gamma);
    }

    if (j.contains("paths")) {
      const json& pj = j.at("paths");
      if (pj.contains("data")) cfg.paths.data = pj.at("data").get<std::string>();
      if (pj.contains("output")) cfg.paths.output = pj.at("output").get<std::string>();
      if (pj.contains("checkpoint")) cfg.paths.checkpoint = pj.at("checkpoint").get<std::string>();
    }
    for (fs::path* p : {&cfg.paths.data, &cfg.paths.output, &cfg.paths.checkpoint})
      if (p->is_relative()) *p = base_dir / *p;

    if (j.contains("apps")) {
      const json& aj = j.at("apps");
      read(aj, "width_real", cfg.apps.width_real);
      if (aj.contains("depth_scales")) cfg.apps.depth_scales = aj.at("depth_scales").get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.scene.validate();
  cfg.fit.validate();
  if (!(cfg.apps.width_real > 0.0)) throw ConfigError("apps.width_real must be positive");
  cfg.initial_field();
  return cfg;
}

ProjectConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

}  // namespace isomedia
