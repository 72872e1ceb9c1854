// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/cli.hpp"

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "isomedia/apps.hpp"
#include "isomedia/config.hpp"
#include "isomedia/errors.hpp"
#include "isomedia/io.hpp"
#include "isomedia/metrics.hpp"
#include "isomedia/oracle.hpp"
#include "isomedia/priors.hpp"
#include "json.hpp"

#ifndef ISOMEDIA_VERSION
#define ISOMEDIA_VERSION "0.0.0"
#endif

namespace isomedia {

namespace fs = std::filesystem;
using nlohmann::json;

std::string view_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "view_%03zu", index);
  return buf;
}

namespace {

json spectrum_json(const Spectrum& s) { return json::array({s[0], s[1], s[2]}); }

fs::path layer(const fs::path& dir, const std::string& name, const char* what) {
  return dir / (name + "_" + what + ".pfm");
}

json manifest_base(const ProjectConfig& cfg, const char* command) {
  return {{"tool", "isomedia"},
          {"version", ISOMEDIA_VERSION},
          {"command", command},
          {"config_hash", cfg.source_hash},
          {"condition", std::string(to_string(cfg.condition))},
          {"seed", cfg.seed}};
}

}  // namespace

Dataset load_dataset(const fs::path& dir) {
  json m;
  try {
    m = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw IoError("dataset manifest is malformed: " + std::string(e.what()));
  }
  Dataset d;
  try {
    d.size.height = m.at("image_size").at(0).get<int>();
    d.size.width = m.at("image_size").at(1).get<int>();
    for (const json& c : m.at("cameras")) d.cameras.push_back(camera_from_json_text(c.dump(), d.size));
    d.names = m.at("views").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw IoError("dataset manifest is incomplete: " + std::string(e.what()));
  } catch (const ConfigError& e) {
    throw IoError("dataset manifest is invalid: " + std::string(e.what()));
  }
  if (d.cameras.size() != d.names.size()) throw IoError("dataset manifest lists mismatched cameras and views");
  // The pose sidecar is authoritative for extrinsics.
  if (fs::exists(dir / "poses.txt")) {
    const auto poses = read_poses(dir / "poses.txt");
    for (const NamedPose& p : poses)
      for (std::size_t i = 0; i < d.names.size(); ++i)
        if (d.names[i] == p.name) d.cameras[i].pose = p.pose;
  }
  d.fit_data.size = d.size;
  for (std::size_t i = 0; i < d.names.size(); ++i) {
    FitView v;
    v.camera = d.cameras[i];
    v.I = read_pfm(layer(dir, d.names[i], "I"));
    const fs::path prior = layer(dir, d.names[i], "prior");
    if (fs::exists(prior)) v.depth_prior = load_depth_prior(prior).values;
    d.fit_data.views.push_back(std::move(v));
  }
  return d;
}

void write_history_csv(const fs::path& path, const std::vector<HistoryRow>& history) {
  std::ostringstream o;
  o << std::setprecision(10);
  o << "step,lr,recon,comp,geo,mutex,media,mono,total,grad_max\n";
  for (const HistoryRow& r : history)
    o << r.step << "," << r.lr << "," << r.parts.recon << "," << r.parts.comp << "," << r.parts.geo << ","
      << r.parts.mutex << "," << r.parts.media << "," << r.parts.mono << "," << r.total << "," << r.grad_max << "\n";
  write_text_atomic(path, o.str());
}

namespace {

struct Common {
  std::string config;
  std::string out;
  long long seed = -1;
  int steps_override = -1;
};

ProjectConfig load_with_overrides(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  ProjectConfig cfg = load_config(c.config);
  if (c.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(c.seed);
    cfg.fit.seed = cfg.seed;
  }
  if (c.steps_override >= 0) cfg.fit.steps = c.steps_override;
  return cfg;
}

int cmd_synth(const Common& c, std::ostream& out) {
  const ProjectConfig cfg = load_with_overrides(c);
  const fs::path dir = c.out.empty() ? cfg.paths.data : fs::path(c.out);
  const GroundTruth gt = generate(cfg.scene);
  std::vector<NamedPose> poses;
  json views = json::array(), cams = json::array();
  for (std::size_t i = 0; i < gt.views.size(); ++i) {
    const std::string name = view_name(i);
    const GroundTruthView& v = gt.views[i];
    write_pfm(layer(dir, name, "I"), v.I);
    write_pfm(layer(dir, name, "J"), v.J);
    write_pfm(layer(dir, name, "depth"), v.depth);
    write_pfm(layer(dir, name, "zphi"), v.z_phi);
    write_pfm(layer(dir, name, "T"), v.T);
    write_pfm(layer(dir, name, "B"), v.B);
    // Pseudo-depth stand-in: the normalised true depth.
    write_pfm(layer(dir, name, "prior"), normalize_depth(v.depth).values);
    write_ppm_srgb(dir / (name + "_I.ppm"), v.I);
    poses.push_back({name, cfg.scene.cameras[i].pose});
    views.push_back(name);
    cams.push_back(json::parse(camera_to_json_text(cfg.scene.cameras[i])));
  }
  write_poses(dir / "poses.txt", poses);
  json m = manifest_base(cfg, "synth");
  m["image_size"] = {cfg.scene.image_size.height, cfg.scene.image_size.width};
  m["views"] = views;
  m["cameras"] = cams;
  m["ground_truth"] = {{"sigma_attn", spectrum_json(cfg.scene.sigma_attn)},
                       {"sigma_scat", spectrum_json(cfg.scene.sigma_scat)},
                       {"phi", spectrum_json(cfg.scene.phi)},
                       {"ambient", spectrum_json(cfg.scene.ambient)},
                       {"surface_height", cfg.scene.water_surface_height}};
  write_text_atomic(dir / "manifest.json", m.dump(2));
  out << "wrote " << gt.views.size() << " views to " << dir.string() << "\n";
  return kExitOk;
}

RenderSettings render_settings(const ProjectConfig& cfg) {
  RenderSettings s;
  s.n_obj = cfg.fit.n_obj;
  s.n_add = cfg.fit.n_add;
  s.seed = cfg.seed;
  s.threads = cfg.fit.threads;
  return s;
}

int cmd_fit(const Common& c, std::ostream& out) {
  const ProjectConfig cfg = load_with_overrides(c);
  const fs::path dir = c.out.empty() ? cfg.paths.output : fs::path(c.out);
  const fs::path ckpt = c.out.empty() ? cfg.paths.checkpoint : dir / "fields.ckpt";
  const Dataset data = load_dataset(cfg.paths.data);
  FitResult res = fit(data.fit_data, cfg.initial_field(), cfg.fit, [&](const HistoryRow& r) {
    if (r.step % 100 == 0) out << "step " << r.step << " loss " << r.total << "\n";
  });
  write_history_csv(dir / "history.csv", res.history);
  if (res.diverged) {
    out << res.message << "\n";
    return kExitNumeric;
  }
  json extra = manifest_base(cfg, "fit");
  extra["steps"] = cfg.fit.steps;
  write_checkpoint(ckpt, res.field, extra.dump());

  // Effective coefficients: the spectra times the mean pooled media density.
  double pooled = 0.0;
  std::size_t count = 0;
  for (const CameraModel& cam : data.cameras) {
    const RenderedView v = render_view(res.field, cam, data.size, cfg.condition, render_settings(cfg));
    for (double x : v.media_pooled.data()) pooled += x;
    count += v.media_pooled.pixel_count();
  }
  pooled /= static_cast<double>(std::max<std::size_t>(count, 1));
  json s = manifest_base(cfg, "fit");
  s["final_loss"] = res.history.empty() ? 0.0 : res.history.back().total;
  s["sigma_attn_effective"] = spectrum_json(res.field.medium.sigma_attn * pooled);
  s["sigma_scat_effective"] = spectrum_json(
      (cfg.condition == Condition::kHaze ? res.field.medium.sigma_attn : res.field.medium.sigma_scat) * pooled);
  s["phi"] = spectrum_json(res.field.medium.phi);
  s["surface_height"] = res.field.downwelling.surface_height;
  s["checkpoint"] = ckpt.string();
  write_text_atomic(dir / "fit_summary.json", s.dump(2));
  out << "checkpoint " << ckpt.string() << "\n";
  return kExitOk;
}

FieldSet checkpoint_for(const ProjectConfig& cfg, const std::string& path) {
  return read_checkpoint(path.empty() ? cfg.paths.checkpoint : fs::path(path));
}

int cmd_render(const Common& c, const std::string& checkpoint, std::ostream& out) {
  const ProjectConfig cfg = load_with_overrides(c);
  const FieldSet field = checkpoint_for(cfg, checkpoint);
  const Dataset data = load_dataset(cfg.paths.data);
  const fs::path dir = c.out.empty() ? cfg.paths.output / "render" : fs::path(c.out);
  for (std::size_t i = 0; i < data.cameras.size(); ++i) {
    const RenderedView v = render_view(field, data.cameras[i], data.size, cfg.condition, render_settings(cfg));
    const std::string& name = data.names[i];
    write_pfm(layer(dir, name, "I"), v.I_hat);
    write_pfm(layer(dir, name, "J"), v.J_hat);
    write_pfm(layer(dir, name, "Cmed"), v.C_med);
    write_pfm(layer(dir, name, "depth"), v.depth);
    write_pfm(layer(dir, name, "zphi"), v.z_phi);
    write_ppm_srgb(dir / (name + "_J.ppm"), v.J_hat);
  }
  out << "rendered " << data.cameras.size() << " views to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_metrics(const std::string& a, const std::string& b, const std::string& out_dir, std::ostream& out) {
  if (!fs::is_directory(a) || !fs::is_directory(b)) throw IoError("metrics needs two existing directories");
  std::map<std::string, fs::path> files;
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().extension() == ".pfm") files[e.path().filename().string()] = e.path();
  std::ostringstream csv;
  csv << "image,psnr,ssim\n";
  double sp = 0.0, ss = 0.0;
  int n = 0;
  out << std::left << std::setw(28) << "image" << std::setw(10) << "psnr" << "ssim\n";
  for (const auto& [name, path] : files) {
    const fs::path other = fs::path(b) / name;
    if (!fs::exists(other)) continue;
    const Image x = read_pfm(path), y = read_pfm(other);
    if (x.channels() != 3 || !x.same_shape(y)) continue;
    const double p = psnr(x, y), s = ssim(x, y);
    sp += p;
    ss += s;
    ++n;
    out << std::setw(28) << name << std::setw(10) << std::fixed << std::setprecision(3) << p << std::setprecision(5)
        << s << "\n";
    csv << name << "," << p << "," << s << "\n";
  }
  if (n == 0) throw IoError("no matching colour images to compare");
  out << std::setw(28) << "mean" << std::setw(10) << std::setprecision(3) << sp / n << std::setprecision(5) << ss / n
      << "\n";
  csv << "mean," << sp / n << "," << ss / n << "\n";
  if (!out_dir.empty()) write_text_atomic(fs::path(out_dir) / "metrics.csv", csv.str());
  return kExitOk;
}

int cmd_apps(const Common& c, const std::string& app, const std::string& checkpoint, std::ostream& out) {
  const ProjectConfig cfg = load_with_overrides(c);
  const FieldSet field = checkpoint_for(cfg, checkpoint);
  const Dataset data = load_dataset(cfg.paths.data);
  const fs::path dir = c.out.empty() ? cfg.paths.output / "apps" : fs::path(c.out);
  json report = manifest_base(cfg, "apps");
  if (app == "volume") {
    json vols = json::array();
    for (std::size_t i = 0; i < data.cameras.size(); ++i) {
      const CameraModel& cam = data.cameras[i];
      if (cam.kind != CameraKind::kOrthographic) continue;
      const RenderedView v = render_view(field, cam, data.size, cfg.condition, render_settings(cfg));
      const double metres = cfg.apps.width_real / cam.extent_x;
      // Line-of-sight depth is measured from where the ray enters the medium.
      const RayBatch rays = generate_rays(cam, data.size);
      Image depth = v.depth, zphi = v.z_phi;
      for (int r = 0; r < depth.height(); ++r)
        for (int k = 0; k < depth.width(); ++k) depth.at(r, k) = (depth.at(r, k) - rays.at(r, k).t_near) * metres;
      for (double& x : zphi.data()) x *= metres;
      const double vol = estimate_volume(depth, zphi, cfg.apps.width_real, cam);
      vols.push_back({{"view", data.names[i]}, {"volume_m3", vol}});
      out << data.names[i] << " volume " << vol << " m^3\n";
    }
    if (vols.empty()) throw ContractError("volume estimation needs an orthographic view");
    report["volumes"] = vols;
    write_text_atomic(dir / "volume.json", report.dump(2));
  } else if (app == "depth-scale") {
    json scales = json::array();
    for (double s : cfg.apps.depth_scales) {
      const auto views = resynthesize_depth_scaled(field, data.cameras, data.size, cfg.condition,
                                                   render_settings(cfg), s);
      Spectrum mean;
      for (std::size_t i = 0; i < views.size(); ++i) {
        std::ostringstream tag;
        tag << "x" << std::setprecision(4) << s;
        write_pfm(dir / (data.names[i] + "_" + tag.str() + "_I.pfm"), views[i].I_hat);
        write_ppm_srgb(dir / (data.names[i] + "_" + tag.str() + "_I.ppm"), views[i].I_hat);
        mean += views[i].C_med.mean();
      }
      mean = mean / static_cast<double>(std::max<std::size_t>(views.size(), 1));
      scales.push_back({{"scale", s}, {"mean_backscatter", spectrum_json(mean)}});
      out << "scale " << s << " mean backscatter " << mean[0] << " " << mean[1] << " " << mean[2] << "\n";
    }
    report["depth_scales"] = scales;
    write_text_atomic(dir / "depth_scale.json", report.dump(2));
  } else {
    throw ConfigError("unknown app '" + app + "' (expected volume or depth-scale)");
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"isomedia: volumetric media rendering and inverse fitting"};
  app.require_subcommand(1);
  Common common;
  std::string checkpoint, which, dir_a, dir_b;
  auto add_common = [&](CLI::App* sub, bool with_steps) {
    sub->add_option("--config", common.config, "project config (JSON)");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--seed", common.seed, "override the config seed");
    if (with_steps) sub->add_option("--steps-override", common.steps_override, "override fit steps");
  };
  CLI::App* synth = app.add_subcommand("synth", "generate a ground-truth dataset");
  add_common(synth, false);
  CLI::App* fitc = app.add_subcommand("fit", "fit fields to a dataset");
  add_common(fitc, true);
  CLI::App* render = app.add_subcommand("render", "render a checkpoint at the dataset views");
  add_common(render, false);
  render->add_option("--checkpoint", checkpoint, "checkpoint file (default from config)");
  CLI::App* metrics = app.add_subcommand("metrics", "PSNR/SSIM between two image directories");
  metrics->add_option("dir_a", dir_a)->required();
  metrics->add_option("dir_b", dir_b)->required();
  metrics->add_option("--out", common.out, "directory for metrics.csv");
  CLI::App* apps = app.add_subcommand("apps", "volume estimation or depth-rescaled synthesis");
  add_common(apps, false);
  apps->add_option("--checkpoint", checkpoint, "checkpoint file (default from config)");
  apps->add_option("--app", which, "volume | depth-scale")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    if (synth->parsed()) return cmd_synth(common, out);
    if (fitc->parsed()) return cmd_fit(common, out);
    if (render->parsed()) return cmd_render(common, checkpoint, out);
    if (metrics->parsed()) return cmd_metrics(dir_a, dir_b, common.out, out);
    if (apps->parsed()) return cmd_apps(common, which, checkpoint, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace isomedia
