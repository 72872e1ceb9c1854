// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "isomedia/errors.hpp"

namespace isomedia {

std::string_view to_string(Texture t) {
  switch (t) {
    case Texture::kSolid:
      return "solid";
    case Texture::kSmooth:
      return "smooth";
    case Texture::kHueWave:
      return "hue-wave";
  }
  return "solid";
}

Texture texture_from_string(std::string_view s) {
  if (s == "solid") return Texture::kSolid;
  if (s == "smooth") return Texture::kSmooth;
  if (s == "hue-wave") return Texture::kHueWave;
  throw ConfigError("unknown texture '" + std::string(s) + "'");
}

Spectrum SceneBox::albedo(const Vec3& p) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (texture) {
    case Texture::kSolid:
      return color;
    case Texture::kSmooth: {
      Spectrum out;
      for (std::size_t c = 0; c < 3; ++c) {
        const double ph = two_pi * frequency * (p.x + 0.7 * p.y + 0.3 * p.z) + 2.1 * static_cast<double>(c);
        out[c] = color[c] * (0.65 + 0.35 * std::sin(ph));
      }
      return out;
    }
    case Texture::kHueWave: {
      // Each channel peaks at 1 once per period, a third of a period apart.
      Spectrum out;
      for (std::size_t c = 0; c < 3; ++c) {
        const double ph = two_pi * (frequency * (p.x + p.y + p.z) + static_cast<double>(c) / 3.0);
        out[c] = color[c] * (0.5 + 0.5 * std::cos(ph));
      }
      return out;
    }
  }
  return color;
}

namespace {

bool inside_cube(const Vec3& v) {
  for (std::size_t i = 0; i < 3; ++i)
    if (v[i] < -1e-12 || v[i] > 1.0 + 1e-12) return false;
  return true;
}

bool ordered(const Vec3& lo, const Vec3& hi) { return lo.x < hi.x && lo.y < hi.y && lo.z < hi.z; }

// Slab test; returns the entry/exit parameters.
std::optional<std::pair<double, double>> box_span(const Vec3& lo, const Vec3& hi, const Ray& ray) {
  double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < 3; ++a) {
    const double o = ray.origin[a], d = ray.direction[a];
    if (std::abs(d) < 1e-15) {
      if (o < lo[a] || o > hi[a]) return std::nullopt;
      continue;
    }
    double ta = (lo[a] - o) / d, tb = (hi[a] - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1) return std::nullopt;
  return std::make_pair(t0, t1);
}

}  // namespace

void OracleScene::validate() const {
  for (const SceneBox& b : boxes) {
    if (!ordered(b.lo, b.hi)) throw ConfigError("scene box has lo >= hi on some axis");
    if (!inside_cube(b.lo) || !inside_cube(b.hi)) throw ConfigError("scene box leaves the unit cube");
    if (!b.color.is_valid()) throw ConfigError("scene box colour must be >= 0");
    if (condition == Condition::kUnderwater && b.hi.y > water_surface_height)
      throw ConfigError("water surface must lie above all geometry");
  }
  for (const SceneAbsorber& a : absorbers) {
    if (!ordered(a.lo, a.hi)) throw ConfigError("absorber has lo >= hi on some axis");
    if (!inside_cube(a.lo) || !inside_cube(a.hi)) throw ConfigError("absorber leaves the unit cube");
    if (!(a.sigma >= 0.0)) throw ConfigError("absorber density must be >= 0");
  }
  if (!sigma_attn.is_valid() || !sigma_scat.is_valid() || !phi.is_valid() || !ambient.is_valid())
    throw ConfigError("medium parameters must be finite and >= 0");
  if (condition == Condition::kHaze && !(sigma_attn == sigma_scat))
    throw ConfigError("haze scenes share one coefficient for attenuation and scattering");
  if (image_size.height < 1 || image_size.width < 1) throw ConfigError("image size must be at least 1x1");
  for (const CameraModel& c : cameras) c.validate();
}

SceneHit trace_scene(const OracleScene& scene, const Ray& ray) {
  SceneHit best;
  best.t = ray.t_far;
  for (const SceneBox& b : scene.boxes) {
    const auto span = box_span(b.lo, b.hi, ray);
    if (!span) continue;
    const double t = std::max(span->first, ray.t_near);
    if (t > span->second || t >= best.t) continue;
    best.hit = true;
    best.t = t;
    best.point = ray.at(t);
    best.J = b.albedo(best.point);
  }
  if (!best.hit) best.point = ray.at(best.t);
  return best;
}

double absorber_depth(const OracleScene& scene, const Ray& ray, double t0, double t1) {
  double od = 0.0;
  for (const SceneAbsorber& a : scene.absorbers) {
    const auto span = box_span(a.lo, a.hi, ray);
    if (!span) continue;
    const double lo = std::max(span->first, t0), hi = std::min(span->second, t1);
    if (hi > lo) od += a.sigma * (hi - lo);
  }
  return od;
}

GroundTruth generate(const OracleScene& scene) {
  scene.validate();
  GroundTruth gt;
  const int H = scene.image_size.height, W = scene.image_size.width;
  for (const CameraModel& cam : scene.cameras) {
    const RayBatch rays = generate_rays(cam, scene.image_size);
    GroundTruthView v{Image(H, W, 3), Image(H, W, 3), Image(H, W, 1), Image(H, W, 1), Image(H, W, 3),
                      Image(H, W, 3)};
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < W; ++c) {
        const Ray& ray = rays.at(r, c);
        const SceneHit hit = trace_scene(scene, ray);
        const double z = hit.t - ray.t_near;
        DegradationSpec spec;
        spec.J = hit.J;
        spec.z = z;
        spec.condition = scene.condition;
        double z_phi = 0.0;
        switch (scene.condition) {
          case Condition::kUnderwater: {
            const double y_mean = 0.5 * (ray.at(ray.t_near).y + hit.point.y);
            z_phi = std::max(0.0, scene.water_surface_height - y_mean);
            spec.sigma_attn = scene.sigma_attn;
            spec.sigma_scat = scene.sigma_scat;
            spec.B = downwelling_color({scene.phi, z_phi}, scene.sigma_attn, scene.sigma_scat);
            break;
          }
          case Condition::kHaze:
            spec.sigma_attn = scene.sigma_attn;
            spec.sigma_scat = scene.sigma_attn;
            spec.B = scene.ambient;
            break;
          case Condition::kLowlight: {
            // Grey optical depth folded into the coefficient over unit length.
            const double od = absorber_depth(scene, ray, ray.t_near, hit.t) + scene.sigma_attn.average() * z;
            spec.sigma_attn = Spectrum(od);
            spec.sigma_scat = Spectrum(0.0);
            spec.B = Spectrum(0.0);
            spec.z = 1.0;
            break;
          }
        }
        v.I.set_rgb(r, c, compose(spec));
        v.J.set_rgb(r, c, hit.J);
        v.depth.at(r, c) = hit.t;
        v.z_phi.at(r, c) = z_phi;
        v.T.set_rgb(r, c, exp(spec.sigma_attn * (-spec.z)));
        v.B.set_rgb(r, c, spec.B);
      }
    gt.views.push_back(std::move(v));
  }
  return gt;
}

FieldSet voxelize(const OracleScene& scene, const FieldSet::Options& options, double object_density) {
  FieldSet::Options o = options;
  o.initial_media = 1.0;
  o.surface_height = scene.water_surface_height;
  FieldSet f = FieldSet::make(o);
  VoxelField& dens = f.object_density;
  VoxelField& col = f.object_color;
  auto draw = dens.raw_mut();
  auto craw = col.raw_mut();
  const double empty_raw = dens.raw_for(1e-6);
  const double full_raw = dens.raw_for(object_density);
  for (int iz = 0; iz < dens.nz(); ++iz)
    for (int iy = 0; iy < dens.ny(); ++iy)
      for (int ix = 0; ix < dens.nx(); ++ix) {
        const Vec3 p = dens.node_position(ix, iy, iz);
        const std::size_t n = dens.node_index(ix, iy, iz);
        const SceneBox* in = nullptr;
        const SceneBox* nearest = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const SceneBox& b : scene.boxes) {
          double d2 = 0.0;
          for (std::size_t a = 0; a < 3; ++a) {
            const double e = std::max({b.lo[a] - p[a], 0.0, p[a] - b.hi[a]});
            d2 += e * e;
          }
          if (d2 == 0.0 && !in) in = &b;
          if (d2 < best) {
            best = d2;
            nearest = &b;
          }
        }
        draw[n] = in ? full_raw : empty_raw;
        const Spectrum a = nearest ? nearest->albedo(p) : Spectrum(0.5);
        for (int c = 0; c < 3; ++c)
          craw[n * 3 + static_cast<std::size_t>(c)] =
              col.raw_for(std::clamp(a[static_cast<std::size_t>(c)], 1e-4, 1.0 - 1e-4));
      }
  if (scene.condition == Condition::kLowlight) {
    // Grey absorbers plus the background attenuation, sampled at the nodes.
    VoxelField& med = f.media_density;
    auto mraw = med.raw_mut();
    for (int iz = 0; iz < med.nz(); ++iz)
      for (int iy = 0; iy < med.ny(); ++iy)
        for (int ix = 0; ix < med.nx(); ++ix) {
          const Vec3 p = med.node_position(ix, iy, iz);
          double sigma = scene.sigma_attn.average();
          for (const SceneAbsorber& a : scene.absorbers) {
            bool in = true;
            for (std::size_t k = 0; k < 3; ++k) in = in && p[k] >= a.lo[k] && p[k] <= a.hi[k];
            if (in) sigma += a.sigma;
          }
          mraw[med.node_index(ix, iy, iz)] = med.raw_for(std::max(sigma, 1e-6));
        }
  }
  f.medium.sigma_attn = scene.sigma_attn;
  f.medium.sigma_scat = scene.condition == Condition::kHaze ? scene.sigma_attn : scene.sigma_scat;
  f.medium.phi = scene.phi;
  f.update_activation();
  return f;
}

}  // namespace isomedia
