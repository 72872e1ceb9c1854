// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/field_set.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isomedia/errors.hpp"

namespace isomedia {

std::string_view to_string(MediumMode m) {
  switch (m) {
    case MediumMode::kGlobalConstant:
      return "global-constant";
    case MediumMode::kPerRayPooled:
      return "per-ray-pooled";
    case MediumMode::kPerSample:
      return "per-sample";
  }
  return "per-ray-pooled";
}

MediumMode medium_mode_from_string(std::string_view s) {
  if (s == "global-constant") return MediumMode::kGlobalConstant;
  if (s == "per-ray-pooled") return MediumMode::kPerRayPooled;
  if (s == "per-sample") return MediumMode::kPerSample;
  throw ConfigError("unknown medium mode '" + std::string(s) + "'");
}

std::string_view to_string(DownwellingKind k) { return k == DownwellingKind::kPlane ? "plane" : "grid"; }

DownwellingKind downwelling_kind_from_string(std::string_view s) {
  if (s == "plane") return DownwellingKind::kPlane;
  if (s == "grid") return DownwellingKind::kGrid;
  throw ConfigError("unknown downwelling representation '" + std::string(s) + "'");
}

void MediumParams::validate() const {
  if (!sigma_attn.is_valid() || !sigma_scat.is_valid()) throw InputError("medium coefficients must be >= 0");
  if (!phi.is_valid()) throw InputError("sunlight constant must be >= 0");
}

double DownwellingField::value(const Vec3& p) const {
  if (kind == DownwellingKind::kPlane) return std::max(0.0, surface_height - p.y);
  return grid.query_scalar(p);
}

FieldSet FieldSet::make(const Options& o) {
  FieldSet f;
  const int r = o.object_resolution;
  const int m = o.media_resolution;
  f.object_density = VoxelField(r, r, r, 1, Activation::kSoftplus, o.density_scale);
  f.object_density = VoxelField(r, r, r, 1, Activation::kSoftplus, o.density_scale,
                                f.object_density.raw_for(o.initial_density));
  f.object_color = VoxelField(r, r, r, 3, Activation::kSigmoid, 1.0, 0.0);
  f.media_density = VoxelField(m, m, m, 1, Activation::kSoftplus, o.media_scale);
  f.media_density = VoxelField(m, m, m, 1, Activation::kSoftplus, o.media_scale,
                               f.media_density.raw_for(o.initial_media));
  f.medium.mode = o.mode;
  f.downwelling.kind = o.downwelling;
  f.downwelling.surface_height = o.surface_height;
  const int d = o.downwelling_resolution;
  f.downwelling.grid = VoxelField(d, d, d, 1, Activation::kSoftplus, 1.0);
  // Start the grid form at the plane's values.
  auto raw = f.downwelling.grid.raw_mut();
  for (int iz = 0; iz < d; ++iz)
    for (int iy = 0; iy < d; ++iy)
      for (int ix = 0; ix < d; ++ix) {
        const Vec3 p = f.downwelling.grid.node_position(ix, iy, iz);
        const double target = std::max(1e-3, o.surface_height - p.y);
        raw[f.downwelling.grid.node_index(ix, iy, iz)] = f.downwelling.grid.raw_for(target);
      }
  f.update_activation();
  return f;
}

void FieldSet::update_activation() {
  object_density.update_activation();
  object_color.update_activation();
  media_density.update_activation();
  downwelling.grid.update_activation();
}

void FieldSet::validate() const {
  if (object_density.channels() != 1 || object_density.activation() != Activation::kSoftplus)
    throw InputError("object density must be a 1-channel softplus field");
  if (object_color.channels() != 3 || object_color.activation() != Activation::kSigmoid)
    throw InputError("object colour must be a 3-channel sigmoid field");
  if (media_density.channels() != 1 || media_density.activation() != Activation::kSoftplus)
    throw InputError("media density must be a 1-channel softplus field");
  if (object_color.scale() > 1.0) throw InputError("object colour scale must keep colours in [0,1]");
  medium.validate();
  if (downwelling.kind == DownwellingKind::kGrid &&
      (downwelling.grid.channels() != 1 || downwelling.grid.activation() != Activation::kSoftplus))
    throw InputError("downwelling grid must be a 1-channel softplus field");
  if (!std::isfinite(downwelling.surface_height)) throw InputError("surface height must be finite");
}

FieldGradient FieldGradient::zeros_like(const FieldSet& f) {
  FieldGradient g;
  g.object_density.assign(f.object_density.raw().size(), 0.0);
  g.object_color.assign(f.object_color.raw().size(), 0.0);
  g.media_density.assign(f.media_density.raw().size(), 0.0);
  g.downwelling_grid.assign(f.downwelling.grid.raw().size(), 0.0);
  return g;
}

void FieldGradient::set_zero() {
  std::fill(object_density.begin(), object_density.end(), 0.0);
  std::fill(object_color.begin(), object_color.end(), 0.0);
  std::fill(media_density.begin(), media_density.end(), 0.0);
  std::fill(downwelling_grid.begin(), downwelling_grid.end(), 0.0);
  sigma_attn = sigma_scat = phi = Spectrum(0.0);
  surface_height = 0.0;
}

namespace {
void add_into(std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}
void scale_by(std::vector<double>& a, double s) {
  for (double& v : a) v *= s;
}
bool finite(const std::vector<double>& a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}
bool finite(const Spectrum& s) { return std::isfinite(s[0]) && std::isfinite(s[1]) && std::isfinite(s[2]); }
}  // namespace

FieldGradient& FieldGradient::operator+=(const FieldGradient& o) {
  add_into(object_density, o.object_density);
  add_into(object_color, o.object_color);
  add_into(media_density, o.media_density);
  add_into(downwelling_grid, o.downwelling_grid);
  sigma_attn += o.sigma_attn;
  sigma_scat += o.sigma_scat;
  phi += o.phi;
  surface_height += o.surface_height;
  return *this;
}

FieldGradient& FieldGradient::operator*=(double s) {
  scale_by(object_density, s);
  scale_by(object_color, s);
  scale_by(media_density, s);
  scale_by(downwelling_grid, s);
  sigma_attn *= s;
  sigma_scat *= s;
  phi *= s;
  surface_height *= s;
  return *this;
}

std::string_view FieldGradient::first_non_finite() const {
  if (!finite(object_density)) return "object_density";
  if (!finite(object_color)) return "object_color";
  if (!finite(media_density)) return "media_density";
  if (!finite(downwelling_grid)) return "downwelling_grid";
  if (!finite(sigma_attn)) return "sigma_attn";
  if (!finite(sigma_scat)) return "sigma_scat";
  if (!finite(phi)) return "phi";
  if (!std::isfinite(surface_height)) return "surface_height";
  return {};
}

double FieldGradient::max_abs() const {
  double m = 0.0;
  auto upd = [&](double v) { m = std::max(m, std::abs(v)); };
  for (double v : object_density) upd(v);
  for (double v : object_color) upd(v);
  for (double v : media_density) upd(v);
  for (double v : downwelling_grid) upd(v);
  for (std::size_t c = 0; c < 3; ++c) {
    upd(sigma_attn[c]);
    upd(sigma_scat[c]);
    upd(phi[c]);
  }
  upd(surface_height);
  return m;
}

double pool_per_ray(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw InputError("pooling needs at least one sample");
  if (weights.size() != values.size()) throw InputError("pooling weights and values differ in length");
  double sw = 0.0, swv = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sw += weights[i];
    swv += weights[i] * values[i];
  }
  if (sw > 0.0) return swv / sw;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace isomedia
