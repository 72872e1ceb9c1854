// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/voxel_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "isomedia/errors.hpp"

namespace isomedia {

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kSoftplus:
      return "softplus";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kIdentity:
      return "identity";
  }
  return "identity";
}

Activation activation_from_string(std::string_view s) {
  if (s == "softplus") return Activation::kSoftplus;
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

VoxelField::VoxelField(int nx, int ny, int nz, int channels, Activation activation, double scale,
                       double init_raw)
    : nx_(nx), ny_(ny), nz_(nz), channels_(channels), activation_(activation), scale_(scale) {
  if (nx < 2 || ny < 2 || nz < 2) throw ConfigError("voxel field resolution must be >= 2 per axis");
  if (channels < 1) throw ConfigError("voxel field needs at least one channel");
  if (!(scale > 0.0)) throw ConfigError("voxel field scale must be positive");
  raw_.assign(node_count() * static_cast<std::size_t>(channels), init_raw);
  update_activation();
}

Vec3 VoxelField::node_position(int ix, int iy, int iz) const {
  return {static_cast<double>(ix) / (nx_ - 1), static_cast<double>(iy) / (ny_ - 1),
          static_cast<double>(iz) / (nz_ - 1)};
}

void VoxelField::update_activation() {
  act_.resize(raw_.size());
  slope_.resize(raw_.size());
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    const double x = raw_[i];
    switch (activation_) {
      case Activation::kSoftplus:
        act_[i] = scale_ * softplus(x);
        slope_[i] = scale_ * sigmoid(x);
        break;
      case Activation::kSigmoid: {
        const double s = sigmoid(x);
        act_[i] = scale_ * s;
        slope_[i] = scale_ * s * (1.0 - s);
        break;
      }
      case Activation::kIdentity:
        act_[i] = scale_ * x;
        slope_[i] = scale_;
        break;
    }
  }
  dirty_ = false;
}

double VoxelField::raw_for(double value) const {
  const double v = value / scale_;
  switch (activation_) {
    case Activation::kSoftplus:
      if (v <= 0.0) throw InputError("softplus cannot produce non-positive values");
      return v > 30.0 ? v : std::log(std::expm1(v));
    case Activation::kSigmoid:
      if (v <= 0.0 || v >= 1.0) throw InputError("sigmoid output must lie in (0,1)");
      return std::log(v / (1.0 - v));
    case Activation::kIdentity:
      return v;
  }
  return v;
}

void VoxelField::check_clean() const {
  if (dirty_) throw std::logic_error("VoxelField queried after raw_mut() without update_activation()");
}

VoxelField::Stencil VoxelField::stencil(const Vec3& p) const {
  if (!is_finite(p)) throw InputError("voxel field query at non-finite position");
  const int n[3] = {nx_, ny_, nz_};
  int i0[3];
  double f[3];
  for (std::size_t a = 0; a < 3; ++a) {
    const double u = std::clamp(p[a], 0.0, 1.0) * (n[a] - 1);
    int i = static_cast<int>(std::floor(u));
    i = std::min(i, n[a] - 2);
    i0[a] = i;
    f[a] = u - i;
  }
  Stencil s;
  int k = 0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx, ++k) {
        s.node[static_cast<std::size_t>(k)] = node_index(i0[0] + dx, i0[1] + dy, i0[2] + dz);
        s.weight[static_cast<std::size_t>(k)] =
            (dx ? f[0] : 1.0 - f[0]) * (dy ? f[1] : 1.0 - f[1]) * (dz ? f[2] : 1.0 - f[2]);
      }
  return s;
}

void VoxelField::query(const Stencil& s, std::span<double> out) const {
  check_clean();
  const auto c = static_cast<std::size_t>(channels_);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < 8; ++k) {
    const double w = s.weight[k];
    const double* v = &act_[s.node[k] * c];
    for (std::size_t ch = 0; ch < c; ++ch) out[ch] += w * v[ch];
  }
}

double VoxelField::query_scalar(const Stencil& s) const {
  check_clean();
  const auto c = static_cast<std::size_t>(channels_);
  double acc = 0.0;
  for (std::size_t k = 0; k < 8; ++k) acc += s.weight[k] * act_[s.node[k] * c];
  return acc;
}

Spectrum VoxelField::query_rgb(const Stencil& s) const {
  Spectrum out;
  query(s, std::span<double>(out.c.data(), 3));
  return out;
}

void VoxelField::accumulate_gradient(const Stencil& s, std::span<const double> d_out,
                                     std::span<double> grad_raw) const {
  const auto c = static_cast<std::size_t>(channels_);
  for (std::size_t k = 0; k < 8; ++k) {
    const double w = s.weight[k];
    if (w == 0.0) continue;
    const std::size_t base = s.node[k] * c;
    for (std::size_t ch = 0; ch < c; ++ch) grad_raw[base + ch] += w * slope_[base + ch] * d_out[ch];
  }
}

void VoxelField::accumulate_gradient_scalar(const Stencil& s, double d_out, std::span<double> grad_raw) const {
  const auto c = static_cast<std::size_t>(channels_);
  for (std::size_t k = 0; k < 8; ++k) {
    const std::size_t base = s.node[k] * c;
    grad_raw[base] += s.weight[k] * slope_[base] * d_out;
  }
}

void VoxelField::accumulate_gradient_rgb(const Stencil& s, const Spectrum& d_out, std::span<double> grad_raw) const {
  accumulate_gradient(s, std::span<const double>(d_out.c.data(), 3), grad_raw);
}

}  // namespace isomedia
