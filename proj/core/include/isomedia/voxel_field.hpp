// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "isomedia/vec.hpp"

namespace isomedia {

enum class Activation { kSoftplus, kSigmoid, kIdentity };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

// Dense grid over [0,1]^3 with nodes at i / (n - 1). Each node stores
// `channels` raw parameters; queries interpolate the *activated* node values
// trilinearly, so softplus fields stay non-negative and sigmoid fields stay in
// [0,1] everywhere. Activated values are cached: after writing through
// raw_mut(), call update_activation() before querying again.
class VoxelField {
 public:
  struct Stencil {
    std::array<std::size_t, 8> node{};
    std::array<double, 8> weight{};
  };

  VoxelField() = default;
  // Throws ConfigError when any axis has fewer than 2 nodes.
  VoxelField(int nx, int ny, int nz, int channels, Activation activation, double scale = 1.0,
             double init_raw = 0.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  int channels() const { return channels_; }
  Activation activation() const { return activation_; }
  // Output multiplier applied after the activation.
  double scale() const { return scale_; }
  std::size_t node_count() const { return static_cast<std::size_t>(nx_) * ny_ * nz_; }
  std::size_t node_index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * ny_ + iy) * nx_ + ix;
  }
  Vec3 node_position(int ix, int iy, int iz) const;

  std::span<const double> raw() const { return raw_; }
  std::span<double> raw_mut() {
    dirty_ = true;
    return raw_;
  }
  void update_activation();

  double activated(std::size_t node, int channel) const {
    return act_[node * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(channel)];
  }
  // d activated / d raw for one parameter.
  double activation_slope(std::size_t node, int channel) const {
    return slope_[node * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(channel)];
  }

  // Points outside the cube are clamped to it. Throws InputError on non-finite p.
  Stencil stencil(const Vec3& p) const;
  void query(const Stencil& s, std::span<double> out) const;
  void query(const Vec3& p, std::span<double> out) const { query(stencil(p), out); }
  double query_scalar(const Stencil& s) const;
  double query_scalar(const Vec3& p) const { return query_scalar(stencil(p)); }
  Spectrum query_rgb(const Stencil& s) const;
  Spectrum query_rgb(const Vec3& p) const { return query_rgb(stencil(p)); }

  // grad_raw += d(query)/d(raw)^T d_out, for a query at stencil s.
  void accumulate_gradient(const Stencil& s, std::span<const double> d_out, std::span<double> grad_raw) const;
  void accumulate_gradient_scalar(const Stencil& s, double d_out, std::span<double> grad_raw) const;
  void accumulate_gradient_rgb(const Stencil& s, const Spectrum& d_out, std::span<double> grad_raw) const;

  // Raw value whose activation equals `value` (inverse activation).
  double raw_for(double value) const;

 private:
  void check_clean() const;

  int nx_ = 0, ny_ = 0, nz_ = 0, channels_ = 1;
  Activation activation_ = Activation::kIdentity;
  double scale_ = 1.0;
  std::vector<double> raw_;
  std::vector<double> act_;
  std::vector<double> slope_;
  bool dirty_ = true;
};

double softplus(double x);
double sigmoid(double x);

}  // namespace isomedia
