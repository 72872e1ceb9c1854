// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "isomedia/vec.hpp"
#include "isomedia/voxel_field.hpp"

namespace isomedia {

// How the medium coefficients vary along a ray.
//  kGlobalConstant: sigma_attn / sigma_scat used as-is for every sample.
//  kPerRayPooled:   per-sample values (spectrum x media density) are pooled to
//                   one value per ray together with z_phi.
//  kPerSample:      media density itself is the (grey) attenuation at each
//                   sample; there is no in-scatter.
enum class MediumMode { kGlobalConstant, kPerRayPooled, kPerSample };

std::string_view to_string(MediumMode m);
MediumMode medium_mode_from_string(std::string_view s);

struct MediumParams {
  Spectrum sigma_attn{0.5, 0.5, 0.5};
  Spectrum sigma_scat{0.5, 0.5, 0.5};
  Spectrum phi{1.0, 1.0, 1.0};  // D65 white in linear RGB
  MediumMode mode = MediumMode::kPerRayPooled;

  void validate() const;
};

enum class DownwellingKind { kPlane, kGrid };

std::string_view to_string(DownwellingKind k);
DownwellingKind downwelling_kind_from_string(std::string_view s);

// Vertical distance to the medium surface. The plane form is
// z_phi(p) = max(0, surface_height - p.y); the grid form is a softplus voxel
// field, so both are non-negative everywhere.
struct DownwellingField {
  DownwellingKind kind = DownwellingKind::kPlane;
  double surface_height = 1.0;
  VoxelField grid;

  double value(const Vec3& p) const;
};

struct FieldSet {
  VoxelField object_density;  // 1 channel, softplus
  VoxelField object_color;    // 3 channels, sigmoid
  VoxelField media_density;   // 1 channel, softplus
  MediumParams medium;
  DownwellingField downwelling;

  struct Options {
    int object_resolution = 32;
    int media_resolution = 16;
    double density_scale = 1.0;      // multiplier on the object density softplus
    double media_scale = 1.0;        // multiplier on the media density softplus
    double initial_density = 0.05;   // activated object density at start
    double initial_media = 1.0;      // activated media density at start
    MediumMode mode = MediumMode::kPerRayPooled;
    DownwellingKind downwelling = DownwellingKind::kPlane;
    double surface_height = 1.0;
    int downwelling_resolution = 8;
  };
  static FieldSet make(const Options& options);

  void update_activation();
  // Throws InputError if any constituent invariant is violated.
  void validate() const;
};

// Gradient buffers with the same layout as the FieldSet parameters. Medium
// entries are with respect to the *values* (sigma, phi, surface height), grid
// entries with respect to the raw voxel parameters.
struct FieldGradient {
  std::vector<double> object_density;
  std::vector<double> object_color;
  std::vector<double> media_density;
  std::vector<double> downwelling_grid;
  Spectrum sigma_attn;
  Spectrum sigma_scat;
  Spectrum phi;
  double surface_height = 0.0;

  static FieldGradient zeros_like(const FieldSet& f);
  void set_zero();
  FieldGradient& operator+=(const FieldGradient& o);
  FieldGradient& operator*=(double s);
  // Name of the first parameter group holding a non-finite entry, or empty.
  std::string_view first_non_finite() const;
  double max_abs() const;
};

// Weighted mean of per-sample values. Falls back to the plain mean when every
// weight is zero. Throws InputError on an empty input or mismatched sizes.
double pool_per_ray(std::span<const double> values, std::span<const double> weights);

}  // namespace isomedia
