// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "isomedia/camera.hpp"
#include "isomedia/field_set.hpp"
#include "isomedia/image.hpp"
#include "isomedia/radiative.hpp"

namespace isomedia {

enum class Texture { kSolid, kSmooth, kHueWave };

std::string_view to_string(Texture t);
Texture texture_from_string(std::string_view s);

// Opaque axis-aligned box with a procedural clean colour.
struct SceneBox {
  Vec3 lo, hi;
  Spectrum color{0.8, 0.8, 0.8};
  Texture texture = Texture::kSolid;
  double frequency = 2.0;  // cycles per scene unit

  Spectrum albedo(const Vec3& p) const;
};

// Grey absorbing box used to build piecewise low-light illumination.
struct SceneAbsorber {
  Vec3 lo, hi;
  double sigma = 1.0;
};

struct OracleScene {
  Condition condition = Condition::kUnderwater;
  std::vector<SceneBox> boxes;
  std::vector<SceneAbsorber> absorbers;
  Spectrum sigma_attn{0.5, 0.3, 0.2};
  Spectrum sigma_scat{0.3, 0.25, 0.2};
  Spectrum ambient{0.6, 0.6, 0.6};  // haze airlight; unused otherwise
  Spectrum phi{1.0, 1.0, 1.0};
  double water_surface_height = 1.3;
  std::vector<CameraModel> cameras;
  ImageSize image_size{32, 32};

  // Throws ConfigError when geometry leaves the unit cube, a box is
  // inverted, or (underwater) the surface is below any geometry.
  void validate() const;
};

struct SceneHit {
  bool hit = false;
  double t = 0.0;  // ray parameter of the first surface, t_far on a miss
  Vec3 point;
  Spectrum J;
};

SceneHit trace_scene(const OracleScene& scene, const Ray& ray);

// Optical depth of the absorber boxes over [t0, t1] of a ray.
double absorber_depth(const OracleScene& scene, const Ray& ray, double t0, double t1);

struct GroundTruthView {
  Image I;      // degraded observation
  Image J;      // clean radiance
  Image depth;  // ray parameter of the visible surface (t_far on a miss)
  Image z_phi;  // downwelling depth averaged along the visible segment
  Image T;      // direct transmittance per channel
  Image B;      // backscatter colour per channel
};

struct GroundTruth {
  std::vector<GroundTruthView> views;
};

// Closed-form per-pixel degradation. The medium fills the scene cube from the
// ray's cube entry to the visible surface.
GroundTruth generate(const OracleScene& scene);

// Ground-truth scene as voxel fields: density `object_density` inside boxes,
// albedo at every node and the scene's medium parameters. Media density is 1,
// except in low light where it holds the absorbers and background attenuation.
FieldSet voxelize(const OracleScene& scene, const FieldSet::Options& options, double object_density);

}  // namespace isomedia
