// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "isomedia/vec.hpp"

namespace isomedia {

// r(t) = origin + t * direction, restricted to [t_near, t_far].
struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  double t_near = 0.0;
  double t_far = 1.0;

  Vec3 at(double t) const { return origin + direction * t; }
  // Throws InputError when the invariants do not hold.
  void validate() const;
};

// Rigid transform taking camera-frame points into the world frame.
struct Pose {
  Mat3 rotation;
  Vec3 translation;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 rotate(const Vec3& v) const { return rotation * v; }
  // Throws ConfigError when the rotation is not orthonormal to 1e-8.
  void validate() const;
};

enum class CameraKind { kPinhole, kOrthographic };

// Pixel (row, col) maps to camera-frame coordinates with +x right, +y up and
// the optical axis along -z. Pinhole intrinsics are in pixels; orthographic
// extents are the full image footprint in scene units.
struct CameraModel {
  CameraKind kind = CameraKind::kPinhole;
  double fx = 1.0, fy = 1.0, cx = 0.5, cy = 0.5;
  double extent_x = 1.0, extent_y = 1.0;
  Pose pose;

  static CameraModel pinhole(double focal, int width, int height, Pose pose);
  static CameraModel orthographic(double extent_x, double extent_y, Pose pose);

  // Throws ConfigError on non-positive intrinsics or a non-orthonormal pose.
  void validate() const;
  // Unclipped ray through the centre of pixel (row, col).
  Ray pixel_ray(int row, int col, int width, int height) const;
};

struct ImageSize {
  int height = 1;
  int width = 1;
};

// Row-major rays, one per pixel.
struct RayBatch {
  ImageSize size;
  std::vector<Ray> rays;

  const Ray& at(int row, int col) const { return rays[static_cast<std::size_t>(row * size.width + col)]; }
};

// Parametric overlap of an infinite ray with the scene cube [0,1]^3, clipped
// to t >= 0. Empty when the ray misses the cube.
std::optional<std::pair<double, double>> intersect_unit_cube(const Vec3& origin, const Vec3& direction);

// One ray per pixel, bounds clipped to the scene cube. Throws ConfigError on
// invalid intrinsics or when a pixel ray misses the cube entirely.
RayBatch generate_rays(const CameraModel& camera, ImageSize size);

}  // namespace isomedia
