// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isomedia/errors.hpp"

namespace isomedia {

void Ray::validate() const {
  if (!is_finite(origin) || !is_finite(direction))
    throw InputError("ray has non-finite origin or direction");
  if (std::abs(length(direction) - 1.0) > 1e-9) throw InputError("ray direction is not unit length");
  if (!(t_near >= 0.0 && t_near < t_far)) throw InputError("ray bounds must satisfy 0 <= t_near < t_far");
}

void Pose::validate() const {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double d = 0.0;
      for (int k = 0; k < 3; ++k) d += rotation(k, i) * rotation(k, j);
      if (std::abs(d - (i == j ? 1.0 : 0.0)) > 1e-8) throw ConfigError("pose rotation is not orthonormal");
    }
  }
  if (!is_finite(translation)) throw ConfigError("pose translation is not finite");
}

CameraModel CameraModel::pinhole(double focal, int width, int height, Pose pose) {
  CameraModel c;
  c.kind = CameraKind::kPinhole;
  c.fx = c.fy = focal;
  c.cx = 0.5 * width;
  c.cy = 0.5 * height;
  c.pose = pose;
  return c;
}

CameraModel CameraModel::orthographic(double extent_x, double extent_y, Pose pose) {
  CameraModel c;
  c.kind = CameraKind::kOrthographic;
  c.extent_x = extent_x;
  c.extent_y = extent_y;
  c.pose = pose;
  return c;
}

void CameraModel::validate() const {
  if (kind == CameraKind::kPinhole) {
    if (!(fx > 0.0 && fy > 0.0) || !std::isfinite(cx) || !std::isfinite(cy))
      throw ConfigError("pinhole intrinsics must have positive focal lengths");
  } else if (!(extent_x > 0.0 && extent_y > 0.0)) {
    throw ConfigError("orthographic extents must be positive");
  }
  pose.validate();
}

Ray CameraModel::pixel_ray(int row, int col, int width, int height) const {
  Ray r;
  const double u = col + 0.5;
  const double v = row + 0.5;
  if (kind == CameraKind::kPinhole) {
    const Vec3 d_cam{(u - cx) / fx, -(v - cy) / fy, -1.0};
    r.origin = pose.translation;
    r.direction = normalize(pose.rotate(d_cam));
  } else {
    const Vec3 o_cam{(u / width - 0.5) * extent_x, -(v / height - 0.5) * extent_y, 0.0};
    r.origin = pose.apply(o_cam);
    r.direction = normalize(pose.rotate(Vec3{0.0, 0.0, -1.0}));
  }
  r.t_near = 0.0;
  r.t_far = std::numeric_limits<double>::infinity();
  return r;
}

std::optional<std::pair<double, double>> intersect_unit_cube(const Vec3& origin, const Vec3& direction) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < 3; ++a) {
    const double o = origin[a];
    const double d = direction[a];
    if (std::abs(d) < 1e-15) {
      if (o < 0.0 || o > 1.0) return std::nullopt;
      continue;
    }
    double ta = (0.0 - o) / d;
    double tb = (1.0 - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (!(t1 > t0)) return std::nullopt;
  return std::make_pair(t0, t1);
}

RayBatch generate_rays(const CameraModel& camera, ImageSize size) {
  if (size.width < 1 || size.height < 1) throw ConfigError("image size must be at least 1x1");
  camera.validate();
  RayBatch batch;
  batch.size = size;
  batch.rays.reserve(static_cast<std::size_t>(size.width) * size.height);
  for (int row = 0; row < size.height; ++row) {
    for (int col = 0; col < size.width; ++col) {
      Ray r = camera.pixel_ray(row, col, size.width, size.height);
      const auto hit = intersect_unit_cube(r.origin, r.direction);
      if (!hit)
        throw ConfigError("pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                          ") ray misses the scene cube");
      r.t_near = hit->first;
      r.t_far = hit->second;
      batch.rays.push_back(r);
    }
  }
  return batch;
}

}  // namespace isomedia
