// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace isomedia {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalize(const Vec3& v) { return v / length(v); }
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Linear RGB triple. The channel index stands in for wavelength, so every
// per-wavelength quantity (radiance, attenuation, sunlight) uses this type.
// Arithmetic is channel-wise.
struct Spectrum {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  constexpr Spectrum() = default;
  constexpr explicit Spectrum(double v) : c{v, v, v} {}
  constexpr Spectrum(double r, double g, double b) : c{r, g, b} {}

  static constexpr std::size_t size() { return 3; }
  constexpr double operator[](std::size_t i) const { return c[i]; }
  constexpr double& operator[](std::size_t i) { return c[i]; }

  constexpr Spectrum operator+(const Spectrum& o) const { return {c[0] + o[0], c[1] + o[1], c[2] + o[2]}; }
  constexpr Spectrum operator-(const Spectrum& o) const { return {c[0] - o[0], c[1] - o[1], c[2] - o[2]}; }
  constexpr Spectrum operator*(const Spectrum& o) const { return {c[0] * o[0], c[1] * o[1], c[2] * o[2]}; }
  constexpr Spectrum operator/(const Spectrum& o) const { return {c[0] / o[0], c[1] / o[1], c[2] / o[2]}; }
  constexpr Spectrum operator*(double s) const { return {c[0] * s, c[1] * s, c[2] * s}; }
  constexpr Spectrum operator/(double s) const { return {c[0] / s, c[1] / s, c[2] / s}; }
  constexpr Spectrum& operator+=(const Spectrum& o) {
    for (std::size_t i = 0; i < 3; ++i) c[i] += o[i];
    return *this;
  }
  constexpr Spectrum& operator-=(const Spectrum& o) {
    for (std::size_t i = 0; i < 3; ++i) c[i] -= o[i];
    return *this;
  }
  constexpr Spectrum& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  constexpr bool operator==(const Spectrum&) const = default;

  constexpr double sum() const { return c[0] + c[1] + c[2]; }
  constexpr double average() const { return sum() / 3.0; }
  constexpr double max_component() const {
    return c[0] > c[1] ? (c[0] > c[2] ? c[0] : c[2]) : (c[1] > c[2] ? c[1] : c[2]);
  }
  constexpr double min_component() const {
    return c[0] < c[1] ? (c[0] < c[2] ? c[0] : c[2]) : (c[1] < c[2] ? c[1] : c[2]);
  }
  bool is_valid() const {
    for (double v : c)
      if (!std::isfinite(v) || v < 0.0) return false;
    return true;
  }
};

constexpr Spectrum operator*(double s, const Spectrum& v) { return v * s; }
inline Spectrum exp(const Spectrum& s) { return {std::exp(s[0]), std::exp(s[1]), std::exp(s[2])}; }

// Row-major 3x3 matrix; used for camera rotations.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  constexpr double operator()(int r, int col) const { return m[static_cast<std::size_t>(r * 3 + col)]; }
  constexpr double& operator()(int r, int col) { return m[static_cast<std::size_t>(r * 3 + col)]; }
  constexpr Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  static Mat3 rotation_y(double radians) {
    const double c = std::cos(radians), s = std::sin(radians);
    Mat3 r;
    r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
    return r;
  }
  static Mat3 rotation_x(double radians) {
    const double c = std::cos(radians), s = std::sin(radians);
    Mat3 r;
    r.m = {1, 0, 0, 0, c, -s, 0, s, c};
    return r;
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = 0;
        for (int k = 0; k < 3; ++k) acc += (*this)(i, k) * o(k, j);
        r(i, j) = acc;
      }
    return r;
  }
};

}  // namespace isomedia
