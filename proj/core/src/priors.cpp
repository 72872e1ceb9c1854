// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "isomedia/errors.hpp"
#include "isomedia/io.hpp"

namespace isomedia {

Spectrum estimate_ambient(const Image& I) {
  if (I.empty()) throw InputError("ambient estimation needs a non-empty image");
  const std::size_t n = I.pixel_count();
  std::vector<double> bright(n);
  for (int r = 0; r < I.height(); ++r)
    for (int c = 0; c < I.width(); ++c)
      bright[static_cast<std::size_t>(r * I.width() + c)] = I.rgb(r, c).max_component();
  const std::size_t k = std::max<std::size_t>(1, n / 1000);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(),
                   [&](std::size_t a, std::size_t b) { return bright[a] < bright[b] || (bright[a] == bright[b] && a < b); });
  Spectrum acc;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t p = order[i];
    acc += I.rgb(static_cast<int>(p) / I.width(), static_cast<int>(p) % I.width());
  }
  return acc / static_cast<double>(k);
}

IlluminationMap bcp_map(const Image& I, int patch_size, const Spectrum& ambient) {
  if (patch_size < 1 || patch_size % 2 == 0) throw ConfigError("BCP patch size must be a positive odd integer");
  for (std::size_t c = 0; c < 3; ++c)
    if (!(ambient[c] < 1.0)) throw ConfigError("BCP ambient must be below 1 in every channel");
  if (I.empty()) throw InputError("BCP needs a non-empty image");
  const int H = I.height(), W = I.width(), r = patch_size / 2;

  // Per-pixel normalised bright channel, then a separable max filter.
  Image per(H, W, 1);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const Spectrum v = I.rgb(y, x);
      double m = -INFINITY;
      for (std::size_t c = 0; c < 3; ++c) m = std::max(m, (v[c] - ambient[c]) / (1.0 - ambient[c]));
      per.at(y, x) = m;
    }
  Image rows(H, W, 1);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double m = -INFINITY;
      for (int d = -r; d <= r; ++d) m = std::max(m, per.at(y, std::clamp(x + d, 0, W - 1)));
      rows.at(y, x) = m;
    }
  IlluminationMap out;
  out.patch_size = patch_size;
  out.ambient = ambient;
  out.values = Image(H, W, 1);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double m = -INFINITY;
      for (int d = -r; d <= r; ++d) m = std::max(m, rows.at(std::clamp(y + d, 0, H - 1), x));
      out.values.at(y, x) = std::clamp(m, 0.0, 1.0);
    }
  return out;
}

DepthPrior normalize_depth(const Image& depth) {
  if (depth.empty()) throw InputError("depth prior is empty");
  DepthPrior p;
  p.values = Image(depth.height(), depth.width(), 1);
  double lo = INFINITY, hi = -INFINITY;
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) {
      const double v = depth.at(y, x, 0);
      if (!std::isfinite(v)) throw InputError("depth prior contains a non-finite value");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const double range = hi - lo;
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x)
      p.values.at(y, x) = range > 0.0 ? std::clamp((depth.at(y, x, 0) - lo) / range, 0.0, 1.0) : 0.5;
  return p;
}

DepthPrior load_depth_prior(const std::filesystem::path& path) {
  const Image raw = read_pfm(path);
  for (double v : raw.data())
    if (!std::isfinite(v)) throw IoError("depth prior '" + path.string() + "' contains non-finite values");
  return normalize_depth(raw);
}

}  // namespace isomedia
