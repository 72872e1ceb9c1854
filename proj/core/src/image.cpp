// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/image.hpp"

#include <algorithm>

#include "isomedia/errors.hpp"

namespace isomedia {

Image::Image(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1 || channels < 1) throw InputError("image dimensions must be positive");
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

Spectrum Image::rgb(int r, int c) const {
  Spectrum s;
  for (int ch = 0; ch < 3; ++ch) s[static_cast<std::size_t>(ch)] = at(r, c, std::min(ch, channels_ - 1));
  return s;
}

void Image::set_rgb(int r, int c, const Spectrum& s) {
  for (int ch = 0; ch < std::min(channels_, 3); ++ch) at(r, c, ch) = s[static_cast<std::size_t>(ch)];
}

Spectrum Image::mean() const {
  Spectrum m;
  if (empty()) return m;
  for (int r = 0; r < height_; ++r)
    for (int c = 0; c < width_; ++c) m += rgb(r, c);
  return m / static_cast<double>(pixel_count());
}

}  // namespace isomedia
