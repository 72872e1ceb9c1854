// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "isomedia/vec.hpp"

namespace isomedia {

// Row-major, channel-interleaved float image in linear units.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_); }
  bool empty() const { return data_.empty(); }

  std::size_t index(int r, int c, int ch = 0) const {
    return (static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(ch);
  }
  double at(int r, int c, int ch = 0) const { return data_[index(r, c, ch)]; }
  double& at(int r, int c, int ch = 0) { return data_[index(r, c, ch)]; }
  // Channels beyond the image's count read as the last channel.
  Spectrum rgb(int r, int c) const;
  void set_rgb(int r, int c, const Spectrum& s);

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Per-channel mean (first three channels; grey images replicate).
  Spectrum mean() const;
  bool same_shape(const Image& o) const {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
  }

 private:
  int height_ = 0, width_ = 0, channels_ = 0;
  std::vector<double> data_;
};

}  // namespace isomedia
