// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "isomedia/image.hpp"
#include "isomedia/vec.hpp"

namespace isomedia {

inline constexpr int kDefaultBcpPatch = 15;

struct IlluminationMap {
  Image values;  // single channel, in [0, 1]
  int patch_size = kDefaultBcpPatch;
  Spectrum ambient;
};

struct DepthPrior {
  Image values;  // single channel, in [0, 1]
};

// Per-channel mean over the darkest 0.1% of pixels (at least one) ranked by
// their per-pixel bright channel max_c I^c.
Spectrum estimate_ambient(const Image& I);

// Bright-channel illumination estimate
//   T_P = max_c max_{q in P} (I_q^c - B^c) / (1 - B^c)
// over a square patch with edge-replicated borders, clamped to [0, 1].
// Throws ConfigError if ambient >= 1 in any channel or the patch size is
// not a positive odd integer.
IlluminationMap bcp_map(const Image& I, int patch_size, const Spectrum& ambient);

// Min-max normalisation to [0, 1]; a constant map becomes 0.5 everywhere.
// Multi-channel input is reduced to its first channel.
DepthPrior normalize_depth(const Image& depth);

// Reads a float image and normalises it. Throws IoError on a missing file or
// any non-finite value.
DepthPrior load_depth_prior(const std::filesystem::path& path);

}  // namespace isomedia
