// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "isomedia/image.hpp"

namespace isomedia {

inline constexpr double kPsnrCap = 99.0;

// Peak 1.0; identical images give kPsnrCap. Throws InputError on a shape
// mismatch.
double psnr(const Image& a, const Image& b);

// Gaussian-window SSIM (11x11, sigma 1.5, valid region) averaged over
// channels; the window shrinks for images smaller than it.
double ssim(const Image& a, const Image& b);

double mse(const Image& a, const Image& b);

}  // namespace isomedia
