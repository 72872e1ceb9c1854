// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "isomedia/errors.hpp"
#include "isomedia/losses.hpp"

namespace isomedia {

double mse(const Image& a, const Image& b) {
  if (!a.same_shape(b) || a.empty()) throw InputError("metrics need two non-empty images of the same shape");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.data().size());
}

double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, -10.0 * std::log10(m));
}

double ssim(const Image& a, const Image& b) {
  mse(a, b);  // shape check
  // Square tiles through the shared SSIM kernel; with nu_tilde = 0 and m_I = 0
  // the compensation is the identity.
  SsimCompensation plain;
  plain.kappa_tilde = 1.0;
  plain.nu_tilde = 0.0;
  const int H = a.height(), W = a.width();
  int k = std::min({plain.kernel_size, H, W});
  if (k % 2 == 0) --k;
  // Evaluate at every valid window position by sliding square tiles of side
  // k, each contributing exactly one window.
  double s = 0.0;
  int count = 0;
  PatchPair p;
  p.size = k;
  p.J.resize(static_cast<std::size_t>(k) * k * 3);
  p.I.resize(p.J.size());
  for (int y0 = 0; y0 + k <= H; ++y0)
    for (int x0 = 0; x0 + k <= W; ++x0) {
      for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x) {
          const Spectrum u = a.rgb(y0 + y, x0 + x), v = b.rgb(y0 + y, x0 + x);
          for (std::size_t c = 0; c < 3; ++c) {
            p.J[(static_cast<std::size_t>(y) * k + x) * 3 + c] = u[c];
            p.I[(static_cast<std::size_t>(y) * k + x) * 3 + c] = v[c];
          }
        }
      s += comp_ssim_index(p, Spectrum(0.0), plain);
      ++count;
    }
  return s / count;
}

}  // namespace isomedia
