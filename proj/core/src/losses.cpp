// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isomedia/errors.hpp"

namespace isomedia {

LossWeights LossWeights::for_condition(Condition c) {
  LossWeights w;
  w.preset = c;
  if (c == Condition::kLowlight) {
    w.lambda_comp = 1.0;
    w.lambda_geo = 1e-2;
    w.lambda_mutex = 1e-4;
    w.lambda_trans = 1e-3;
  } else {
    w.lambda_comp = 0.0;
    w.lambda_geo = 1e-2;
    w.lambda_mutex = 1e-4;
    w.lambda_trans = 0.0;
  }
  return w;
}

void LossWeights::validate() const {
  for (double v : {lambda_comp, lambda_geo, lambda_mutex, lambda_trans})
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("loss weights must be finite and >= 0");
}

void SsimCompensation::validate() const {
  if (!(kappa_tilde > 0.0)) throw ConfigError("ssim kappa must be > 0");
  if (!(C1 > 0.0) || !(C2 > 0.0)) throw ConfigError("ssim stability constants must be > 0");
  if (patches < 1) throw ConfigError("ssim needs at least one patch");
  if (patch_size < 1) throw ConfigError("ssim patch size must be positive");
  if (kernel_size < 1 || kernel_size % 2 == 0) throw ConfigError("ssim window must be a positive odd size");
  if (!(kernel_sigma > 0.0)) throw ConfigError("ssim window sigma must be > 0");
}

namespace {

void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InputError(std::string(what) + ": inputs differ in length");
  if (a == 0) throw InputError(std::string(what) + ": empty input");
}

void check_grad(std::span<double> g, std::size_t n, const char* what) {
  if (!g.empty() && g.size() != n) throw InputError(std::string(what) + ": gradient buffer has the wrong size");
}

}  // namespace

double recon_loss(std::span<const double> I_hat, std::span<const double> I, std::span<double> grad) {
  check_same(I_hat.size(), I.size(), "recon_loss");
  check_grad(grad, I.size(), "recon_loss");
  const double inv_n = 1.0 / static_cast<double>(I.size());
  double s = 0.0;
  for (std::size_t i = 0; i < I.size(); ++i) {
    const double den = I_hat[i] + kReconEpsilon;
    const double r = (I_hat[i] - I[i]) / den;
    s += r * r;
    if (!grad.empty()) grad[i] = 2.0 * r / den * inv_n;
  }
  return s * inv_n;
}

double geo_loss(std::span<const double> D_hat, std::span<const double> D_tilde, std::span<double> grad) {
  check_same(D_hat.size(), D_tilde.size(), "geo_loss");
  check_grad(grad, D_hat.size(), "geo_loss");
  const std::size_t n = D_hat.size();
  const auto [mn_it, mx_it] = std::minmax_element(D_hat.begin(), D_hat.end());
  const std::size_t imin = static_cast<std::size_t>(mn_it - D_hat.begin());
  const std::size_t imax = static_cast<std::size_t>(mx_it - D_hat.begin());
  const double lo = *mn_it, range = *mx_it - *mn_it;
  const double inv_n = 1.0 / static_cast<double>(n);
  double s = 0.0;
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  if (!(range > 1e-12)) {
    for (std::size_t i = 0; i < n; ++i) s += D_tilde[i] * D_tilde[i];
    return s * inv_n;
  }
  double d_lo = 0.0, d_range = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (D_hat[i] - lo) / range;
    const double r = x - D_tilde[i];
    s += r * r;
    if (!grad.empty()) {
      const double g = 2.0 * r * inv_n;
      grad[i] += g / range;
      d_lo -= g / range;
      d_range -= g * x / range;
    }
  }
  if (!grad.empty()) {
    grad[imin] += d_lo - d_range;
    grad[imax] += d_range;
  }
  return s * inv_n;
}

double mutex_loss(std::span<const double> sigma_obj, std::span<const double> sigma_med, std::span<double> grad_obj,
                  std::span<double> grad_med) {
  check_same(sigma_obj.size(), sigma_med.size(), "mutex_loss");
  check_grad(grad_obj, sigma_obj.size(), "mutex_loss");
  check_grad(grad_med, sigma_obj.size(), "mutex_loss");
  const double inv_n = 1.0 / static_cast<double>(sigma_obj.size());
  double s = 0.0;
  for (std::size_t i = 0; i < sigma_obj.size(); ++i) {
    const double ex = std::max(0.0, sigma_obj[i] - kMutexThreshold);
    s += ex * sigma_med[i];
    if (!grad_obj.empty()) grad_obj[i] = ex > 0.0 ? sigma_med[i] * inv_n : 0.0;
    if (!grad_med.empty()) grad_med[i] = ex * inv_n;
  }
  return s * inv_n;
}

double media_trans_loss(std::span<const double> T, std::span<const double> T_tilde, std::span<double> grad) {
  check_same(T.size(), T_tilde.size(), "media_trans_loss");
  check_grad(grad, T.size(), "media_trans_loss");
  const double inv_n = 1.0 / static_cast<double>(T.size());
  double s = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const double r = T[i] - T_tilde[i];
    s += r * r;
    if (!grad.empty()) grad[i] = 2.0 * r * inv_n;
  }
  return s * inv_n;
}

double mono_loss(std::span<const double> sigma, std::span<const std::size_t> offsets, std::span<double> grad) {
  if (sigma.empty()) throw InputError("mono_loss: empty input");
  if (offsets.size() < 2 || offsets.front() != 0 || offsets.back() != sigma.size())
    throw InputError("mono_loss: offsets do not cover the samples");
  check_grad(grad, sigma.size(), "mono_loss");
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(sigma.size());
  double s = 0.0;
  for (std::size_t r = 0; r + 1 < offsets.size(); ++r) {
    if (offsets[r + 1] < offsets[r]) throw InputError("mono_loss: offsets must be ascending");
    for (std::size_t i = offsets[r] + 1; i < offsets[r + 1]; ++i) {
      const double d = sigma[i] - sigma[i - 1];
      if (d > 0.0) {
        s += d;
        if (!grad.empty()) {
          grad[i] += inv_n;
          grad[i - 1] -= inv_n;
        }
      }
    }
  }
  return s * inv_n;
}

double mono_loss(std::span<const double> sigma_med_along_ray) {
  const std::size_t off[2] = {0, sigma_med_along_ray.size()};
  return mono_loss(sigma_med_along_ray, off);
}

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> g(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  const int r = size / 2;
  double s = 0.0;
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) {
      const double v = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
      g[static_cast<std::size_t>((y + r) * size + (x + r))] = v;
      s += v;
    }
  for (double& v : g) v /= s;
  return g;
}

}  // namespace

double comp_ssim_index(const PatchPair& p, const Spectrum& m_I, const SsimCompensation& comp,
                       std::span<double> grad_J) {
  const int n = p.size;
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * 3;
  if (n < 1 || p.J.size() != total || p.I.size() != total) throw InputError("ssim patch has inconsistent size");
  check_grad(grad_J, total, "comp_ssim_index");
  int k = std::min(comp.kernel_size, n);
  if (k % 2 == 0) --k;
  const std::vector<double> g = gaussian_window(k, comp.kernel_sigma);
  const int outs = n - k + 1;
  const double kap = comp.kappa_tilde;
  const double inv_count = 1.0 / (static_cast<double>(outs) * outs * 3.0);
  if (!grad_J.empty()) std::fill(grad_J.begin(), grad_J.end(), 0.0);
  auto idx = [n](int y, int x, int c) { return (static_cast<std::size_t>(y) * n + x) * 3 + c; };

  double acc = 0.0;
  for (int oy = 0; oy < outs; ++oy)
    for (int ox = 0; ox < outs; ++ox)
      for (int c = 0; c < 3; ++c) {
        double mj = 0, mi = 0, ejj = 0, eii = 0, eji = 0;
        for (int y = 0; y < k; ++y)
          for (int x = 0; x < k; ++x) {
            const double w = g[static_cast<std::size_t>(y * k + x)];
            const double j = p.J[idx(oy + y, ox + x, c)], i = p.I[idx(oy + y, ox + x, c)];
            mj += w * j;
            mi += w * i;
            ejj += w * j * j;
            eii += w * i * i;
            eji += w * j * i;
          }
        const double vj = ejj - mj * mj;
        const double vi = eii - mi * mi;
        const double cji = eji - mj * mi;
        const double nu = (mi - m_I[static_cast<std::size_t>(c)]) * kap + comp.nu_tilde;
        const double l_num = 2.0 * mj * nu + comp.C1;
        const double l_den = mj * mj + nu * nu + comp.C1;
        const double s_num = 2.0 * kap * cji + comp.C2;
        const double s_den = vj + kap * kap * vi + comp.C2;
        const double L = l_num / l_den, S = s_num / s_den;
        acc += L * S;
        if (grad_J.empty()) continue;
        const double dL_dmj = (2.0 * nu * l_den - l_num * 2.0 * mj) / (l_den * l_den);
        const double dS_dvj = -s_num / (s_den * s_den);
        const double dS_dcji = 2.0 * kap / s_den;
        // vj = ejj - mj^2, cji = eji - mj * mi.
        const double d_mj = (S * dL_dmj + L * (dS_dvj * (-2.0 * mj) + dS_dcji * (-mi))) * inv_count;
        const double d_ejj = L * dS_dvj * inv_count;
        const double d_eji = L * dS_dcji * inv_count;
        for (int y = 0; y < k; ++y)
          for (int x = 0; x < k; ++x) {
            const double w = g[static_cast<std::size_t>(y * k + x)];
            const std::size_t q = idx(oy + y, ox + x, c);
            grad_J[q] += w * (d_mj + 2.0 * d_ejj * p.J[q] + d_eji * p.I[q]);
          }
      }
  return acc * inv_count;
}

namespace {

// m_I is one value shared by the channels, so the compensation shifts
// luminance without changing the colour balance.
Spectrum batch_mean(std::span<const PatchPair> patches) {
  double m = 0.0, count = 0.0;
  for (const PatchPair& p : patches) {
    for (double v : p.I) m += v;
    count += static_cast<double>(p.I.size());
  }
  return Spectrum(count > 0.0 ? m / count : 0.0);
}

}  // namespace

double comp_ssim_loss(std::span<const PatchPair> patches, const SsimCompensation& comp,
                      std::vector<std::vector<double>>* grads) {
  if (patches.empty()) throw InputError("comp_ssim_loss: no patches");
  const Spectrum m_I = batch_mean(patches);
  const double inv_h = 1.0 / static_cast<double>(patches.size());
  if (grads) grads->assign(patches.size(), {});
  double s = 0.0;
  for (std::size_t h = 0; h < patches.size(); ++h) {
    if (grads) {
      (*grads)[h].assign(patches[h].J.size(), 0.0);
      s += comp_ssim_index(patches[h], m_I, comp, (*grads)[h]);
      for (double& v : (*grads)[h]) v *= -inv_h;
    } else {
      s += comp_ssim_index(patches[h], m_I, comp);
    }
  }
  return 1.0 - s * inv_h;
}

double comp_ssim_loss(const Image& J_hat, const Image& I, const SsimCompensation& comp, CounterRng& rng) {
  if (!J_hat.same_shape(I)) throw InputError("comp_ssim_loss: images differ in shape");
  comp.validate();
  const int size = std::min({comp.patch_size, I.height(), I.width()});
  std::vector<PatchPair> patches(static_cast<std::size_t>(comp.patches));
  for (PatchPair& p : patches) {
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(I.height() - size + 1)));
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(I.width() - size + 1)));
    p.size = size;
    p.J.resize(static_cast<std::size_t>(size) * size * 3);
    p.I.resize(p.J.size());
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const Spectrum j = J_hat.rgb(y0 + y, x0 + x), i = I.rgb(y0 + y, x0 + x);
        for (std::size_t c = 0; c < 3; ++c) {
          p.J[(static_cast<std::size_t>(y) * size + x) * 3 + c] = j[c];
          p.I[(static_cast<std::size_t>(y) * size + x) * 3 + c] = i[c];
        }
      }
  }
  return comp_ssim_loss(patches, comp);
}

double total_loss(const LossParts& p, const LossWeights& w) {
  return p.recon + w.lambda_comp * p.comp + w.lambda_geo * p.geo + w.lambda_mutex * p.mutex +
         w.lambda_trans * (p.media + p.mono);
}

}  // namespace isomedia
