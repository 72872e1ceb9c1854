// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isomedia/image.hpp"
#include "isomedia/radiative.hpp"
#include "isomedia/rng.hpp"
#include "isomedia/vec.hpp"

namespace isomedia {

inline constexpr double kReconEpsilon = 1e-3;
inline constexpr double kMutexThreshold = 0.1;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

struct LossWeights {
  double lambda_comp = 0.0;
  double lambda_geo = 1e-2;
  double lambda_mutex = 1e-4;
  double lambda_trans = 0.0;
  Condition preset = Condition::kUnderwater;

  static LossWeights for_condition(Condition c);
  // Throws ConfigError on a negative weight.
  void validate() const;
};

struct SsimCompensation {
  double nu_tilde = 0.5;
  double kappa_tilde = 1.0;
  int kernel_size = 11;
  double kernel_sigma = 1.5;
  double C1 = kSsimC1;
  double C2 = kSsimC2;
  int patches = 4;
  int patch_size = 32;

  void validate() const;
};

// All losses return the scalar value. When a gradient span is non-empty it is
// overwritten with d loss / d input.

// mean(((I_hat - I) / (sg(I_hat) + eps))^2); the denominator is constant.
double recon_loss(std::span<const double> I_hat, std::span<const double> I, std::span<double> grad = {});

// Min-max normalises D_hat (a constant map normalises to 0) and returns the
// mean squared difference to D_tilde. The gradient flows through the min and
// max as well.
double geo_loss(std::span<const double> D_hat, std::span<const double> D_tilde, std::span<double> grad = {});

// mean(max(0, sigma_obj - eta) * sigma_med).
double mutex_loss(std::span<const double> sigma_obj, std::span<const double> sigma_med,
                  std::span<double> grad_obj = {}, std::span<double> grad_med = {});

// mean |T - T_tilde|^2.
double media_trans_loss(std::span<const double> T, std::span<const double> T_tilde, std::span<double> grad = {});

// sum_k sum_i ReLU(sigma_{k,i} - sigma_{k,i-1}) / (total sample count). Rays
// are stored back to back; offsets has one entry per ray plus the end.
double mono_loss(std::span<const double> sigma_med, std::span<const std::size_t> offsets,
                 std::span<double> grad = {});
// Single-ray convenience form.
double mono_loss(std::span<const double> sigma_med_along_ray);

// One square patch, channel-interleaved RGB, row-major.
struct PatchPair {
  int size = 0;
  std::vector<double> J;  // rendered clean radiance
  std::vector<double> I;  // observation
};

// Compensated SSIM index of one patch averaged over valid window positions
// and channels. m_I is the mean observation over the batch (the loss uses
// the same value for every channel). The
// Gaussian window shrinks to the patch when the patch is smaller than it.
double comp_ssim_index(const PatchPair& p, const Spectrum& m_I, const SsimCompensation& comp,
                       std::span<double> grad_J = {});

// 1 - mean over patches of the compensated index. grads, when non-null, gets
// one gradient vector per patch.
double comp_ssim_loss(std::span<const PatchPair> patches, const SsimCompensation& comp,
                      std::vector<std::vector<double>>* grads = nullptr);

// Image form: draws comp.patches random patches of comp.patch_size (clipped
// to the image) at identical locations in both images.
double comp_ssim_loss(const Image& J_hat, const Image& I, const SsimCompensation& comp, CounterRng& rng);

struct LossParts {
  double recon = 0.0;
  double comp = 0.0;
  double geo = 0.0;
  double mutex = 0.0;
  double media = 0.0;
  double mono = 0.0;
};

double total_loss(const LossParts& parts, const LossWeights& w);

}  // namespace isomedia
