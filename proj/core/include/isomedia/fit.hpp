// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isomedia/camera.hpp"
#include "isomedia/field_set.hpp"
#include "isomedia/image.hpp"
#include "isomedia/losses.hpp"
#include "isomedia/radiative.hpp"
#include "isomedia/samples.hpp"

namespace isomedia {

struct FitConfig {
  int steps = 2000;
  double lr_init = 1e-2;
  double lr_final = 1e-4;
  int batch_rays = 1024;
  Condition condition = Condition::kUnderwater;
  std::uint64_t seed = 0;
  int n_obj = 64;
  int n_add = 32;
  LossWeights weights = LossWeights::for_condition(Condition::kUnderwater);
  SsimCompensation ssim;
  double divergence_threshold = 1e6;
  int threads = 0;  // 0: default_thread_count()
  int bcp_patch = 15;
  bool bcp_full_ambient = false;  // default approximates B ~ 0
  double bcp_gamma = 1.0;         // 1: prior on linear intensities; 2.2: on display-encoded ones
  bool learn_medium = true;       // sigma_attn, sigma_scat
  bool learn_media = true;        // media density grid
  bool learn_phi = true;
  bool learn_surface = true;      // plane height or downwelling grid
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  // Desk-scale defaults for a condition.
  static FitConfig for_condition(Condition c);
  // The long schedule (25000 steps, 4096-ray batches).
  static FitConfig full_profile(Condition c);
  // Throws ConfigError when an invariant fails.
  void validate() const;
};

struct FitView {
  CameraModel camera;
  Image I;                    // observation, 3 channels
  Image depth_prior;          // optional, 1 channel in [0, 1]
  Image transmittance_prior;  // optional, 1 channel; BCP is used when empty
};

struct FitData {
  ImageSize size;
  std::vector<FitView> views;
  // Throws InputError on fewer than two views or mismatched shapes.
  void validate() const;
};

struct BatchRay {
  int view = 0;
  int row = 0;
  int col = 0;
};

// Rays of one optimisation step. In patch mode the rays are laid out patch
// after patch, each patch row-major.
struct Batch {
  std::vector<BatchRay> rays;
  int patch_size = 0;
  int patch_count = 0;
};

Batch draw_batch(const FitData& data, const FitConfig& cfg, int iteration);

// Sample positions for every batch ray (detached from the parameters).
std::vector<SampleSet> sample_batch(const FitData& data, const FieldSet& field, const Batch& batch,
                                    const FitConfig& cfg, int iteration);

struct BatchEvaluation {
  LossParts parts;
  double total = 0.0;
  FieldGradient grad;  // empty unless requested
};

// Losses for one batch on fixed samples, with the exact gradient of the
// weighted total when want_grad is set. Throws NumericError naming the first
// parameter group with a non-finite gradient.
BatchEvaluation evaluate_batch(const FitData& data, const FieldSet& field, const Batch& batch,
                               std::span<const SampleSet> samples, const FitConfig& cfg, bool want_grad);

// Optimiser view of the parameters: raw grid values, then log sigma_attn,
// log sigma_scat, log phi and the surface height.
std::vector<double> pack_parameters(const FieldSet& field);
void unpack_parameters(std::span<const double> params, FieldSet& field);
std::vector<double> pack_gradient(const FieldGradient& grad, const FieldSet& field, const FitConfig& cfg);

struct HistoryRow {
  int step = 0;
  double lr = 0.0;
  LossParts parts;
  double total = 0.0;
  double grad_max = 0.0;
};

struct FitResult {
  FieldSet field;
  std::vector<HistoryRow> history;
  bool diverged = false;
  std::string message;
};

double learning_rate(const FitConfig& cfg, int step);

// Adam over pack_parameters with a log-linear learning-rate decay. Zero
// steps return the initial field unchanged. Divergence (total above the
// threshold or non-finite) stops the run with diverged set.
FitResult fit(const FitData& data, FieldSet init, const FitConfig& cfg,
              const std::function<void(const HistoryRow&)>& on_step = {});

// Per-view transmittance priors derived from the observations with the
// bright channel prior.
std::vector<Image> bcp_priors(const FitData& data, const FitConfig& cfg);

}  // namespace isomedia
