// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "isomedia/camera.hpp"
#include "isomedia/field_set.hpp"
#include "isomedia/radiative.hpp"
#include "isomedia/samples.hpp"

namespace isomedia {

// Optical-depth increments are clamped to this before exponentiation.
inline constexpr double kMaxOpticalDepth = 80.0;

// Per-interval quadrature inputs for one ray. Index i covers
// [t_i, t_{i+1}] of a SampleSet; all fields are evaluated at the midpoint.
struct IntervalInputs {
  std::vector<double> delta;
  std::vector<double> t_mid;
  std::vector<double> sigma_obj;
  std::vector<Spectrum> c_obj;
  std::vector<Spectrum> sigma_attn;
  std::vector<Spectrum> sigma_scat;
  std::vector<Spectrum> c_med;

  std::size_t size() const { return delta.size(); }
  void resize(std::size_t n);
  // Fills delta and t_mid from the sample set; the rest is zeroed.
  static IntervalInputs from_samples(const SampleSet& s);
};

// Forward quadrature result. Transmittance traces hold the value at the
// start of each interval.
struct IntervalTrace {
  std::vector<double> T;         // object-only
  std::vector<double> alpha;     // 1 - exp(-sigma_obj delta)
  std::vector<double> weights;   // T * alpha
  std::vector<Spectrum> T_D;     // object + attenuation
  std::vector<Spectrum> T_B;     // object + scattering
  std::vector<Spectrum> beta;    // 1 - exp(-sigma_scat delta)
  Spectrum J_hat;                // emission only
  Spectrum C_obj;                // absorbed direct term
  Spectrum C_med;                // in-scatter
  Spectrum I_hat;                // C_obj + C_med
  double weight_sum = 0.0;
  double depth = 0.0;
};

IntervalTrace render_intervals(const IntervalInputs& in, double t_far);

// Adjoint of render_intervals. Upstream gradients are with respect to I_hat,
// J_hat and the expected depth; outputs are accumulated (+=) into `grad`,
// which must be sized like the inputs.
struct IntervalUpstream {
  Spectrum d_I;
  Spectrum d_J;
  double d_depth = 0.0;
  std::vector<double> d_weights;  // direct terms on T * alpha (may be empty)
};
void backward_intervals(const IntervalInputs& in, const IntervalTrace& tr, const IntervalUpstream& up,
                        IntervalInputs& grad);

// Single-equation entry points on explicit per-interval data.
struct EmissionResult {
  Spectrum J_hat;
  std::vector<double> T;
  std::vector<double> weights;
};
EmissionResult render_emission(const SampleSet& samples, std::span<const double> sigma_obj,
                               std::span<const Spectrum> c_obj);
Spectrum render_absorbed(const SampleSet& samples, std::span<const double> sigma_obj,
                         std::span<const Spectrum> c_obj, std::span<const Spectrum> sigma_attn);
Spectrum render_inscatter(const SampleSet& samples, std::span<const double> sigma_obj,
                          std::span<const Spectrum> sigma_scat, std::span<const Spectrum> c_med);
// Expected termination distance; t_far when the weights sum below 1e-8.
double render_depth(std::span<const double> weights, std::span<const double> positions, double t_far);

struct RenderOutput {
  Spectrum I_hat;
  Spectrum J_hat;
  Spectrum C_obj;
  Spectrum C_med;
  double depth_los = 0.0;
  double z_phi_ray = 0.0;
  double media_pooled = 0.0;  // pooled media density along the ray
  double T_media_surface = 1.0;
  std::vector<double> T_obj;
  std::vector<Spectrum> T_D;
  std::vector<Spectrum> T_B;
};

// Everything the backward pass of one ray needs.
struct RayEvaluation {
  IntervalInputs in;
  IntervalTrace trace;
  std::vector<VoxelField::Stencil> obj_stencil;
  std::vector<VoxelField::Stencil> med_stencil;
  std::vector<VoxelField::Stencil> dw_stencil;  // grid downwelling only
  std::vector<Vec3> points;
  std::vector<double> sigma_med;   // activated media density per interval
  std::vector<double> z_phi;       // per-interval downwelling depth
  std::vector<double> media_scale; // multiplier on the medium spectra
  std::vector<double> media_z;     // z_phi used in the medium colour
  std::vector<double> pool_weight; // delta * T
  double pool_sum = 0.0;
  double m_bar = 0.0;
  double z_phi_bar = 0.0;
  std::vector<double> T_media;     // media-only transmittance trace
  std::vector<double> surface_w;   // normalized object weights
  Condition condition = Condition::kUnderwater;
  MediumMode mode = MediumMode::kPerRayPooled;
  double z_phi_scale = 1.0;
  RenderOutput out;
};

// Overrides applied at render time by the downstream applications.
struct RenderOverrides {
  double z_phi_scale = 1.0;
};

// Haze and underwater use the scattering path with the medium mode of the
// field; low-light uses media density as grey attenuation and no in-scatter.
// Throws InputError when the sample set has no interval.
RayEvaluation evaluate_ray(const Ray& ray, const FieldSet& field, const SampleSet& samples, Condition condition,
                           const RenderOverrides& overrides = {});
RenderOutput render_ray(const Ray& ray, const FieldSet& field, const SampleSet& samples, Condition condition,
                        const RenderOverrides& overrides = {});

struct RayUpstream {
  Spectrum d_I;
  Spectrum d_J;
  double d_depth = 0.0;
  double d_T_media_surface = 0.0;
  std::vector<double> d_sigma_obj;  // direct per-interval terms (may be empty)
  std::vector<double> d_sigma_med;  // direct per-interval terms (may be empty)
};
void backward_ray(const RayEvaluation& ev, const FieldSet& field, const RayUpstream& up, FieldGradient& grad);

}  // namespace isomedia
