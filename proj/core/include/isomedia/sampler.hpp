// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "isomedia/camera.hpp"
#include "isomedia/field_set.hpp"
#include "isomedia/rng.hpp"
#include "isomedia/samples.hpp"

namespace isomedia {

inline constexpr double kReverseWeightFloor = 1e-5;

struct ReverseWeights {
  std::vector<double> edges;      // interval boundaries t_0..t_n
  std::vector<double> w_med;      // one per interval, >= epsilon
  std::vector<double> sigma_hat;  // interval-mean object density
  double epsilon = kReverseWeightFloor;
  double t_near = 0.0;
  double t_far = 1.0;
};

// Stratified coarse pass over [t_near, t_far] (endpoints always included),
// then one inverse-CDF refinement driven by the object weights T * alpha.
// Returns n_obj object-phase positions. Throws InputError when n_obj < 2.
SampleSet object_samples(const Ray& ray, const FieldSet& field, int n_obj, CounterRng& rng);

// w_i = delta_i * (max_j sigma_hat_j - sigma_hat_i) + epsilon.
ReverseWeights reverse_weights(const SampleSet& samples, std::span<const double> sigma_hat,
                               double epsilon = kReverseWeightFloor);

// n_add media-phase samples: u_j from the j-th stratum of (0, 1], CDF
// inversion to an interval, then a uniform draw inside it.
SampleSet stratified_invert(const ReverseWeights& weights, int n_add, CounterRng& rng);

// Object samples merged with reverse-stratified media samples. Densities for
// the reverse weights are the trapezoid mean of the two bounding positions.
SampleSet sample_ray(const Ray& ray, const FieldSet& field, int n_obj, int n_add, CounterRng& rng);

}  // namespace isomedia
