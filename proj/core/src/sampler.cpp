// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isomedia/errors.hpp"

namespace isomedia {

namespace {

// Floor mixed into the refinement pdf so empty stretches keep some samples.
constexpr double kUniformMix = 0.01;

// Inverse of the piecewise-constant pdf `w` over `edges` at u in [0, 1].
double invert_cdf(std::span<const double> edges, std::span<const double> cdf, double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  if (i >= cdf.size()) i = cdf.size() - 1;
  const double lo = i == 0 ? 0.0 : cdf[i - 1];
  const double hi = cdf[i];
  const double f = hi > lo ? std::clamp((u - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  return edges[i] + f * (edges[i + 1] - edges[i]);
}

std::vector<double> normalized_cdf(std::span<const double> w) {
  std::vector<double> cdf(w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s += w[i];
    cdf[i] = s;
  }
  if (!(s > 0.0) || !std::isfinite(s)) throw std::logic_error("sampling weights do not form a CDF");
  for (double& v : cdf) v /= s;
  cdf.back() = 1.0;
  return cdf;
}

}  // namespace

SampleSet object_samples(const Ray& ray, const FieldSet& field, int n_obj, CounterRng& rng) {
  if (n_obj < 2) throw InputError("object sampling needs n_obj >= 2");
  const double t0 = ray.t_near, t1 = ray.t_far;
  const double len = t1 - t0;
  const auto n = static_cast<std::size_t>(n_obj);
  const double h = len / static_cast<double>(n - 1);

  std::vector<double> coarse(n);
  coarse.front() = t0;
  coarse.back() = t1;
  for (std::size_t k = 1; k + 1 < n; ++k) coarse[k] = t0 + (static_cast<double>(k) + rng.uniform() - 0.5) * h;
  if (n == 2) return SampleSet(t0, t1, coarse, Phase::kObject);

  std::vector<double> w(n - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = coarse[i + 1] - coarse[i];
    const double sigma = field.object_density.query_scalar(ray.at(0.5 * (coarse[i] + coarse[i + 1])));
    const double a = std::min(sigma * d, 80.0);
    w[i] = std::exp(-acc) * -std::expm1(-a) + kUniformMix * d / len;
    acc += a;
  }
  const std::vector<double> cdf = normalized_cdf(w);

  std::vector<double> fine(n);
  fine.front() = t0;
  fine.back() = t1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double u = std::clamp((static_cast<double>(k) + rng.uniform() - 0.5) / static_cast<double>(n - 1), 0.0, 1.0);
    fine[k] = std::clamp(invert_cdf(coarse, cdf, u), t0, t1);
  }
  return SampleSet(t0, t1, std::move(fine), Phase::kObject);
}

ReverseWeights reverse_weights(const SampleSet& samples, std::span<const double> sigma_hat, double epsilon) {
  const std::size_t n = samples.interval_count();
  if (n == 0) throw InputError("reverse weights need at least one interval");
  if (sigma_hat.size() != n) throw InputError("reverse weights: one density per interval expected");
  if (!(epsilon > 0.0)) throw InputError("reverse weight floor must be positive");
  ReverseWeights rw;
  rw.epsilon = epsilon;
  rw.t_near = samples.t_near();
  rw.t_far = samples.t_far();
  rw.edges.assign(samples.positions().begin(), samples.positions().end());
  rw.sigma_hat.assign(sigma_hat.begin(), sigma_hat.end());
  const double peak = *std::max_element(sigma_hat.begin(), sigma_hat.end());
  const std::vector<double> d = samples.deltas();
  rw.w_med.resize(n);
  for (std::size_t i = 0; i < n; ++i) rw.w_med[i] = d[i] * (peak - sigma_hat[i]) + epsilon;
  return rw;
}

SampleSet stratified_invert(const ReverseWeights& weights, int n_add, CounterRng& rng) {
  if (n_add < 1) throw InputError("media upsampling needs n_add >= 1");
  if (weights.w_med.empty() || weights.edges.size() != weights.w_med.size() + 1)
    throw InputError("reverse weights are malformed");
  const std::vector<double> cdf = normalized_cdf(weights.w_med);
  const auto m = static_cast<std::size_t>(n_add);
  std::vector<double> t(m);
  for (std::size_t j = 0; j < m; ++j) {
    // u in ((j-1)/N, j/N] in one-based terms.
    const double u = (static_cast<double>(j) + 1.0 - rng.uniform()) / static_cast<double>(m);
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    if (i >= cdf.size()) i = cdf.size() - 1;
    const double lo = weights.edges[i], hi = weights.edges[i + 1];
    t[j] = std::clamp(lo + rng.uniform() * (hi - lo), weights.t_near, weights.t_far);
  }
  return SampleSet(weights.t_near, weights.t_far, std::move(t), Phase::kMedia);
}

SampleSet sample_ray(const Ray& ray, const FieldSet& field, int n_obj, int n_add, CounterRng& rng) {
  SampleSet obj = object_samples(ray, field, n_obj, rng);
  if (n_add <= 0 || obj.interval_count() == 0) return obj;
  const auto pos = obj.positions();
  std::vector<double> edge_sigma(pos.size());
  for (std::size_t k = 0; k < pos.size(); ++k) edge_sigma[k] = field.object_density.query_scalar(ray.at(pos[k]));
  std::vector<double> sigma_hat(obj.interval_count());
  for (std::size_t i = 0; i < sigma_hat.size(); ++i) sigma_hat[i] = 0.5 * (edge_sigma[i] + edge_sigma[i + 1]);
  const ReverseWeights rw = reverse_weights(obj, sigma_hat);
  return sort_merge(obj, stratified_invert(rw, n_add, rng));
}

}  // namespace isomedia
