// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "isomedia/errors.hpp"
#include "isomedia/sampler.hpp"
#include "test_util.hpp"

namespace isomedia {
namespace {

FieldSet empty_field() {
  FieldSet::Options o;
  o.object_resolution = 8;
  o.media_resolution = 4;
  o.initial_density = 1e-300;
  FieldSet f = FieldSet::make(o);
  for (double& x : f.object_density.raw_mut()) x = -800.0;
  f.update_activation();
  return f;
}

// Dense slab for x in [0.4, 0.6] on a fine grid.
FieldSet slab_field(double sigma) {
  FieldSet::Options o;
  o.object_resolution = 41;
  o.media_resolution = 4;
  FieldSet f = FieldSet::make(o);
  auto raw = f.object_density.raw_mut();
  for (int iz = 0; iz < 41; ++iz)
    for (int iy = 0; iy < 41; ++iy)
      for (int ix = 0; ix < 41; ++ix) {
        const double x = f.object_density.node_position(ix, iy, iz).x;
        const bool in = x >= 0.4 - 1e-12 && x <= 0.6 + 1e-12;
        raw[f.object_density.node_index(ix, iy, iz)] = in ? f.object_density.raw_for(sigma) : -800.0;
      }
  f.update_activation();
  return f;
}

double ks_uniform(std::vector<double> x, double lo, double hi) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = (x[i] - lo) / (hi - lo);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

TEST(ObjectSamples, ZeroDensityStaysStratified) {
  const FieldSet f = empty_field();
  const Ray ray = testing::axis_ray();
  CounterRng rng(1, 2);
  const int n = 16;
  const SampleSet s = object_samples(ray, f, n, rng);
  ASSERT_EQ(s.size(), static_cast<std::size_t>(n));
  const double h = 1.0 / (n - 1);
  EXPECT_EQ(s.positions().front(), 0.0);
  EXPECT_EQ(s.positions().back(), 1.0);
  for (int k = 1; k + 1 < n; ++k) {
    EXPECT_GE(s.positions()[static_cast<std::size_t>(k)], (k - 0.5) * h - 1e-12);
    EXPECT_LE(s.positions()[static_cast<std::size_t>(k)], (k + 0.5) * h + 1e-12);
  }
}

TEST(ObjectSamples, TwoSamplesAreTheEndpoints) {
  CounterRng rng(1, 2);
  const SampleSet s = object_samples(testing::axis_ray(), empty_field(), 2, rng);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.positions()[0], 0.0);
  EXPECT_EQ(s.positions()[1], 1.0);
  EXPECT_THROW(object_samples(testing::axis_ray(), empty_field(), 1, rng), InputError);
}

TEST(ObjectSamples, RefinementConcentratesInSlab) {
  const FieldSet f = slab_field(15.0);
  std::size_t inside = 0, total = 0;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    CounterRng rng = CounterRng::for_ray(3, r, 0);
    const SampleSet s = object_samples(testing::axis_ray(), f, 64, rng);
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
      ++total;
      if (s.positions()[k] >= 0.4 && s.positions()[k] <= 0.6) ++inside;
    }
  }
  EXPECT_GE(static_cast<double>(inside) / static_cast<double>(total), 0.6);
}

TEST(ReverseWeights, ConstantDensityIsUniform) {
  const SampleSet s = testing::uniform_samples(0.0, 1.0, 9);
  const std::vector<double> sig(8, 3.0);
  const ReverseWeights rw = reverse_weights(s, sig);
  for (double w : rw.w_med) EXPECT_DOUBLE_EQ(w, kReverseWeightFloor);
}

TEST(ReverseWeights, TwoIntervalArithmetic) {
  const SampleSet s(0.0, 2.0, {0.0, 1.0, 2.0}, Phase::kObject);
  const std::vector<double> sig{0.0, 10.0};
  const ReverseWeights rw = reverse_weights(s, sig, 1e-5);
  EXPECT_DOUBLE_EQ(rw.w_med[0], 10.0 + 1e-5);
  EXPECT_DOUBLE_EQ(rw.w_med[1], 1e-5);
}

TEST(ReverseWeights, MatchesDirectFormula) {
  std::mt19937_64 g(5);
  auto pos = testing::uniform_vector(g, 30, 0.0, 1.0);
  pos.push_back(0.0);
  pos.push_back(1.0);
  const SampleSet s(0.0, 1.0, pos, Phase::kObject);
  const auto sig = testing::uniform_vector(g, s.interval_count(), 0.0, 50.0);
  const ReverseWeights rw = reverse_weights(s, sig);
  const double peak = *std::max_element(sig.begin(), sig.end());
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const double d = s.positions()[i + 1] - s.positions()[i];
    EXPECT_NEAR(rw.w_med[i], d * (peak - sig[i]) + 1e-5, 1e-14);
  }
}

TEST(ReverseWeightsProperty, FloorAndArgmax) {
  std::mt19937_64 g(6);
  for (int trial = 0; trial < 50; ++trial) {
    const SampleSet s = testing::uniform_samples(0.2, 0.8, 12);
    const auto sig = testing::uniform_vector(g, 11, 0.0, 20.0);
    const ReverseWeights rw = reverse_weights(s, sig);
    const auto imax = static_cast<std::size_t>(std::max_element(sig.begin(), sig.end()) - sig.begin());
    for (double w : rw.w_med) {
      EXPECT_GE(w, rw.epsilon);
      EXPECT_GE(w, rw.w_med[imax]);
    }
    EXPECT_NEAR(rw.w_med[imax], rw.epsilon, 1e-18);
  }
}

TEST(StratifiedInvert, UniformUnderZeroDensity) {
  const SampleSet s = testing::uniform_samples(0.0, 1.0, 33);
  const ReverseWeights rw = reverse_weights(s, std::vector<double>(32, 0.0));
  std::vector<double> all;
  for (std::uint64_t r = 0; r < 3125; ++r) {
    CounterRng rng = CounterRng::for_ray(8, r, 0);
    const SampleSet m = stratified_invert(rw, 32, rng);
    all.insert(all.end(), m.positions().begin(), m.positions().end());
  }
  ASSERT_GE(all.size(), 99990u);
  EXPECT_LT(ks_uniform(all, 0.0, 1.0), 0.01);
}

TEST(StratifiedInvert, HeavyIntervalCaptures) {
  ReverseWeights rw;
  rw.t_near = 0.0;
  rw.t_far = 1.0;
  for (int i = 0; i <= 10; ++i) rw.edges.push_back(i / 10.0);
  rw.w_med.assign(10, 0.01 / 9.0);
  rw.w_med[6] = 0.99;
  std::size_t inside = 0, total = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    CounterRng rng(4, r);
    const SampleSet m = stratified_invert(rw, 10, rng);
    for (double t : m.positions()) {
      ++total;
      if (t >= 0.6 && t <= 0.7) ++inside;
    }
  }
  EXPECT_GE(static_cast<double>(inside) / static_cast<double>(total), 0.95);
}

TEST(StratifiedInvert, SingleIntervalForcedPlacement) {
  const SampleSet s(0.3, 0.5, {0.3, 0.5}, Phase::kObject);
  const ReverseWeights rw = reverse_weights(s, std::vector<double>{1.0});
  CounterRng rng(1, 1);
  const SampleSet m = stratified_invert(rw, 1, rng);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_GE(m.positions()[0], 0.3);
  EXPECT_LE(m.positions()[0], 0.5);
  EXPECT_EQ(m.phases()[0], Phase::kMedia);
}

TEST(SampleRay, BoundsOrderAndReproducibility) {
  const FieldSet f = slab_field(8.0);
  Ray ray = testing::axis_ray();
  ray.t_near = 0.1;
  ray.t_far = 0.95;
  for (std::uint64_t r = 0; r < 100; ++r) {
    CounterRng a = CounterRng::for_ray(17, r, 3), b = CounterRng::for_ray(17, r, 3);
    const SampleSet s1 = sample_ray(ray, f, 64, 32, a), s2 = sample_ray(ray, f, 64, 32, b);
    ASSERT_EQ(s1.size(), s2.size());
    for (std::size_t k = 0; k < s1.size(); ++k) EXPECT_EQ(s1.positions()[k], s2.positions()[k]);
    for (std::size_t k = 0; k < s1.size(); ++k) {
      EXPECT_GE(s1.positions()[k], 0.1);
      EXPECT_LE(s1.positions()[k], 0.95);
      if (k > 0) EXPECT_GT(s1.positions()[k], s1.positions()[k - 1]);
    }
    EXPECT_GT(s1.count(Phase::kMedia), 0u);
  }
}

TEST(SampleRay, MediaSamplesFillTheGaps) {
  // Media samples avoid the slab where object samples pile up.
  const FieldSet f = slab_field(15.0);
  std::size_t in_slab = 0, media = 0;
  for (std::uint64_t r = 0; r < 500; ++r) {
    CounterRng rng = CounterRng::for_ray(2, r, 0);
    const SampleSet s = sample_ray(testing::axis_ray(), f, 64, 32, rng);
    for (std::size_t k = 0; k < s.size(); ++k)
      if (s.phases()[k] == Phase::kMedia) {
        ++media;
        if (s.positions()[k] > 0.42 && s.positions()[k] < 0.58) ++in_slab;
      }
  }
  EXPECT_LT(static_cast<double>(in_slab) / static_cast<double>(media), 0.05);
}

}  // namespace
}  // namespace isomedia
