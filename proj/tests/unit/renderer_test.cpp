// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cctype>

#include <random>

#include "isomedia/errors.hpp"
#include "isomedia/renderer.hpp"
#include "isomedia/sampler.hpp"
#include "test_util.hpp"

namespace isomedia {
namespace {

using testing::uniform_samples;

TEST(RenderEmission, EmptySceneIsBlack) {
  const SampleSet s = uniform_samples(0, 1, 9);
  const std::vector<double> sig(8, 0.0);
  const std::vector<Spectrum> c(8, Spectrum(0.7));
  const EmissionResult r = render_emission(s, sig, c);
  EXPECT_EQ(r.J_hat, Spectrum(0.0));
  for (double w : r.weights) EXPECT_EQ(w, 0.0);
}

TEST(RenderEmission, OpaqueSampleShowsItsColour) {
  const SampleSet s(0, 1, {0.2, 0.3}, Phase::kObject);
  const EmissionResult r = render_emission(s, std::vector<double>{1e6}, std::vector<Spectrum>{{1, 0, 0}});
  EXPECT_NEAR(r.J_hat[0], 1.0, 1e-15);
  EXPECT_EQ(r.J_hat[1], 0.0);
}

TEST(RenderEmission, MatchesCumulativeProductReference) {
  std::mt19937_64 g(1);
  auto pos = testing::uniform_vector(g, 17, 0.0, 1.0);
  const SampleSet s(0, 1, pos, Phase::kObject);
  const auto sig = testing::uniform_vector(g, 16, 0.0, 8.0);
  std::vector<Spectrum> c(16);
  for (auto& x : c) x = {std::uniform_real_distribution<double>(0, 1)(g), 0.5, 0.25};
  const EmissionResult r = render_emission(s, sig, c);
  // Transmittance as a running product of per-interval survival.
  double T = 1.0;
  Spectrum J;
  const auto d = s.deltas();
  for (std::size_t i = 0; i < 16; ++i) {
    const double surv = std::exp(-sig[i] * d[i]);
    EXPECT_NEAR(r.T[i], T, 1e-13);
    J += c[i] * (T * (1.0 - surv));
    T *= surv;
  }
  for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_NEAR(r.J_hat[ch], J[ch], 1e-13);
}

TEST(RenderEmission, ShapeMismatchIsInputError) {
  const SampleSet s = uniform_samples(0, 1, 5);
  EXPECT_THROW(render_emission(s, std::vector<double>(3), std::vector<Spectrum>(4)), InputError);
}

TEST(RenderAbsorbed, ZeroAttenuationIsEmission) {
  std::mt19937_64 g(2);
  const SampleSet s = uniform_samples(0, 1, 12);
  const auto sig = testing::uniform_vector(g, 11, 0.0, 5.0);
  const std::vector<Spectrum> c(11, Spectrum(0.3, 0.6, 0.9));
  const Spectrum a = render_absorbed(s, sig, c, std::vector<Spectrum>(11, Spectrum(0.0)));
  EXPECT_EQ(a, render_emission(s, sig, c).J_hat);
  EXPECT_EQ(render_absorbed(s, sig, std::vector<Spectrum>(11), std::vector<Spectrum>(11, Spectrum(2.0))),
            Spectrum(0.0));
}

TEST(RenderAbsorbed, OpaqueWallClosedForm) {
  const int k = 300;
  const double delta = 1e-3;
  const SampleSet s = uniform_samples(0.0, (k + 1) * delta, k + 2);
  std::vector<double> sig(static_cast<std::size_t>(k + 1), 0.0);
  sig.back() = 1e9;
  const Spectrum c{0.9, 0.6, 0.3}, sa{0.8, 0.4, 0.1};
  std::vector<Spectrum> cs(sig.size(), c), sas(sig.size(), sa);
  const Spectrum out = render_absorbed(s, sig, cs, sas);
  const double z = k * delta;
  for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_NEAR(out[ch], c[ch] * std::exp(-sa[ch] * z), 1e-9);
}

TEST(RenderInscatter, GeometricSeriesClosedForm) {
  const int k = 250;
  const double delta = 2e-3;
  const SampleSet s = uniform_samples(0.0, (k + 1) * delta, k + 2);
  std::vector<double> sig(static_cast<std::size_t>(k + 1), 0.0);
  sig.back() = 1e9;
  const Spectrum cm{0.2, 0.5, 0.7}, ss{0.3, 0.6, 1.2};
  const Spectrum out =
      render_inscatter(s, sig, std::vector<Spectrum>(sig.size(), ss), std::vector<Spectrum>(sig.size(), cm));
  // In-scatter also accrues over the wall interval itself.
  const double z = (k + 1) * delta;
  for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_NEAR(out[ch], cm[ch] * (1.0 - std::exp(-ss[ch] * z)), 1e-9);
  EXPECT_EQ(render_inscatter(s, sig, std::vector<Spectrum>(sig.size()), std::vector<Spectrum>(sig.size(), cm)),
            Spectrum(0.0));
  EXPECT_EQ(render_inscatter(s, sig, std::vector<Spectrum>(sig.size(), ss), std::vector<Spectrum>(sig.size())),
            Spectrum(0.0));
}

TEST(RenderDepth, Examples) {
  EXPECT_DOUBLE_EQ(render_depth(std::vector<double>{1.0}, std::vector<double>{0.4}, 1.0), 0.4);
  EXPECT_DOUBLE_EQ(render_depth(std::vector<double>{0.0, 0.0}, std::vector<double>{0.2, 0.6}, 0.9), 0.9);
  EXPECT_DOUBLE_EQ(render_depth(std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, 0.6}, 1.0), 0.4);
}

FieldSet zero_media(FieldSet f) {
  for (double& x : f.media_density.raw_mut()) x = -800.0;
  f.update_activation();
  return f;
}

TEST(RenderRay, ClearAirSanity) {
  for (MediumMode mode : {MediumMode::kPerRayPooled, MediumMode::kPerSample}) {
    const FieldSet f = zero_media(testing::random_field(3, mode));
    for (Condition cond : {Condition::kUnderwater, Condition::kHaze, Condition::kLowlight}) {
      const RenderOutput o = render_ray(testing::axis_ray(), f, uniform_samples(0, 1, 40), cond);
      EXPECT_EQ(o.C_med, Spectrum(0.0));
      EXPECT_EQ(o.I_hat, o.J_hat);
    }
  }
}

TEST(RenderRay, HazeEqualsUnderwaterWithTiedCoefficients) {
  FieldSet f = testing::random_field(4, MediumMode::kPerRayPooled);
  f.medium.sigma_scat = f.medium.sigma_attn;
  const SampleSet s = uniform_samples(0, 1, 50);
  const RenderOutput h = render_ray(testing::axis_ray(), f, s, Condition::kHaze);
  const RenderOutput u = render_ray(testing::axis_ray(), f, s, Condition::kUnderwater);
  EXPECT_EQ(h.I_hat, u.I_hat);
  EXPECT_EQ(h.C_med, u.C_med);
}

TEST(RenderRay, LowlightHasNoInscatter) {
  const FieldSet f = testing::random_field(5, MediumMode::kPerSample);
  const RenderOutput o = render_ray(testing::axis_ray(), f, uniform_samples(0, 1, 30), Condition::kLowlight);
  EXPECT_EQ(o.C_med, Spectrum(0.0));
  EXPECT_EQ(o.I_hat, o.C_obj);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_LT(o.I_hat[c], o.J_hat[c]);
}

TEST(RenderRay, EmptySampleSetRejected) {
  const FieldSet f = testing::random_field(5, MediumMode::kPerSample);
  EXPECT_THROW(render_ray(testing::axis_ray(), f, SampleSet(0, 1, {0.5}, Phase::kObject), Condition::kHaze),
               InputError);
}

TEST(RenderIntervals, ConvergesToClosedFormUnderRefinement) {
  // Opaque slab from z = 0.5 behind constant media; error shrinks with delta.
  const Spectrum J{0.7, 0.5, 0.3}, B{0.04, 0.08, 0.1}, sa{0.8, 0.4, 0.25}, ss{0.12, 0.08, 0.06};
  const Spectrum ref = compose({J, B, sa, ss, 0.5});
  double prev = 1.0;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto n = static_cast<std::size_t>(std::lround(1.0 / delta));
    IntervalInputs in;
    in.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      in.delta[i] = delta;
      in.t_mid[i] = (i + 0.5) * delta;
      const bool wall = (i + 0.5) * delta > 0.5;
      in.sigma_obj[i] = wall ? 1e8 : 0.0;
      in.c_obj[i] = J;
      in.sigma_attn[i] = sa;
      in.sigma_scat[i] = ss;
      in.c_med[i] = B;
    }
    const IntervalTrace tr = render_intervals(in, 1.0);
    double err = 0.0;
    for (std::size_t c = 0; c < 3; ++c) err = std::max(err, std::abs(tr.I_hat[c] - ref[c]));
    EXPECT_LT(err, prev) << "delta " << delta;
    prev = err;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(RenderRayProperty, TransmittanceTraces) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FieldSet f = testing::random_field(seed, MediumMode::kPerSample);
    CounterRng rng(seed, 1);
    const SampleSet s = sample_ray(testing::axis_ray(), f, 32, 16, rng);
    const RenderOutput o = render_ray(testing::axis_ray(), f, s, Condition::kUnderwater);
    double wsum = 0.0;
    for (std::size_t i = 0; i < o.T_obj.size(); ++i) {
      if (i == 0) {
        EXPECT_EQ(o.T_obj[0], 1.0);
        EXPECT_EQ(o.T_D[0], Spectrum(1.0));
        EXPECT_EQ(o.T_B[0], Spectrum(1.0));
      } else {
        EXPECT_LE(o.T_obj[i], o.T_obj[i - 1]);
        for (std::size_t c = 0; c < 3; ++c) {
          EXPECT_LE(o.T_D[i][c], o.T_D[i - 1][c]);
          EXPECT_LE(o.T_B[i][c], o.T_B[i - 1][c]);
        }
      }
      EXPECT_GT(o.T_obj[i], 0.0);
      for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_LE(o.T_D[i][c], o.T_obj[i]);
        EXPECT_LE(o.T_B[i][c], o.T_obj[i]);
      }
    }
    for (std::size_t c = 0; c < 3; ++c) EXPECT_GE(o.I_hat[c], 0.0);
    const RayEvaluation ev = evaluate_ray(testing::axis_ray(), f, s, Condition::kUnderwater);
    for (double w : ev.trace.weights) wsum += w;
    EXPECT_GE(wsum, 0.0);
    EXPECT_LE(wsum, 1.0 + 1e-12);
  }
}

TEST(RenderRayProperty, MoreMediaNeverBrightensDirectTerm) {
  FieldSet f = testing::random_field(7, MediumMode::kPerSample);
  const SampleSet s = uniform_samples(0, 1, 40);
  Spectrum prev = render_ray(testing::axis_ray(), f, s, Condition::kUnderwater).C_obj;
  for (int step = 0; step < 10; ++step) {
    for (double& x : f.media_density.raw_mut()) x += 0.3;
    f.update_activation();
    const Spectrum c = render_ray(testing::axis_ray(), f, s, Condition::kUnderwater).C_obj;
    for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_LE(c[ch], prev[ch]);
    prev = c;
  }
}

TEST(RenderRay, DepthScaleDarkensBackscatter) {
  const FieldSet f = testing::random_field(8, MediumMode::kPerRayPooled);
  const SampleSet s = uniform_samples(0, 1, 40);
  const RenderOutput a = render_ray(testing::axis_ray(), f, s, Condition::kUnderwater, {1.0 / 3.0});
  const RenderOutput b = render_ray(testing::axis_ray(), f, s, Condition::kUnderwater, {1.0});
  const RenderOutput c = render_ray(testing::axis_ray(), f, s, Condition::kUnderwater, {3.0});
  for (std::size_t ch = 0; ch < 3; ++ch) {
    EXPECT_GT(a.C_med[ch], b.C_med[ch]);
    EXPECT_GT(b.C_med[ch], c.C_med[ch]);
  }
}

// Random interval inputs; small enough densities that no clamp engages.
IntervalInputs random_inputs(std::mt19937_64& g, std::size_t n) {
  IntervalInputs in;
  in.resize(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double t = 0.1;
  for (std::size_t i = 0; i < n; ++i) {
    in.delta[i] = 0.02 + 0.05 * u(g);
    in.t_mid[i] = t + 0.5 * in.delta[i];
    t += in.delta[i];
    in.sigma_obj[i] = 6.0 * u(g);
    for (std::size_t c = 0; c < 3; ++c) {
      in.c_obj[i][c] = u(g);
      in.sigma_attn[i][c] = 2.0 * u(g);
      in.sigma_scat[i][c] = 2.0 * u(g);
      in.c_med[i][c] = u(g);
    }
  }
  return in;
}

TEST(BackwardIntervals, MatchesFiniteDifferences) {
  std::mt19937_64 g(10);
  const IntervalInputs in = random_inputs(g, 24);
  IntervalUpstream up{{0.3, -0.7, 1.1}, {-0.4, 0.9, 0.2}, 0.8, testing::uniform_vector(g, 24, -1, 1)};
  auto objective = [&](const IntervalInputs& x) {
    const IntervalTrace tr = render_intervals(x, 5.0);
    double v = up.d_depth * tr.depth;
    for (std::size_t c = 0; c < 3; ++c) v += up.d_I[c] * tr.I_hat[c] + up.d_J[c] * tr.J_hat[c];
    for (std::size_t i = 0; i < x.size(); ++i) v += up.d_weights[i] * tr.weights[i];
    return v;
  };
  IntervalInputs grad;
  grad.resize(in.size());
  backward_intervals(in, render_intervals(in, 5.0), up, grad);
  double worst = 0.0;
  auto check = [&](double& slot, double an) {
    const double x0 = slot;
    IntervalInputs& mut = const_cast<IntervalInputs&>(in);
    slot = x0 + 1e-5;
    const double fp = objective(mut);
    slot = x0 - 1e-5;
    const double fm = objective(mut);
    slot = x0;
    worst = std::max(worst, testing::rel_err(an, (fp - fm) / 2e-5, 1e-7));
  };
  IntervalInputs& m = const_cast<IntervalInputs&>(in);
  for (std::size_t i = 0; i < in.size(); ++i) {
    check(m.sigma_obj[i], grad.sigma_obj[i]);
    for (std::size_t c = 0; c < 3; ++c) {
      check(m.c_obj[i][c], grad.c_obj[i][c]);
      check(m.sigma_attn[i][c], grad.sigma_attn[i][c]);
      check(m.sigma_scat[i][c], grad.sigma_scat[i][c]);
      check(m.c_med[i][c], grad.c_med[i][c]);
    }
  }
  EXPECT_LT(worst, 1e-4);
}

struct RayCase {
  MediumMode mode;
  DownwellingKind dw;
  Condition cond;
};

class RayGradient : public ::testing::TestWithParam<RayCase> {};

TEST_P(RayGradient, EveryFieldParameterMatchesFiniteDifferences) {
  const RayCase rc = GetParam();
  const FieldSet f = testing::random_field(21, rc.mode, rc.dw);
  Ray ray;
  ray.origin = {0.05, 0.2, 0.1};
  ray.direction = normalize(Vec3{0.9, 0.6, 0.7});
  const auto span = intersect_unit_cube(ray.origin, ray.direction);
  ray.t_near = span->first;
  ray.t_far = span->second;
  CounterRng rng(5, 5);
  const SampleSet s = sample_ray(ray, f, 24, 12, rng);
  const std::size_t n = s.interval_count();
  std::mt19937_64 g(3);
  RayUpstream up;
  up.d_I = {0.7, -0.3, 0.5};
  up.d_J = {-0.2, 0.4, 0.9};
  up.d_depth = 0.6;
  up.d_T_media_surface = -0.8;
  up.d_sigma_obj = testing::uniform_vector(g, n, -0.1, 0.1);
  up.d_sigma_med = testing::uniform_vector(g, n, -0.1, 0.1);
  auto loss = [&](const FieldSet& x) {
    const RayEvaluation ev = evaluate_ray(ray, x, s, rc.cond);
    double v = up.d_depth * ev.out.depth_los + up.d_T_media_surface * ev.out.T_media_surface;
    for (std::size_t c = 0; c < 3; ++c) v += up.d_I[c] * ev.out.I_hat[c] + up.d_J[c] * ev.out.J_hat[c];
    for (std::size_t i = 0; i < n; ++i) v += up.d_sigma_obj[i] * ev.in.sigma_obj[i] + up.d_sigma_med[i] * ev.sigma_med[i];
    return v;
  };
  FieldGradient grad = FieldGradient::zeros_like(f);
  backward_ray(evaluate_ray(ray, f, s, rc.cond), f, up, grad);
  const testing::FdReport r = testing::check_field_gradient(f, grad, loss);
  EXPECT_LT(r.worst, 1e-4) << r.where;
  EXPECT_GT(r.checked, 300u);
}

INSTANTIATE_TEST_SUITE_P(
    Modes, RayGradient,
    ::testing::Values(RayCase{MediumMode::kPerRayPooled, DownwellingKind::kPlane, Condition::kUnderwater},
                      RayCase{MediumMode::kPerRayPooled, DownwellingKind::kGrid, Condition::kUnderwater},
                      RayCase{MediumMode::kPerSample, DownwellingKind::kPlane, Condition::kUnderwater},
                      RayCase{MediumMode::kPerSample, DownwellingKind::kGrid, Condition::kHaze},
                      RayCase{MediumMode::kGlobalConstant, DownwellingKind::kGrid, Condition::kUnderwater},
                      RayCase{MediumMode::kPerRayPooled, DownwellingKind::kPlane, Condition::kHaze},
                      RayCase{MediumMode::kPerSample, DownwellingKind::kPlane, Condition::kLowlight}),
    [](const auto& info) {
      std::string n = std::string(to_string(info.param.cond)) + "_" + std::string(to_string(info.param.mode)) + "_" +
                      std::string(to_string(info.param.dw));
      for (char& ch : n)
        if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
      return n;
    });

}  // namespace
}  // namespace isomedia
