// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isomedia/errors.hpp"

namespace isomedia {

namespace {

constexpr double kMinWeightSum = 1e-8;

double clamp_od(double x) { return std::min(x, kMaxOpticalDepth); }
bool clamped(double x) { return x >= kMaxOpticalDepth; }

}  // namespace

void IntervalInputs::resize(std::size_t n) {
  delta.assign(n, 0.0);
  t_mid.assign(n, 0.0);
  sigma_obj.assign(n, 0.0);
  c_obj.assign(n, Spectrum());
  sigma_attn.assign(n, Spectrum());
  sigma_scat.assign(n, Spectrum());
  c_med.assign(n, Spectrum());
}

IntervalInputs IntervalInputs::from_samples(const SampleSet& s) {
  IntervalInputs in;
  in.resize(s.interval_count());
  in.delta = s.deltas();
  in.t_mid = s.midpoints();
  return in;
}

IntervalTrace render_intervals(const IntervalInputs& in, double t_far) {
  const std::size_t n = in.size();
  IntervalTrace tr;
  tr.T.resize(n);
  tr.alpha.resize(n);
  tr.weights.resize(n);
  tr.T_D.resize(n);
  tr.T_B.resize(n);
  tr.beta.resize(n);
  double acc = 0.0;
  Spectrum acc_d, acc_b;
  double wt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = in.delta[i];
    const double a = clamp_od(in.sigma_obj[i] * d);
    tr.T[i] = std::exp(-acc);
    tr.alpha[i] = -std::expm1(-a);
    tr.weights[i] = tr.T[i] * tr.alpha[i];
    for (std::size_t c = 0; c < 3; ++c) {
      tr.T_D[i][c] = std::exp(-acc_d[c]);
      tr.T_B[i][c] = std::exp(-acc_b[c]);
      tr.beta[i][c] = -std::expm1(-clamp_od(in.sigma_scat[i][c] * d));
      tr.J_hat[c] += tr.weights[i] * in.c_obj[i][c];
      tr.C_obj[c] += tr.T_D[i][c] * tr.alpha[i] * in.c_obj[i][c];
      tr.C_med[c] += tr.T_B[i][c] * tr.beta[i][c] * in.c_med[i][c];
      acc_d[c] += clamp_od((in.sigma_obj[i] + in.sigma_attn[i][c]) * d);
      acc_b[c] += clamp_od((in.sigma_obj[i] + in.sigma_scat[i][c]) * d);
    }
    acc += a;
    tr.weight_sum += tr.weights[i];
    wt += tr.weights[i] * in.t_mid[i];
  }
  tr.I_hat = tr.C_obj + tr.C_med;
  tr.depth = tr.weight_sum < kMinWeightSum ? t_far : wt / tr.weight_sum;
  return tr;
}

void backward_intervals(const IntervalInputs& in, const IntervalTrace& tr, const IntervalUpstream& up,
                        IntervalInputs& g) {
  const std::size_t n = in.size();
  const bool has_depth = tr.weight_sum >= kMinWeightSum;
  // Suffix sums over i > k of the quantities that T_k-style products feed.
  double s_emit = 0.0;
  Spectrum s_direct, s_scat;
  for (std::size_t k = n; k-- > 0;) {
    const double d = in.delta[k];
    const double so = in.sigma_obj[k];
    double g_w = 0.0;
    for (std::size_t c = 0; c < 3; ++c) g_w += up.d_J[c] * in.c_obj[k][c];
    if (has_depth) g_w += up.d_depth * (in.t_mid[k] - tr.depth) / tr.weight_sum;
    if (!up.d_weights.empty()) g_w += up.d_weights[k];
    for (std::size_t c = 0; c < 3; ++c) g.c_obj[k][c] += tr.weights[k] * up.d_J[c];

    // d/d alpha_k from emission and the absorbed direct term.
    double d_alpha = g_w * tr.T[k];
    double d_so = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double gd = up.d_I[c];
      d_alpha += gd * tr.T_D[k][c] * in.c_obj[k][c];
      g.c_obj[k][c] += gd * tr.T_D[k][c] * tr.alpha[k];
      // T^D_i for i > k depends on (sigma_obj + sigma_attn) at k.
      const double db = -gd * s_direct[c];
      if (!clamped((so + in.sigma_attn[k][c]) * d)) {
        d_so += db * d;
        g.sigma_attn[k][c] += db * d;
      }
      // In-scatter.
      const double gm = up.d_I[c];
      g.c_med[k][c] += gm * tr.T_B[k][c] * tr.beta[k][c];
      const double ss = in.sigma_scat[k][c];
      if (!clamped(ss * d)) g.sigma_scat[k][c] += gm * tr.T_B[k][c] * in.c_med[k][c] * (1.0 - tr.beta[k][c]) * d;
      const double de = -gm * s_scat[c];
      if (!clamped((so + ss) * d)) {
        d_so += de * d;
        g.sigma_scat[k][c] += de * d;
      }
    }
    double d_a = -s_emit + d_alpha * (1.0 - tr.alpha[k]);
    if (!clamped(so * d)) d_so += d_a * d;
    g.sigma_obj[k] += d_so;

    s_emit += g_w * tr.weights[k];
    for (std::size_t c = 0; c < 3; ++c) {
      s_direct[c] += tr.T_D[k][c] * tr.alpha[k] * in.c_obj[k][c];
      s_scat[c] += tr.T_B[k][c] * tr.beta[k][c] * in.c_med[k][c];
    }
  }
}

namespace {

void check_lengths(const SampleSet& s, std::size_t a, std::size_t b, const char* what) {
  if (s.interval_count() == 0) throw InputError(std::string(what) + ": sample set has no interval");
  if (a != s.interval_count() || b != s.interval_count())
    throw InputError(std::string(what) + ": per-interval inputs do not match the sample set");
}

}  // namespace

EmissionResult render_emission(const SampleSet& samples, std::span<const double> sigma_obj,
                               std::span<const Spectrum> c_obj) {
  check_lengths(samples, sigma_obj.size(), c_obj.size(), "render_emission");
  IntervalInputs in = IntervalInputs::from_samples(samples);
  std::copy(sigma_obj.begin(), sigma_obj.end(), in.sigma_obj.begin());
  std::copy(c_obj.begin(), c_obj.end(), in.c_obj.begin());
  IntervalTrace tr = render_intervals(in, samples.t_far());
  return {tr.J_hat, std::move(tr.T), std::move(tr.weights)};
}

Spectrum render_absorbed(const SampleSet& samples, std::span<const double> sigma_obj, std::span<const Spectrum> c_obj,
                         std::span<const Spectrum> sigma_attn) {
  check_lengths(samples, sigma_obj.size(), c_obj.size(), "render_absorbed");
  check_lengths(samples, sigma_attn.size(), sigma_attn.size(), "render_absorbed");
  IntervalInputs in = IntervalInputs::from_samples(samples);
  std::copy(sigma_obj.begin(), sigma_obj.end(), in.sigma_obj.begin());
  std::copy(c_obj.begin(), c_obj.end(), in.c_obj.begin());
  std::copy(sigma_attn.begin(), sigma_attn.end(), in.sigma_attn.begin());
  return render_intervals(in, samples.t_far()).C_obj;
}

Spectrum render_inscatter(const SampleSet& samples, std::span<const double> sigma_obj,
                          std::span<const Spectrum> sigma_scat, std::span<const Spectrum> c_med) {
  check_lengths(samples, sigma_obj.size(), sigma_scat.size(), "render_inscatter");
  check_lengths(samples, c_med.size(), c_med.size(), "render_inscatter");
  IntervalInputs in = IntervalInputs::from_samples(samples);
  std::copy(sigma_obj.begin(), sigma_obj.end(), in.sigma_obj.begin());
  std::copy(sigma_scat.begin(), sigma_scat.end(), in.sigma_scat.begin());
  std::copy(c_med.begin(), c_med.end(), in.c_med.begin());
  return render_intervals(in, samples.t_far()).C_med;
}

double render_depth(std::span<const double> weights, std::span<const double> positions, double t_far) {
  if (weights.size() != positions.size()) throw InputError("render_depth: weights and positions differ in length");
  double sw = 0.0, swt = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    sw += weights[i];
    swt += weights[i] * positions[i];
  }
  return sw < kMinWeightSum ? t_far : swt / sw;
}

RayEvaluation evaluate_ray(const Ray& ray, const FieldSet& field, const SampleSet& samples, Condition condition,
                           const RenderOverrides& overrides) {
  const std::size_t n = samples.interval_count();
  if (n == 0) throw InputError("render_ray: sample set has no interval");
  RayEvaluation ev;
  ev.condition = condition;
  ev.mode = field.medium.mode;
  ev.z_phi_scale = overrides.z_phi_scale;
  ev.in = IntervalInputs::from_samples(samples);
  ev.obj_stencil.resize(n);
  ev.med_stencil.resize(n);
  ev.points.resize(n);
  ev.sigma_med.resize(n);
  ev.z_phi.resize(n);
  ev.media_scale.assign(n, 1.0);
  ev.media_z.assign(n, 0.0);
  ev.pool_weight.resize(n);
  const bool grid_dw = field.downwelling.kind == DownwellingKind::kGrid;
  if (grid_dw) ev.dw_stencil.resize(n);

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = ray.at(ev.in.t_mid[i]);
    ev.points[i] = p;
    ev.obj_stencil[i] = field.object_density.stencil(p);
    ev.med_stencil[i] = field.media_density.stencil(p);
    ev.in.sigma_obj[i] = field.object_density.query_scalar(ev.obj_stencil[i]);
    ev.in.c_obj[i] = field.object_color.query_rgb(ev.obj_stencil[i]);
    ev.sigma_med[i] = field.media_density.query_scalar(ev.med_stencil[i]);
    if (grid_dw) {
      ev.dw_stencil[i] = field.downwelling.grid.stencil(p);
      ev.z_phi[i] = field.downwelling.grid.query_scalar(ev.dw_stencil[i]);
    } else {
      ev.z_phi[i] = field.downwelling.value(p);
    }
    ev.pool_weight[i] = ev.in.delta[i] * std::exp(-acc);
    ev.pool_sum += ev.pool_weight[i];
    acc += clamp_od(ev.in.sigma_obj[i] * ev.in.delta[i]);
  }
  ev.m_bar = pool_per_ray(ev.sigma_med, ev.pool_weight);
  ev.z_phi_bar = pool_per_ray(ev.z_phi, ev.pool_weight);

  const MediumParams& med = field.medium;
  if (condition == Condition::kLowlight) {
    for (std::size_t i = 0; i < n; ++i) ev.in.sigma_attn[i] = Spectrum(ev.sigma_med[i]);
  } else {
    const Spectrum scat = condition == Condition::kHaze ? med.sigma_attn : med.sigma_scat;
    for (std::size_t i = 0; i < n; ++i) {
      switch (ev.mode) {
        case MediumMode::kGlobalConstant:
          ev.media_scale[i] = 1.0;
          ev.media_z[i] = ev.z_phi[i];
          break;
        case MediumMode::kPerRayPooled:
          ev.media_scale[i] = ev.m_bar;
          ev.media_z[i] = ev.z_phi_bar;
          break;
        case MediumMode::kPerSample:
          ev.media_scale[i] = ev.sigma_med[i];
          ev.media_z[i] = ev.z_phi[i];
          break;
      }
      ev.media_z[i] *= overrides.z_phi_scale;
      ev.in.sigma_attn[i] = med.sigma_attn * ev.media_scale[i];
      ev.in.sigma_scat[i] = scat * ev.media_scale[i];
      ev.in.c_med[i] = med.phi * exp((ev.in.sigma_attn[i] + ev.in.sigma_scat[i]) * (-ev.media_z[i]));
    }
  }

  ev.trace = render_intervals(ev.in, samples.t_far());

  // Media-only transmittance at the rendered surface, expected over the
  // normalised object weights.
  ev.T_media.resize(n + 1);
  double accm = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    ev.T_media[i] = std::exp(-accm);
    if (i < n) accm += clamp_od(ev.sigma_med[i] * ev.in.delta[i]);
  }
  ev.surface_w.assign(n + 1, 0.0);
  if (ev.trace.weight_sum >= kMinWeightSum) {
    for (std::size_t i = 0; i < n; ++i) ev.surface_w[i] = ev.trace.weights[i] / ev.trace.weight_sum;
  } else {
    ev.surface_w[n] = 1.0;
  }
  double ts = 0.0;
  for (std::size_t i = 0; i <= n; ++i) ts += ev.surface_w[i] * ev.T_media[i];

  RenderOutput& o = ev.out;
  o.I_hat = ev.trace.I_hat;
  o.J_hat = ev.trace.J_hat;
  o.C_obj = ev.trace.C_obj;
  o.C_med = ev.trace.C_med;
  o.depth_los = ev.trace.depth;
  o.z_phi_ray = ev.z_phi_bar * overrides.z_phi_scale;
  o.media_pooled = ev.m_bar;
  o.T_media_surface = ts;
  o.T_obj = ev.trace.T;
  o.T_D = ev.trace.T_D;
  o.T_B = ev.trace.T_B;
  return ev;
}

RenderOutput render_ray(const Ray& ray, const FieldSet& field, const SampleSet& samples, Condition condition,
                        const RenderOverrides& overrides) {
  return evaluate_ray(ray, field, samples, condition, overrides).out;
}

namespace {

void add_z_phi_gradient(const RayEvaluation& ev, const FieldSet& field, std::size_t i, double dz,
                        FieldGradient& grad) {
  if (dz == 0.0) return;
  if (field.downwelling.kind == DownwellingKind::kGrid) {
    field.downwelling.grid.accumulate_gradient_scalar(ev.dw_stencil[i], dz, grad.downwelling_grid);
  } else if (field.downwelling.surface_height - ev.points[i].y > 0.0) {
    grad.surface_height += dz;
  }
}

}  // namespace

void backward_ray(const RayEvaluation& ev, const FieldSet& field, const RayUpstream& up, FieldGradient& grad) {
  const std::size_t n = ev.in.size();
  IntervalInputs g;
  g.resize(n);
  IntervalUpstream iu{up.d_I, up.d_J, up.d_depth, {}};
  const bool has_surface = ev.trace.weight_sum >= kMinWeightSum;
  if (up.d_T_media_surface != 0.0 && has_surface) {
    iu.d_weights.resize(n);
    const double ts = ev.out.T_media_surface;
    for (std::size_t i = 0; i < n; ++i)
      iu.d_weights[i] = up.d_T_media_surface * (ev.T_media[i] - ts) / ev.trace.weight_sum;
  }
  backward_intervals(ev.in, ev.trace, iu, g);

  std::vector<double> d_med(n, 0.0);
  if (!up.d_sigma_med.empty())
    for (std::size_t i = 0; i < n; ++i) d_med[i] += up.d_sigma_med[i];

  if (up.d_T_media_surface != 0.0) {
    // T_surface = sum_i w_i T_media[i]; T_media[i] depends on sigma_med[k<i].
    double suffix = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      suffix += ev.surface_w[k + 1] * ev.T_media[k + 1];
      if (!clamped(ev.sigma_med[k] * ev.in.delta[k])) d_med[k] -= up.d_T_media_surface * ev.in.delta[k] * suffix;
    }
  }

  const MediumParams& med = field.medium;
  if (ev.condition == Condition::kLowlight) {
    for (std::size_t i = 0; i < n; ++i) d_med[i] += g.sigma_attn[i].sum();
  } else {
    const bool haze = ev.condition == Condition::kHaze;
    const Spectrum scat = haze ? med.sigma_attn : med.sigma_scat;
    double d_mbar = 0.0, d_zbar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = ev.media_scale[i];
      const double zm = ev.media_z[i];
      Spectrum d_sa = g.sigma_attn[i];
      Spectrum d_ss = g.sigma_scat[i];
      double d_zm = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double k = ev.in.sigma_attn[i][c] + ev.in.sigma_scat[i][c];
        const double ex = std::exp(-k * zm);
        grad.phi[c] += g.c_med[i][c] * ex;
        const double d_e = -g.c_med[i][c] * ev.in.c_med[i][c];
        d_sa[c] += d_e * zm;
        d_ss[c] += d_e * zm;
        d_zm += d_e * k;
      }
      double d_s = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        grad.sigma_attn[c] += d_sa[c] * s;
        if (haze)
          grad.sigma_attn[c] += d_ss[c] * s;
        else
          grad.sigma_scat[c] += d_ss[c] * s;
        d_s += d_sa[c] * med.sigma_attn[c] + d_ss[c] * scat[c];
      }
      const double d_z = d_zm * ev.z_phi_scale;
      switch (ev.mode) {
        case MediumMode::kGlobalConstant:
          add_z_phi_gradient(ev, field, i, d_z, grad);
          break;
        case MediumMode::kPerRayPooled:
          d_mbar += d_s;
          d_zbar += d_z;
          break;
        case MediumMode::kPerSample:
          d_med[i] += d_s;
          add_z_phi_gradient(ev, field, i, d_z, grad);
          break;
      }
    }
    if (ev.mode == MediumMode::kPerRayPooled) {
      for (std::size_t i = 0; i < n; ++i) {
        const double q = ev.pool_sum > 0.0 ? ev.pool_weight[i] / ev.pool_sum : 1.0 / static_cast<double>(n);
        d_med[i] += d_mbar * q;
        add_z_phi_gradient(ev, field, i, d_zbar * q, grad);
      }
      // The pooling weights delta_i * T_i depend on the object density ahead.
      if (ev.pool_sum > 0.0) {
        double suffix = 0.0;
        for (std::size_t k = n; k-- > 0;) {
          const double ds = -ev.in.delta[k] * suffix;
          if (!clamped(ev.in.sigma_obj[k] * ev.in.delta[k])) g.sigma_obj[k] += ds;
          const double dq = (d_mbar * (ev.sigma_med[k] - ev.m_bar) + d_zbar * (ev.z_phi[k] - ev.z_phi_bar)) / ev.pool_sum;
          suffix += dq * ev.pool_weight[k];
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    double d_so = g.sigma_obj[i];
    if (!up.d_sigma_obj.empty()) d_so += up.d_sigma_obj[i];
    if (d_so != 0.0) field.object_density.accumulate_gradient_scalar(ev.obj_stencil[i], d_so, grad.object_density);
    field.object_color.accumulate_gradient_rgb(ev.obj_stencil[i], g.c_obj[i], grad.object_color);
    if (d_med[i] != 0.0) field.media_density.accumulate_gradient_scalar(ev.med_stencil[i], d_med[i], grad.media_density);
  }
}

}  // namespace isomedia
