// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isomedia/errors.hpp"
#include "isomedia/parallel.hpp"
#include "isomedia/priors.hpp"
#include "isomedia/renderer.hpp"
#include "isomedia/rng.hpp"
#include "isomedia/sampler.hpp"

namespace isomedia {

FitConfig FitConfig::for_condition(Condition c) {
  FitConfig cfg;
  cfg.condition = c;
  cfg.weights = LossWeights::for_condition(c);
  return cfg;
}

FitConfig FitConfig::full_profile(Condition c) {
  FitConfig cfg = for_condition(c);
  cfg.steps = 25000;
  cfg.batch_rays = 4096;
  return cfg;
}

void FitConfig::validate() const {
  if (steps < 0) throw ConfigError("fit steps must be >= 0");
  if (!(lr_final > 0.0) || !(lr_final <= lr_init)) throw ConfigError("learning rates need 0 < lr_final <= lr_init");
  if (batch_rays < 1) throw ConfigError("batch must hold at least one ray");
  if (n_obj < 2) throw ConfigError("n_obj must be >= 2");
  if (n_add < 0) throw ConfigError("n_add must be >= 0");
  if (!(divergence_threshold > 0.0)) throw ConfigError("divergence threshold must be positive");
  if (bcp_patch < 1 || bcp_patch % 2 == 0) throw ConfigError("BCP patch size must be a positive odd integer");
  if (!(bcp_gamma > 0.0) || !std::isfinite(bcp_gamma)) throw ConfigError("bcp_gamma must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(adam_eps > 0.0))
    throw ConfigError("Adam parameters out of range");
  weights.validate();
  ssim.validate();
}

void FitData::validate() const {
  if (views.size() < 2) throw InputError("fitting needs at least two views");
  for (const FitView& v : views) {
    v.camera.validate();
    if (v.I.height() != size.height || v.I.width() != size.width || v.I.channels() != 3)
      throw InputError("observation does not match the declared image size");
    if (!v.depth_prior.empty() && (v.depth_prior.height() != size.height || v.depth_prior.width() != size.width))
      throw InputError("depth prior does not match the image size");
    if (!v.transmittance_prior.empty() &&
        (v.transmittance_prior.height() != size.height || v.transmittance_prior.width() != size.width))
      throw InputError("transmittance prior does not match the image size");
  }
}

namespace {

bool patch_mode(const FitConfig& cfg) { return cfg.weights.lambda_comp > 0.0; }

std::uint64_t ray_id(const FitData& d, const BatchRay& r) {
  return (static_cast<std::uint64_t>(r.view) * static_cast<std::uint64_t>(d.size.height) +
          static_cast<std::uint64_t>(r.row)) *
             static_cast<std::uint64_t>(d.size.width) +
         static_cast<std::uint64_t>(r.col);
}

int threads_for(const FitConfig& cfg) { return cfg.threads > 0 ? cfg.threads : default_thread_count(); }

}  // namespace

Batch draw_batch(const FitData& data, const FitConfig& cfg, int iteration) {
  CounterRng rng(cfg.seed, 0x5EED0000ull + static_cast<std::uint64_t>(iteration));
  Batch b;
  const auto nv = static_cast<std::uint64_t>(data.views.size());
  const int H = data.size.height, W = data.size.width;
  if (patch_mode(cfg)) {
    const int p = std::min({cfg.ssim.patch_size, H, W});
    b.patch_size = p;
    b.patch_count = cfg.ssim.patches;
    for (int h = 0; h < cfg.ssim.patches; ++h) {
      const int v = static_cast<int>(rng.below(nv));
      const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(H - p + 1)));
      const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(W - p + 1)));
      for (int y = 0; y < p; ++y)
        for (int x = 0; x < p; ++x) b.rays.push_back({v, y0 + y, x0 + x});
    }
  } else {
    const auto np = static_cast<std::uint64_t>(H) * static_cast<std::uint64_t>(W);
    b.rays.reserve(static_cast<std::size_t>(cfg.batch_rays));
    for (int k = 0; k < cfg.batch_rays; ++k) {
      const int v = static_cast<int>(rng.below(nv));
      const auto px = rng.below(np);
      b.rays.push_back({v, static_cast<int>(px / static_cast<std::uint64_t>(W)),
                        static_cast<int>(px % static_cast<std::uint64_t>(W))});
    }
  }
  return b;
}

std::vector<SampleSet> sample_batch(const FitData& data, const FieldSet& field, const Batch& batch,
                                    const FitConfig& cfg, int iteration) {
  std::vector<SampleSet> out(batch.rays.size());
  parallel_chunks(batch.rays.size(), threads_for(cfg), [&](int, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const BatchRay& br = batch.rays[k];
      const Ray ray = data.views[static_cast<std::size_t>(br.view)].camera.pixel_ray(br.row, br.col, data.size.width,
                                                                                      data.size.height);
      const auto span = intersect_unit_cube(ray.origin, ray.direction);
      if (!span) throw ConfigError("a training ray misses the scene cube");
      Ray clipped = ray;
      clipped.t_near = span->first;
      clipped.t_far = span->second;
      CounterRng rng = CounterRng::for_ray(cfg.seed, ray_id(data, br), static_cast<std::uint64_t>(iteration));
      out[k] = sample_ray(clipped, field, cfg.n_obj, cfg.n_add, rng);
    }
  });
  return out;
}

namespace {

struct RayForward {
  Spectrum I_hat, J_hat;
  double depth = 0.0;
  double T_surface = 1.0;
  std::vector<double> sigma_obj;
  std::vector<double> sigma_med;
};

Ray batch_ray(const FitData& data, const BatchRay& br, const SampleSet& s) {
  Ray ray = data.views[static_cast<std::size_t>(br.view)].camera.pixel_ray(br.row, br.col, data.size.width,
                                                                            data.size.height);
  ray.t_near = s.t_near();
  ray.t_far = s.t_far();
  return ray;
}

// Per-ray upstream gradients assembled from every loss term.
struct Upstream {
  std::vector<Spectrum> d_I, d_J;
  std::vector<double> d_depth, d_T;
  std::vector<std::vector<double>> d_sigma_obj, d_sigma_med;
};

void normalize_in_place(std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double a = *lo, r = *hi - *lo;
  for (double& x : v) x = r > 0.0 ? (x - a) / r : 0.5;
}

}  // namespace

std::vector<Image> bcp_priors(const FitData& data, const FitConfig& cfg) {
  std::vector<Image> out;
  for (const FitView& v : data.views) {
    Image I = v.I;
    if (cfg.bcp_gamma != 1.0)
      for (double& x : I.data()) x = std::pow(std::max(x, 0.0), 1.0 / cfg.bcp_gamma);
    const Spectrum amb = cfg.bcp_full_ambient ? estimate_ambient(I) : Spectrum(0.0);
    Image t = bcp_map(I, cfg.bcp_patch, amb).values;
    // Back to a linear transmittance.
    if (cfg.bcp_gamma != 1.0)
      for (double& x : t.data()) x = std::pow(x, cfg.bcp_gamma);
    out.push_back(std::move(t));
  }
  return out;
}

BatchEvaluation evaluate_batch(const FitData& data, const FieldSet& field, const Batch& batch,
                               std::span<const SampleSet> samples, const FitConfig& cfg, bool want_grad) {
  const std::size_t n = batch.rays.size();
  if (samples.size() != n) throw InputError("one sample set per batch ray expected");
  const int threads = threads_for(cfg);
  std::vector<RayForward> fw(n);
  parallel_chunks(n, threads, [&](int, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const RayEvaluation ev =
          evaluate_ray(batch_ray(data, batch.rays[k], samples[k]), field, samples[k], cfg.condition);
      fw[k].I_hat = ev.out.I_hat;
      fw[k].J_hat = ev.out.J_hat;
      fw[k].depth = ev.out.depth_los;
      fw[k].T_surface = ev.out.T_media_surface;
      fw[k].sigma_obj = ev.in.sigma_obj;
      fw[k].sigma_med = ev.sigma_med;
    }
  });

  const LossWeights& w = cfg.weights;
  BatchEvaluation res;
  Upstream up;
  up.d_I.assign(n, Spectrum());
  up.d_J.assign(n, Spectrum());
  up.d_depth.assign(n, 0.0);
  up.d_T.assign(n, 0.0);
  up.d_sigma_obj.resize(n);
  up.d_sigma_med.resize(n);

  // Reconstruction.
  {
    std::vector<double> pred(n * 3), obs(n * 3), g(n * 3);
    for (std::size_t k = 0; k < n; ++k) {
      const BatchRay& br = batch.rays[k];
      const Spectrum o = data.views[static_cast<std::size_t>(br.view)].I.rgb(br.row, br.col);
      for (std::size_t c = 0; c < 3; ++c) {
        pred[k * 3 + c] = fw[k].I_hat[c];
        obs[k * 3 + c] = o[c];
      }
    }
    res.parts.recon = recon_loss(pred, obs, g);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t c = 0; c < 3; ++c) up.d_I[k][c] += g[k * 3 + c];
  }

  // Geometry, normalised per view over the rays of that view in the batch.
  {
    std::size_t total = 0;
    std::vector<std::vector<std::size_t>> groups(data.views.size());
    for (std::size_t k = 0; k < n; ++k) {
      const auto v = static_cast<std::size_t>(batch.rays[k].view);
      if (!data.views[v].depth_prior.empty()) {
        groups[v].push_back(k);
        ++total;
      }
    }
    for (std::size_t v = 0; v < groups.size(); ++v) {
      const auto& idx = groups[v];
      if (idx.empty()) continue;
      std::vector<double> d(idx.size()), prior(idx.size()), g(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const BatchRay& br = batch.rays[idx[i]];
        d[i] = fw[idx[i]].depth;
        prior[i] = data.views[v].depth_prior.at(br.row, br.col);
      }
      normalize_in_place(prior);
      const double share = static_cast<double>(idx.size()) / static_cast<double>(total);
      res.parts.geo += share * geo_loss(d, prior, g);
      for (std::size_t i = 0; i < idx.size(); ++i) up.d_depth[idx[i]] += w.lambda_geo * share * g[i];
    }
  }

  // Compensated SSIM over the batch patches.
  if (batch.patch_count > 0 && w.lambda_comp > 0.0) {
    const int p = batch.patch_size;
    const std::size_t per = static_cast<std::size_t>(p) * static_cast<std::size_t>(p);
    std::vector<PatchPair> patches(static_cast<std::size_t>(batch.patch_count));
    for (std::size_t h = 0; h < patches.size(); ++h) {
      patches[h].size = p;
      patches[h].J.resize(per * 3);
      patches[h].I.resize(per * 3);
      for (std::size_t q = 0; q < per; ++q) {
        const std::size_t k = h * per + q;
        const BatchRay& br = batch.rays[k];
        const Spectrum o = data.views[static_cast<std::size_t>(br.view)].I.rgb(br.row, br.col);
        for (std::size_t c = 0; c < 3; ++c) {
          patches[h].J[q * 3 + c] = fw[k].J_hat[c];
          patches[h].I[q * 3 + c] = o[c];
        }
      }
    }
    std::vector<std::vector<double>> g;
    res.parts.comp = comp_ssim_loss(patches, cfg.ssim, want_grad ? &g : nullptr);
    if (want_grad)
      for (std::size_t h = 0; h < patches.size(); ++h)
        for (std::size_t q = 0; q < per; ++q)
          for (std::size_t c = 0; c < 3; ++c) up.d_J[h * per + q][c] += w.lambda_comp * g[h][q * 3 + c];
  }

  // Per-sample terms over the whole batch.
  {
    std::vector<double> so, sm;
    std::vector<std::size_t> offsets{0};
    for (const RayForward& f : fw) {
      so.insert(so.end(), f.sigma_obj.begin(), f.sigma_obj.end());
      sm.insert(sm.end(), f.sigma_med.begin(), f.sigma_med.end());
      offsets.push_back(so.size());
    }
    std::vector<double> g_so(so.size()), g_sm(so.size()), g_mono(so.size());
    res.parts.mutex = mutex_loss(so, sm, g_so, g_sm);
    res.parts.mono = mono_loss(sm, offsets, g_mono);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t b = offsets[k], m = offsets[k + 1] - b;
      up.d_sigma_obj[k].resize(m);
      up.d_sigma_med[k].resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        up.d_sigma_obj[k][i] = w.lambda_mutex * g_so[b + i];
        up.d_sigma_med[k][i] = w.lambda_mutex * g_sm[b + i] + w.lambda_trans * g_mono[b + i];
      }
    }
  }

  // Media transmittance against the prior.
  {
    std::vector<double> t, prior;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; ++k) {
      const FitView& v = data.views[static_cast<std::size_t>(batch.rays[k].view)];
      if (v.transmittance_prior.empty()) continue;
      idx.push_back(k);
      t.push_back(fw[k].T_surface);
      prior.push_back(v.transmittance_prior.at(batch.rays[k].row, batch.rays[k].col));
    }
    if (!idx.empty()) {
      std::vector<double> g(idx.size());
      res.parts.media = media_trans_loss(t, prior, g);
      for (std::size_t i = 0; i < idx.size(); ++i) up.d_T[idx[i]] += w.lambda_trans * g[i];
    }
  }

  res.total = total_loss(res.parts, w);
  if (!want_grad) return res;

  // Backward: re-evaluate each ray on its fixed samples and push the
  // upstream terms through; per-chunk buffers merge in chunk order.
  const int chunks = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(n, 1)));
  std::vector<FieldGradient> partial(static_cast<std::size_t>(chunks), FieldGradient::zeros_like(field));
  parallel_chunks(n, chunks, [&](int chunk, std::size_t b, std::size_t e) {
    FieldGradient& g = partial[static_cast<std::size_t>(chunk)];
    for (std::size_t k = b; k < e; ++k) {
      const RayEvaluation ev =
          evaluate_ray(batch_ray(data, batch.rays[k], samples[k]), field, samples[k], cfg.condition);
      RayUpstream ru;
      ru.d_I = up.d_I[k];
      ru.d_J = up.d_J[k];
      ru.d_depth = up.d_depth[k];
      ru.d_T_media_surface = up.d_T[k];
      ru.d_sigma_obj = up.d_sigma_obj[k];
      ru.d_sigma_med = up.d_sigma_med[k];
      backward_ray(ev, field, ru, g);
    }
  });
  res.grad = std::move(partial[0]);
  for (std::size_t c = 1; c < partial.size(); ++c) res.grad += partial[c];
  const std::string_view bad = res.grad.first_non_finite();
  if (!bad.empty()) throw NumericError("non-finite gradient in " + std::string(bad));
  return res;
}

std::vector<double> pack_parameters(const FieldSet& f) {
  std::vector<double> p;
  for (const VoxelField* g : {&f.object_density, &f.object_color, &f.media_density, &f.downwelling.grid})
    p.insert(p.end(), g->raw().begin(), g->raw().end());
  for (const Spectrum* s : {&f.medium.sigma_attn, &f.medium.sigma_scat, &f.medium.phi})
    for (std::size_t c = 0; c < 3; ++c) p.push_back(std::log(std::max((*s)[c], 1e-12)));
  p.push_back(f.downwelling.surface_height);
  return p;
}

void unpack_parameters(std::span<const double> p, FieldSet& f) {
  std::size_t o = 0;
  for (VoxelField* g : {&f.object_density, &f.object_color, &f.media_density, &f.downwelling.grid}) {
    auto raw = g->raw_mut();
    if (o + raw.size() > p.size()) throw InputError("parameter vector is too short");
    std::copy(p.begin() + static_cast<std::ptrdiff_t>(o), p.begin() + static_cast<std::ptrdiff_t>(o + raw.size()),
              raw.begin());
    o += raw.size();
  }
  if (o + 10 != p.size()) throw InputError("parameter vector has the wrong length");
  for (Spectrum* s : {&f.medium.sigma_attn, &f.medium.sigma_scat, &f.medium.phi})
    for (std::size_t c = 0; c < 3; ++c) (*s)[c] = std::exp(p[o++]);
  f.downwelling.surface_height = p[o];
  f.update_activation();
}

std::vector<double> pack_gradient(const FieldGradient& g, const FieldSet& f, const FitConfig& cfg) {
  std::vector<double> out;
  out.insert(out.end(), g.object_density.begin(), g.object_density.end());
  out.insert(out.end(), g.object_color.begin(), g.object_color.end());
  for (double v : g.media_density) out.push_back(cfg.learn_media ? v : 0.0);
  const bool surface = cfg.learn_surface;
  for (double v : g.downwelling_grid) out.push_back(surface ? v : 0.0);
  for (std::size_t c = 0; c < 3; ++c) out.push_back(cfg.learn_medium ? g.sigma_attn[c] * f.medium.sigma_attn[c] : 0.0);
  for (std::size_t c = 0; c < 3; ++c) out.push_back(cfg.learn_medium ? g.sigma_scat[c] * f.medium.sigma_scat[c] : 0.0);
  for (std::size_t c = 0; c < 3; ++c) out.push_back(cfg.learn_phi ? g.phi[c] * f.medium.phi[c] : 0.0);
  out.push_back(surface ? g.surface_height : 0.0);
  return out;
}

double learning_rate(const FitConfig& cfg, int step) {
  if (cfg.steps <= 1) return cfg.lr_init;
  const double s = static_cast<double>(step) / static_cast<double>(cfg.steps - 1);
  return cfg.lr_init * std::pow(cfg.lr_final / cfg.lr_init, std::clamp(s, 0.0, 1.0));
}

FitResult fit(const FitData& data, FieldSet init, const FitConfig& cfg,
              const std::function<void(const HistoryRow&)>& on_step) {
  cfg.validate();
  data.validate();
  init.validate();
  FitResult res;
  res.field = std::move(init);
  if (cfg.steps == 0) return res;

  FitData work = data;
  if (cfg.weights.lambda_trans > 0.0) {
    const std::vector<Image> priors = bcp_priors(work, cfg);
    for (std::size_t v = 0; v < work.views.size(); ++v)
      if (work.views[v].transmittance_prior.empty()) work.views[v].transmittance_prior = priors[v];
  }

  std::vector<double> params = pack_parameters(res.field);
  std::vector<double> m(params.size(), 0.0), vel(params.size(), 0.0);
  double b1t = 1.0, b2t = 1.0;
  for (int step = 0; step < cfg.steps; ++step) {
    const Batch batch = draw_batch(work, cfg, step);
    const std::vector<SampleSet> samples = sample_batch(work, res.field, batch, cfg, step);
    BatchEvaluation ev = evaluate_batch(work, res.field, batch, samples, cfg, true);

    HistoryRow row;
    row.step = step;
    row.lr = learning_rate(cfg, step);
    row.parts = ev.parts;
    row.total = ev.total;
    row.grad_max = ev.grad.max_abs();
    res.history.push_back(row);
    if (on_step) on_step(row);
    if (!std::isfinite(ev.total) || ev.total > cfg.divergence_threshold) {
      res.diverged = true;
      res.message = "loss diverged at step " + std::to_string(step) + " (total " + std::to_string(ev.total) + ")";
      return res;
    }

    const std::vector<double> g = pack_gradient(ev.grad, res.field, cfg);
    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      vel[i] = cfg.beta2 * vel[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mh = m[i] / (1.0 - b1t), vh = vel[i] / (1.0 - b2t);
      params[i] -= row.lr * mh / (std::sqrt(vh) + cfg.adam_eps);
    }
    unpack_parameters(params, res.field);
  }
  return res;
}

}  // namespace isomedia
