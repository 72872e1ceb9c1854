// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "isomedia/apps.hpp"
#include "isomedia/config.hpp"
#include "isomedia/errors.hpp"
#include "isomedia/fit.hpp"
#include "isomedia/losses.hpp"
#include "isomedia/metrics.hpp"
#include "isomedia/oracle.hpp"
#include "isomedia/priors.hpp"
#include "isomedia/radiative.hpp"
#include "isomedia/renderer.hpp"
#include "isomedia/rng.hpp"
#include "isomedia/sampler.hpp"
#include "reference_loss.hpp"
#include "scenes.hpp"
#include "test_util.hpp"

namespace isomedia {
namespace {

using namespace isomedia::testing;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string config_path(const char* name) { return std::string(ISOMEDIA_CONFIG_DIR) + "/" + name; }

// 1. Slab behind constant media against the closed form.
void matting_equivalence(Outcome& o) {
  const Spectrum J{0.7, 0.5, 0.3}, B{0.04, 0.08, 0.1}, sa{0.8, 0.4, 0.25}, ss{0.12, 0.08, 0.06};
  const double z = 0.5;
  const Spectrum ref = compose({J, B, sa, ss, z});
  std::vector<double> errs;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto n = static_cast<std::size_t>(std::lround(1.0 / delta));
    std::vector<double> pos(n + 1);
    for (std::size_t i = 0; i <= n; ++i) pos[i] = static_cast<double>(i) * delta;
    const SampleSet s(0.0, 1.0, pos, Phase::kObject);
    IntervalInputs in = IntervalInputs::from_samples(s);
    for (std::size_t i = 0; i < n; ++i) {
      in.sigma_obj[i] = in.t_mid[i] > z ? 1e8 : 0.0;
      in.c_obj[i] = J;
      in.sigma_attn[i] = sa;
      in.sigma_scat[i] = ss;
      in.c_med[i] = B;
    }
    const IntervalTrace tr = render_intervals(in, 1.0);
    double e = 0.0;
    for (std::size_t c = 0; c < 3; ++c) e = std::max(e, std::abs(tr.I_hat[c] - ref[c]));
    errs.push_back(e);
  }
  o.detail << "errors";
  for (double e : errs) o.detail << " " << e;
  for (std::size_t i = 1; i < errs.size(); ++i) o.check(errs[i] < errs[i - 1], "monotone refinement");
  o.check(errs.back() < 1e-6, "error at delta 1e-4 below 1e-6");
}

// 2. Closed-form identities and the zero-media render.
void regression_identities(Outcome& o) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0.0, 1.0), s(0.0, 3.0);
  int haze_bad = 0, low_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const Spectrum J{u(g), u(g), u(g)}, B{u(g), u(g), u(g)}, sig{s(g), s(g), s(g)};
    const double z = s(g);
    DegradationSpec h{J, B, sig, sig, z, Condition::kHaze};
    if (!(compose(h) == asm_haze(J, B, sig, z))) ++haze_bad;
    DegradationSpec l{J, Spectrum(0.0), sig, Spectrum(0.0), z, Condition::kLowlight};
    if (!(compose(l) == lowlight_scale(J, sig, z).I)) ++low_bad;
  }
  o.check(haze_bad == 0, "haze equals the shared-coefficient model bit-for-bit");
  o.check(low_bad == 0, "low-light equals the scaling form bit-for-bit");

  int zero_bad = 0;
  for (Condition c : {Condition::kUnderwater, Condition::kHaze}) {
    FieldSet f = random_field(7, MediumMode::kPerRayPooled);
    f.medium.sigma_attn = Spectrum(0.0);
    f.medium.sigma_scat = Spectrum(0.0);
    for (int k = 0; k < 50; ++k) {
      CounterRng rng(2, static_cast<std::uint64_t>(k));
      Ray r = axis_ray();
      r.origin.y = 0.1 + 0.8 * rng.uniform();
      const SampleSet smp = sample_ray(r, f, 32, 16, rng);
      const RenderOutput out = render_ray(r, f, smp, c);
      if (!(out.I_hat == out.J_hat) || !(out.C_med == Spectrum(0.0))) ++zero_bad;
    }
  }
  o.check(zero_bad == 0, "zero media gives I = J and no in-scatter");
  o.detail << "mismatches haze " << haze_bad << " lowlight " << low_bad << " zero-media " << zero_bad;
}

// 3. Reverse-stratified upsampling statistics.
void rsu_distribution(Outcome& o) {
  const int rays = 3125, per = 32;
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(rays * per));
  for (int k = 0; k < rays; ++k) {
    const SampleSet coarse = uniform_samples(0.0, 1.0, 65);
    const ReverseWeights w = reverse_weights(coarse, std::vector<double>(64, 0.0));
    CounterRng rng(3, static_cast<std::uint64_t>(k));
    const SampleSet m = stratified_invert(w, per, rng);
    for (double t : m.positions()) u.push_back(t);
  }
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    ks = std::max({ks, std::abs((i + 1) / n - u[i]), std::abs(u[i] - i / n)});
  o.check(ks < 0.01, "KS statistic below 0.01");

  // One interval carries 99% of the reverse weight.
  const SampleSet coarse = uniform_samples(0.0, 1.0, 11);
  std::vector<double> sig(10, 0.0);
  for (std::size_t i = 0; i < 10; ++i)
    if (i != 4) sig[i] = 9.0;  // peak 9: only interval 4 keeps delta * 9
  ReverseWeights w = reverse_weights(coarse, sig);
  double tot = 0.0;
  for (double x : w.w_med) tot += x;
  const double share = w.w_med[4] / tot;
  std::size_t inside = 0, all = 0;
  for (int k = 0; k < 1000; ++k) {
    CounterRng rng(4, static_cast<std::uint64_t>(k));
    const SampleSet m = stratified_invert(w, 32, rng);
    for (double t : m.positions()) {
      inside += (t >= 0.4 && t <= 0.5);
      ++all;
    }
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(all);
  o.check(share >= 0.99, "interval carries 99% of the weight");
  o.check(frac >= 0.95, "at least 95% of samples inside");
  o.detail << "samples " << u.size() << " KS " << ks << "; weight share " << share << " captured " << frac;
}

// 4. Every loss and the full render-to-loss chain against central differences.
void gradient_suite(Outcome& o) {
  std::mt19937_64 g(5);
  double worst_loss = 0.0;
  std::string worst_name;
  auto note = [&](const char* name, double e) {
    if (e > worst_loss) {
      worst_loss = e;
      worst_name = name;
    }
  };
  auto fd_vec = [&](const std::function<double(std::span<const double>)>& f, const std::vector<double>& x,
                    const std::vector<double>& an, double h) {
    double w = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) w = std::max(w, rel_err(an[i], central_diff(f, x, i, h), 1e-6));
    return w;
  };
  {
    const auto x = uniform_vector(g, 24, 0.0, 1.0), y = uniform_vector(g, 24, 0.0, 1.0);
    std::vector<double> gr(24), den(24);
    recon_loss(x, y, gr);
    for (std::size_t i = 0; i < 24; ++i) den[i] = x[i] + kReconEpsilon;
    note("recon", fd_vec([&](std::span<const double> v) {
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += std::pow((v[i] - y[i]) / den[i], 2);
      return s / 24.0;
    }, x, gr, 1e-5));
  }
  {
    const auto d = uniform_vector(g, 30, 0.2, 3.0), p = uniform_vector(g, 30, 0.0, 1.0);
    std::vector<double> gr(30);
    geo_loss(d, p, gr);
    note("geo", fd_vec([&](std::span<const double> v) { return geo_loss(v, p); }, d, gr, 1e-6));
  }
  {
    const auto a = uniform_vector(g, 30, 0.0, 1.0), b = uniform_vector(g, 30, 0.0, 2.0);
    std::vector<double> ga(30), gb(30);
    mutex_loss(a, b, ga, gb);
    note("mutex_obj", fd_vec([&](std::span<const double> v) { return mutex_loss(v, b); }, a, ga, 1e-6));
    note("mutex_med", fd_vec([&](std::span<const double> v) { return mutex_loss(a, v); }, b, gb, 1e-6));
    std::vector<double> gm(30);
    media_trans_loss(a, b, gm);
    note("media", fd_vec([&](std::span<const double> v) { return media_trans_loss(v, b); }, a, gm, 1e-6));
    const std::vector<std::size_t> off{0, 12, 30};
    std::vector<double> gn(30);
    mono_loss(b, off, gn);
    note("mono", fd_vec([&](std::span<const double> v) { return mono_loss(v, off); }, b, gn, 1e-6));
  }
  {
    std::vector<PatchPair> ps(2);
    for (auto& p : ps) {
      p.size = 12;
      p.J = uniform_vector(g, 432, 0.0, 1.0);
      p.I = uniform_vector(g, 432, 0.0, 1.0);
    }
    SsimCompensation comp;
    comp.nu_tilde = 0.4;
    comp.kappa_tilde = 1.6;
    std::vector<std::vector<double>> gr;
    comp_ssim_loss(ps, comp, &gr);
    for (std::size_t h = 0; h < 2; ++h)
      note("comp_ssim", fd_vec([&](std::span<const double> v) {
        auto q = ps;
        q[h].J.assign(v.begin(), v.end());
        return comp_ssim_loss(q, comp);
      }, ps[h].J, gr[h], 1e-5));
  }
  o.check(worst_loss < 1e-4, "individual losses");

  double worst_chain = 0.0;
  std::string where;
  const OracleScene scene = underwater_scene({6, 6}, {0.0, 30.0});
  FitData d = fit_data_from(scene, generate(scene), true);
  for (auto& v : d.views) {
    v.transmittance_prior = Image(6, 6, 1);
    for (double& x : v.transmittance_prior.data()) x = std::uniform_real_distribution<double>(0.2, 0.9)(g);
  }
  struct Case {
    Condition c;
    MediumMode m;
    DownwellingKind dw;
  };
  for (const Case& cs : {Case{Condition::kUnderwater, MediumMode::kPerRayPooled, DownwellingKind::kGrid},
                         Case{Condition::kHaze, MediumMode::kPerRayPooled, DownwellingKind::kPlane},
                         Case{Condition::kLowlight, MediumMode::kPerSample, DownwellingKind::kPlane}}) {
    FitConfig cfg = FitConfig::for_condition(cs.c);
    cfg.n_obj = 8;
    cfg.n_add = 4;
    cfg.threads = 2;
    cfg.ssim.patches = 2;
    cfg.ssim.patch_size = 4;
    cfg.weights = {0.5, 0.2, 0.3, 0.4, cs.c};
    const FieldSet f = random_field(13, cs.m, cs.dw);
    const Batch b = draw_batch(d, cfg, 1);
    const auto s = sample_batch(d, f, b, cfg, 1);
    const BatchEvaluation ev = evaluate_batch(d, f, b, s, cfg, true);
    FrozenDenominators frozen;
    reference_batch_loss(d, f, b, s, cfg, &frozen);
    const FdReport r = check_field_gradient(
        f, ev.grad, [&](const FieldSet& x) { return reference_batch_loss(d, x, b, s, cfg, &frozen); }, 1e-5, 1e-6);
    if (r.worst > worst_chain) {
      worst_chain = r.worst;
      where = std::string(to_string(cs.c)) + " " + r.where;
    }
  }
  o.check(worst_chain < 1e-4, "render-to-loss chain");
  o.detail << "worst rel err: losses " << worst_loss << " (" << worst_name << ")" << ", chain " << worst_chain;
  if (worst_chain >= 1e-4) o.detail << " at " << where;
}

// Underwater recovery on the bundled three-view scene.
void inverse_recovery(Outcome& o) {
  const ProjectConfig pc = load_config(config_path("underwater.json"));
  const GroundTruth gt = generate(pc.scene);
  const FitData data = fit_data_from(pc.scene, gt, true);
  const FitResult r = fit(data, pc.initial_field(), pc.fit);
  o.check(!r.diverged, "no divergence");
  if (r.diverged) {
    o.detail << r.message;
    return;
  }
  RenderSettings rs;
  rs.n_obj = pc.fit.n_obj;
  rs.n_add = pc.fit.n_add;
  rs.seed = pc.seed;
  double pooled = 0.0, zrel = 0.0, psnr_sum = 0.0;
  std::size_t count = 0, zcount = 0;
  for (std::size_t v = 0; v < gt.views.size(); ++v) {
    const RenderedView rv = render_view(r.field, pc.scene.cameras[v], pc.scene.image_size, pc.condition, rs);
    for (double x : rv.media_pooled.data()) pooled += x;
    count += rv.media_pooled.pixel_count();
    for (int i = 0; i < pc.scene.image_size.height; ++i)
      for (int j = 0; j < pc.scene.image_size.width; ++j) {
        zrel += std::abs(rv.z_phi.at(i, j) - gt.views[v].z_phi.at(i, j)) / gt.views[v].z_phi.at(i, j);
        ++zcount;
      }
    psnr_sum += psnr(rv.J_hat, gt.views[v].J);
  }
  pooled /= static_cast<double>(count);
  zrel /= static_cast<double>(zcount);
  const double p = psnr_sum / static_cast<double>(gt.views.size());
  const Spectrum sa = r.field.medium.sigma_attn * pooled, ss = r.field.medium.sigma_scat * pooled;
  double worst_sigma = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    worst_sigma = std::max({worst_sigma, std::abs(sa[c] / pc.scene.sigma_attn[c] - 1.0),
                            std::abs(ss[c] / pc.scene.sigma_scat[c] - 1.0)});
  o.check(worst_sigma < 0.05, "medium coefficients within 5%");
  o.check(p > 30.0, "restored J PSNR above 30 dB");
  o.check(zrel < 0.10, "downwelling depth within 10%");
  o.detail << "sigma_attn " << sa[0] << " " << sa[1] << " " << sa[2] << " sigma_scat " << ss[0] << " " << ss[1]
           << " " << ss[2] << " (worst rel " << worst_sigma << "); J PSNR " << p << " dB; z_phi mean rel err " << zrel
           << "; final loss " << r.history.back().total;
}

// Low-light recovery on the bundled absorber scene.
void lowlight_recovery(Outcome& o) {
  const ProjectConfig pc = load_config(config_path("lowlight.json"));
  const GroundTruth gt = generate(pc.scene);
  const FitData data = fit_data_from(pc.scene, gt, true);

  // Illumination prior against the true transmittance, away from edges in T
  // and away from unlit pixels.
  const std::vector<Image> priors = bcp_priors(data, pc.fit);
  const int H = pc.scene.image_size.height, W = pc.scene.image_size.width, margin = pc.fit.bcp_patch / 2 + 1;
  double bcp_worst = 0.0;
  std::size_t bcp_n = 0;
  for (std::size_t v = 0; v < gt.views.size(); ++v)
    for (int i = 0; i < H; ++i)
      for (int j = 0; j < W; ++j) {
        bool interior = true;
        const double t0 = gt.views[v].T.at(i, j, 0);
        for (int a = -margin; a <= margin && interior; ++a)
          for (int b = -margin; b <= margin && interior; ++b) {
            const int y = std::clamp(i + a, 0, H - 1), x = std::clamp(j + b, 0, W - 1);
            if (std::abs(gt.views[v].T.at(y, x, 0) - t0) > 1e-9 || gt.views[v].J.rgb(y, x).max_component() == 0.0)
              interior = false;
          }
        if (!interior) continue;
        bcp_worst = std::max(bcp_worst, std::abs(priors[v].at(i, j) - t0));
        ++bcp_n;
      }
  o.check(bcp_n > 0 && bcp_worst < 0.05, "illumination prior within 0.05 away from boundaries");

  const FitResult r = fit(data, pc.initial_field(), pc.fit);
  o.check(!r.diverged, "no divergence");
  if (r.diverged) {
    o.detail << r.message;
    return;
  }
  RenderSettings rs;
  rs.n_obj = pc.fit.n_obj;
  rs.n_add = pc.fit.n_add;
  rs.seed = pc.seed;
  double psnr_sum = 0.0;
  for (std::size_t v = 0; v < gt.views.size(); ++v)
    psnr_sum += psnr(render_view(r.field, pc.scene.cameras[v], pc.scene.image_size, pc.condition, rs).J_hat,
                     gt.views[v].J);
  const double p = psnr_sum / static_cast<double>(gt.views.size());

  // Mutex term at convergence over a fresh full-size batch.
  FitConfig probe = pc.fit;
  probe.weights.lambda_trans = 0.0;
  const Batch b = draw_batch(data, probe, pc.fit.steps);
  const auto s = sample_batch(data, r.field, b, probe, pc.fit.steps);
  const double mutex = evaluate_batch(data, r.field, b, s, probe, false).parts.mutex;
  o.check(p > 30.0, "restored J PSNR above 30 dB");
  o.check(mutex < 1e-4, "mutex term below 1e-4");
  o.detail << "prior worst err " << bcp_worst << " over " << bcp_n << " px; J PSNR " << p << " dB; mutex " << mutex
           << "; final loss " << r.history.back().total;
}

// 7. Volume of the bundled pool scene and the single-cuboid example.
void volume_estimation(Outcome& o) {
  Pose p;
  p.translation = {0.5, 0.5, 2.0};
  const double cuboid = estimate_volume(Image(1, 1, 1, 2.0), Image(1, 1, 1, 3.0), 1.0, CameraModel::orthographic(1, 1, p));
  o.check(cuboid == 6.0, "1x1 example gives 6 m^3");

  const ProjectConfig pc = load_config(config_path("volume.json"));
  const GroundTruth gt = generate(pc.scene);
  const CameraModel& cam = pc.scene.cameras[0];
  const double metres = pc.apps.width_real / cam.extent_x;
  Image z = medium_depth(gt.views[0], cam, pc.scene.image_size), zphi = gt.views[0].z_phi;
  for (double& x : z.data()) x *= metres;
  for (double& x : zphi.data()) x *= metres;
  const double est = estimate_volume(z, zphi, pc.apps.width_real, cam);
  const double truth = pool_volume() * metres * metres * metres;
  const double rel = std::abs(est / truth - 1.0);
  o.check(rel < 0.02, "pool volume within 2%");
  o.detail << "cuboid " << cuboid << " m^3; pool estimate " << est << " m^3 vs " << truth << " m^3 (rel err " << rel
           << ")";
}

// 8. Backscatter against downwelling depth.
void downwelling_monotonicity(Outcome& o) {
  const Spectrum sa{0.9, 0.6, 0.4}, ss{0.5, 0.4, 0.3};
  bool strict = true;
  Spectrum prev = downwelling_color({Spectrum(1.0), 0.0}, sa, ss);
  for (int k = 1; k <= 200; ++k) {
    const Spectrum c = downwelling_color({Spectrum(1.0), 0.05 * k}, sa, ss);
    for (std::size_t ch = 0; ch < 3; ++ch) strict = strict && c[ch] < prev[ch];
    prev = c;
  }
  // Same check through the renderer by stretching z_phi.
  const FieldSet f = random_field(8, MediumMode::kPerRayPooled);
  CounterRng rng(8, 0);
  const SampleSet smp = sample_ray(axis_ray(), f, 32, 16, rng);
  Spectrum last = render_ray(axis_ray(), f, smp, Condition::kUnderwater, {0.0}).C_med;
  for (int k = 1; k <= 50; ++k) {
    const Spectrum c = render_ray(axis_ray(), f, smp, Condition::kUnderwater, {0.1 * k}).C_med;
    for (std::size_t ch = 0; ch < 3; ++ch) strict = strict && c[ch] < last[ch];
    last = c;
  }
  o.check(strict, "backscatter strictly decreasing in z_phi");

  const ProjectConfig pc = load_config(config_path("underwater.json"));
  FieldSet::Options opt = pc.fields;
  const FieldSet gtf = voxelize(pc.scene, opt, 60.0);
  RenderSettings rs;
  rs.n_obj = 32;
  rs.n_add = 16;
  auto mean_cmed = [&](double scale) {
    Spectrum m;
    const auto views = resynthesize_depth_scaled(gtf, pc.scene.cameras, pc.scene.image_size, pc.condition, rs, scale);
    for (const RenderedView& v : views) m += v.C_med.mean();
    return m / static_cast<double>(views.size());
  };
  const Spectrum lo = mean_cmed(1.0 / 3.0), base = mean_cmed(1.0), hi = mean_cmed(3.0);
  for (std::size_t c = 0; c < 3; ++c) {
    o.check(lo[c] > base[c], "scale 1/3 brighter");
    o.check(hi[c] < base[c], "scale 3 darker");
  }
  o.detail << "mean backscatter x1/3 " << lo[0] << " " << lo[1] << " " << lo[2] << " | x1 " << base[0] << " "
           << base[1] << " " << base[2] << " | x3 " << hi[0] << " " << hi[1] << " " << hi[2];
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime limit checked
  void (*run)(Outcome&);
};

}  // namespace
}  // namespace isomedia

int main(int argc, char** argv) {
  using namespace isomedia;
  const std::vector<Criterion> all{
      {1, "matting equivalence", 5.0, matting_equivalence},
      {2, "regression identities", 1.0, regression_identities},
      {3, "RSU distribution", 10.0, rsu_distribution},
      {4, "gradient suite", 60.0, gradient_suite},
      {5, "inverse recovery (underwater)", 600.0, inverse_recovery},
      {6, "low-light recovery", 0.0, lowlight_recovery},
      {7, "volume estimation", 0.0, volume_estimation},
      {8, "downwelling monotonicity", 0.0, downwelling_monotonicity},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double t = seconds_since(t0);
    if (c.budget_s > 0.0) o.check(t < c.budget_s, "runtime budget");
    std::printf("%s criterion %d (%s): %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(), t);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
