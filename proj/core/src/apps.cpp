// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/apps.hpp"

#include <algorithm>
#include <cmath>

#include "isomedia/errors.hpp"
#include "isomedia/parallel.hpp"
#include "isomedia/rng.hpp"
#include "isomedia/sampler.hpp"

namespace isomedia {

RenderedView render_view(const FieldSet& field, const CameraModel& camera, ImageSize size, Condition condition,
                         const RenderSettings& settings, const RenderOverrides& overrides) {
  const RayBatch rays = generate_rays(camera, size);
  const int H = size.height, W = size.width;
  RenderedView v{Image(H, W, 3), Image(H, W, 3), Image(H, W, 3), Image(H, W, 1), Image(H, W, 1), Image(H, W, 1),
                 Image(H, W, 1)};
  const int threads = settings.threads > 0 ? settings.threads : default_thread_count();
  parallel_chunks(rays.rays.size(), threads, [&](int, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const int r = static_cast<int>(k) / W, c = static_cast<int>(k) % W;
      CounterRng rng = CounterRng::for_ray(settings.seed, k, 0);
      const SampleSet s = sample_ray(rays.rays[k], field, settings.n_obj, settings.n_add, rng);
      const RenderOutput o = render_ray(rays.rays[k], field, s, condition, overrides);
      v.I_hat.set_rgb(r, c, o.I_hat);
      v.J_hat.set_rgb(r, c, o.J_hat);
      v.C_med.set_rgb(r, c, o.C_med);
      v.depth.at(r, c) = o.depth_los;
      v.z_phi.at(r, c) = o.z_phi_ray;
      v.T_media.at(r, c) = o.T_media_surface;
      v.media_pooled.at(r, c) = o.media_pooled;
    }
  });
  return v;
}

double estimate_volume(const Image& depth_los, const Image& z_phi, double width_real, const CameraModel& camera) {
  if (camera.kind != CameraKind::kOrthographic)
    throw ContractError("volume estimation assumes an orthographic camera");
  if (!(width_real > 0.0)) throw InputError("real image width must be positive");
  if (depth_los.empty() || depth_los.height() != z_phi.height() || depth_los.width() != z_phi.width())
    throw InputError("depth and downwelling maps must share a shape");
  const double dw = width_real / static_cast<double>(depth_los.width());
  double v = 0.0;
  for (int i = 0; i < depth_los.height(); ++i)
    for (int j = 0; j < depth_los.width(); ++j) {
      const double dz = i == 0 ? z_phi.at(i, j) : std::max(0.0, z_phi.at(i, j) - z_phi.at(i - 1, j));
      v += depth_los.at(i, j) * dz * dw;
    }
  return v;
}

std::vector<RenderedView> resynthesize_depth_scaled(const FieldSet& field, const std::vector<CameraModel>& cameras,
                                                    ImageSize size, Condition condition,
                                                    const RenderSettings& settings, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InputError("depth scale must be finite and >= 0");
  std::vector<RenderedView> out;
  out.reserve(cameras.size());
  for (const CameraModel& cam : cameras) out.push_back(render_view(field, cam, size, condition, settings, {scale}));
  return out;
}

}  // namespace isomedia
