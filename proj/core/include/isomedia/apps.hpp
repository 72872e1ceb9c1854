// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "isomedia/camera.hpp"
#include "isomedia/field_set.hpp"
#include "isomedia/image.hpp"
#include "isomedia/radiative.hpp"
#include "isomedia/renderer.hpp"

namespace isomedia {

struct RenderSettings {
  int n_obj = 64;
  int n_add = 32;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: default_thread_count()
};

struct RenderedView {
  Image I_hat;
  Image J_hat;
  Image C_med;
  Image depth;
  Image z_phi;
  Image T_media;  // media-only transmittance at the rendered surface
  Image media_pooled;
};

RenderedView render_view(const FieldSet& field, const CameraModel& camera, ImageSize size, Condition condition,
                         const RenderSettings& settings, const RenderOverrides& overrides = {});

// V = sum_ij z_ij * dz_ij * (width_real / W), where dz is z_phi on the first
// row and max(0, z_phi_ij - z_phi_{i-1,j}) below it. Maps must share a shape.
// Throws ContractError for a non-orthographic camera and InputError when
// width_real <= 0.
double estimate_volume(const Image& depth_los, const Image& z_phi, double width_real, const CameraModel& camera);

// Re-renders every camera with z_phi scaled by `scale`; everything else fixed.
std::vector<RenderedView> resynthesize_depth_scaled(const FieldSet& field, const std::vector<CameraModel>& cameras,
                                                    ImageSize size, Condition condition,
                                                    const RenderSettings& settings, double scale);

}  // namespace isomedia
