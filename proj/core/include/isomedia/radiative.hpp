// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "isomedia/vec.hpp"

namespace isomedia {

enum class Condition { kHaze, kUnderwater, kLowlight };

std::string_view to_string(Condition c);
// Throws ConfigError for unknown names.
Condition condition_from_string(std::string_view s);

// Closed-form parameters of the matting model
//   I = J * exp(-sigma_attn z) + B * (1 - exp(-sigma_scat z)).
struct DegradationSpec {
  Spectrum J;           // clean object radiance
  Spectrum B;           // ambient / backscatter colour
  Spectrum sigma_attn;  // direct attenuation per unit length
  Spectrum sigma_scat;  // backscatter accumulation per unit length
  double z = 0.0;       // line-of-sight distance
  Condition condition = Condition::kUnderwater;

  // Throws InputError on negative coefficients or distance, a haze spec whose
  // coefficients differ, or a low-light spec with non-zero B.
  void validate() const;
};

// Vertical sunlight attenuation parameters. The solar incidence angle is
// fixed at zero (overhead sun).
struct DownwellingParams {
  Spectrum phi{1.0, 1.0, 1.0};  // surface sunlight
  double z_phi = 0.0;            // vertical distance to the medium surface
};

Spectrum compose(const DegradationSpec& spec);

// Recovers J from an observation with a known medium. Throws
// IllConditionedError naming the channel when exp(-sigma_attn z) <= 1e-12.
Spectrum decompose_given_medium(const Spectrum& I, const Spectrum& B, const Spectrum& sigma_attn,
                                const Spectrum& sigma_scat, double z);

// Shared-coefficient haze model; identical to compose with sigma_attn ==
// sigma_scat == sigma.
Spectrum asm_haze(const Spectrum& J, const Spectrum& B_inf, const Spectrum& sigma, double z);

struct LowlightResult {
  Spectrum I;
  Spectrum K;  // per-channel scaling factor exp(-sigma_attn z)
};
// Virtual absorbing medium: compose with B = 0.
LowlightResult lowlight_scale(const Spectrum& J, const Spectrum& sigma_attn, double z);

// c_med = phi * exp(-(sigma_attn + sigma_scat) * z_phi).
Spectrum downwelling_color(const DownwellingParams& p, const Spectrum& sigma_attn, const Spectrum& sigma_scat);

}  // namespace isomedia
