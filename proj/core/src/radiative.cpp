// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/radiative.hpp"

#include <cmath>
#include <string>

#include "isomedia/errors.hpp"

namespace isomedia {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::kHaze:
      return "haze";
    case Condition::kUnderwater:
      return "underwater";
    case Condition::kLowlight:
      return "lowlight";
  }
  return "underwater";
}

Condition condition_from_string(std::string_view s) {
  if (s == "haze") return Condition::kHaze;
  if (s == "underwater") return Condition::kUnderwater;
  if (s == "lowlight") return Condition::kLowlight;
  throw ConfigError("unknown condition '" + std::string(s) + "'");
}

void DegradationSpec::validate() const {
  if (!sigma_attn.is_valid() || !sigma_scat.is_valid()) throw InputError("medium coefficients must be >= 0");
  if (!(z >= 0.0) || !std::isfinite(z)) throw InputError("line-of-sight distance must be >= 0");
  if (condition == Condition::kHaze && !(sigma_attn == sigma_scat))
    throw InputError("haze requires sigma_attn == sigma_scat");
  if (condition == Condition::kLowlight && !(B == Spectrum(0.0))) throw InputError("low-light requires B == 0");
}

Spectrum compose(const DegradationSpec& spec) {
  Spectrum I;
  for (std::size_t c = 0; c < 3; ++c) {
    const double direct = spec.J[c] * std::exp(-spec.sigma_attn[c] * spec.z);
    const double back = spec.B[c] * (1.0 - std::exp(-spec.sigma_scat[c] * spec.z));
    I[c] = direct + back;
  }
  return I;
}

Spectrum decompose_given_medium(const Spectrum& I, const Spectrum& B, const Spectrum& sigma_attn,
                                const Spectrum& sigma_scat, double z) {
  Spectrum J;
  for (std::size_t c = 0; c < 3; ++c) {
    const double t = std::exp(-sigma_attn[c] * z);
    if (!(t > 1e-12))
      throw IllConditionedError("transmittance too small to invert in channel " + std::to_string(c),
                                static_cast<int>(c));
    J[c] = (I[c] - B[c] * (1.0 - std::exp(-sigma_scat[c] * z))) * std::exp(sigma_attn[c] * z);
  }
  return J;
}

Spectrum asm_haze(const Spectrum& J, const Spectrum& B_inf, const Spectrum& sigma, double z) {
  return compose(DegradationSpec{J, B_inf, sigma, sigma, z, Condition::kHaze});
}

LowlightResult lowlight_scale(const Spectrum& J, const Spectrum& sigma_attn, double z) {
  LowlightResult r;
  r.I = compose(DegradationSpec{J, Spectrum(0.0), sigma_attn, Spectrum(0.0), z, Condition::kLowlight});
  for (std::size_t c = 0; c < 3; ++c) r.K[c] = std::exp(-sigma_attn[c] * z);
  return r;
}

Spectrum downwelling_color(const DownwellingParams& p, const Spectrum& sigma_attn, const Spectrum& sigma_scat) {
  Spectrum out;
  for (std::size_t c = 0; c < 3; ++c) out[c] = p.phi[c] * std::exp(-(sigma_attn[c] + sigma_scat[c]) * p.z_phi);
  return out;
}

}  // namespace isomedia
