// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace isomedia {

enum class Phase : std::uint8_t { kObject = 0, kMedia = 1 };

// Ascending ray-marching positions. Consecutive positions bound the quadrature
// intervals, so n positions give n - 1 intervals of length delta_k.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(double t_near, double t_far) : t_near_(t_near), t_far_(t_far) {}
  // Sorts and coalesces the input. Throws InputError if a position leaves
  // [t_near, t_far] or is non-finite.
  SampleSet(double t_near, double t_far, std::vector<double> positions, Phase phase);
  SampleSet(double t_near, double t_far, std::vector<double> positions, std::vector<Phase> phases);

  double t_near() const { return t_near_; }
  double t_far() const { return t_far_; }
  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }
  std::size_t interval_count() const { return positions_.size() < 2 ? 0 : positions_.size() - 1; }

  std::span<const double> positions() const { return positions_; }
  std::span<const Phase> phases() const { return phases_; }
  std::vector<double> deltas() const;
  std::vector<double> midpoints() const;
  std::size_t count(Phase p) const;

 private:
  void normalize();

  double t_near_ = 0.0;
  double t_far_ = 1.0;
  std::vector<double> positions_;
  std::vector<Phase> phases_;
};

// Union of two sample sets on the same ray. Phase tags travel with their
// positions; exactly coincident positions collapse to one entry (the tag
// from `a` wins), so every interval of the result has positive length.
SampleSet sort_merge(const SampleSet& a, const SampleSet& b);

}  // namespace isomedia
