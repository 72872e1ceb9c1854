// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#include "isomedia/samples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isomedia/errors.hpp"

namespace isomedia {

SampleSet::SampleSet(double t_near, double t_far, std::vector<double> positions, Phase phase)
    : t_near_(t_near), t_far_(t_far), positions_(std::move(positions)), phases_(positions_.size(), phase) {
  normalize();
}

SampleSet::SampleSet(double t_near, double t_far, std::vector<double> positions, std::vector<Phase> phases)
    : t_near_(t_near), t_far_(t_far), positions_(std::move(positions)), phases_(std::move(phases)) {
  if (phases_.size() != positions_.size()) throw InputError("sample positions and phases differ in length");
  normalize();
}

void SampleSet::normalize() {
  for (double t : positions_) {
    if (!std::isfinite(t)) throw InputError("non-finite sample position");
    if (t < t_near_ || t > t_far_) throw InputError("sample position outside ray bounds");
  }
  if (std::is_sorted(positions_.begin(), positions_.end()) &&
      std::adjacent_find(positions_.begin(), positions_.end()) == positions_.end())
    return;

  std::vector<std::size_t> order(positions_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return positions_[a] < positions_[b]; });
  std::vector<double> pos;
  std::vector<Phase> ph;
  pos.reserve(order.size());
  ph.reserve(order.size());
  for (std::size_t idx : order) {
    if (!pos.empty() && pos.back() == positions_[idx]) continue;
    pos.push_back(positions_[idx]);
    ph.push_back(phases_[idx]);
  }
  positions_ = std::move(pos);
  phases_ = std::move(ph);
}

std::vector<double> SampleSet::deltas() const {
  std::vector<double> d(interval_count());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = positions_[i + 1] - positions_[i];
  return d;
}

std::vector<double> SampleSet::midpoints() const {
  std::vector<double> m(interval_count());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (positions_[i] + positions_[i + 1]);
  return m;
}

std::size_t SampleSet::count(Phase p) const {
  return static_cast<std::size_t>(std::count(phases_.begin(), phases_.end(), p));
}

SampleSet sort_merge(const SampleSet& a, const SampleSet& b) {
  const double t_near = std::min(a.t_near(), b.t_near());
  const double t_far = std::max(a.t_far(), b.t_far());
  const auto pa = a.positions();
  const auto pb = b.positions();
  const auto ta = a.phases();
  const auto tb = b.phases();

  std::vector<double> pos;
  std::vector<Phase> ph;
  pos.reserve(pa.size() + pb.size());
  ph.reserve(pa.size() + pb.size());
  std::size_t i = 0, j = 0;
  auto push = [&](double t, Phase p) {
    if (!pos.empty() && pos.back() == t) return;
    pos.push_back(t);
    ph.push_back(p);
  };
  while (i < pa.size() || j < pb.size()) {
    if (j == pb.size() || (i < pa.size() && pa[i] <= pb[j])) {
      push(pa[i], ta[i]);
      ++i;
    } else {
      push(pb[j], tb[j]);
      ++j;
    }
  }
  return SampleSet(t_near, t_far, std::move(pos), std::move(ph));
}

}  // namespace isomedia
