// Copyright (c) 2026, The traject Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "traject/error.hpp"
#include "traject/types.hpp"

namespace traject {

/// Chords shorter than this are treated as a single point.
inline constexpr double kDegenerateChord = 1e-12;

/// Residuals below this fraction of |p - a| are rounding noise from the
/// projection and are reported as exactly zero.
inline constexpr double kCollinearRelTol = 64 * std::numeric_limits<double>::epsilon();

/// Euclidean distance from p to the infinite line through a and b, in any
/// dimension. Falls back to |p - a| when |b - a| < kDegenerateChord.
/// Collinear points give exactly 0 (see kCollinearRelTol).
inline double perpendicular_distance(PointView p, PointView a, PointView b) {
  require(p.size() == a.size() && a.size() == b.size(), ErrorKind::usage,
          "perpendicular_distance: dimension mismatch (" + std::to_string(p.size()) + ", " +
              std::to_string(a.size()) + ", " + std::to_string(b.size()) + ")");
  const std::size_t D = p.size();
  double uu = 0.0;
  double vu = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double u = b[i] - a[i];
    uu += u * u;
    vu += (p[i] - a[i]) * u;
  }
  double rr = 0.0;
  if (std::sqrt(uu) < kDegenerateChord) {
    for (std::size_t i = 0; i < D; ++i) rr += (p[i] - a[i]) * (p[i] - a[i]);
    return std::sqrt(rr);
  }
  const double s = vu / uu;
  double vv = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double v = p[i] - a[i];
    const double r = v - s * (b[i] - a[i]);
    rr += r * r;
    vv += v * v;
  }
  const double dist = std::sqrt(rr);
  return dist <= kCollinearRelTol * std::sqrt(vv) ? 0.0 : dist;
}

struct SimplificationResult {
  /// Retained original indices, strictly increasing; always holds 0 and L-1.
  std::vector<std::size_t> kept_indices;
  double epsilon = 0.0;

  std::size_t size() const noexcept { return kept_indices.size(); }
};

/// Largest deviation of an interior point of [first, last] from the chord
/// through its endpoints. Scans left to right with a strict comparison, so
/// the lowest index wins ties; index is `first` when no point deviates.
struct SegmentMax {
  std::size_t index;
  double distance;
};

inline SegmentMax segment_max_deviation(const Trajectory& traj, std::size_t first, std::size_t last) {
  SegmentMax best{first, 0.0};
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = perpendicular_distance(traj[i], traj[first], traj[last]);
    if (d > best.distance) best = {i, d};
  }
  return best;
}

namespace detail {

// Core of rdp(). When unsplit_max is non-null it receives the largest
// deviation among segments that kept interior points without being split,
// i.e. the smallest threshold that still yields the same simplification.
inline SimplificationResult rdp_impl(const Trajectory& traj, double epsilon, double* unsplit_max) {
  const std::size_t L = traj.size();
  std::vector<bool> keep(L, false);
  keep[0] = keep[L - 1] = true;
  double leaf_max = 0.0;

  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, L - 1}};
  while (!stack.empty()) {
    const auto [first, last] = stack.back();
    stack.pop_back();
    if (last - first < 2) continue;
    const auto split = segment_max_deviation(traj, first, last);
    if (split.distance > epsilon) {
      keep[split.index] = true;
      stack.emplace_back(first, split.index);
      stack.emplace_back(split.index, last);
    } else if (split.distance > leaf_max) {
      leaf_max = split.distance;
    }
  }

  if (unsplit_max != nullptr) *unsplit_max = leaf_max;
  SimplificationResult result;
  result.epsilon = epsilon;
  for (std::size_t i = 0; i < L; ++i)
    if (keep[i]) result.kept_indices.push_back(i);
  return result;
}

}  // namespace detail

/// Ramer-Douglas-Peucker simplification with threshold epsilon.
///
/// A segment is split at its farthest interior point only when that
/// distance is strictly greater than epsilon; points at exactly epsilon are
/// dropped. Segments are processed from an explicit stack, so recursion
/// depth does not grow with L.
inline SimplificationResult rdp(const Trajectory& traj, double epsilon) {
  require(epsilon >= 0.0 && std::isfinite(epsilon), ErrorKind::usage,
          "rdp: epsilon must be finite and nonnegative, got " + std::to_string(epsilon));
  return detail::rdp_impl(traj, epsilon, nullptr);
}

}  // namespace traject
