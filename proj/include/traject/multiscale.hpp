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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "traject/error.hpp"
#include "traject/parallel.hpp"
#include "traject/rdp.hpp"
#include "traject/types.hpp"

namespace traject {

/// Bisection stops once the bracket is narrower than this times max(1, eps_hi).
inline constexpr double kEpsilonSearchTolerance = 1e-9;

struct TargetEpsilon {
  double epsilon = 0.0;
  SimplificationResult pivots;
};

/// Smallest threshold whose simplification keeps at most t points.
///
/// Retained-point counts are non-increasing in epsilon, so the feasible set
/// is a half-line. The search bisects [0, eps_hi], where eps_hi is the
/// largest deviation from the global chord (at which only the endpoints
/// survive), and keeps the feasible end of the bracket. That end is then
/// lowered to the largest deviation among unsplit segments, which retains
/// the same points and is the exact jump location whenever no other jump
/// falls inside the final bracket.
///
/// `upper_hint`, if given, must be a threshold already known to be feasible
/// for t (e.g. the result for a smaller target); it narrows the bracket.
inline TargetEpsilon epsilon_for_target(const Trajectory& traj, std::size_t t,
                                        std::optional<double> upper_hint = std::nullopt) {
  const std::size_t L = traj.size();
  require(t >= 3 && t <= L, ErrorKind::usage,
          "target " + std::to_string(t) + " outside [3, " + std::to_string(L) + "]");

  auto at_zero = rdp(traj, 0.0);
  if (at_zero.size() <= t) return {0.0, std::move(at_zero)};

  const double eps_hi = segment_max_deviation(traj, 0, L - 1).distance;
  const double tol = kEpsilonSearchTolerance * std::max(1.0, eps_hi);
  double lo = 0.0;
  double hi = eps_hi;
  if (upper_hint && *upper_hint >= 0.0 && *upper_hint < hi) hi = *upper_hint;

  while (hi - lo >= tol) {
    const double mid = lo + (hi - lo) / 2;
    if (rdp(traj, mid).size() <= t)
      hi = mid;
    else
      lo = mid;
  }

  double jump = 0.0;
  detail::rdp_impl(traj, hi, &jump);
  auto pivots = detail::rdp_impl(traj, jump, nullptr);
  pivots.epsilon = jump;
  return {jump, std::move(pivots)};
}

/// Every integer target in [3, L].
inline std::vector<std::size_t> default_targets(std::size_t num_layers) {
  std::vector<std::size_t> out;
  for (std::size_t t = 3; t <= num_layers; ++t) out.push_back(t);
  return out;
}

/// Sorts and deduplicates targets, checking each lies in [3, L].
inline std::vector<std::size_t> normalize_targets(std::vector<std::size_t> targets, std::size_t num_layers) {
  for (auto t : targets)
    require(t >= 3 && t <= num_layers, ErrorKind::usage,
            "target " + std::to_string(t) + " outside [3, " + std::to_string(num_layers) + "]");
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  return targets;
}

struct MultiScaleResult {
  std::vector<std::size_t> targets;               // ascending
  std::vector<double> epsilons;                   // aligned with targets
  std::vector<std::vector<std::size_t>> pivot_sets;  // aligned with targets
  std::vector<double> scores;                     // per layer, omega_RDP(l)
};

/// omega_RDP(l) = sum over targets t of [l in P_t] / sqrt(t), accumulated
/// in ascending t.
inline std::vector<double> rdp_importance(std::size_t num_layers, const std::vector<std::size_t>& targets,
                                          const std::vector<std::vector<std::size_t>>& pivot_sets) {
  std::vector<double> scores(num_layers, 0.0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double weight = 1.0 / std::sqrt(static_cast<double>(targets[i]));
    for (auto l : pivot_sets[i]) scores[l] += weight;
  }
  return scores;
}

inline MultiScaleResult multiscale_analyze(const Trajectory& traj,
                                           std::optional<std::vector<std::size_t>> targets = std::nullopt) {
  MultiScaleResult result;
  result.targets = targets ? normalize_targets(std::move(*targets), traj.size()) : default_targets(traj.size());
  std::optional<double> hint;
  for (auto t : result.targets) {
    auto found = epsilon_for_target(traj, t, hint);
    hint = found.epsilon;
    result.epsilons.push_back(found.epsilon);
    result.pivot_sets.push_back(std::move(found.pivots.kept_indices));
  }
  result.scores = rdp_importance(traj.size(), result.targets, result.pivot_sets);
  return result;
}

/// Pivot frequency over samples at one target: counts[l] in [0, S].
struct PivotHistogram {
  std::size_t target = 0;
  std::vector<std::size_t> counts;
};

struct EnsembleVote {
  std::vector<std::size_t> targets;
  std::vector<double> mean_scores;
  std::vector<PivotHistogram> histograms;  // aligned with targets
  std::vector<MultiScaleResult> per_sample;
};

/// Multi-scale analysis of every sample, followed by the arithmetic mean of
/// omega_RDP and per-target pivot histograms. Samples may be analysed in
/// parallel; reductions run in sample order.
inline EnsembleVote ensemble_vote(const TrajectoryEnsemble& ensemble,
                                  std::optional<std::vector<std::size_t>> targets = std::nullopt) {
  const std::size_t L = ensemble.num_layers();
  EnsembleVote vote;
  vote.targets = targets ? normalize_targets(std::move(*targets), L) : default_targets(L);

  vote.per_sample.resize(ensemble.size());
  parallel_for(ensemble.size(), [&](std::size_t s) {
    vote.per_sample[s] = multiscale_analyze(ensemble[s], vote.targets);
  });

  vote.mean_scores.assign(L, 0.0);
  for (const auto& r : vote.per_sample)
    for (std::size_t l = 0; l < L; ++l) vote.mean_scores[l] += r.scores[l];
  for (auto& v : vote.mean_scores) v /= static_cast<double>(ensemble.size());

  for (std::size_t i = 0; i < vote.targets.size(); ++i) {
    PivotHistogram h{vote.targets[i], std::vector<std::size_t>(L, 0)};
    for (const auto& r : vote.per_sample)
      for (auto l : r.pivot_sets[i]) ++h.counts[l];
    vote.histograms.push_back(std::move(h));
  }
  return vote;
}

}  // namespace traject
