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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "traject/band.hpp"
#include "traject/error.hpp"

namespace traject {

struct ImportanceRanking {
  std::vector<double> index;       // I_l
  double beta = 0.5;
  std::vector<std::size_t> order;  // by descending I_l, lower layer first on ties
};

/// Structural importance I_l = beta*norm(omega_l) + (1-beta)*norm(vel_l),
/// norm being min-max over layers (a constant component normalizes to 0).
inline ImportanceRanking importance_index(std::span<const double> omega, std::span<const double> vel, double beta) {
  require(omega.size() == vel.size(), ErrorKind::usage,
          "importance_index: omega has " + std::to_string(omega.size()) + " layers, vel has " +
              std::to_string(vel.size()));
  require(!omega.empty(), ErrorKind::usage, "importance_index: no layers");
  require(beta >= 0.0 && beta <= 1.0, ErrorKind::usage, "beta must lie in [0, 1], got " + std::to_string(beta));

  const auto w = minmax_normalize(omega);
  const auto v = minmax_normalize(vel);
  ImportanceRanking r;
  r.beta = beta;
  r.index.resize(omega.size());
  for (std::size_t l = 0; l < omega.size(); ++l) r.index[l] = beta * w[l] + (1.0 - beta) * v[l];
  r.order.resize(omega.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return r.index[a] > r.index[b]; });
  return r;
}

/// Half the band, rounding halves down, at least 1: a 27-layer band gives 13.
inline std::size_t choose_k(const LayerInterval& band) { return std::max<std::size_t>(1, band.size() / 2); }

enum class Strategy {
  none,
  full,
  geometry_selected,
  geometry_weighted,
  reduced_geometry_weighted,
  inverse_geometry,
  random_sparse,
  reasoning_band,
};

inline constexpr std::array<std::pair<Strategy, std::string_view>, 8> kStrategyNames{{
    {Strategy::none, "none"},
    {Strategy::full, "full"},
    {Strategy::geometry_selected, "geometry_selected"},
    {Strategy::geometry_weighted, "geometry_weighted"},
    {Strategy::reduced_geometry_weighted, "reduced_geometry_weighted"},
    {Strategy::inverse_geometry, "inverse_geometry"},
    {Strategy::random_sparse, "random_sparse"},
    {Strategy::reasoning_band, "reasoning_band"},
}};

inline std::string_view to_string(Strategy s) {
  for (const auto& [value, name] : kStrategyNames)
    if (value == s) return name;
  return "unknown";
}

inline Strategy parse_strategy(std::string_view name) {
  for (const auto& [value, n] : kStrategyNames)
    if (n == name) return value;
  fail(ErrorKind::usage, "unknown strategy '" + std::string(name) + "'");
}

struct PlanOptions {
  int base_rank = 32;
  int lora_alpha = 64;
  std::optional<std::uint64_t> seed;
  /// Draw top-K candidates from the band only.
  bool restrict_to_band = true;
  /// Allow layers 0 and L-1, which are pivots at every target, into top-K.
  bool include_endpoints = false;
};

/// Minimum rank handed to any layer under importance-weighted capacity.
inline constexpr int kMinWeightedRank = 4;

struct AdaptationPlan {
  Strategy strategy = Strategy::none;
  std::size_t num_layers = 0;
  std::vector<std::size_t> layers;      // ascending
  std::map<std::size_t, int> ranks;     // exactly the keys in `layers`
  int base_rank = 32;
  int lora_alpha = 64;
  std::optional<std::uint64_t> seed;
};

namespace detail {

// Uniform integer in [0, n) by rejection, independent of the standard
// library's distribution implementation.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  std::uint64_t x = rng();
  while (x < threshold) x = rng();
  return x % n;
}

inline std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t k,
                                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(bounded(rng, population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace detail

/// Layers eligible for top-K selection, in ranking order.
inline std::vector<std::size_t> topk_candidates(const ImportanceRanking& ranking, const LayerInterval& band,
                                                const PlanOptions& options) {
  const std::size_t L = ranking.order.size();
  std::vector<std::size_t> out;
  for (auto l : ranking.order) {
    if (options.restrict_to_band && !band.contains(l)) continue;
    if (!options.include_endpoints && (l == 0 || l == L - 1)) continue;
    out.push_back(l);
  }
  return out;
}

/// Materializes one layer-adaptation strategy as a concrete plan.
///
/// Top-K strategies take the first k candidates of the ranking (see
/// topk_candidates); inverse_geometry is the band minus that set. The
/// geometry_weighted ranks scale linearly with I_l so the most important
/// selected layer gets base_rank, floored at kMinWeightedRank; the reduced
/// variant does the same from half the base rank. `k` defaults to
/// choose_k(band).
inline AdaptationPlan build_plan(Strategy strategy, const ImportanceRanking& ranking, const LayerInterval& band,
                                 std::optional<std::size_t> k, const PlanOptions& options = {}) {
  const std::size_t L = ranking.order.size();
  require(L >= 1, ErrorKind::usage, "build_plan: empty ranking");
  require(band.lo <= band.hi && band.hi < L, ErrorKind::usage,
          "band [" + std::to_string(band.lo) + ", " + std::to_string(band.hi) + "] outside layers [0, " +
              std::to_string(L - 1) + "]");
  require(options.base_rank >= 1, ErrorKind::usage, "base_rank must be positive");
  require(options.lora_alpha >= 1, ErrorKind::usage, "lora_alpha must be positive");
  const std::size_t kk = k.value_or(choose_k(band));
  require(kk >= 1, ErrorKind::usage, "k must be at least 1");

  AdaptationPlan plan;
  plan.strategy = strategy;
  plan.num_layers = L;
  plan.base_rank = options.base_rank;
  plan.lora_alpha = options.lora_alpha;

  auto top_k = [&] {
    auto candidates = topk_candidates(ranking, band, options);
    require(kk <= candidates.size(), ErrorKind::usage,
            "k=" + std::to_string(kk) + " exceeds the " + std::to_string(candidates.size()) +
                " candidate layers for " + std::string(to_string(strategy)));
    candidates.resize(kk);
    std::sort(candidates.begin(), candidates.end());
    return candidates;
  };

  switch (strategy) {
    case Strategy::none:
      break;
    case Strategy::full:
      plan.layers.resize(L);
      std::iota(plan.layers.begin(), plan.layers.end(), std::size_t{0});
      break;
    case Strategy::geometry_selected:
    case Strategy::geometry_weighted:
    case Strategy::reduced_geometry_weighted:
      plan.layers = top_k();
      break;
    case Strategy::inverse_geometry: {
      const auto selected = top_k();
      for (std::size_t l = band.lo; l <= band.hi; ++l)
        if (!std::binary_search(selected.begin(), selected.end(), l)) plan.layers.push_back(l);
      break;
    }
    case Strategy::random_sparse:
      require(options.seed.has_value(), ErrorKind::usage, "random_sparse requires an explicit seed");
      require(kk <= L, ErrorKind::usage,
              "k=" + std::to_string(kk) + " exceeds the " + std::to_string(L) + " layers for random_sparse");
      plan.seed = options.seed;
      plan.layers = detail::sample_without_replacement(L, kk, *options.seed);
      break;
    case Strategy::reasoning_band:
      for (std::size_t l = band.lo; l <= band.hi; ++l) plan.layers.push_back(l);
      break;
  }

  if (strategy == Strategy::reduced_geometry_weighted) {
    plan.base_rank = options.base_rank / 2;
    require(plan.base_rank >= 1, ErrorKind::usage, "base_rank too small to halve");
  }

  if (strategy == Strategy::geometry_weighted || strategy == Strategy::reduced_geometry_weighted) {
    double max_index = 0.0;
    for (auto l : plan.layers) max_index = std::max(max_index, ranking.index[l]);
    for (auto l : plan.layers) {
      int rank = plan.base_rank;
      if (max_index > 0.0) {
        const auto scaled = std::lround(plan.base_rank * ranking.index[l] / max_index);
        rank = std::max(kMinWeightedRank, static_cast<int>(scaled));
      }
      plan.ranks[l] = rank;
    }
  } else {
    for (auto l : plan.layers) plan.ranks[l] = plan.base_rank;
  }
  return plan;
}

}  // namespace traject
