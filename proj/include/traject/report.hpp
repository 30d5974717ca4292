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

#include <string>

#include <nlohmann/json.hpp>

#include "traject/band.hpp"
#include "traject/multiscale.hpp"
#include "traject/ranking.hpp"
#include "traject/rdp.hpp"

// JSON views of analysis results. Keys keep insertion order so repeated
// runs serialize byte-identically; every report names its layer indexing.

namespace traject::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kLayerIndexing = "0-based";

inline json to_json(const SimplificationResult& r) {
  return json{{"layer_indexing", kLayerIndexing}, {"epsilon", r.epsilon}, {"kept_indices", r.kept_indices}};
}

inline json to_json(const MultiScaleResult& r) {
  json eps = json::object();
  json pivots = json::object();
  for (std::size_t i = 0; i < r.targets.size(); ++i) {
    eps[std::to_string(r.targets[i])] = r.epsilons[i];
    pivots[std::to_string(r.targets[i])] = r.pivot_sets[i];
  }
  return json{{"layer_indexing", kLayerIndexing},
              {"targets", r.targets},
              {"epsilons", eps},
              {"pivot_sets", pivots},
              {"scores", r.scores}};
}

inline json to_json(const EnsembleVote& v) {
  json hist = json::object();
  for (const auto& h : v.histograms) hist[std::to_string(h.target)] = h.counts;
  json samples = json::array();
  for (const auto& s : v.per_sample) samples.push_back(to_json(s));
  return json{{"layer_indexing", kLayerIndexing},
              {"num_samples", v.per_sample.size()},
              {"targets", v.targets},
              {"mean_scores", v.mean_scores},
              {"histograms", hist},
              {"samples", samples}};
}

inline json to_json(const BandReport& r) {
  return json{{"layer_indexing", kLayerIndexing},
              {"alpha", r.params.alpha},
              {"window", r.params.window},
              {"polyorder", r.params.polyorder},
              {"bins", r.params.bins},
              {"threshold_on", std::string(to_string(r.params.threshold_on))},
              {"dev", r.dev},
              {"vel", r.vel},
              {"dev_norm", r.dev_norm},
              {"vel_norm", r.vel_norm},
              {"raw_signal", r.raw_signal},
              {"smoothed", r.smoothed},
              {"tau", r.tau},
              {"band", {r.band.lo, r.band.hi}},
              {"degenerate", r.degenerate}};
}

inline json to_json(const ImportanceRanking& r) {
  return json{{"layer_indexing", kLayerIndexing}, {"beta", r.beta}, {"index", r.index}, {"order", r.order}};
}

inline json to_json(const AdaptationPlan& p) {
  json ranks = json::object();
  for (const auto& [layer, rank] : p.ranks) ranks[std::to_string(layer)] = rank;
  return json{{"strategy", std::string(to_string(p.strategy))},
              {"base_rank", p.base_rank},
              {"lora_alpha", p.lora_alpha},
              {"layers", p.layers},
              {"ranks", ranks},
              {"seed", p.seed ? json(*p.seed) : json(nullptr)},
              {"num_layers", p.num_layers},
              {"layer_indexing", kLayerIndexing}};
}

/// Pretty-printed JSON with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace traject::report
