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

// Library walk-through: load a bundle, find the band, rank layers and print
// a geometry_selected plan.
//
//   traject_demo tests/data/bend_bundle.trjb

#include <cstdio>
#include <iostream>

#include "traject/traject.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: traject_demo BUNDLE.trjb|MANIFEST.jsonl\n";
    return 2;
  }
  try {
    const auto ensemble = traject::io::load_ensemble(argv[1]);
    const auto mean = traject::aggregate_mean(ensemble);

    const auto band = traject::extract_band(mean);
    std::printf("L=%zu D=%zu S=%zu  band [%zu, %zu]  tau=%.4f\n", ensemble.num_layers(), ensemble.dim(),
                ensemble.size(), band.band.lo, band.band.hi, band.tau);

    const auto vote = traject::ensemble_vote(ensemble);
    const auto ranking = traject::importance_index(vote.mean_scores, band.vel, 0.5);
    const auto plan = traject::build_plan(traject::Strategy::geometry_selected, ranking, band.band, std::nullopt);

    std::printf("adapt %zu layers:", plan.layers.size());
    for (auto l : plan.layers) std::printf(" %zu", l);
    std::printf("\n");
  } catch (const traject::Error& e) {
    std::cerr << "ERROR:" << traject::to_string(e.kind()) << ":" << e.what() << "\n";
    return 1;
  }
  return 0;
}
