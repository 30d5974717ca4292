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

#include <cstddef>
#include <vector>

#include "traject/error.hpp"
#include "traject/types.hpp"

namespace traject {

/// Head-averaged final-token attention, w_{l,t} = (1/K_h) sum_k alpha_{l,k}(x_T, x_t).
/// Returned row-major as L x T.
inline std::vector<double> projection_weights(const RawActivationBundle& bundle) {
  const std::size_t L = bundle.num_layers();
  const std::size_t T = bundle.num_tokens();
  const std::size_t K = bundle.num_heads();
  std::vector<double> weights(L * T, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    double* row = weights.data() + l * T;
    for (std::size_t k = 0; k < K; ++k) {
      const auto attn = bundle.attention(l, k);
      for (std::size_t t = 0; t < T; ++t) row[t] += attn[t];
    }
    for (std::size_t t = 0; t < T; ++t) row[t] /= static_cast<double>(K);
  }
  return weights;
}

/// Attention-weighted projection of each layer's token states to a single
/// vector: z_l = sum_t w_{l,t} h_{l,t}, with w from projection_weights().
///
/// Each layer uses its own heads' attention. The result has one point per
/// layer and so requires L >= 2.
inline Trajectory project_attention_weighted(const RawActivationBundle& bundle) {
  const std::size_t L = bundle.num_layers();
  const std::size_t T = bundle.num_tokens();
  const std::size_t D = bundle.dim();
  require(L >= 2, ErrorKind::usage,
          "bundle '" + bundle.sample_id() + "' has " + std::to_string(L) + " layer(s); a trajectory needs 2");

  const auto weights = projection_weights(bundle);
  std::vector<double> coords(L * D, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    double* z = coords.data() + l * D;
    for (std::size_t t = 0; t < T; ++t) {
      const double w = weights[l * T + t];
      const auto h = bundle.hidden(l, t);
      for (std::size_t d = 0; d < D; ++d) z[d] += w * h[d];
    }
  }
  return Trajectory(L, D, std::move(coords), bundle.sample_id());
}

namespace detail {

// Pairwise summation of values[first, last) with a fixed split order.
template <typename Get>
double pairwise_sum(std::size_t first, std::size_t last, const Get& get) {
  if (last - first <= 8) {
    double s = 0.0;
    for (std::size_t i = first; i < last; ++i) s += get(i);
    return s;
  }
  const std::size_t mid = first + (last - first) / 2;
  return pairwise_sum(first, mid, get) + pairwise_sum(mid, last, get);
}

}  // namespace detail

/// Pointwise mean across samples. Ensembles larger than
/// kPairwiseThreshold use pairwise summation; smaller ones sum in sample order.
inline constexpr std::size_t kPairwiseThreshold = 1024;

inline Trajectory aggregate_mean(const TrajectoryEnsemble& ensemble) {
  const std::size_t S = ensemble.size();
  const std::size_t n = ensemble.num_layers() * ensemble.dim();
  if (S == 1) return Trajectory(ensemble.num_layers(), ensemble.dim(),
                                std::vector<double>(ensemble[0].coords().begin(), ensemble[0].coords().end()),
                                ensemble[0].sample_id());

  std::vector<double> coords(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    if (S > kPairwiseThreshold) {
      sum = detail::pairwise_sum(0, S, [&](std::size_t s) { return ensemble[s].coords()[i]; });
    } else {
      for (std::size_t s = 0; s < S; ++s) sum += ensemble[s].coords()[i];
    }
    coords[i] = sum / static_cast<double>(S);
  }
  return Trajectory(ensemble.num_layers(), ensemble.dim(), std::move(coords), "mean");
}

}  // namespace traject
