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

// Random generators and independent reference implementations shared by the
// unit and acceptance suites. Nothing here calls into the algorithms it is
// used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "traject/types.hpp"

namespace traject::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

using Points = std::vector<std::vector<double>>;

inline Points random_points(Rng& rng, std::size_t L, std::size_t D, double scale = 1.0) {
  Points pts(L, std::vector<double>(D));
  for (auto& p : pts)
    for (auto& v : p) v = scale * rng.normal();
  return pts;
}

/// Random walk: consecutive points stay close, like layer trajectories.
inline Points random_walk(Rng& rng, std::size_t L, std::size_t D) {
  Points pts(L, std::vector<double>(D, 0.0));
  for (std::size_t l = 1; l < L; ++l)
    for (std::size_t d = 0; d < D; ++d) pts[l][d] = pts[l - 1][d] + rng.normal();
  return pts;
}

inline Trajectory to_trajectory(const Points& pts) { return Trajectory(pts); }

inline Points to_points(const Trajectory& t) {
  Points pts(t.size());
  for (std::size_t l = 0; l < t.size(); ++l) pts[l].assign(t[l].begin(), t[l].end());
  return pts;
}

// ---- distance and RDP ---------------------------------------------------------

/// |(p-a) - ((p-a).u)u| with u the unit chord direction.
inline double oracle_distance(const std::vector<double>& p, const std::vector<double>& a,
                              const std::vector<double>& b) {
  const std::size_t D = p.size();
  std::vector<double> u(D), v(D);
  double norm = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    u[i] = b[i] - a[i];
    v[i] = p[i] - a[i];
    norm += u[i] * u[i];
  }
  norm = std::sqrt(norm);
  if (norm < 1e-12) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  for (auto& x : u) x /= norm;
  double dot = 0.0;
  for (std::size_t i = 0; i < D; ++i) dot += v[i] * u[i];
  double s = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double r = v[i] - dot * u[i];
    s += r * r;
  }
  return std::sqrt(s);
}

/// Line-by-line recursive transcription of the textbook algorithm over an
/// index list: scan interior points left to right with strict '>', split
/// at the farthest one if it exceeds epsilon, concatenate dropping the
/// duplicated split point.
inline std::vector<std::size_t> oracle_rdp(const Points& pts, const std::vector<std::size_t>& idx, double eps) {
  const std::size_t n = idx.size();
  double dmax = 0.0;
  std::size_t index = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d = oracle_distance(pts[idx[i]], pts[idx[0]], pts[idx[n - 1]]);
    if (d > dmax) {
      index = i;
      dmax = d;
    }
  }
  if (dmax > eps) {
    std::vector<std::size_t> left(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(index) + 1);
    std::vector<std::size_t> right(idx.begin() + static_cast<std::ptrdiff_t>(index), idx.end());
    auto res1 = oracle_rdp(pts, left, eps);
    auto res2 = oracle_rdp(pts, right, eps);
    res1.pop_back();
    res1.insert(res1.end(), res2.begin(), res2.end());
    return res1;
  }
  return {idx.front(), idx.back()};
}

inline std::vector<std::size_t> oracle_rdp(const Points& pts, double eps) {
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return oracle_rdp(pts, idx, eps);
}

// Segment maxima met while fully simplifying at epsilon = 0.
inline void collect_split_deviations(const Points& pts, std::size_t first, std::size_t last,
                                     std::vector<double>& out) {
  if (last - first < 2) return;
  double dmax = 0.0;
  std::size_t index = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = oracle_distance(pts[i], pts[first], pts[last]);
    if (d > dmax) {
      dmax = d;
      index = i;
    }
  }
  out.push_back(dmax);
  if (dmax > 0.0) {
    collect_split_deviations(pts, first, index, out);
    collect_split_deviations(pts, index, last, out);
  }
}

/// Minimal feasible epsilon for target t by enumeration: the retained count
/// only changes at deviations realized during the recursion, so the answer
/// is 0 or one of those values.
inline double oracle_min_epsilon(const Points& pts, std::size_t t) {
  std::vector<double> candidates{0.0};
  collect_split_deviations(pts, 0, pts.size() - 1, candidates);
  std::sort(candidates.begin(), candidates.end());
  for (double c : candidates)
    if (oracle_rdp(pts, c).size() <= t) return c;
  return candidates.back();
}

// ---- band signal --------------------------------------------------------------

/// Savitzky-Golay weights from the normal equations (A^T A) c = A^T e_j,
/// solved by Gaussian elimination with partial pivoting.
inline std::vector<double> oracle_savgol_kernel(int left, int right, int order) {
  const int n = left + right + 1;
  const int m = std::min(order, n - 1) + 1;
  std::vector<std::vector<double>> A(n, std::vector<double>(m));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < m; ++k) A[j][k] = std::pow(static_cast<double>(j - left), k);

  std::vector<double> weights(n);
  for (int col = 0; col < n; ++col) {
    std::vector<std::vector<double>> M(m, std::vector<double>(m + 1, 0.0));
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c)
        for (int j = 0; j < n; ++j) M[r][c] += A[j][r] * A[j][c];
      M[r][m] = A[col][r];
    }
    for (int p = 0; p < m; ++p) {
      int piv = p;
      for (int r = p + 1; r < m; ++r)
        if (std::abs(M[r][p]) > std::abs(M[piv][p])) piv = r;
      std::swap(M[p], M[piv]);
      for (int r = 0; r < m; ++r) {
        if (r == p) continue;
        const double f = M[r][p] / M[p][p];
        for (int c = p; c <= m; ++c) M[r][c] -= f * M[p][c];
      }
    }
    weights[col] = M[0][m] / M[0][0];
  }
  return weights;
}

struct OracleOtsu {
  std::size_t edge;
  double threshold;
};

/// Exhaustive scan of every interior bin edge, partitioning the samples
/// directly rather than through a cumulative histogram.
inline OracleOtsu oracle_otsu(const std::vector<double>& signal, std::size_t bins) {
  const double lo = *std::min_element(signal.begin(), signal.end());
  const double hi = *std::max_element(signal.begin(), signal.end());
  std::vector<std::size_t> bin(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double v = (signal[i] - lo) / (hi - lo);
    bin[i] = std::min(bins - 1, static_cast<std::size_t>(std::floor(v * static_cast<double>(bins))));
  }
  OracleOtsu best{0, 0.0};
  double best_var = -1.0;
  for (std::size_t k = 1; k < bins; ++k) {
    double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (auto b : bin) {
      const double c = (static_cast<double>(b) + 0.5) / static_cast<double>(bins);
      if (b < k) { n0 += 1; s0 += c; } else { n1 += 1; s1 += c; }
    }
    double var = 0.0;
    if (n0 > 0 && n1 > 0) {
      const double n = n0 + n1;
      var = (n0 / n) * (n1 / n) * (s0 / n0 - s1 / n1) * (s0 / n0 - s1 / n1);
    }
    if (var > best_var) {
      best_var = var;
      best.edge = k;
    }
  }
  best.threshold = lo + (static_cast<double>(best.edge) / static_cast<double>(bins)) * (hi - lo);
  return best;
}

// ---- activations ------------------------------------------------------------------

struct RawArrays {
  std::size_t L, T, D, K;
  std::vector<double> hidden;  // L*T*D
  std::vector<double> attn;    // L*K*T
};

inline RawArrays random_raw(Rng& rng, std::size_t L, std::size_t T, std::size_t D, std::size_t K) {
  RawArrays r{L, T, D, K, std::vector<double>(L * T * D), std::vector<double>(L * K * T)};
  for (auto& h : r.hidden) h = rng.normal();
  for (std::size_t row = 0; row < L * K; ++row) {
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) sum += r.attn[row * T + t] = rng.uniform(0.0, 1.0) + 1e-3;
    for (std::size_t t = 0; t < T; ++t) r.attn[row * T + t] /= sum;
  }
  return r;
}

inline RawActivationBundle to_bundle(const RawArrays& r, std::string id = "fuzz") {
  return RawActivationBundle(r.L, r.T, r.D, r.K, r.hidden, r.attn, std::move(id));
}

/// z_l[d] = sum_t sum_k attn[l][k][t] / K * hidden[l][t][d], as a plain loop nest.
inline std::vector<std::vector<double>> oracle_projection(const RawArrays& r) {
  std::vector<std::vector<double>> z(r.L, std::vector<double>(r.D, 0.0));
  for (std::size_t l = 0; l < r.L; ++l)
    for (std::size_t t = 0; t < r.T; ++t)
      for (std::size_t k = 0; k < r.K; ++k)
        for (std::size_t d = 0; d < r.D; ++d)
          z[l][d] += r.attn[(l * r.K + k) * r.T + t] / static_cast<double>(r.K) * r.hidden[(l * r.T + t) * r.D + d];
  return z;
}

}  // namespace traject::testing
