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
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "traject/error.hpp"
#include "traject/rdp.hpp"
#include "traject/types.hpp"

namespace traject {

/// Dev(l): distance of z_l from the line through the first and last points.
inline std::vector<double> deviation_profile(const Trajectory& traj) {
  const std::size_t L = traj.size();
  std::vector<double> dev(L, 0.0);
  for (std::size_t l = 1; l + 1 < L; ++l) dev[l] = perpendicular_distance(traj[l], traj[0], traj[L - 1]);
  return dev;
}

/// Vel(l) = |z_{l+1} - z_l| by forward difference; the last layer repeats
/// the previous value so the profile has length L.
inline std::vector<double> velocity_profile(const Trajectory& traj) {
  const std::size_t L = traj.size();
  std::vector<double> vel(L, 0.0);
  for (std::size_t l = 0; l + 1 < L; ++l) {
    const auto a = traj[l];
    const auto b = traj[l + 1];
    double ss = 0.0;
    for (std::size_t d = 0; d < traj.dim(); ++d) ss += (b[d] - a[d]) * (b[d] - a[d]);
    vel[l] = std::sqrt(ss);
  }
  vel[L - 1] = vel[L - 2];
  return vel;
}

/// Min-max normalization to [0, 1]. A constant input maps to all zeros.
inline std::vector<double> minmax_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
  return out;
}

// ---- Savitzky-Golay ---------------------------------------------------------

/// Weights w_j, j = -left..right, such that sum_j w_j x_{i+j} is the value at
/// offset 0 of the least-squares polynomial of degree min(polyorder,
/// left+right) through the window.
inline std::vector<double> savgol_kernel(std::size_t left, std::size_t right, std::size_t polyorder) {
  const std::size_t n = left + right + 1;
  const std::size_t degree = std::min(polyorder, n - 1);
  const double scale = static_cast<double>(std::max<std::size_t>({left, right, 1}));

  Eigen::MatrixXd design(n, degree + 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = (static_cast<double>(j) - static_cast<double>(left)) / scale;
    double p = 1.0;
    for (std::size_t k = 0; k <= degree; ++k, p *= x) design(j, k) = p;
  }
  // Row 0 of the pseudo-inverse evaluates the fitted polynomial at x = 0.
  const Eigen::MatrixXd pinv = design.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(n, n));
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = pinv(0, j);
  return w;
}

/// Savitzky-Golay smoothing. Near the ends the window is truncated to the
/// samples that exist (no mirroring or padding) and the fit degree drops to
/// what the truncated window supports.
inline std::vector<double> savgol_smooth(std::span<const double> signal, std::size_t window, std::size_t polyorder) {
  const std::size_t L = signal.size();
  require(window % 2 == 1, ErrorKind::usage, "savgol window must be odd, got " + std::to_string(window));
  require(window <= L, ErrorKind::usage,
          "savgol window " + std::to_string(window) + " exceeds signal length " + std::to_string(L));
  require(polyorder < window, ErrorKind::usage,
          "savgol polyorder " + std::to_string(polyorder) + " must be below window " + std::to_string(window));

  const std::size_t half = window / 2;
  const auto interior = savgol_kernel(half, half, polyorder);
  std::vector<double> out(L, 0.0);
  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t left = std::min(half, i);
    const std::size_t right = std::min(half, L - 1 - i);
    const auto edge = (left == half && right == half) ? std::vector<double>{} : savgol_kernel(left, right, polyorder);
    const auto& w = edge.empty() ? interior : edge;
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * signal[i - left + j];
    out[i] = acc;
  }
  return out;
}

// ---- Otsu --------------------------------------------------------------------

struct OtsuSplit {
  std::size_t edge = 0;           // class 1 = bins [edge, bins)
  double normalized_threshold = 0.0;  // edge / bins
  double threshold = 0.0;         // mapped back to the signal's scale
};

/// Bin index of a value already normalized to [0, 1].
inline std::size_t otsu_bin(double normalized, std::size_t bins) {
  const auto b = static_cast<std::size_t>(std::floor(normalized * static_cast<double>(bins)));
  return std::min(b, bins - 1);
}

/// Otsu's threshold on a histogram of the min-max normalized signal.
///
/// Candidate thresholds are the interior bin edges k/bins, k = 1..bins-1;
/// each bin contributes its center value. The edge maximizing the
/// between-class variance w0*w1*(mu0 - mu1)^2 wins, lowest edge on ties.
inline OtsuSplit otsu_split(std::span<const double> signal, std::size_t bins = 64) {
  require(signal.size() >= 2, ErrorKind::usage, "otsu needs at least 2 samples");
  require(bins >= 2, ErrorKind::usage, "otsu needs at least 2 bins");
  const auto [lo_it, hi_it] = std::minmax_element(signal.begin(), signal.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  require(range > 0.0, ErrorKind::degenerate, "otsu: signal is constant, no threshold separates it");

  std::vector<std::size_t> counts(bins, 0);
  for (double v : signal) ++counts[otsu_bin((v - lo) / range, bins)];

  const auto n = static_cast<double>(signal.size());
  const auto center = [bins](std::size_t b) { return (static_cast<double>(b) + 0.5) / static_cast<double>(bins); };
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) total += static_cast<double>(counts[b]) * center(b);

  OtsuSplit best;
  double best_var = -1.0;
  std::size_t n0 = 0;
  double sum0 = 0.0;
  for (std::size_t k = 1; k < bins; ++k) {
    n0 += counts[k - 1];
    sum0 += static_cast<double>(counts[k - 1]) * center(k - 1);
    const std::size_t n1 = signal.size() - n0;
    double var = 0.0;
    if (n0 > 0 && n1 > 0) {
      const double w0 = static_cast<double>(n0) / n;
      const double w1 = static_cast<double>(n1) / n;
      const double mu0 = sum0 / static_cast<double>(n0);
      const double mu1 = (total - sum0) / static_cast<double>(n1);
      var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    }
    if (var > best_var) {
      best_var = var;
      best.edge = k;
    }
  }
  best.normalized_threshold = static_cast<double>(best.edge) / static_cast<double>(bins);
  best.threshold = lo + best.normalized_threshold * range;
  return best;
}

inline double otsu_threshold(std::span<const double> signal, std::size_t bins = 64) {
  return otsu_split(signal, bins).threshold;
}

// ---- Band extraction -----------------------------------------------------------

enum class ThresholdOn { smoothed, raw };

inline std::string_view to_string(ThresholdOn t) { return t == ThresholdOn::raw ? "raw" : "smoothed"; }

struct BandParams {
  double alpha = 0.5;
  std::size_t window = 5;
  std::size_t polyorder = 2;
  std::size_t bins = 64;
  ThresholdOn threshold_on = ThresholdOn::smoothed;
};

struct LayerInterval {
  std::size_t lo = 0;
  std::size_t hi = 0;  // inclusive

  std::size_t size() const noexcept { return hi - lo + 1; }
  bool contains(std::size_t l) const noexcept { return l >= lo && l <= hi; }
  friend bool operator==(const LayerInterval&, const LayerInterval&) = default;
};

struct BandReport {
  std::vector<double> dev;
  std::vector<double> vel;
  std::vector<double> dev_norm;
  std::vector<double> vel_norm;
  std::vector<double> raw_signal;  // alpha*dev_norm + (1-alpha)*vel_norm
  std::vector<double> smoothed;
  double tau = 0.0;
  LayerInterval band;
  BandParams params;
  /// Set when the thresholded signal was constant; band then spans all layers.
  bool degenerate = false;
};

/// Longest run of consecutive indices with signal > tau; the earliest run
/// wins ties.
inline std::optional<LayerInterval> longest_run_above(std::span<const double> signal, double tau) {
  std::optional<LayerInterval> best;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < signal.size();) {
    if (!(signal[i] > tau)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < signal.size() && signal[j + 1] > tau) ++j;
    if (j - i + 1 > best_len) {
      best_len = j - i + 1;
      best = LayerInterval{i, j};
    }
    i = j + 1;
  }
  return best;
}

/// Hybrid structural signal, smoothing, Otsu threshold and the contiguous
/// band of layers above it. Every intermediate profile is kept in the report.
inline BandReport extract_band(const Trajectory& traj, const BandParams& params = {}) {
  require(params.alpha >= 0.0 && params.alpha <= 1.0, ErrorKind::usage,
          "alpha must lie in [0, 1], got " + std::to_string(params.alpha));
  const std::size_t L = traj.size();

  BandReport r;
  r.params = params;
  r.dev = deviation_profile(traj);
  r.vel = velocity_profile(traj);
  r.dev_norm = minmax_normalize(r.dev);
  r.vel_norm = minmax_normalize(r.vel);
  r.raw_signal.resize(L);
  for (std::size_t l = 0; l < L; ++l)
    r.raw_signal[l] = params.alpha * r.dev_norm[l] + (1.0 - params.alpha) * r.vel_norm[l];
  r.smoothed = savgol_smooth(r.raw_signal, params.window, params.polyorder);

  const auto& thresholded = params.threshold_on == ThresholdOn::raw ? r.raw_signal : r.smoothed;
  r.band = {0, L - 1};
  try {
    r.tau = otsu_threshold(thresholded, params.bins);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate) throw;
    r.tau = thresholded.front();
    r.degenerate = true;
    return r;
  }
  if (auto run = longest_run_above(thresholded, r.tau)) {
    r.band = *run;
  } else {
    r.degenerate = true;
  }
  return r;
}

}  // namespace traject
