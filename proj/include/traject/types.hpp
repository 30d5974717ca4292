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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "traject/error.hpp"

namespace traject {

/// A point in R^D, viewed in place inside a trajectory's storage.
using PointView = std::span<const double>;

/// Owning point, used where callers build trajectories from nested lists.
using Point = std::vector<double>;

namespace detail {

inline bool all_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace detail

/// Ordered sequence of per-layer summary vectors z_0 .. z_{L-1}.
///
/// Layers are 0-based everywhere in this library: index i is the output of
/// transformer block i+1 of the source model. Coordinates are stored
/// row-major in a single contiguous buffer and are immutable after
/// construction.
class Trajectory {
 public:
  Trajectory(std::size_t num_layers, std::size_t dim, std::vector<double> coords,
             std::string sample_id = {})
      : num_layers_(num_layers), dim_(dim), coords_(std::move(coords)),
        sample_id_(std::move(sample_id)) {
    require(num_layers_ >= 2, ErrorKind::usage,
            "trajectory needs at least 2 points, got " + std::to_string(num_layers_));
    require(dim_ >= 1, ErrorKind::usage, "trajectory dimension must be at least 1");
    require(coords_.size() == num_layers_ * dim_, ErrorKind::usage,
            "trajectory buffer holds " + std::to_string(coords_.size()) + " values, expected " +
                std::to_string(num_layers_ * dim_));
    require(detail::all_finite(coords_), ErrorKind::data, "trajectory contains non-finite coordinates");
  }

  explicit Trajectory(const std::vector<Point>& points, std::string sample_id = {})
      : Trajectory(points.size(), points.empty() ? 0 : points.front().size(), flatten(points),
                   std::move(sample_id)) {}

  std::size_t size() const noexcept { return num_layers_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& sample_id() const noexcept { return sample_id_; }

  PointView operator[](std::size_t layer) const noexcept {
    return {coords_.data() + layer * dim_, dim_};
  }

  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const Trajectory& a, const Trajectory& b) {
    return a.num_layers_ == b.num_layers_ && a.dim_ == b.dim_ && a.coords_ == b.coords_;
  }

 private:
  static std::vector<double> flatten(const std::vector<Point>& points) {
    std::vector<double> out;
    if (points.empty()) return out;
    const std::size_t d = points.front().size();
    out.reserve(points.size() * d);
    for (std::size_t i = 0; i < points.size(); ++i) {
      require(points[i].size() == d, ErrorKind::usage,
              "point " + std::to_string(i) + " has dimension " + std::to_string(points[i].size()) +
                  ", expected " + std::to_string(d));
      out.insert(out.end(), points[i].begin(), points[i].end());
    }
    return out;
  }

  std::size_t num_layers_;
  std::size_t dim_;
  std::vector<double> coords_;
  std::string sample_id_;
};

/// Per-sample hidden states and final-token attention rows, prior to projection.
///
/// hidden is L x T x D (layer, token, feature); attn_last is L x K_h x T
/// (layer, head, token). Every attention row must be a probability
/// distribution to within 1e-4.
class RawActivationBundle {
 public:
  static constexpr double kRowSumTolerance = 1e-4;

  RawActivationBundle(std::size_t num_layers, std::size_t num_tokens, std::size_t dim,
                      std::size_t num_heads, std::vector<double> hidden, std::vector<double> attn_last,
                      std::string sample_id)
      : num_layers_(num_layers), num_tokens_(num_tokens), dim_(dim), num_heads_(num_heads),
        hidden_(std::move(hidden)), attn_last_(std::move(attn_last)), sample_id_(std::move(sample_id)) {
    require(num_layers_ >= 1 && num_tokens_ >= 1 && dim_ >= 1 && num_heads_ >= 1, ErrorKind::format,
            "activation bundle '" + sample_id_ + "' has a zero dimension (L=" + std::to_string(num_layers_) +
                " T=" + std::to_string(num_tokens_) + " D=" + std::to_string(dim_) +
                " K_h=" + std::to_string(num_heads_) + ")");
    require(hidden_.size() == num_layers_ * num_tokens_ * dim_, ErrorKind::format,
            "hidden block of '" + sample_id_ + "' holds " + std::to_string(hidden_.size()) +
                " values, expected L*T*D=" + std::to_string(num_layers_ * num_tokens_ * dim_));
    require(attn_last_.size() == num_layers_ * num_heads_ * num_tokens_, ErrorKind::format,
            "attention block of '" + sample_id_ + "' holds " + std::to_string(attn_last_.size()) +
                " values, expected L*K_h*T=" + std::to_string(num_layers_ * num_heads_ * num_tokens_));
    require(detail::all_finite(hidden_), ErrorKind::data,
            "hidden states of '" + sample_id_ + "' contain non-finite values");
    require(detail::all_finite(attn_last_), ErrorKind::data,
            "attention rows of '" + sample_id_ + "' contain non-finite values");
    for (std::size_t l = 0; l < num_layers_; ++l) {
      for (std::size_t k = 0; k < num_heads_; ++k) {
        double sum = 0.0;
        for (double a : attention(l, k)) {
          require(a >= 0.0, ErrorKind::data,
                  "negative attention weight in '" + sample_id_ + "' layer " + std::to_string(l));
          sum += a;
        }
        require(std::abs(sum - 1.0) <= kRowSumTolerance, ErrorKind::data,
                "attention row of '" + sample_id_ + "' layer " + std::to_string(l) + " head " +
                    std::to_string(k) + " sums to " + std::to_string(sum));
      }
    }
  }

  std::size_t num_layers() const noexcept { return num_layers_; }
  std::size_t num_tokens() const noexcept { return num_tokens_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_heads() const noexcept { return num_heads_; }
  const std::string& sample_id() const noexcept { return sample_id_; }

  /// Hidden state h_{l,t}.
  std::span<const double> hidden(std::size_t layer, std::size_t token) const noexcept {
    return {hidden_.data() + (layer * num_tokens_ + token) * dim_, dim_};
  }

  /// Attention from the final token, for one head: alpha_{l,k}(x_T, .).
  std::span<const double> attention(std::size_t layer, std::size_t head) const noexcept {
    return {attn_last_.data() + (layer * num_heads_ + head) * num_tokens_, num_tokens_};
  }

  std::span<const double> hidden_block() const noexcept { return hidden_; }
  std::span<const double> attention_block() const noexcept { return attn_last_; }

 private:
  std::size_t num_layers_;
  std::size_t num_tokens_;
  std::size_t dim_;
  std::size_t num_heads_;
  std::vector<double> hidden_;
  std::vector<double> attn_last_;
  std::string sample_id_;
};

/// S >= 1 trajectories sharing L and D.
class TrajectoryEnsemble {
 public:
  explicit TrajectoryEnsemble(std::vector<Trajectory> trajectories) : trajectories_(std::move(trajectories)) {
    require(!trajectories_.empty(), ErrorKind::usage, "ensemble needs at least one trajectory");
    const auto& first = trajectories_.front();
    for (std::size_t s = 1; s < trajectories_.size(); ++s) {
      const auto& t = trajectories_[s];
      require(t.size() == first.size() && t.dim() == first.dim(), ErrorKind::usage,
              "dimension agreement violated: sample " + std::to_string(s) + " ('" + t.sample_id() +
                  "') has L=" + std::to_string(t.size()) + " D=" + std::to_string(t.dim()) +
                  ", sample 0 ('" + first.sample_id() + "') has L=" + std::to_string(first.size()) +
                  " D=" + std::to_string(first.dim()));
    }
  }

  std::size_t size() const noexcept { return trajectories_.size(); }
  std::size_t num_layers() const noexcept { return trajectories_.front().size(); }
  std::size_t dim() const noexcept { return trajectories_.front().dim(); }

  const Trajectory& operator[](std::size_t s) const noexcept { return trajectories_[s]; }
  const std::vector<Trajectory>& trajectories() const noexcept { return trajectories_; }

  auto begin() const noexcept { return trajectories_.begin(); }
  auto end() const noexcept { return trajectories_.end(); }

 private:
  std::vector<Trajectory> trajectories_;
};

}  // namespace traject
