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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "traject/rdp.hpp"

namespace traject {
namespace {

using testing::Points;
using testing::Rng;
using Indices = std::vector<std::size_t>;

TEST(Distance, MatchesHandComputedValues) {
  const Point a{0.0, 0.0}, b{4.0, 0.0};
  EXPECT_DOUBLE_EQ(perpendicular_distance(Point{2.0, 3.0}, a, b), 3.0);
  EXPECT_DOUBLE_EQ(perpendicular_distance(Point{-5.0, -2.0}, a, b), 2.0);  // beyond the segment
  EXPECT_DOUBLE_EQ(perpendicular_distance(Point{3.0, 4.0}, a, a), 5.0);    // degenerate chord
}

TEST(Distance, AgreesWithOracleInHighDimension) {
  Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    const auto pts = testing::random_points(rng, 3, 50, rng.uniform(0.01, 100.0));
    EXPECT_NEAR(perpendicular_distance(pts[0], pts[1], pts[2]), testing::oracle_distance(pts[0], pts[1], pts[2]),
                1e-10 * std::max(1.0, testing::oracle_distance(pts[0], pts[1], pts[2])));
  }
}

TEST(Distance, CollinearPointsAreExactlyOnTheLine) {
  EXPECT_EQ(perpendicular_distance(Point{0.3}, Point{0.1}, Point{0.7}), 0.0);
  EXPECT_EQ(perpendicular_distance(Point{0.3, 0.0, 0.0}, Point{0.1, 0.0, 0.0}, Point{0.7, 0.0, 0.0}), 0.0);
  EXPECT_GT(perpendicular_distance(Point{0.3, 1e-9}, Point{0.1, 0.0}, Point{0.7, 0.0}), 0.0);
}

TEST(Distance, DimensionMismatchIsUsageError) {
  EXPECT_THROW(perpendicular_distance(Point{1.0}, Point{0.0, 0.0}, Point{1.0, 1.0}), Error);
}

TEST(Rdp, CollinearKeepsOnlyEndpoints) {
  const Trajectory t(std::vector<Point>{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  EXPECT_EQ(rdp(t, 0.0).kept_indices, (Indices{0, 3}));
}

TEST(Rdp, SplitIsStrict) {
  const Trajectory t(std::vector<Point>{{0, 0}, {1, 1}, {2, 0}});
  EXPECT_EQ(rdp(t, 0.5).kept_indices, (Indices{0, 1, 2}));
  EXPECT_EQ(rdp(t, 1.0).kept_indices, (Indices{0, 2}));  // exactly at epsilon: dropped
  EXPECT_EQ(rdp(t, 1.5).kept_indices, (Indices{0, 2}));
}

TEST(Rdp, TiesGoToLowestIndex) {
  const Trajectory t(std::vector<Point>{{0, 0}, {1, 1}, {2, 1}, {3, 0}});
  // indices 1 and 2 both sit 1 off the chord; 1 wins, and 2 is then close to 1..3
  EXPECT_EQ(rdp(t, 0.9).kept_indices, (Indices{0, 1, 3}));
  const Trajectory flat(std::vector<Point>{{0, 0}, {1, 1}, {2, 1}, {3, 1}, {4, 0}});
  // first split lands on index 1, leaving {1..4} with the tie resolved again
  EXPECT_EQ(rdp(flat, 0.9).kept_indices.at(1), 1u);
}

TEST(Rdp, ZeroEpsilonKeepsEveryNonCollinearPoint) {
  Rng rng(22);
  for (int rep = 0; rep < 50; ++rep) {
    const auto t = testing::to_trajectory(testing::random_points(rng, 12, 4));
    EXPECT_EQ(rdp(t, 0.0).size(), 12u);
  }
}

TEST(Rdp, RejectsNegativeOrNonFiniteEpsilon) {
  const Trajectory t(std::vector<Point>{{0.0}, {1.0}});
  EXPECT_THROW(rdp(t, -1.0), Error);
  EXPECT_THROW(rdp(t, std::nan("")), Error);
  EXPECT_EQ(rdp(t, 3.0).kept_indices, (Indices{0, 1}));
}

TEST(Rdp, MatchesRecursiveOracle) {
  Rng rng(23);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t L = rng.index(2, 20);
    const std::size_t D = std::vector<std::size_t>{1, 2, 3, 16, 64}[rng.index(0, 4)];
    const auto pts = rep % 2 ? testing::random_walk(rng, L, D) : testing::random_points(rng, L, D);
    const double eps = rng.uniform(0.0, 3.0);
    EXPECT_EQ(rdp(testing::to_trajectory(pts), eps).kept_indices, testing::oracle_rdp(pts, eps))
        << "L=" << L << " D=" << D << " eps=" << eps;
  }
}

TEST(Rdp, EndpointsAlwaysKeptAndIndicesIncrease) {
  Rng rng(24);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = testing::to_trajectory(testing::random_walk(rng, rng.index(2, 30), 5));
    const auto kept = rdp(t, rng.uniform(0.0, 10.0)).kept_indices;
    ASSERT_GE(kept.size(), 2u);
    EXPECT_EQ(kept.front(), 0u);
    EXPECT_EQ(kept.back(), t.size() - 1);
    EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end()));
    EXPECT_EQ(std::adjacent_find(kept.begin(), kept.end()), kept.end());
  }
}

TEST(Rdp, RetainedCountIsMonotoneInEpsilon) {
  Rng rng(25);
  for (int rep = 0; rep < 100; ++rep) {
    const auto t = testing::to_trajectory(testing::random_walk(rng, 25, 3));
    std::size_t prev = t.size();
    for (double eps = 0.0; eps < 8.0; eps += 0.25) {
      const auto n = rdp(t, eps).size();
      EXPECT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(Rdp, InvariantUnderZeroPaddingAndRigidMotion) {
  Rng rng(26);
  for (int rep = 0; rep < 100; ++rep) {
    const auto pts = testing::random_walk(rng, 15, 3);
    const double eps = rng.uniform(0.1, 2.0);
    const auto base = rdp(testing::to_trajectory(pts), eps).kept_indices;

    Points padded = pts;
    for (auto& p : padded) p.resize(40, 0.0);
    EXPECT_EQ(rdp(testing::to_trajectory(padded), eps).kept_indices, base);

    // rotation about z plus translation
    const double th = rng.uniform(0.0, 6.28);
    Points moved = pts;
    for (auto& p : moved) {
      const double x = p[0], y = p[1];
      p[0] = std::cos(th) * x - std::sin(th) * y + 7.0;
      p[1] = std::sin(th) * x + std::cos(th) * y - 3.0;
      p[2] += 11.0;
    }
    const auto rotated = rdp(testing::to_trajectory(moved), eps).kept_indices;
    // Rounding can only matter when a deviation sits within ulps of eps.
    if (rotated != base) {
      const auto loose = rdp(testing::to_trajectory(pts), eps * (1 + 1e-9)).kept_indices;
      const auto tight = rdp(testing::to_trajectory(pts), eps * (1 - 1e-9)).kept_indices;
      EXPECT_TRUE(rotated == loose || rotated == tight);
    }
  }
}

TEST(Rdp, HandlesLongTrajectories) {
  std::vector<Point> arc;
  for (int i = 0; i <= 100000; ++i) {
    const double x = -1.0 + i * 2e-5;
    arc.push_back({x, x * x});
  }
  EXPECT_EQ(rdp(Trajectory(arc), 0.0).size(), arc.size());
  EXPECT_LT(rdp(Trajectory(arc), 1e-3).size(), 100u);
}

}  // namespace
}  // namespace traject
