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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <gtest/gtest.h>

#include "support.hpp"
#include "traject/projection.hpp"
#include "traject/types.hpp"

namespace traject {
namespace {

using testing::Rng;

TEST(Trajectory, RejectsTooFewPointsAndNonFinite) {
  EXPECT_THROW(Trajectory(std::vector<Point>{{1.0, 2.0}}), Error);
  try {
    Trajectory(std::vector<Point>{{0.0}, {std::numeric_limits<double>::quiet_NaN()}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
  EXPECT_THROW(Trajectory(std::vector<Point>{{0.0, 1.0}, {1.0}}), Error);
}

TEST(RawActivationBundle, ValidatesShapesAndAttentionRows) {
  // hidden block one value short
  try {
    RawActivationBundle(2, 1, 2, 1, {1, 2, 3}, {1, 1}, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
  }
  // attention row summing to 0.9
  try {
    RawActivationBundle(2, 2, 1, 1, {1, 2, 3, 4}, {0.5, 0.4, 0.5, 0.5}, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
  // NaN hidden state
  try {
    RawActivationBundle(2, 1, 1, 1, {1, std::numeric_limits<double>::quiet_NaN()}, {1, 1}, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
  // within tolerance is accepted
  EXPECT_NO_THROW(RawActivationBundle(2, 2, 1, 1, {1, 2, 3, 4}, {0.5, 0.50005, 0.5, 0.5}, "x"));
}

TEST(Projection, SingleTokenIsIdentity) {
  Rng rng(1);
  auto raw = testing::random_raw(rng, 5, 1, 7, 3);
  const auto z = project_attention_weighted(testing::to_bundle(raw));
  for (std::size_t l = 0; l < 5; ++l)
    for (std::size_t d = 0; d < 7; ++d) EXPECT_EQ(z[l][d], raw.hidden[l * 7 + d]);
}

TEST(Projection, TwoOppositeHeadsAverageToHalf) {
  // Both layers: head 0 attends token 0, head 1 attends token 1.
  RawActivationBundle b(2, 2, 2, 2, {2, 0, 0, 2, 2, 0, 0, 2}, {1, 0, 0, 1, 1, 0, 0, 1}, "sym");
  const auto w = projection_weights(b);
  EXPECT_EQ(w, (std::vector<double>{0.5, 0.5, 0.5, 0.5}));
  const auto z = project_attention_weighted(b);
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_DOUBLE_EQ(z[l][0], 1.0);
    EXPECT_DOUBLE_EQ(z[l][1], 1.0);
  }
}

TEST(Projection, MatchesNaiveSummation) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto raw = testing::random_raw(rng, 4, 5, 3, 2);
    const auto z = project_attention_weighted(testing::to_bundle(raw));
    const auto expect = testing::oracle_projection(raw);
    for (std::size_t l = 0; l < 4; ++l)
      for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(z[l][d], expect[l][d], 1e-9);
  }
}

TEST(Projection, WeightsSumToOneAndStayInHull) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = testing::random_raw(rng, rng.index(2, 6), rng.index(1, 9), rng.index(1, 5), rng.index(1, 4));
    const auto bundle = testing::to_bundle(raw);
    const auto w = projection_weights(bundle);
    const auto z = project_attention_weighted(bundle);
    for (std::size_t l = 0; l < raw.L; ++l) {
      const double sum = std::accumulate(w.begin() + static_cast<long>(l * raw.T),
                                         w.begin() + static_cast<long>((l + 1) * raw.T), 0.0);
      EXPECT_NEAR(sum, 1.0, 1e-4);
      for (std::size_t d = 0; d < raw.D; ++d) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t t = 0; t < raw.T; ++t) {
          lo = std::min(lo, bundle.hidden(l, t)[d]);
          hi = std::max(hi, bundle.hidden(l, t)[d]);
        }
        EXPECT_GE(z[l][d], lo - 1e-12);
        EXPECT_LE(z[l][d], hi + 1e-12);
      }
    }
  }
}

TEST(Projection, LinearInHiddenStates) {
  Rng rng(4);
  auto raw = testing::random_raw(rng, 3, 4, 5, 2);
  const auto z1 = project_attention_weighted(testing::to_bundle(raw));
  for (auto& h : raw.hidden) h *= -2.5;
  const auto z2 = project_attention_weighted(testing::to_bundle(raw));
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t d = 0; d < 5; ++d) EXPECT_NEAR(z2[l][d], -2.5 * z1[l][d], 1e-12);
}

TEST(Projection, SingleLayerBundleCannotFormTrajectory) {
  RawActivationBundle b(1, 1, 1, 1, {1.0}, {1.0}, "one");
  EXPECT_THROW(project_attention_weighted(b), Error);
}

TEST(AggregateMean, SingleSampleUnchanged) {
  Rng rng(5);
  const auto t = testing::to_trajectory(testing::random_points(rng, 6, 3));
  EXPECT_EQ(aggregate_mean(TrajectoryEnsemble({t})), t);
}

TEST(AggregateMean, TwoSamplesArithmetic) {
  std::vector<Point> a(4, Point{0.0, 0.0}), b(4, Point{2.0, 4.0});
  const auto m = aggregate_mean(TrajectoryEnsemble({Trajectory(a), Trajectory(b)}));
  for (std::size_t l = 0; l < 4; ++l) {
    EXPECT_EQ(m[l][0], 1.0);
    EXPECT_EQ(m[l][1], 2.0);
  }
}

TEST(AggregateMean, MatchesPerCoordinateOracleAndIsPermutationInvariant) {
  Rng rng(6);
  std::vector<Trajectory> ts;
  for (int s = 0; s < 7; ++s) ts.push_back(testing::to_trajectory(testing::random_points(rng, 10, 16)));
  const auto m = aggregate_mean(TrajectoryEnsemble(ts));
  for (std::size_t l = 0; l < 10; ++l) {
    for (std::size_t d = 0; d < 16; ++d) {
      double s = 0.0;
      for (const auto& t : ts) s += t[l][d];
      EXPECT_NEAR(m[l][d], s / 7.0, 1e-12);
    }
  }
  std::reverse(ts.begin(), ts.end());
  std::swap(ts[1], ts[4]);
  const auto m2 = aggregate_mean(TrajectoryEnsemble(ts));
  for (std::size_t i = 0; i < m.coords().size(); ++i) EXPECT_NEAR(m.coords()[i], m2.coords()[i], 1e-12);
}

TEST(AggregateMean, LargeEnsembleUsesPairwiseSummation) {
  // 3000 copies of a value that is not exactly representable; pairwise
  // summation keeps the mean within a few ulps.
  std::vector<Trajectory> ts(3000, Trajectory(std::vector<Point>{{0.1}, {0.7}}));
  const auto m = aggregate_mean(TrajectoryEnsemble(ts));
  EXPECT_NEAR(m[0][0], 0.1, 1e-15);
  EXPECT_NEAR(m[1][0], 0.7, 1e-15);
}

TEST(TrajectoryEnsemble, EnforcesDimensionAgreement) {
  EXPECT_THROW(TrajectoryEnsemble({}), Error);
  const Trajectory a(std::vector<Point>{{0.0, 0.0}, {1.0, 1.0}});
  const Trajectory b(std::vector<Point>{{0.0}, {1.0}});
  try {
    TrajectoryEnsemble({a, b});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
    EXPECT_NE(std::string(e.what()).find("dimension agreement"), std::string::npos);
  }
}

}  // namespace
}  // namespace traject
