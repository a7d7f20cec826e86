// Copyright 2026 The Authors.
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

#include "mvsprio/partner_selection.h"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "mvsprio/confidence.h"
#include "mvsprio/errors.h"
#include "mvsprio/sim_eval.h"
#include "mvsprio/visibility.h"
#include "oracles.h"

namespace mvsprio {
namespace {

// Key 0 connected to cameras 1..m with strictly decreasing counts.
ConnectivityIndex StarConnectivity(int m) {
  ConnectivityIndex c(m + 1);
  for (int i = 1; i <= m; ++i) c.Add(0, i, 100 - i);
  return c;
}

TEST(BinomialTest, Values) {
  EXPECT_EQ(Binomial(5, 0), 1u);
  EXPECT_EQ(Binomial(5, 2), 10u);
  EXPECT_EQ(Binomial(22, 5), 26334u);
  EXPECT_EQ(Binomial(3, 5), 0u);
  EXPECT_EQ(Binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(ExhaustivePoolSizeTest, LargestFittingPool) {
  EXPECT_EQ(ExhaustivePoolSize(22, 5, 25.0), 7);  // C(7,5)=21, C(8,5)=56
  EXPECT_EQ(ExhaustivePoolSize(6, 5, 1000.0), 6);
  EXPECT_EQ(ExhaustivePoolSize(22, 5, 0.5), 0);
}

TEST(ConnectivityTest, CountsSharedPoints) {
  SparsePointCloud cloud;
  cloud.points.push_back({Vec3::Zero(), {0, 1, 2}});
  cloud.points.push_back({Vec3::Zero(), {1, 2}});
  const ConnectivityIndex c = BuildConnectivity(cloud, 4);
  EXPECT_EQ(c.Count(1, 2), 2);
  EXPECT_EQ(c.Count(2, 1), 2);
  EXPECT_EQ(c.Count(0, 1), 1);
  EXPECT_EQ(c.Count(0, 3), 0);
  EXPECT_EQ(c.Count(1, 1), 0);
  EXPECT_EQ(c.RankedPartners(1), (std::vector<int>{2, 0}));
  EXPECT_TRUE(c.RankedPartners(3).empty());
}

TEST(DrawCombinationsTest, ExhaustiveWhenWithinBudget) {
  const ConnectivityIndex c = StarConnectivity(9);
  const auto combos = DrawCombinations(0, c, 6, 3, 100, 7);
  // Pool: cameras 1..6 (most connected first).
  std::set<std::vector<int>> got;
  for (auto s : combos) {
    std::sort(s.begin(), s.end());
    got.insert(s);
  }
  std::set<std::vector<int>> expected;
  for (auto s : oracle::AllSubsets(6, 3)) {
    for (int& v : s) v += 1;
    expected.insert(s);
  }
  EXPECT_EQ(combos.size(), 20u);
  EXPECT_EQ(got, expected);
}

TEST(DrawCombinationsTest, SampledWhenOverBudget) {
  const ConnectivityIndex c = StarConnectivity(22);
  const auto combos = DrawCombinations(0, c, 22, 5, 100, 7);
  ASSERT_EQ(combos.size(), 100u);
  std::set<std::vector<int>> distinct;
  for (auto s : combos) {
    ASSERT_EQ(s.size(), 5u);
    for (int v : s) {
      EXPECT_GE(v, 1);
      EXPECT_LE(v, 22);
    }
    std::sort(s.begin(), s.end());
    EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
    distinct.insert(s);
  }
  EXPECT_EQ(distinct.size(), 100u);
  // The exhaustive head: all 5-subsets of the 7 most connected cameras.
  const int q = ExhaustivePoolSize(22, 5, 25.0);
  const auto head = oracle::AllSubsets(q, 5);
  for (std::size_t i = 0; i < head.size(); ++i) {
    std::vector<int> expected = head[i];
    for (int& v : expected) v += 1;
    EXPECT_EQ(combos[i], expected);
  }
  EXPECT_EQ(DrawCombinations(0, c, 22, 5, 100, 7), combos);
  EXPECT_NE(DrawCombinations(0, c, 22, 5, 100, 8), combos);
}

TEST(DrawCombinationsTest, TooFewConnectedCameras) {
  const ConnectivityIndex c = StarConnectivity(3);
  EXPECT_THROW(DrawCombinations(0, c, 22, 5, 100, 0), InvalidClusterError);
}

TEST(SampleTrianglesTest, SizeSortedDeterministic) {
  const auto s = SampleTriangles(1001, 10, 5);
  EXPECT_EQ(s.size(), 101u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
  EXPECT_GE(s.front(), 0);
  EXPECT_LT(s.back(), 1001);
  EXPECT_EQ(SampleTriangles(1001, 10, 5), s);
  EXPECT_EQ(SampleTriangles(10, 1, 5).size(), 10u);
}

class SelectionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SceneSpec spec;
    spec.extent_x = 8;
    spec.extent_y = 6;
    spec.cells_x = 8;
    spec.cells_y = 6;
    spec.occluders = 2;
    spec.cameras = 24;
    spec.sparse_points = 600;
    scene_ = GenerateScene(spec, 3);
    ApplyVisibility(
        ComputeVisibility(scene_.mesh, Bvh(scene_.mesh), scene_.cameras),
        scene_.mesh);
    CacheUnaries(scene_.Model(), scene_.cameras, scene_.mesh);
    connectivity_ = BuildConnectivity(scene_.cloud,
                                      static_cast<int>(scene_.cameras.size()));
  }

  SyntheticScene scene_;
  ConnectivityIndex connectivity_;
};

TEST_F(SelectionTest, ExhaustiveSelectionIsBruteForceArgmax) {
  QualityConfig config;
  config.partners = 3;
  config.top_connected = 7;
  config.combinations = 1000;
  config.triangle_fraction = 1;
  const auto sample =
      SampleTriangles(static_cast<int>(scene_.mesh.size()), 1, 0);
  int checked = 0;
  for (int key = 0; key < static_cast<int>(scene_.cameras.size()); ++key) {
    const auto ranked = connectivity_.RankedPartners(key);
    if (ranked.size() < 7) continue;
    const auto tris = KeyTriangles(key, scene_.mesh, sample);
    const auto combos = DrawCombinations(key, connectivity_, 7, 3, 1000, 0);
    const ViewCluster chosen = SelectPartners(
        key, combos, scene_.cameras, scene_.mesh, tris, connectivity_, config);
    double best = -1.0;
    for (const auto& idx : oracle::AllSubsets(7, 3)) {
      std::vector<int> partners;
      for (int i : idx) partners.push_back(ranked[i]);
      double score = 0.0;
      for (int t : tris) {
        ViewCluster c;
        c.key_view = key;
        c.partners = partners;
        score += TriangleFulfillmentValue(scene_.cameras, c,
                                          scene_.mesh.patches[t], config);
      }
      best = std::max(best, score);
    }
    EXPECT_NEAR(chosen.score, best, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST_F(SelectionTest, TiesPreferConnectivityThenSmallestIds) {
  // With no triangles every score is 0, so the tie rules decide.
  QualityConfig config;
  ConnectivityIndex c(6);
  c.Add(0, 1, 5);
  c.Add(0, 2, 5);
  c.Add(0, 3, 9);
  c.Add(0, 4, 1);
  const std::vector<std::vector<int>> combos = {{2, 1}, {1, 2}, {4, 3}, {3, 1}};
  const std::vector<int> none;
  const ViewCluster v =
      SelectPartners(0, combos, scene_.cameras, scene_.mesh, none, c, config);
  EXPECT_EQ(v.partners, (std::vector<int>{3, 1}));
  const std::vector<std::vector<int>> tied = {{2, 1}, {1, 2}};
  EXPECT_EQ(
      SelectPartners(0, tied, scene_.cameras, scene_.mesh, none, c, config)
          .partners,
      (std::vector<int>{2, 1}));
}

TEST_F(SelectionTest, BuildClustersConsecutiveIdsAndThreadInvariant) {
  QualityConfig config;
  config.partners = 3;
  config.top_connected = 8;
  config.combinations = 20;
  std::vector<int> skipped;
  const auto one = BuildClusters(
      scene_.cameras, scene_.mesh, connectivity_, config, 1,
      [&](int key, const std::string&) { skipped.push_back(key); });
  const auto three =
      BuildClusters(scene_.cameras, scene_.mesh, connectivity_, config, 3);
  ASSERT_EQ(one.size(), three.size());
  EXPECT_EQ(one.size() + skipped.size(), scene_.cameras.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].id, static_cast<int>(i));
    EXPECT_EQ(one[i].key_view, three[i].key_view);
    EXPECT_EQ(one[i].partners, three[i].partners);
    EXPECT_EQ(one[i].score, three[i].score);
    EXPECT_TRUE(one[i].IsValid(static_cast<int>(scene_.cameras.size())));
  }
}

}  // namespace
}  // namespace mvsprio
