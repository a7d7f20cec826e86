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

#include "mvsprio/fulfillment.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "mvsprio/confidence.h"
#include "mvsprio/visibility.h"
#include "oracles.h"
#include "test_util.h"

namespace mvsprio {
namespace {

using ::mvsprio::testing::GridMesh;
using ::mvsprio::testing::NadirCamera;

class FulfillmentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    mesh_ = GridMesh(4, 4, 0.5, 0.5);
    // Key view straight above at 10 m plus five partners spread around.
    cams_.push_back(NadirCamera(0, 1.0, 1.0, 10.0));
    const double r = 3.0;
    for (int i = 0; i < 5; ++i) {
      const double a = 2.0 * M_PI * i / 5;
      cams_.push_back(LookAtCamera(
          i + 1, Vec3(1 + r * std::cos(a), 1 + r * std::sin(a), 10),
          Vec3(1, 1, 0), 1000, 1000, 750));
    }
    ApplyVisibility(ComputeVisibility(mesh_, Bvh(mesh_), cams_), mesh_);
    CacheUnaries(HeuristicModel(), cams_, mesh_);
    cluster_.key_view = 0;
    cluster_.partners = {1, 2, 3, 4, 5};
  }

  SurfaceMesh mesh_;
  std::vector<Camera> cams_;
  ViewCluster cluster_;
};

TEST_F(FulfillmentTest, ResolutionAtDesiredGsdIsOne) {
  const TrianglePatch& p = mesh_.patches[0];
  ASSERT_TRUE(p.Sees(0));
  // 10 m at f = 1000 px is 1 cm per pixel.
  EXPECT_NEAR(ResolutionFulfillment(cams_, 0, p, 0.01), 1.0, 1e-12);
  // Halving the desired GSD asks for four times the resolution.
  EXPECT_NEAR(ResolutionFulfillment(cams_, 0, p, 0.005), 0.25, 1e-9);
  TrianglePatch hidden = p;
  hidden.visible_cameras = {1, 2};
  EXPECT_EQ(ResolutionFulfillment(cams_, 0, hidden, 0.01), 0.0);
}

TEST_F(FulfillmentTest, UncertaintyFollowsCovariance) {
  const TrianglePatch& p = mesh_.patches[5];
  const auto cams = cluster_.Cameras();
  std::vector<Camera> seeing;
  for (int c : cams) {
    if (p.Sees(c)) seeing.push_back(cams_[c]);
  }
  const double u = TriangulationUncertainty(seeing, p.centroid, 1.0);
  for (double acc : {0.001, 0.01, 1.0}) {
    EXPECT_DOUBLE_EQ(UncertaintyFulfillment(cams_, cams, p, acc, 1.0),
                     std::min(acc / std::sqrt(u), 1.0));
  }
  const std::vector<int> lonely = {0};
  EXPECT_EQ(UncertaintyFulfillment(cams_, lonely, p, 0.01, 1.0), 0.0);
}

TEST_F(FulfillmentTest, CoverageNeedsKeyAndMinCameras) {
  TrianglePatch p = mesh_.patches[3];
  p.visible_cameras = {0, 1, 2};
  EXPECT_EQ(CoverageFulfillment(cluster_, p, 3), 1.0);
  EXPECT_EQ(CoverageFulfillment(cluster_, p, 4), 0.0);
  p.visible_cameras = {1, 2, 3, 4};
  EXPECT_EQ(CoverageFulfillment(cluster_, p, 3), 0.0);
}

TEST_F(FulfillmentTest, BreakdownProductAndShortCircuitAgree) {
  QualityConfig config;
  int positive = 0;
  for (double alpha : {0.0, 0.5, 1.0}) {
    config.alpha = alpha;
    for (const TrianglePatch& p : mesh_.patches) {
      const FulfillmentBreakdown b =
          TriangleFulfillment(cams_, cluster_, p, config);
      std::vector<double> pairwise;
      for (int q : cluster_.partners) {
        pairwise.push_back(PairwiseConfidence(cams_, 0, q, p));
      }
      EXPECT_EQ(b.f_conf, KPartnerConfidence(pairwise));
      EXPECT_DOUBLE_EQ(b.f_total, (alpha * b.f_res + (1 - alpha) * b.f_unc) *
                                      b.f_cov * b.f_conf);
      EXPECT_DOUBLE_EQ(TriangleFulfillmentValue(cams_, cluster_, p, config),
                       b.f_total);
      EXPECT_GE(b.f_total, 0.0);
      EXPECT_LE(b.f_total, 1.0);
      positive += b.f_total > 0.0;
    }
  }
  EXPECT_GT(positive, 0);
}

TEST_F(FulfillmentTest, ClusterScoreSumsTriangles) {
  QualityConfig config;
  const std::vector<int> tris = {0, 3, 7, 20};
  double expected = 0.0;
  for (int t : tris) {
    expected +=
        TriangleFulfillmentValue(cams_, cluster_, mesh_.patches[t], config);
  }
  EXPECT_DOUBLE_EQ(
      ClusterScore(cams_, 0, cluster_.partners, mesh_, tris, config), expected);
}

TEST(ViewClusterTest, Validity) {
  ViewCluster c;
  c.key_view = 0;
  c.partners = {1, 2};
  EXPECT_TRUE(c.IsValid(3));
  EXPECT_EQ(c.Cameras(), (std::vector<int>{0, 1, 2}));
  c.partners = {1};
  EXPECT_FALSE(c.IsValid(3));
  c.partners = {1, 1};
  EXPECT_FALSE(c.IsValid(3));
  c.partners = {0, 1};
  EXPECT_FALSE(c.IsValid(3));
  c.partners = {1, 3};
  EXPECT_FALSE(c.IsValid(3));
}

TEST(ObjectiveTest, MatchesDenseOracleAndGainIsDifference) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    auto in = ::mvsprio::testing::MakeInstance(rng, 6, 50, 0.4);
    std::vector<int> subset = {1, 4};
    EXPECT_NEAR(Objective(subset, in.mesh, in.mesh.size()),
                oracle::ObjectiveOf(in.table, subset), 1e-15);
    for (std::size_t t = 0; t < in.mesh.size(); ++t) {
      in.mesh.patches[t].current_fulfillment =
          std::max(in.table[1][t], in.table[4][t]);
    }
    const double before = Objective(subset, in.mesh, in.mesh.size());
    subset.push_back(2);
    EXPECT_NEAR(Gain(in.lists[2], in.mesh, in.mesh.size()),
                Objective(subset, in.mesh, in.mesh.size()) - before, 1e-15);
  }
  const std::vector<int> none;
  EXPECT_EQ(Objective(none, ::mvsprio::testing::PlaceholderMesh(3), 3), 0.0);
}

TEST(ObjectiveTest, DenominatorCountsTrianglesSeenByEnoughCameras) {
  SurfaceMesh mesh = ::mvsprio::testing::PlaceholderMesh(4);
  mesh.patches[0].visible_cameras = {};
  mesh.patches[1].visible_cameras = {3};
  mesh.patches[2].visible_cameras = {0, 5};
  mesh.patches[3].visible_cameras = {1, 2, 7};
  EXPECT_EQ(ObjectiveTriangleCount(mesh, 0), 4u);
  EXPECT_EQ(ObjectiveTriangleCount(mesh, 1), 3u);
  EXPECT_EQ(ObjectiveTriangleCount(mesh, 2), 2u);
  EXPECT_EQ(ObjectiveTriangleCount(mesh, 3), 1u);
  EXPECT_EQ(ObjectiveTriangleCount(mesh, 4), 0u);

  const std::vector<int> selected = {0};
  EXPECT_EQ(Objective(selected, mesh, 0), 0.0);
}

}  // namespace
}  // namespace mvsprio
