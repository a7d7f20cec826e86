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

#include "mvsprio/confidence.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "mvsprio/errors.h"
#include "mvsprio/visibility.h"
#include "oracles.h"
#include "test_util.h"

namespace mvsprio {
namespace {

using ::mvsprio::testing::GridMesh;
using ::mvsprio::testing::NadirCamera;

std::vector<double> RandomProbabilities(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> p(k);
  for (double& v : p) v = unit(rng);
  return p;
}

TEST(KPartnerConfidenceTest, TwoPartnersIsProduct) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto p = RandomProbabilities(rng, 2);
    EXPECT_EQ(KPartnerConfidence(p), p[0] * p[1]);
  }
}

TEST(KPartnerConfidenceTest, ThreeHalvesIsHalf) {
  const std::vector<double> p = {0.5, 0.5, 0.5};
  EXPECT_EQ(KPartnerConfidence(p), 0.5);
}

TEST(KPartnerConfidenceTest, AllOnesAndZeros) {
  for (int k = 2; k <= 22; ++k) {
    EXPECT_EQ(KPartnerConfidence(std::vector<double>(k, 1.0)), 1.0);
    EXPECT_EQ(KPartnerConfidence(std::vector<double>(k, 0.0)), 0.0);
  }
}

TEST(KPartnerConfidenceTest, SingleCertainPartnerIsAtLeastOneOfTheRest) {
  // With p_1 = 1, P(>= 2) = 1 - prod_{j>1} (1 - p_j).
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    auto p = RandomProbabilities(rng, 5);
    p[0] = 1.0;
    double none = 1.0;
    for (int j = 1; j < 5; ++j) none *= 1.0 - p[j];
    EXPECT_NEAR(KPartnerConfidence(p), 1.0 - none, 1e-15);
  }
}

TEST(KPartnerConfidenceTest, MatchesEnumerationAndTree) {
  std::mt19937_64 rng(3);
  for (int k = 2; k <= 12; ++k) {
    for (int i = 0; i < 50; ++i) {
      const auto p = RandomProbabilities(rng, k);
      const double expected = oracle::EnumerateAtLeastTwo(p);
      EXPECT_NEAR(KPartnerConfidence(p), expected, 1e-12);
      EXPECT_NEAR(TreeOracle(p), expected, 1e-12);
      EXPECT_NEAR(KPartnerConfidenceComplement(p), expected, 1e-12);
      EXPECT_NEAR(KPartnerConfidenceAlternating(p), expected, 1e-10);
    }
  }
}

TEST(KPartnerConfidenceTest, PermutationInvariant) {
  std::mt19937_64 rng(4);
  auto p = RandomProbabilities(rng, 7);
  const double base = KPartnerConfidence(p);
  for (int i = 0; i < 100; ++i) {
    std::shuffle(p.begin(), p.end(), rng);
    EXPECT_EQ(KPartnerConfidence(p), base);
  }
}

TEST(KPartnerConfidenceTest, MonotoneInEachProbability) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    auto p = RandomProbabilities(rng, 5);
    const double before = KPartnerConfidence(p);
    p[i % 5] = std::min(1.0, p[i % 5] + 0.1);
    EXPECT_GE(KPartnerConfidence(p), before - 1e-15);
  }
}

TEST(KPartnerConfidenceTest, RejectsFewerThanTwo) {
  EXPECT_THROW(KPartnerConfidence(std::vector<double>{0.5}),
               InvalidClusterError);
  EXPECT_THROW(TreeOracle(std::vector<double>{}), InvalidClusterError);
}

TEST(AngleBinTest, Boundaries) {
  EXPECT_EQ(AngleBin(0.0), 0);
  EXPECT_EQ(AngleBin(4.999), 0);
  EXPECT_EQ(AngleBin(5.0), 1);
  EXPECT_EQ(AngleBin(44.9), 8);
  EXPECT_EQ(AngleBin(90.0), 8);
}

TEST(HeuristicModelTest, AngleResponseShape) {
  EXPECT_EQ(HeuristicModel::AngleResponse(0.0), 0.0);
  EXPECT_DOUBLE_EQ(HeuristicModel::AngleResponse(5.0), 0.5);
  EXPECT_EQ(HeuristicModel::AngleResponse(10.0), 1.0);
  EXPECT_EQ(HeuristicModel::AngleResponse(25.0), 1.0);
  EXPECT_DOUBLE_EQ(HeuristicModel::AngleResponse(35.0), 0.5);
  EXPECT_EQ(HeuristicModel::AngleResponse(45.0), 0.0);
}

TEST(HeuristicModelTest, FlatImageHasNoTexture) {
  SurfaceMesh mesh = GridMesh(1, 1, 1.0, 1.0);
  const Camera cam = NadirCamera(7, 0.5, 0.5, 5.0);
  HeuristicModel model;
  EXPECT_GT(model.Predict(cam, mesh.patches[0])[3], 0.0);
  GrayImage flat;
  flat.width = cam.width;
  flat.height = cam.height;
  flat.pixels.assign(static_cast<std::size_t>(flat.width) * flat.height, 128);
  model.SetImage(7, flat);
  for (double v : model.Predict(cam, mesh.patches[0])) EXPECT_EQ(v, 0.0);
}

TEST(FileBackedModelTest, AveragesCellsInsideProjection) {
  // A nadir camera over a 1 x 1 m cell: the triangle covers a known pixel
  // region, and a grid holding value = bin / 10 everywhere must return it.
  SurfaceMesh mesh = GridMesh(1, 1, 1.0, 1.0);
  const Camera cam = NadirCamera(3, 0.5, 0.5, 5.0);
  ConfidenceGrid grid;
  grid.width_cells = 125;
  grid.height_cells = 94;
  grid.stride_px = 8;
  grid.values.resize(static_cast<std::size_t>(kAngleBins) * 125 * 94);
  for (int b = 0; b < kAngleBins; ++b) {
    std::fill_n(grid.values.begin() + static_cast<std::size_t>(b) * 125 * 94,
                125 * 94, static_cast<float>(b) / 10.0f);
  }
  FileBackedModel model;
  model.SetGrid(3, grid);
  const UnaryBins bins = model.Predict(cam, mesh.patches[0]);
  for (int b = 0; b < kAngleBins; ++b) {
    EXPECT_NEAR(bins[b], b / 10.0, 1e-6);
  }
  // Unknown camera id: zeros.
  Camera other = cam;
  other.id = 4;
  for (double v : model.Predict(other, mesh.patches[0])) EXPECT_EQ(v, 0.0);
}

TEST(FileBackedModelTest, LeftHalfVersusRightHalf) {
  // Grid with 0.2 on the left image half and 0.8 on the right half; a
  // triangle projecting entirely into the right half reads 0.8.
  SurfaceMesh mesh;
  mesh.vertices = {Vec3(1.0, -0.5, 0), Vec3(2.0, -0.5, 0), Vec3(1.5, 0.5, 0)};
  mesh.triangles = {{0, 1, 2}};
  mesh.RebuildPatches();
  const Camera cam = NadirCamera(0, 0.0, 0.0, 5.0);
  // Image x grows with world x for this camera.
  ASSERT_GT(Project(cam, Vec3(1.5, 0, 0))->x(), 500.0);
  ConfidenceGrid grid;
  grid.width_cells = 100;
  grid.height_cells = 75;
  grid.stride_px = 10;
  grid.values.assign(static_cast<std::size_t>(kAngleBins) * 100 * 75, 0.2f);
  for (int b = 0; b < kAngleBins; ++b) {
    for (int y = 0; y < 75; ++y) {
      for (int x = 50; x < 100; ++x) {
        grid.values[(static_cast<std::size_t>(b) * 75 + y) * 100 + x] = 0.8f;
      }
    }
  }
  FileBackedModel model;
  model.SetGrid(0, grid);
  EXPECT_NEAR(model.Predict(cam, mesh.patches[0])[4], 0.8, 1e-6);
}

TEST(PairwiseConfidenceTest, MeanOfUnariesInAngleBin) {
  SurfaceMesh mesh = GridMesh(2, 2, 1.0, 1.0);
  std::vector<Camera> cams = {NadirCamera(0, 1.0, 1.0, 5.0),
                              NadirCamera(1, 2.5, 1.0, 5.0)};
  const Bvh bvh(mesh);
  ApplyVisibility(ComputeVisibility(mesh, bvh, cams), mesh);
  HeuristicModel model;
  CacheUnaries(model, cams, mesh);
  const TrianglePatch& patch = mesh.patches[0];
  ASSERT_TRUE(patch.Sees(0) && patch.Sees(1));
  const int bin =
      AngleBin(TriangulationAngle(cams[0], cams[1], patch.centroid));
  const double expected =
      0.5 * ((*patch.Unary(0))[bin] + (*patch.Unary(1))[bin]);
  EXPECT_DOUBLE_EQ(PairwiseConfidence(cams, 0, 1, patch), expected);
  EXPECT_DOUBLE_EQ(PairwiseConfidence(cams, 1, 0, patch), expected);
}

TEST(ReadPgmTest, BinaryAndAscii) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto p5 = dir / "mvsprio_p5.pgm";
  const auto p2 = dir / "mvsprio_p2.pgm";
  {
    std::ofstream f(p5, std::ios::binary);
    f << "P5\n# comment\n3 2\n255\n";
    const unsigned char px[6] = {0, 10, 20, 30, 40, 255};
    f.write(reinterpret_cast<const char*>(px), 6);
  }
  {
    std::ofstream f(p2);
    f << "P2\n3 2\n255\n0 10 20\n30 40 255\n";
  }
  for (const auto& path : {p5, p2}) {
    const GrayImage img = ReadPgm(path.string());
    ASSERT_EQ(img.width, 3);
    ASSERT_EQ(img.height, 2);
    EXPECT_EQ(img.at(1, 0), 10);
    EXPECT_EQ(img.at(2, 1), 255);
  }
  EXPECT_THROW(ReadPgm((dir / "mvsprio_missing.pgm").string()), Error);
}

}  // namespace
}  // namespace mvsprio
