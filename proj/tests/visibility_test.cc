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

#include "mvsprio/visibility.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"

namespace mvsprio {
namespace {

using ::mvsprio::testing::GridMesh;
using ::mvsprio::testing::NadirCamera;

double Mt(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
          const Vec3& c) {
  const auto t = IntersectTriangle(o, d, a, b, c);
  return t ? *t : std::numeric_limits<double>::infinity();
}

SurfaceMesh RandomSoup(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  SurfaceMesh mesh;
  for (int i = 0; i < count; ++i) {
    const Vec3 c(pos(rng), pos(rng), pos(rng));
    for (int j = 0; j < 3; ++j) {
      mesh.vertices.push_back(c + Vec3(off(rng), off(rng), off(rng)));
    }
    mesh.triangles.push_back({3 * i, 3 * i + 1, 3 * i + 2});
  }
  mesh.RebuildPatches();
  return mesh;
}

TEST(IntersectTriangleTest, HitsBothFacesAndMisses) {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  EXPECT_NEAR(*IntersectTriangle(Vec3(0.2, 0.2, 1), Vec3(0, 0, -1), a, b, c),
              1.0, 1e-15);
  EXPECT_NEAR(*IntersectTriangle(Vec3(0.2, 0.2, -2), Vec3(0, 0, 1), a, b, c),
              2.0, 1e-15);
  EXPECT_FALSE(IntersectTriangle(Vec3(0.8, 0.8, 1), Vec3(0, 0, -1), a, b, c));
  EXPECT_FALSE(IntersectTriangle(Vec3(0.2, 0.2, 1), Vec3(0, 0, 1), a, b, c));
  EXPECT_FALSE(IntersectTriangle(Vec3(0.2, 0.2, 1), Vec3(1, 0, 0), a, b, c));
}

TEST(BvhTest, MatchesLinearScan) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-8.0, 8.0);
  for (int scene = 0; scene < 20; ++scene) {
    const SurfaceMesh mesh = RandomSoup(rng, 100);
    const Bvh bvh(mesh);
    std::vector<std::array<Vec3, 3>> tris;
    for (const auto& p : mesh.patches) tris.push_back(p.corners);
    for (int r = 0; r < 500; ++r) {
      const Vec3 o(pos(rng), pos(rng), pos(rng));
      const Vec3 d = Vec3(pos(rng), pos(rng), pos(rng)).normalized();
      const double t_max = r % 3 == 0 ? 6.0 : 1e30;
      const RayHit hit = bvh.Intersect(o, d, t_max);
      const oracle::Hit same = oracle::ClosestHit(tris, o, d, t_max, Mt);
      ASSERT_EQ(hit.triangle, same.triangle);
      if (hit.hit()) EXPECT_EQ(hit.distance, same.t);
      EXPECT_EQ(bvh.Occluded(o, d, t_max), same.triangle >= 0);
      const oracle::Hit other =
          oracle::ClosestHit(tris, o, d, t_max, oracle::PlaneEdgeIntersect);
      EXPECT_EQ(hit.triangle, other.triangle);
    }
  }
}

TEST(BvhTest, IgnoreSkipsTriangle) {
  const SurfaceMesh mesh = GridMesh(1, 1, 1.0, 1.0);
  const Bvh bvh(mesh);
  const Vec3 o(0.7, 0.2, 1.0);
  const RayHit hit = bvh.Intersect(o, Vec3(0, 0, -1), 10.0);
  ASSERT_TRUE(hit.hit());
  EXPECT_FALSE(bvh.Intersect(o, Vec3(0, 0, -1), 10.0, hit.triangle).hit());
  EXPECT_FALSE(bvh.Occluded(o, Vec3(0, 0, -1), 10.0, hit.triangle));
}

TEST(BvhTest, LeavesAreSmall) {
  std::mt19937_64 rng(3);
  const Bvh bvh(RandomSoup(rng, 300));
  int covered = 0;
  for (const auto& n : bvh.nodes()) {
    if (!n.leaf()) continue;
    EXPECT_LE(n.count, Bvh::kMaxLeafSize);
    covered += n.count;
  }
  EXPECT_EQ(covered, 300);
}

// Ground grid with a floating square roof above the middle.
SurfaceMesh GroundWithRoof() {
  SurfaceMesh mesh = GridMesh(10, 10, 1.0, 1.0);
  const int base = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(Vec3(4, 4, 3));
  mesh.vertices.push_back(Vec3(6, 4, 3));
  mesh.vertices.push_back(Vec3(6, 6, 3));
  mesh.vertices.push_back(Vec3(4, 6, 3));
  mesh.triangles.push_back({base, base + 1, base + 2});
  mesh.triangles.push_back({base, base + 2, base + 3});
  mesh.RebuildPatches();
  return mesh;
}

TEST(VisibilityTest, RoofOccludesGroundBelow) {
  const SurfaceMesh mesh = GroundWithRoof();
  const std::vector<Camera> cams = {NadirCamera(0, 5, 5, 10, 400.0)};
  const Bvh bvh(mesh);
  const VisibilityTable table = ComputeVisibility(mesh, bvh, cams);
  for (std::size_t t = 0; t < mesh.size(); ++t) {
    const Vec3& c = mesh.patches[t].centroid;
    // Central projection of the roof edge (1 m from the axis at height 3)
    // from 10 m onto the ground.
    const double shadow = 10.0 / 7.0;
    const bool under = c.z() == 0.0 && std::abs(c.x() - 5) < shadow &&
                       std::abs(c.y() - 5) < shadow;
    EXPECT_EQ(table.cameras_of_triangle[t].empty(), under) << t;
  }
}

TEST(VisibilityTest, BackFacesAndGrazingViewsRejected) {
  const SurfaceMesh mesh = GridMesh(2, 2, 1.0, 1.0);
  // Below the plane looking up: back faces.
  const Camera below =
      LookAtCamera(0, Vec3(1, 1, -5), Vec3(1, 1, 0), 1000, 1000, 750);
  // Nearly in the plane: beyond 89 degrees.
  const Camera grazing =
      LookAtCamera(1, Vec3(-50, 1, 0.5), Vec3(1, 1, 0), 1000, 1000, 750);
  for (const auto& p : mesh.patches) {
    EXPECT_FALSE(PassesViewTests(below, p));
    EXPECT_FALSE(PassesViewTests(grazing, p));
  }
}

TEST(VisibilityTest, MatchesBruteForceAndThreadCount) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  SurfaceMesh mesh = GroundWithRoof();
  std::vector<Camera> cams;
  for (int c = 0; c < 25; ++c) {
    cams.push_back(LookAtCamera(c, Vec3(5 + u(rng), 5 + u(rng), 6 + u(rng) / 2),
                                Vec3(5 + u(rng) / 3, 5 + u(rng) / 3, 0), 800,
                                1000, 750));
  }
  const Bvh bvh(mesh);
  const VisibilityTable one = ComputeVisibility(mesh, bvh, cams, 1);
  const VisibilityTable four = ComputeVisibility(mesh, bvh, cams, 4);
  EXPECT_TRUE(one.IsConsistent());
  EXPECT_EQ(one.cameras_of_triangle, four.cameras_of_triangle);
  EXPECT_EQ(one.triangles_of_camera, four.triangles_of_camera);
  const auto brute = oracle::BruteVisibility(mesh, cams, kMaxViewAngleDeg,
                                             kOcclusionEpsilonFraction, Mt);
  EXPECT_EQ(one.cameras_of_triangle, brute);
  EXPECT_GT(one.PairCount(), 0u);

  ApplyVisibility(one, mesh);
  for (std::size_t t = 0; t < mesh.size(); ++t) {
    EXPECT_EQ(mesh.patches[t].visible_cameras, one.cameras_of_triangle[t]);
  }
}

}  // namespace
}  // namespace mvsprio
