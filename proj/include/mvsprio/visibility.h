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

// Line-of-sight tests between cameras and the surface proxy, accelerated by
// a median-split bounding volume hierarchy over the triangles.

#ifndef MVSPRIO_VISIBILITY_H_
#define MVSPRIO_VISIBILITY_H_

#include <Eigen/Geometry>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mvsprio/scene_model.h"

namespace mvsprio {

struct RayHit {
  int triangle = -1;
  double distance = std::numeric_limits<double>::infinity();

  bool hit() const { return triangle >= 0; }
};

// Moller-Trumbore intersection, both faces. Returns the ray parameter of a
// hit with t > 0.
std::optional<double> IntersectTriangle(const Vec3& origin, const Vec3& dir,
                                        const Vec3& a, const Vec3& b,
                                        const Vec3& c);

// True when hit (t, index) is preferable to `best`: nearer, or equally near
// with a smaller triangle index.
inline bool CloserHit(double t, int triangle, const RayHit& best) {
  return t < best.distance || (t == best.distance && triangle < best.triangle);
}

class Bvh {
 public:
  static constexpr int kMaxLeafSize = 8;

  struct Node {
    Eigen::AlignedBox3d box;
    // Children for inner nodes, -1 for leaves.
    int left = -1;
    int right = -1;
    // Range into triangle_order() for leaves.
    int first = 0;
    int count = 0;

    bool leaf() const { return left < 0; }
  };

  explicit Bvh(const SurfaceMesh& mesh);

  // Closest hit with 0 < t < t_max, skipping triangle `ignore`.
  RayHit Intersect(const Vec3& origin, const Vec3& dir, double t_max,
                   int ignore = -1) const;
  // Any hit with 0 < t < t_max, skipping triangle `ignore`.
  bool Occluded(const Vec3& origin, const Vec3& dir, double t_max,
                int ignore = -1) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& triangle_order() const { return order_; }
  bool empty() const { return nodes_.empty(); }

 private:
  int Build(int first, int count, int depth);
  bool HitsBox(const Eigen::AlignedBox3d& box, const Vec3& origin,
               const Vec3& inv_dir, double t_max, double* t_near) const;

  std::vector<std::array<Vec3, 3>> tris_;
  std::vector<Vec3> centroids_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

inline Bvh BuildBvh(const SurfaceMesh& mesh) { return Bvh(mesh); }

struct VisibilityTable {
  // Sorted camera indices per triangle.
  std::vector<std::vector<int>> cameras_of_triangle;
  // Sorted triangle indices per camera.
  std::vector<std::vector<int>> triangles_of_camera;

  // The two indices are exact transposes of each other.
  bool IsConsistent() const;
  std::size_t PairCount() const;
};

// Maximum angle between a triangle normal and the direction to the camera.
inline constexpr double kMaxViewAngleDeg = 89.0;
// Occluders must lie this fraction of the scene diameter in front of the
// target centroid.
inline constexpr double kOcclusionEpsilonFraction = 1e-4;

// Image-bounds and front-facing tests (everything but occlusion).
bool PassesViewTests(const Camera& camera, const TrianglePatch& triangle);

// Camera c sees triangle t iff the centroid projects into the image with
// positive depth, t faces c to within 89 degrees, and no other triangle
// intersects the segment from the camera center to the centroid closer than
// the centroid minus the occlusion epsilon. `threads` > 1 splits cameras
// across worker threads; the result does not depend on it.
VisibilityTable ComputeVisibility(const SurfaceMesh& mesh, const Bvh& bvh,
                                  std::span<const Camera> cameras,
                                  int threads = 1);

// Copies the per-triangle camera sets into mesh.patches and clears the
// unary cache.
void ApplyVisibility(const VisibilityTable& table, SurfaceMesh& mesh);

}  // namespace mvsprio

#endif  // MVSPRIO_VISIBILITY_H_
