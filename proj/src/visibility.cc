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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mvsprio/parallel.h"

namespace mvsprio {

std::optional<double> IntersectTriangle(const Vec3& origin, const Vec3& dir,
                                        const Vec3& a, const Vec3& b,
                                        const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = s.dot(p) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv_det;
  if (!(t > 0.0)) return std::nullopt;
  return t;
}

Bvh::Bvh(const SurfaceMesh& mesh) {
  const std::size_t n = mesh.triangles.size();
  tris_.reserve(n);
  centroids_.reserve(n);
  for (const auto& t : mesh.triangles) {
    tris_.push_back(
        {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]});
    centroids_.push_back((tris_.back()[0] + tris_.back()[1] + tris_.back()[2]) /
                         3.0);
  }
  order_.resize(n);
  for (std::size_t i = 0; i < n; ++i) order_[i] = static_cast<int>(i);
  if (n > 0) {
    nodes_.reserve(2 * n / kMaxLeafSize + 2);
    Build(0, static_cast<int>(n), 0);
  }
}

int Bvh::Build(int first, int count, int depth) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroid_box;
  for (int i = first; i < first + count; ++i) {
    for (const Vec3& v : tris_[order_[i]]) box.extend(v);
    centroid_box.extend(centroids_[order_[i]]);
  }
  // Pad so that hits on a face of the box survive rounding in the slab test.
  const double pad = 1e-9 * std::max(1.0, box.diagonal().norm());
  box.min().array() -= pad;
  box.max().array() += pad;
  nodes_[index].box = box;

  const Vec3 extent = centroid_box.diagonal();
  int axis = 0;
  extent.maxCoeff(&axis);
  if (count <= kMaxLeafSize || extent[axis] <= 0.0 || depth > 64) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid,
                   order_.begin() + first + count, [&](int x, int y) {
                     const double cx = centroids_[x][axis];
                     const double cy = centroids_[y][axis];
                     return cx < cy || (cx == cy && x < y);
                   });
  const int left = Build(first, mid - first, depth + 1);
  const int right = Build(mid, first + count - mid, depth + 1);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

bool Bvh::HitsBox(const Eigen::AlignedBox3d& box, const Vec3& origin,
                  const Vec3& inv_dir, double t_max, double* t_near) const {
  double lo = 0.0;
  double hi = t_max;
  for (int k = 0; k < 3; ++k) {
    if (std::isinf(inv_dir[k])) {
      if (origin[k] < box.min()[k] || origin[k] > box.max()[k]) return false;
      continue;
    }
    double t0 = (box.min()[k] - origin[k]) * inv_dir[k];
    double t1 = (box.max()[k] - origin[k]) * inv_dir[k];
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
    if (lo > hi) return false;
  }
  *t_near = lo;
  return true;
}

RayHit Bvh::Intersect(const Vec3& origin, const Vec3& dir, double t_max,
                      int ignore) const {
  RayHit best;
  if (nodes_.empty()) return best;
  const Vec3 inv_dir = dir.cwiseInverse();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    double t_near = 0.0;
    const double limit = std::min(t_max, best.distance);
    if (!HitsBox(node.box, origin, inv_dir, limit, &t_near)) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri = order_[i];
        if (tri == ignore) continue;
        const auto& p = tris_[tri];
        auto t = IntersectTriangle(origin, dir, p[0], p[1], p[2]);
        if (t && *t < t_max && CloserHit(*t, tri, best)) {
          best.distance = *t;
          best.triangle = tri;
        }
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return best;
}

bool Bvh::Occluded(const Vec3& origin, const Vec3& dir, double t_max,
                   int ignore) const {
  if (nodes_.empty()) return false;
  const Vec3 inv_dir = dir.cwiseInverse();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    double t_near = 0.0;
    if (!HitsBox(node.box, origin, inv_dir, t_max, &t_near)) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri = order_[i];
        if (tri == ignore) continue;
        const auto& p = tris_[tri];
        auto t = IntersectTriangle(origin, dir, p[0], p[1], p[2]);
        if (t && *t < t_max) return true;
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return false;
}

bool VisibilityTable::IsConsistent() const {
  std::size_t forward = 0;
  for (std::size_t t = 0; t < cameras_of_triangle.size(); ++t) {
    for (int c : cameras_of_triangle[t]) {
      if (c < 0 || static_cast<std::size_t>(c) >= triangles_of_camera.size()) {
        return false;
      }
      const auto& tris = triangles_of_camera[c];
      if (!std::binary_search(tris.begin(), tris.end(), static_cast<int>(t))) {
        return false;
      }
      ++forward;
    }
  }
  std::size_t backward = 0;
  for (const auto& tris : triangles_of_camera) backward += tris.size();
  return forward == backward;
}

std::size_t VisibilityTable::PairCount() const {
  std::size_t n = 0;
  for (const auto& cams : cameras_of_triangle) n += cams.size();
  return n;
}

bool PassesViewTests(const Camera& camera, const TrianglePatch& triangle) {
  const auto px = Project(camera, triangle.centroid);
  if (!px) return false;
  if (px->x() < 0.0 || px->y() < 0.0 || px->x() >= camera.width ||
      px->y() >= camera.height) {
    return false;
  }
  const Vec3 to_camera = camera.center - triangle.centroid;
  const double dist = to_camera.norm();
  if (dist <= 0.0) return false;
  static const double kMinCos =
      std::cos(kMaxViewAngleDeg * std::numbers::pi / 180.0);
  return triangle.normal.dot(to_camera) / dist > kMinCos;
}

VisibilityTable ComputeVisibility(const SurfaceMesh& mesh, const Bvh& bvh,
                                  std::span<const Camera> cameras,
                                  int threads) {
  VisibilityTable table;
  table.cameras_of_triangle.assign(mesh.size(), {});
  table.triangles_of_camera.assign(cameras.size(), {});
  const double eps = kOcclusionEpsilonFraction * mesh.Diameter();
  ParallelFor(cameras.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const Camera& camera = cameras[c];
      auto& seen = table.triangles_of_camera[c];
      for (std::size_t t = 0; t < mesh.size(); ++t) {
        const TrianglePatch& patch = mesh.patches[t];
        if (!PassesViewTests(camera, patch)) continue;
        const Vec3 dir = patch.centroid - camera.center;
        const double dist = dir.norm();
        if (bvh.Occluded(camera.center, dir / dist, dist - eps,
                         static_cast<int>(t))) {
          continue;
        }
        seen.push_back(static_cast<int>(t));
      }
    }
  });
  for (std::size_t c = 0; c < cameras.size(); ++c) {
    for (int t : table.triangles_of_camera[c]) {
      table.cameras_of_triangle[t].push_back(static_cast<int>(c));
    }
  }
  return table;
}

void ApplyVisibility(const VisibilityTable& table, SurfaceMesh& mesh) {
  for (std::size_t t = 0; t < mesh.size(); ++t) {
    mesh.patches[t].visible_cameras = table.cameras_of_triangle[t];
    mesh.patches[t].unary_confidence.clear();
  }
}

}  // namespace mvsprio
