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

#include "mvsprio/mesh_prep.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

namespace mvsprio {

double MeshStats::FractionAbove(double length) const {
  if (edge_lengths.empty()) return 1.0;
  const auto it =
      std::upper_bound(edge_lengths.begin(), edge_lengths.end(), length);
  return static_cast<double>(edge_lengths.end() - it) /
         static_cast<double>(edge_lengths.size());
}

std::vector<std::pair<int, int>> UniqueEdges(
    const std::vector<std::array<int, 3>>& triangles) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(triangles.size() * 3);
  for (const auto& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      const int a = t[i];
      const int b = t[(i + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

MeshStats ComputeMeshStats(const SurfaceMesh& mesh) {
  MeshStats stats;
  stats.triangle_count = static_cast<int>(mesh.triangles.size());
  for (const auto& [a, b] : UniqueEdges(mesh.triangles)) {
    stats.edge_lengths.push_back((mesh.vertices[a] - mesh.vertices[b]).norm());
  }
  std::sort(stats.edge_lengths.begin(), stats.edge_lengths.end());
  if (!stats.edge_lengths.empty()) {
    const auto n = stats.edge_lengths.size();
    const auto idx = std::min(n - 1, static_cast<std::size_t>(0.05 * n));
    stats.percentile_05 = stats.edge_lengths[idx];
  }
  return stats;
}

SurfaceMesh RemoveDegenerateTriangles(const SurfaceMesh& mesh) {
  SurfaceMesh out;
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    if (TriangleArea(a, b, c) <= kMinTriangleArea) continue;
    std::array<int, 3> nt;
    for (int i = 0; i < 3; ++i) {
      int& m = remap[t[i]];
      if (m < 0) {
        m = static_cast<int>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[t[i]]);
      }
      nt[i] = m;
    }
    out.triangles.push_back(nt);
  }
  out.RebuildPatches();
  return out;
}

namespace {

constexpr double kTargetFraction = 0.95;
constexpr double kBoundaryWeight = 100.0;

using Quadric = Eigen::Matrix4d;

double QuadricError(const Quadric& q, const Vec3& p) {
  const Eigen::Vector4d h(p.x(), p.y(), p.z(), 1.0);
  return std::max(0.0, h.dot(q * h));
}

Quadric PlaneQuadric(const Vec3& normal, const Vec3& point, double weight) {
  const Eigen::Vector4d plane(normal.x(), normal.y(), normal.z(),
                              -normal.dot(point));
  return weight * plane * plane.transpose();
}

struct Candidate {
  double cost;
  double length;
  int a;
  int b;
  std::uint32_t version_a;
  std::uint32_t version_b;
  Vec3 target;
};

struct CandidateAfter {
  bool operator()(const Candidate& x, const Candidate& y) const {
    if (x.cost != y.cost) return x.cost > y.cost;
    if (x.length != y.length) return x.length > y.length;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

class Decimator {
 public:
  Decimator(const SurfaceMesh& mesh, double threshold)
      : pos_(mesh.vertices),
        faces_(mesh.triangles),
        alive_(mesh.triangles.size(), 1),
        vert_faces_(mesh.vertices.size()),
        version_(mesh.vertices.size(), 0),
        quadric_(mesh.vertices.size(), Quadric::Zero()),
        threshold_(threshold),
        zero_cost_(1e-12 * std::pow(threshold, 4)) {
    live_faces_ = static_cast<int>(faces_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      for (int v : faces_[f]) vert_faces_[v].push_back(static_cast<int>(f));
    }
    InitQuadrics();
  }

  SimplifyResult Run() {
    for (const auto& [a, b] : UniqueEdges(faces_)) PushCandidate(a, b);
    SimplifyResult result;
    int since_check = 0;
    int check_interval = NextCheckInterval();
    while (true) {
      if (since_check >= check_interval) {
        since_check = 0;
        if (CriterionMet()) break;
        check_interval = NextCheckInterval();
      }
      if (heap_.empty()) {
        result.exhausted = !CriterionMet();
        break;
      }
      Candidate c = heap_.top();
      heap_.pop();
      if (version_[c.a] != c.version_a || version_[c.b] != c.version_b) {
        continue;
      }
      if (vert_faces_[c.a].empty() || vert_faces_[c.b].empty()) continue;
      if (!IsLegal(c.a, c.b, c.target)) continue;
      Collapse(c.a, c.b, c.target);
      ++result.collapses;
      ++since_check;
    }
    result.mesh = Compact();
    return result;
  }

 private:
  // Re-evaluating the length criterion costs O(F); spread the checks so the
  // criterion is tested at least every 1024 collapses and at roughly 1% face
  // count granularity on small meshes.
  int NextCheckInterval() const {
    return std::clamp(live_faces_ / 100, 1, 1024);
  }

  std::vector<std::array<int, 3>> LiveFaces() const {
    std::vector<std::array<int, 3>> out;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (alive_[f]) out.push_back(faces_[f]);
    }
    return out;
  }

  bool CriterionMet() const {
    const auto edges = UniqueEdges(LiveFaces());
    if (edges.empty()) return true;
    std::size_t above = 0;
    for (const auto& [a, b] : edges) {
      if ((pos_[a] - pos_[b]).norm() > threshold_) ++above;
    }
    return static_cast<double>(above) >=
           kTargetFraction * static_cast<double>(edges.size());
  }

  Vec3 FaceNormalRaw(const std::array<int, 3>& f) const {
    return (pos_[f[1]] - pos_[f[0]]).cross(pos_[f[2]] - pos_[f[0]]);
  }

  void InitQuadrics() {
    // Edge -> incident faces, for boundary constraints.
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      const auto& t = faces_[f];
      const Vec3 n = FaceNormalRaw(t);
      const double len = n.norm();
      if (len <= 0.0) continue;
      const Quadric q = PlaneQuadric(n / len, pos_[t[0]], 0.5 * len);
      for (int v : t) quadric_[v] += q;
      for (int i = 0; i < 3; ++i) {
        const int a = t[i];
        const int b = t[(i + 1) % 3];
        edge_faces[{std::min(a, b), std::max(a, b)}].push_back(
            static_cast<int>(f));
      }
    }
    for (const auto& [edge, fs] : edge_faces) {
      if (fs.size() != 1) continue;
      const Vec3 n = FaceNormalRaw(faces_[fs[0]]);
      const Vec3 dir = pos_[edge.second] - pos_[edge.first];
      Vec3 side = dir.cross(n);
      const double len = side.norm();
      if (len <= 0.0) continue;
      side /= len;
      const Quadric q = PlaneQuadric(side, pos_[edge.first],
                                     kBoundaryWeight * dir.squaredNorm());
      quadric_[edge.first] += q;
      quadric_[edge.second] += q;
    }
  }

  void PushCandidate(int a, int b) {
    if (a > b) std::swap(a, b);
    const Quadric q = quadric_[a] + quadric_[b];
    const Vec3 mid = 0.5 * (pos_[a] + pos_[b]);
    // Midpoint first so that it wins ties on flat regions.
    Vec3 best = mid;
    double best_cost = QuadricError(q, mid);
    for (const Vec3& p : {pos_[a], pos_[b]}) {
      const double e = QuadricError(q, p);
      if (e < best_cost) {
        best_cost = e;
        best = p;
      }
    }
    const Mat3 A = q.topLeftCorner<3, 3>();
    const Vec3 rhs = -q.topRightCorner<3, 1>();
    Eigen::FullPivLU<Mat3> lu(A);
    if (lu.rank() == 3 && lu.rcond() > 1e-10) {
      const Vec3 opt = lu.solve(rhs);
      const double e = QuadricError(q, opt);
      const double span = (pos_[a] - pos_[b]).norm();
      // Keep optimal placements near the edge being collapsed.
      if (e < best_cost && (opt - mid).norm() <= 2.0 * span) {
        best_cost = e;
        best = opt;
      }
    }
    if (best_cost < zero_cost_) best_cost = 0.0;
    heap_.push(Candidate{best_cost, (pos_[a] - pos_[b]).norm(), a, b,
                         version_[a], version_[b], best});
  }

  // Neighbor -> number of live faces containing the edge (v, neighbor).
  std::map<int, int> EdgeValence(int v) const {
    std::map<int, int> out;
    for (int f : vert_faces_[v]) {
      for (int u : faces_[f]) {
        if (u != v) ++out[u];
      }
    }
    return out;
  }

  bool IsBoundaryVertex(int v) const {
    for (const auto& [u, count] : EdgeValence(v)) {
      if (count == 1) return true;
    }
    return false;
  }

  bool IsLegal(int a, int b, const Vec3& target) const {
    std::vector<int> shared;
    for (int f : vert_faces_[a]) {
      const auto& t = faces_[f];
      if (t[0] == b || t[1] == b || t[2] == b) shared.push_back(f);
    }
    if (shared.empty() || shared.size() > 2) return false;
    if (live_faces_ - static_cast<int>(shared.size()) < 2) return false;

    std::vector<int> opposite;
    for (int f : shared) {
      for (int v : faces_[f]) {
        if (v != a && v != b) opposite.push_back(v);
      }
    }
    std::sort(opposite.begin(), opposite.end());

    // Link condition: common neighbours are exactly the opposite vertices.
    const auto link_a = EdgeValence(a);
    const auto link_b = EdgeValence(b);
    std::vector<int> common;
    for (const auto& [u, count] : link_a) {
      if (u != b && link_b.count(u)) common.push_back(u);
    }
    if (common != opposite) return false;

    // Edges of the removed faces must stay manifold after merging.
    for (int f : shared) {
      for (int v : faces_[f]) {
        if (v == a || v == b) continue;
        if (link_a.at(v) + link_b.at(v) - 2 > 2) return false;
      }
    }

    if (shared.size() == 2 && IsBoundaryVertex(a) && IsBoundaryVertex(b)) {
      return false;
    }

    // The vertex opposite a removed face must keep at least one face.
    for (int c : opposite) {
      int remaining = 0;
      for (int f : vert_faces_[c]) {
        if (std::find(shared.begin(), shared.end(), f) == shared.end()) {
          ++remaining;
        }
      }
      if (remaining == 0) return false;
    }

    for (int v : {a, b}) {
      for (int f : vert_faces_[v]) {
        if (std::find(shared.begin(), shared.end(), f) != shared.end()) {
          continue;
        }
        const auto& t = faces_[f];
        const Vec3 before = FaceNormalRaw(t);
        std::array<Vec3, 3> p{pos_[t[0]], pos_[t[1]], pos_[t[2]]};
        for (int i = 0; i < 3; ++i) {
          if (t[i] == v) p[i] = target;
        }
        const Vec3 after = (p[1] - p[0]).cross(p[2] - p[0]);
        if (0.5 * after.norm() <= kMinTriangleArea) return false;
        if (before.dot(after) <= 0.0) return false;
      }
    }
    return true;
  }

  void Collapse(int a, int b, const Vec3& target) {
    pos_[a] = target;
    quadric_[a] += quadric_[b];
    for (int f : vert_faces_[b]) {
      auto& t = faces_[f];
      const bool has_a = t[0] == a || t[1] == a || t[2] == a;
      if (has_a) {
        alive_[f] = 0;
        --live_faces_;
        for (int v : t) {
          if (v == a || v == b) continue;
          auto& list = vert_faces_[v];
          list.erase(std::remove(list.begin(), list.end(), f), list.end());
        }
        auto& list_a = vert_faces_[a];
        list_a.erase(std::remove(list_a.begin(), list_a.end(), f),
                     list_a.end());
      } else {
        for (int& v : t) {
          if (v == b) v = a;
        }
        vert_faces_[a].push_back(f);
      }
    }
    vert_faces_[b].clear();
    ++version_[a];
    ++version_[b];
    std::vector<int> neighbours;
    for (int f : vert_faces_[a]) {
      for (int v : faces_[f]) {
        if (v != a) neighbours.push_back(v);
      }
    }
    std::sort(neighbours.begin(), neighbours.end());
    neighbours.erase(std::unique(neighbours.begin(), neighbours.end()),
                     neighbours.end());
    for (int n : neighbours) PushCandidate(a, n);
  }

  SurfaceMesh Compact() const {
    SurfaceMesh out;
    out.vertices = pos_;
    out.triangles = LiveFaces();
    return RemoveDegenerateTriangles(out);
  }

  std::vector<Vec3> pos_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<char> alive_;
  std::vector<std::vector<int>> vert_faces_;
  std::vector<std::uint32_t> version_;
  std::vector<Quadric> quadric_;
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateAfter> heap_;
  double threshold_;
  double zero_cost_;
  int live_faces_ = 0;
};

}  // namespace

SimplifyResult Simplify(const SurfaceMesh& mesh, double gsd,
                        double simplify_factor) {
  const double threshold = simplify_factor * gsd;
  SimplifyResult result;
  if (mesh.empty()) {
    result.mesh = mesh;
    return result;
  }
  if (ComputeMeshStats(mesh).FractionAbove(threshold) >= kTargetFraction) {
    result.mesh = mesh;
    if (result.mesh.patches.size() != result.mesh.triangles.size()) {
      result.mesh.RebuildPatches();
    }
    return result;
  }
  Decimator decimator(RemoveDegenerateTriangles(mesh), threshold);
  return decimator.Run();
}

SurfaceMesh Subdivide(const SurfaceMesh& input, double gsd,
                      double subdivide_factor) {
  const double bound = subdivide_factor * gsd;
  SurfaceMesh mesh = RemoveDegenerateTriangles(input);
  // Each round halves every long edge; 64 rounds cover any finite ratio of
  // edge length to bound representable in a double.
  for (int round = 0; round < 64; ++round) {
    std::map<std::pair<int, int>, int> midpoint;
    for (const auto& [a, b] : UniqueEdges(mesh.triangles)) {
      if ((mesh.vertices[a] - mesh.vertices[b]).norm() >= bound) {
        midpoint[{a, b}] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
      }
    }
    if (midpoint.empty()) break;
    auto split = [&](int a, int b) {
      auto it = midpoint.find({std::min(a, b), std::max(a, b)});
      return it == midpoint.end() ? -1 : it->second;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
      const std::array<int, 3> m{split(t[0], t[1]), split(t[1], t[2]),
                                 split(t[2], t[0])};
      const int marked = (m[0] >= 0) + (m[1] >= 0) + (m[2] >= 0);
      if (marked == 0) {
        next.push_back(t);
      } else if (marked == 3) {
        next.push_back({t[0], m[0], m[2]});
        next.push_back({m[0], t[1], m[1]});
        next.push_back({m[2], m[1], t[2]});
        next.push_back({m[0], m[1], m[2]});
      } else if (marked == 1) {
        // Rotate so that the split edge is (v0, v1).
        const int r = m[0] >= 0 ? 0 : (m[1] >= 0 ? 1 : 2);
        const int v0 = t[r], v1 = t[(r + 1) % 3], v2 = t[(r + 2) % 3];
        const int mid = m[r];
        next.push_back({v0, mid, v2});
        next.push_back({mid, v1, v2});
      } else {
        // Rotate so that the unsplit edge is (v2, v0).
        const int r = m[2] < 0 ? 0 : (m[0] < 0 ? 1 : 2);
        const int v0 = t[r], v1 = t[(r + 1) % 3], v2 = t[(r + 2) % 3];
        const int m0 = m[r], m1 = m[(r + 1) % 3];
        next.push_back({m0, v1, m1});
        const double d0 = (mesh.vertices[v0] - mesh.vertices[m1]).norm();
        const double d1 = (mesh.vertices[m0] - mesh.vertices[v2]).norm();
        if (d0 <= d1) {
          next.push_back({v0, m0, m1});
          next.push_back({v0, m1, v2});
        } else {
          next.push_back({v0, m0, v2});
          next.push_back({m0, m1, v2});
        }
      }
    }
    mesh.triangles = std::move(next);
  }
  mesh.RebuildPatches();
  return mesh;
}

}  // namespace mvsprio
