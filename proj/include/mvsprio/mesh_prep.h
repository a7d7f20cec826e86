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

// Balancing of the surface proxy: quadric-error edge-collapse decimation
// until most edges reach a target length, followed by conforming
// subdivision until every edge is below an upper bound.

#ifndef MVSPRIO_MESH_PREP_H_
#define MVSPRIO_MESH_PREP_H_

#include <array>
#include <utility>
#include <vector>

#include "mvsprio/scene_model.h"

namespace mvsprio {

struct MeshStats {
  // Sorted ascending, one entry per undirected edge.
  std::vector<double> edge_lengths;
  int triangle_count = 0;
  // Element floor(0.05 * n) of the sorted lengths, so that
  // percentile_05 > L implies at least 95% of the edges are longer than L.
  double percentile_05 = 0.0;

  double FractionAbove(double length) const;
  double MaxEdge() const {
    return edge_lengths.empty() ? 0.0 : edge_lengths.back();
  }
};

MeshStats ComputeMeshStats(const SurfaceMesh& mesh);

// Undirected edges (lo, hi) of a triangle list, sorted.
std::vector<std::pair<int, int>> UniqueEdges(
    const std::vector<std::array<int, 3>>& triangles);

// Drops triangles with area <= kMinTriangleArea and unreferenced vertices.
SurfaceMesh RemoveDegenerateTriangles(const SurfaceMesh& mesh);

struct SimplifyResult {
  SurfaceMesh mesh;
  // No legal collapse remained before the length criterion was met.
  bool exhausted = false;
  int collapses = 0;
};

// Quadric-error edge collapse in ascending error order (ties: shorter edge
// first) until at least 95% of the edges are longer than r * g_d. Collapses
// that flip a face by more than 90 degrees, create degenerate faces or
// non-manifold topology, or touch a non-manifold edge are rejected.
SimplifyResult Simplify(const SurfaceMesh& mesh, double gsd,
                        double simplify_factor);

// Conforming midpoint refinement until every edge is shorter than e * g_d.
// Triangles with three long edges split 1->4; triangles with one or two long
// edges are bisected so that no T-junctions arise. Input vertex positions
// are preserved; degenerate input triangles are dropped first.
SurfaceMesh Subdivide(const SurfaceMesh& mesh, double gsd,
                      double subdivide_factor);

}  // namespace mvsprio

#endif  // MVSPRIO_MESH_PREP_H_
