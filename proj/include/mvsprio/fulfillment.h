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

// Per-triangle quality fulfillment of a view cluster and the scene-level
// objective built from it.
//
//   f(t, v) = (alpha * f_res + (1 - alpha) * f_unc) * f_cov * f_conf
//   f_o(V)  = 1/|T| * sum_t max_{v in V} f(t, v)

#ifndef MVSPRIO_FULFILLMENT_H_
#define MVSPRIO_FULFILLMENT_H_

#include <span>
#include <vector>

#include "mvsprio/scene_model.h"

namespace mvsprio {

// A key view with its matching partners. Cluster ids index the cluster list
// they belong to.
struct ViewCluster {
  int id = 0;
  int key_view = 0;
  std::vector<int> partners;
  // Combined fulfillment score at selection time.
  double score = 0.0;

  // Key view followed by the partners.
  std::vector<int> Cameras() const;
  // Partners distinct, key excluded, at least two partners.
  bool IsValid(int camera_count) const;
};

struct FulfillmentBreakdown {
  double f_res = 0.0;
  double f_unc = 0.0;
  double f_cov = 0.0;
  double f_conf = 0.0;
  double f_total = 0.0;
};

// min(resolution * g_d^2, 1); 0 when the key view does not see the triangle.
double ResolutionFulfillment(std::span<const Camera> cameras, int key,
                             const TrianglePatch& triangle, double gsd);

// min(a_d / sqrt(u), 1) where u is the triangulation uncertainty of the
// centroid using the cluster cameras that see the triangle; 0 when fewer than
// two of them do or the geometry is singular.
double UncertaintyFulfillment(std::span<const Camera> cameras,
                              std::span<const int> cluster_cameras,
                              const TrianglePatch& triangle, double accuracy,
                              double pixel_noise);

// 1 when the key view and at least `min_cameras` cluster cameras in total see
// the triangle, else 0.
double CoverageFulfillment(const ViewCluster& cluster,
                           const TrianglePatch& triangle, int min_cameras);

// k-partner confidence over the pairwise key/partner confidences.
double ConfidenceFulfillment(std::span<const Camera> cameras,
                             const ViewCluster& cluster,
                             const TrianglePatch& triangle);

FulfillmentBreakdown TriangleFulfillment(std::span<const Camera> cameras,
                                         const ViewCluster& cluster,
                                         const TrianglePatch& triangle,
                                         const QualityConfig& config);

// f_total only; skips the remaining factors once one of them is zero.
double TriangleFulfillmentValue(std::span<const Camera> cameras,
                                const ViewCluster& cluster,
                                const TrianglePatch& triangle,
                                const QualityConfig& config);

// Sum of f(t, key, partners) over the given triangles.
double ClusterScore(std::span<const Camera> cameras, int key,
                    std::span<const int> partners, const SurfaceMesh& mesh,
                    std::span<const int> triangles,
                    const QualityConfig& config);

struct TriangleValue {
  int triangle = 0;
  double value = 0.0;
};

// f(t, v) of every cluster on the triangles its key view sees (zeros
// included), indexed by cluster id, ascending
// triangle order.
using ClusterFulfillments = std::vector<std::vector<TriangleValue>>;

// |T| of the objective: triangles visible from at least `min_cameras`
// cameras. Requires the visibility cache.
std::size_t ObjectiveTriangleCount(const SurfaceMesh& mesh, int min_cameras);

// Sum over the triangles of the per-triangle maximum of the cached cluster
// fulfillments over `selected`, divided by `triangle_count`; 0 for an empty
// selection. Triangles outside T carry no cached values.
double Objective(std::span<const int> selected, const SurfaceMesh& mesh,
                 std::size_t triangle_count);

// Increase of the objective when the candidate is added to the selection
// encoded in the patches' current_fulfillment.
double Gain(std::span<const TriangleValue> candidate, const SurfaceMesh& mesh,
            std::size_t triangle_count);

}  // namespace mvsprio

#endif  // MVSPRIO_FULFILLMENT_H_
