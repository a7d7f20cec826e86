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

#include <algorithm>
#include <cmath>

#include "mvsprio/confidence.h"

namespace mvsprio {

std::vector<int> ViewCluster::Cameras() const {
  std::vector<int> out;
  out.reserve(partners.size() + 1);
  out.push_back(key_view);
  out.insert(out.end(), partners.begin(), partners.end());
  return out;
}

bool ViewCluster::IsValid(int camera_count) const {
  if (partners.size() < 2) return false;
  if (key_view < 0 || key_view >= camera_count) return false;
  std::vector<int> sorted = partners;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    return false;
  }
  for (int p : sorted) {
    if (p < 0 || p >= camera_count || p == key_view) return false;
  }
  return true;
}

double ResolutionFulfillment(std::span<const Camera> cameras, int key,
                             const TrianglePatch& triangle, double gsd) {
  if (!triangle.Sees(key)) return 0.0;
  const double resolution = EstimateResolution(cameras[key], triangle);
  return std::min(resolution * gsd * gsd, 1.0);
}

double UncertaintyFulfillment(std::span<const Camera> cameras,
                              std::span<const int> cluster_cameras,
                              const TrianglePatch& triangle, double accuracy,
                              double pixel_noise) {
  std::vector<const Camera*> seeing;
  for (int c : cluster_cameras) {
    if (triangle.Sees(c)) seeing.push_back(&cameras[c]);
  }
  if (seeing.size() < 2) return 0.0;
  const double u =
      TriangulationUncertainty(seeing, triangle.centroid, pixel_noise);
  if (!std::isfinite(u)) return 0.0;
  return std::min(accuracy / std::sqrt(u), 1.0);
}

double CoverageFulfillment(const ViewCluster& cluster,
                           const TrianglePatch& triangle, int min_cameras) {
  if (!triangle.Sees(cluster.key_view)) return 0.0;
  int count = 1;
  for (int p : cluster.partners) count += triangle.Sees(p) ? 1 : 0;
  return count >= min_cameras ? 1.0 : 0.0;
}

double ConfidenceFulfillment(std::span<const Camera> cameras,
                             const ViewCluster& cluster,
                             const TrianglePatch& triangle) {
  std::vector<double> pairwise;
  pairwise.reserve(cluster.partners.size());
  for (int p : cluster.partners) {
    pairwise.push_back(
        PairwiseConfidence(cameras, cluster.key_view, p, triangle));
  }
  return KPartnerConfidence(pairwise);
}

FulfillmentBreakdown TriangleFulfillment(std::span<const Camera> cameras,
                                         const ViewCluster& cluster,
                                         const TrianglePatch& triangle,
                                         const QualityConfig& config) {
  FulfillmentBreakdown b;
  const auto members = cluster.Cameras();
  b.f_res = ResolutionFulfillment(cameras, cluster.key_view, triangle,
                                  config.gsd_desired);
  b.f_unc = UncertaintyFulfillment(cameras, members, triangle,
                                   config.accuracy_desired, config.pixel_noise);
  b.f_cov = CoverageFulfillment(cluster, triangle, config.min_cameras);
  b.f_conf = ConfidenceFulfillment(cameras, cluster, triangle);
  b.f_total = (config.alpha * b.f_res + (1.0 - config.alpha) * b.f_unc) *
              b.f_cov * b.f_conf;
  return b;
}

double TriangleFulfillmentValue(std::span<const Camera> cameras,
                                const ViewCluster& cluster,
                                const TrianglePatch& triangle,
                                const QualityConfig& config) {
  const double f_cov =
      CoverageFulfillment(cluster, triangle, config.min_cameras);
  if (f_cov == 0.0) return 0.0;
  const double f_conf = ConfidenceFulfillment(cameras, cluster, triangle);
  if (f_conf == 0.0) return 0.0;
  const double f_res = ResolutionFulfillment(cameras, cluster.key_view,
                                             triangle, config.gsd_desired);
  const double f_unc =
      config.alpha == 1.0
          ? 0.0
          : UncertaintyFulfillment(cameras, cluster.Cameras(), triangle,
                                   config.accuracy_desired, config.pixel_noise);
  return (config.alpha * f_res + (1.0 - config.alpha) * f_unc) * f_cov * f_conf;
}

double ClusterScore(std::span<const Camera> cameras, int key,
                    std::span<const int> partners, const SurfaceMesh& mesh,
                    std::span<const int> triangles,
                    const QualityConfig& config) {
  ViewCluster cluster;
  cluster.key_view = key;
  cluster.partners.assign(partners.begin(), partners.end());
  double total = 0.0;
  for (int t : triangles) {
    total +=
        TriangleFulfillmentValue(cameras, cluster, mesh.patches[t], config);
  }
  return total;
}

std::size_t ObjectiveTriangleCount(const SurfaceMesh& mesh, int min_cameras) {
  std::size_t count = 0;
  for (const TrianglePatch& patch : mesh.patches) {
    count += static_cast<int>(patch.visible_cameras.size()) >= min_cameras;
  }
  return count;
}

double Objective(std::span<const int> selected, const SurfaceMesh& mesh,
                 std::size_t triangle_count) {
  if (selected.empty() || triangle_count == 0) return 0.0;
  double total = 0.0;
  for (const TrianglePatch& patch : mesh.patches) {
    double best = 0.0;
    for (int v : selected) best = std::max(best, patch.ClusterFulfillment(v));
    total += best;
  }
  return total / static_cast<double>(triangle_count);
}

double Gain(std::span<const TriangleValue> candidate, const SurfaceMesh& mesh,
            std::size_t triangle_count) {
  if (triangle_count == 0) return 0.0;
  double total = 0.0;
  for (const TriangleValue& e : candidate) {
    total +=
        std::max(0.0, e.value - mesh.patches[e.triangle].current_fulfillment);
  }
  return total / static_cast<double>(triangle_count);
}

}  // namespace mvsprio
