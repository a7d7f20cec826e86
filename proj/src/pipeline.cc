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

#include "mvsprio/pipeline.h"

#include "mvsprio/mesh_prep.h"

namespace mvsprio {

SurfaceMesh PrepareMesh(const SurfaceMesh& mesh, const QualityConfig& config,
                        bool* exhausted) {
  SimplifyResult simplified =
      Simplify(mesh, config.gsd_desired, config.simplify_factor);
  if (exhausted != nullptr) *exhausted = simplified.exhausted;
  return Subdivide(simplified.mesh, config.gsd_desired,
                   config.subdivide_factor);
}

PipelineResult RunPipeline(const std::vector<Camera>& cameras,
                           const SparsePointCloud& cloud, SurfaceMesh mesh,
                           const ConfidenceModel& model,
                           const QualityConfig& config, int threads) {
  config.Validate();
  PipelineResult out;
  if (mesh.patches.size() != mesh.triangles.size()) mesh.RebuildPatches();
  const Bvh bvh(mesh);
  out.visibility = ComputeVisibility(mesh, bvh, cameras, threads);
  ApplyVisibility(out.visibility, mesh);
  CacheUnaries(model, cameras, mesh, threads);
  out.connectivity = BuildConnectivity(cloud, static_cast<int>(cameras.size()));
  out.clusters = BuildClusters(
      cameras, mesh, out.connectivity, config, threads,
      [&](int key, const std::string& why) {
        out.skipped.push_back("key " + std::to_string(key) + ": " + why);
      });
  out.fulfillments = PrecomputeClusterFulfillments(cameras, out.clusters, mesh,
                                                   config, threads);
  out.ranking.config = config;
  out.objective_triangles = ObjectiveTriangleCount(mesh, config.min_cameras);
  out.ranking.entries = Rank(out.clusters, out.fulfillments, mesh,
                             out.objective_triangles, &out.stats);
  out.mesh = std::move(mesh);
  return out;
}

}  // namespace mvsprio
