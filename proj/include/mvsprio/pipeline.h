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

// End-to-end prioritization: visibility, unary caching, partner selection,
// fulfillment precomputation and ranking.

#ifndef MVSPRIO_PIPELINE_H_
#define MVSPRIO_PIPELINE_H_

#include <string>
#include <vector>

#include "mvsprio/confidence.h"
#include "mvsprio/fulfillment.h"
#include "mvsprio/partner_selection.h"
#include "mvsprio/ranking.h"
#include "mvsprio/scene_model.h"
#include "mvsprio/visibility.h"

namespace mvsprio {

// Simplify to r * g_d, then subdivide below e * g_d.
SurfaceMesh PrepareMesh(const SurfaceMesh& mesh, const QualityConfig& config,
                        bool* exhausted = nullptr);

struct PipelineResult {
  SurfaceMesh mesh;  // with visibility, unary and fulfillment caches
  VisibilityTable visibility;
  ConnectivityIndex connectivity;
  std::vector<ViewCluster> clusters;
  ClusterFulfillments fulfillments;
  // |T|: triangles visible from at least min_cameras cameras.
  std::size_t objective_triangles = 0;
  RankingResult ranking;
  RankStats stats;
  // "key <index>: reason" for key views without a cluster.
  std::vector<std::string> skipped;
};

// Runs everything after mesh preparation. The mesh's current_fulfillment
// values reflect the full ranking on return.
PipelineResult RunPipeline(const std::vector<Camera>& cameras,
                           const SparsePointCloud& cloud, SurfaceMesh mesh,
                           const ConfidenceModel& model,
                           const QualityConfig& config, int threads = 1);

}  // namespace mvsprio

#endif  // MVSPRIO_PIPELINE_H_
