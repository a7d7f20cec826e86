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

#include "mvsprio/ranking.h"

#include <algorithm>
#include <string>

#include "mvsprio/errors.h"
#include "mvsprio/parallel.h"

namespace mvsprio {

ClusterFulfillments PrecomputeClusterFulfillments(
    std::span<const Camera> cameras, std::span<const ViewCluster> clusters,
    SurfaceMesh& mesh, const QualityConfig& config, int threads) {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (clusters[i].id != static_cast<int>(i)) {
      throw InvariantViolation("cluster ids must equal their list position");
    }
  }
  ClusterFulfillments out(clusters.size());
  ParallelFor(
      clusters.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
          const ViewCluster& cluster = clusters[v];
          auto& list = out[v];
          for (std::size_t t = 0; t < mesh.size(); ++t) {
            const TrianglePatch& patch = mesh.patches[t];
            if (static_cast<int>(patch.visible_cameras.size()) <
                config.min_cameras) {
              continue;
            }
            if (!patch.Sees(cluster.key_view)) continue;
            list.push_back(
                {static_cast<int>(t),
                 TriangleFulfillmentValue(cameras, cluster, patch, config)});
          }
        }
      });
  for (TrianglePatch& patch : mesh.patches) {
    patch.cluster_fulfillment.clear();
    patch.current_fulfillment = 0.0;
  }
  for (std::size_t v = 0; v < out.size(); ++v) {
    for (const TriangleValue& e : out[v]) {
      mesh.patches[e.triangle].cluster_fulfillment.emplace_back(
          static_cast<int>(v), e.value);
    }
  }
  return out;
}

std::vector<RankingEntry> Rank(std::span<const ViewCluster> clusters,
                               const ClusterFulfillments& fulfillments,
                               SurfaceMesh& mesh, std::size_t triangle_count,
                               RankStats* stats) {
  std::vector<RankingEntry> ranking;
  if (clusters.empty()) return ranking;
  if (fulfillments.size() != clusters.size()) {
    throw InvariantViolation("fulfillments do not match the cluster list");
  }
  RankStats local;
  auto gain_of = [&](int v) {
    ++local.gain_evaluations;
    return Gain(fulfillments[v], mesh, triangle_count);
  };

  LazyQueue queue;
  for (std::size_t v = 0; v < clusters.size(); ++v) {
    queue.Push({gain_of(static_cast<int>(v)), static_cast<int>(v), 0});
  }

  const QueueEntryBefore before;
  double cumulative = 0.0;
  int selected = 0;
  while (!queue.empty()) {
    // After each lazy burst the top carries a fresh gain.
    const QueueEntry top = queue.Pop();
    if (!(top.gain > 0.0)) break;
    for (const TriangleValue& e : fulfillments[top.cluster]) {
      double& current = mesh.patches[e.triangle].current_fulfillment;
      current = std::max(current, e.value);
    }
    ++selected;
    cumulative += top.gain;
    ranking.push_back({selected, clusters[top.cluster], top.gain, cumulative});

    // Lazy burst: refresh queue tops until the best refreshed entry is at
    // least as good as the next stale top. Stale gains are upper bounds
    // because the objective is submodular.
    std::vector<QueueEntry> updated;
    std::size_t best = 0;
    while (!queue.empty()) {
      if (!updated.empty() && !before(queue.Top(), updated[best])) break;
      QueueEntry e = queue.Pop();
      e.gain = gain_of(e.cluster);
      e.stamp = selected;
      updated.push_back(e);
      if (before(updated.back(), updated[best])) best = updated.size() - 1;
    }
    for (const QueueEntry& e : updated) queue.Push(e);
  }
  if (stats != nullptr) *stats = local;
  return ranking;
}

std::vector<CurvePoint> FulfillmentCurve(
    std::span<const RankingEntry> ranking) {
  std::vector<CurvePoint> curve;
  curve.reserve(ranking.size());
  double cumulative = 0.0;
  for (const RankingEntry& e : ranking) {
    cumulative += e.gain;
    curve.push_back({e.rank, cumulative, 0.0});
  }
  const double final_value =
      curve.empty() ? 0.0 : curve.back().cumulative_fulfillment;
  for (CurvePoint& p : curve) {
    p.normalized =
        final_value > 0.0 ? p.cumulative_fulfillment / final_value : 0.0;
  }
  return curve;
}

}  // namespace mvsprio
