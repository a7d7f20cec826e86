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

// Greedy next-best view-cluster ranking. Gains are kept in a max-priority
// queue and refreshed lazily: after each selection only queue tops are
// recomputed until the best refreshed gain dominates the (stale, hence
// upper-bound) gain of the current top.

#ifndef MVSPRIO_RANKING_H_
#define MVSPRIO_RANKING_H_

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "mvsprio/fulfillment.h"
#include "mvsprio/scene_model.h"

namespace mvsprio {

struct RankingEntry {
  int rank = 0;  // 1-based
  ViewCluster cluster;
  double gain = 0.0;
  double cumulative_fulfillment = 0.0;
};

struct RankingResult {
  QualityConfig config;
  std::vector<RankingEntry> entries;
};

// Computes f(t, v) for every cluster and every triangle its key view sees
// that is visible from at least min_cameras cameras overall. Values are
// stored in each patch's cluster_fulfillment map and returned per cluster;
// current_fulfillment is reset to 0. Cluster ids must equal their position.
ClusterFulfillments PrecomputeClusterFulfillments(
    std::span<const Camera> cameras, std::span<const ViewCluster> clusters,
    SurfaceMesh& mesh, const QualityConfig& config, int threads = 1);

struct QueueEntry {
  double gain = 0.0;
  int cluster = 0;
  // Number of selections made when the gain was computed.
  int stamp = 0;
};

// Orders by gain descending, then cluster id ascending.
struct QueueEntryBefore {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.cluster < b.cluster;
  }
};

class LazyQueue {
 public:
  void Push(const QueueEntry& e) { heap_.push(e); }
  const QueueEntry& Top() const { return heap_.top(); }
  QueueEntry Pop() {
    QueueEntry e = heap_.top();
    heap_.pop();
    return e;
  }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct After {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
      return QueueEntryBefore{}(b, a);
    }
  };
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, After> heap_;
};

struct RankStats {
  std::int64_t gain_evaluations = 0;
};

// Greedy ranking over precomputed fulfillments; gains are normalized by
// `triangle_count` (see ObjectiveTriangleCount). Mutates current_fulfillment
// of the patches. Zero-gain clusters are not emitted; ties in gain go to the
// smaller cluster id.
std::vector<RankingEntry> Rank(std::span<const ViewCluster> clusters,
                               const ClusterFulfillments& fulfillments,
                               SurfaceMesh& mesh, std::size_t triangle_count,
                               RankStats* stats = nullptr);

struct CurvePoint {
  int rank = 0;
  double cumulative_fulfillment = 0.0;
  double normalized = 0.0;
};

// Prefix sums of the gains; `normalized` divides by the final value (0 when
// it is 0).
std::vector<CurvePoint> FulfillmentCurve(std::span<const RankingEntry> ranking);

}  // namespace mvsprio

#endif  // MVSPRIO_RANKING_H_
