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

// Matching partner selection: per key view, draw candidate partner sets
// among the most connected cameras and keep the one with the highest
// combined fulfillment over a fixed triangle sample.

#ifndef MVSPRIO_PARTNER_SELECTION_H_
#define MVSPRIO_PARTNER_SELECTION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvsprio/fulfillment.h"
#include "mvsprio/scene_model.h"

namespace mvsprio {

// Number of sparse points shared by each camera pair.
class ConnectivityIndex {
 public:
  ConnectivityIndex() = default;
  explicit ConnectivityIndex(int camera_count);

  int camera_count() const { return camera_count_; }
  int Count(int a, int b) const {
    return counts_[static_cast<std::size_t>(a) * camera_count_ + b];
  }
  void Add(int a, int b, int amount = 1);

  // Cameras sharing at least one point with `key`, by descending count and
  // ascending index on ties.
  std::vector<int> RankedPartners(int key) const;

 private:
  int camera_count_ = 0;
  std::vector<int> counts_;
};

ConnectivityIndex BuildConnectivity(const SparsePointCloud& cloud,
                                    int camera_count);

// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t Binomial(int n, int k);

// Largest q <= pool_size with C(q, k) <= budget, or 0 when even C(k, k)
// exceeds the budget.
int ExhaustivePoolSize(int pool_size, int k, double budget);

// Candidate partner sets for `key`. The pool is the top-n connected cameras.
// When C(|pool|, k) <= y every k-subset is returned; otherwise all k-subsets
// of the q most connected cameras (C(q, k) <= y / 4) followed by distinct
// seeded random k-subsets of the pool up to y in total. Partners inside a
// set are listed in pool order. Throws InvalidClusterError when fewer than k
// cameras are connected to the key.
std::vector<std::vector<int>> DrawCombinations(
    int key, const ConnectivityIndex& connectivity, int top_n, int k,
    int combinations, std::uint64_t seed);

// Seeded uniform sample without replacement of ceil(count / fraction)
// triangle indices, sorted.
std::vector<int> SampleTriangles(int count, int fraction, std::uint64_t seed);

// The sampled triangles visible in `key`.
std::vector<int> KeyTriangles(int key, const SurfaceMesh& mesh,
                              std::span<const int> sample);

// Argmax of ClusterScore over the combinations; ties go to the higher total
// connectivity with the key, then to the lexicographically smallest sorted
// partner ids. The returned cluster has id 0.
ViewCluster SelectPartners(int key,
                           const std::vector<std::vector<int>>& combinations,
                           std::span<const Camera> cameras,
                           const SurfaceMesh& mesh,
                           std::span<const int> key_triangles,
                           const ConnectivityIndex& connectivity,
                           const QualityConfig& config);

// One cluster per key view with sufficient connectivity; cluster ids are
// consecutive in key order. Skipped keys are reported through `on_skip`.
std::vector<ViewCluster> BuildClusters(
    std::span<const Camera> cameras, const SurfaceMesh& mesh,
    const ConnectivityIndex& connectivity, const QualityConfig& config,
    int threads = 1,
    const std::function<void(int key, const std::string& why)>& on_skip = {});

}  // namespace mvsprio

#endif  // MVSPRIO_PARTNER_SELECTION_H_
