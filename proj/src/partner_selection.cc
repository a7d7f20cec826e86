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

#include "mvsprio/partner_selection.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "mvsprio/errors.h"
#include "mvsprio/parallel.h"
#include "mvsprio/random.h"

namespace mvsprio {

ConnectivityIndex::ConnectivityIndex(int camera_count)
    : camera_count_(camera_count),
      counts_(static_cast<std::size_t>(camera_count) * camera_count, 0) {}

void ConnectivityIndex::Add(int a, int b, int amount) {
  if (a == b) return;
  counts_[static_cast<std::size_t>(a) * camera_count_ + b] += amount;
  counts_[static_cast<std::size_t>(b) * camera_count_ + a] += amount;
}

std::vector<int> ConnectivityIndex::RankedPartners(int key) const {
  std::vector<int> out;
  for (int c = 0; c < camera_count_; ++c) {
    if (c != key && Count(key, c) > 0) out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](int a, int b) { return Count(key, a) > Count(key, b); });
  return out;
}

ConnectivityIndex BuildConnectivity(const SparsePointCloud& cloud,
                                    int camera_count) {
  ConnectivityIndex index(camera_count);
  std::vector<int> track;
  for (const SparsePoint& point : cloud.points) {
    track = point.track;
    std::sort(track.begin(), track.end());
    track.erase(std::unique(track.begin(), track.end()), track.end());
    for (std::size_t i = 0; i < track.size(); ++i) {
      for (std::size_t j = i + 1; j < track.size(); ++j) {
        index.Add(track[i], track[j]);
      }
    }
  }
  return index;
}

std::uint64_t Binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    // result * num / i is exact because result * num is divisible by i.
    if (result > UINT64_MAX / num) return UINT64_MAX;
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

int ExhaustivePoolSize(int pool_size, int k, double budget) {
  int q = 0;
  for (int candidate = k; candidate <= pool_size; ++candidate) {
    if (static_cast<double>(Binomial(candidate, k)) <= budget) {
      q = candidate;
    } else {
      break;
    }
  }
  return q;
}

namespace {

// All k-subsets of [0, n) in lexicographic order.
std::vector<std::vector<int>> AllSubsets(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k > n || k <= 0) return out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> DrawCombinations(
    int key, const ConnectivityIndex& connectivity, int top_n, int k,
    int combinations, std::uint64_t seed) {
  if (k < 2) throw InvalidClusterError("need at least two partners");
  std::vector<int> pool = connectivity.RankedPartners(key);
  if (static_cast<int>(pool.size()) > top_n) pool.resize(top_n);
  const int n = static_cast<int>(pool.size());
  if (n < k) {
    throw InvalidClusterError("insufficient connectivity for key view " +
                              std::to_string(key) + ": " + std::to_string(n) +
                              " connected cameras, need " + std::to_string(k));
  }
  auto to_cameras = [&](const std::vector<int>& positions) {
    std::vector<int> cams;
    cams.reserve(positions.size());
    for (int p : positions) cams.push_back(pool[p]);
    return cams;
  };

  std::vector<std::vector<int>> out;
  const auto y = static_cast<std::uint64_t>(combinations);
  if (Binomial(n, k) <= y) {
    for (const auto& s : AllSubsets(n, k)) out.push_back(to_cameras(s));
    return out;
  }

  const int q = ExhaustivePoolSize(n, k, combinations / 4.0);
  std::set<std::vector<int>> drawn;
  for (const auto& s : AllSubsets(q, k)) {
    drawn.insert(s);
    out.push_back(to_cameras(s));
  }
  std::mt19937_64 rng(HashCombine(seed, static_cast<std::uint64_t>(key)));
  std::vector<int> positions(n);
  while (out.size() < y) {
    std::iota(positions.begin(), positions.end(), 0);
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(UniformIndex(rng, n - i));
      std::swap(positions[i], positions[j]);
    }
    std::vector<int> subset(positions.begin(), positions.begin() + k);
    std::sort(subset.begin(), subset.end());
    if (drawn.insert(subset).second) out.push_back(to_cameras(subset));
  }
  return out;
}

std::vector<int> SampleTriangles(int count, int fraction, std::uint64_t seed) {
  if (count <= 0) return {};
  const int size = (count + fraction - 1) / std::max(1, fraction);
  std::vector<int> all(count);
  std::iota(all.begin(), all.end(), 0);
  std::mt19937_64 rng(HashCombine(seed, 0x7a5a11ULL));
  for (int i = 0; i < size; ++i) {
    const auto j = i + static_cast<int>(UniformIndex(rng, count - i));
    std::swap(all[i], all[j]);
  }
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<int> KeyTriangles(int key, const SurfaceMesh& mesh,
                              std::span<const int> sample) {
  std::vector<int> out;
  for (int t : sample) {
    if (mesh.patches[t].Sees(key)) out.push_back(t);
  }
  return out;
}

ViewCluster SelectPartners(int key,
                           const std::vector<std::vector<int>>& combinations,
                           std::span<const Camera> cameras,
                           const SurfaceMesh& mesh,
                           std::span<const int> key_triangles,
                           const ConnectivityIndex& connectivity,
                           const QualityConfig& config) {
  if (combinations.empty()) {
    throw InvalidClusterError("no partner combination for key view " +
                              std::to_string(key));
  }
  std::optional<std::size_t> best;
  double best_score = 0.0;
  long best_links = 0;
  std::vector<int> best_sorted;
  for (std::size_t i = 0; i < combinations.size(); ++i) {
    const auto& partners = combinations[i];
    const double score =
        ClusterScore(cameras, key, partners, mesh, key_triangles, config);
    long links = 0;
    for (int p : partners) links += connectivity.Count(key, p);
    std::vector<int> sorted = partners;
    std::sort(sorted.begin(), sorted.end());
    bool better = !best.has_value() || score > best_score;
    if (best.has_value() && score == best_score) {
      better =
          links > best_links || (links == best_links && sorted < best_sorted);
    }
    if (better) {
      best = i;
      best_score = score;
      best_links = links;
      best_sorted = std::move(sorted);
    }
  }
  ViewCluster cluster;
  cluster.key_view = key;
  cluster.partners = combinations[*best];
  cluster.score = best_score;
  return cluster;
}

std::vector<ViewCluster> BuildClusters(
    std::span<const Camera> cameras, const SurfaceMesh& mesh,
    const ConnectivityIndex& connectivity, const QualityConfig& config,
    int threads,
    const std::function<void(int key, const std::string& why)>& on_skip) {
  const int camera_count = static_cast<int>(cameras.size());
  const auto sample = SampleTriangles(
      static_cast<int>(mesh.size()), config.triangle_fraction, config.rng_seed);
  std::vector<std::optional<ViewCluster>> per_key(camera_count);
  std::vector<std::string> errors(camera_count);
  ParallelFor(cameras.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t key = begin; key < end; ++key) {
      const int k = static_cast<int>(key);
      try {
        const auto combos = DrawCombinations(
            k, connectivity, config.top_connected, config.partners,
            config.combinations, config.rng_seed);
        const auto tris = KeyTriangles(k, mesh, sample);
        per_key[key] = SelectPartners(k, combos, cameras, mesh, tris,
                                      connectivity, config);
      } catch (const InvalidClusterError& e) {
        errors[key] = e.what();
      }
    }
  });
  std::vector<ViewCluster> clusters;
  for (int key = 0; key < camera_count; ++key) {
    if (!per_key[key]) {
      if (on_skip) on_skip(key, errors[key]);
      continue;
    }
    per_key[key]->id = static_cast<int>(clusters.size());
    clusters.push_back(std::move(*per_key[key]));
  }
  return clusters;
}

}  // namespace mvsprio
