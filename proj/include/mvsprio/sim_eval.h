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

// Synthetic evaluation harness: generated terrain scenes with occluders and
// camera rigs, a planted confidence field, Bernoulli simulation of MVS match
// outcomes, and comparison of ranking strategies by the number of clusters
// needed to reach fulfillment thresholds.

#ifndef MVSPRIO_SIM_EVAL_H_
#define MVSPRIO_SIM_EVAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvsprio/confidence.h"
#include "mvsprio/fulfillment.h"
#include "mvsprio/pipeline.h"
#include "mvsprio/scene_model.h"

namespace mvsprio {

enum class RigType { kGrid, kDome, kMixed };

struct SceneSpec {
  double extent_x = 20.0;  // m
  double extent_y = 16.0;  // m
  int cells_x = 24;
  int cells_y = 40;
  double relief = 1.5;           // m, amplitude of the height field
  int occluders = 8;             // boxes and columns
  double occluder_height = 3.0;  // m, maximum

  RigType rig = RigType::kMixed;
  int cameras = 200;
  double altitude = 10.0;  // m above the mean terrain
  double focal_px = 1000.0;
  int image_width = 1000;
  int image_height = 750;
  // Fraction of mixed-rig cameras placed on the dome.
  double dome_fraction = 0.4;

  int sparse_points = 4000;
  // Number of low-texture blobs in the planted confidence field.
  int texture_blobs = 6;

  void Validate() const;
};

// Confidence field planted into synthetic scenes: the heuristic angle hat,
// scaled by a smooth texture field over the ground plane and by how frontal
// the camera observes the triangle.
class PlantedModel : public ConfidenceModel {
 public:
  struct Blob {
    Vec2 center;
    double radius = 1.0;
    double depth = 0.5;  // texture reduction at the blob center
  };

  explicit PlantedModel(std::vector<Blob> blobs) : blobs_(std::move(blobs)) {}

  double Texture(const Vec3& point) const;
  UnaryBins Predict(const Camera& camera,
                    const TrianglePatch& triangle) const override;

 private:
  std::vector<Blob> blobs_;
};

struct SyntheticScene {
  std::vector<Camera> cameras;
  SparsePointCloud cloud;
  SurfaceMesh mesh;
  std::vector<PlantedModel::Blob> blobs;
  // Triangles seen by fewer than the requested minimum number of cameras
  // (occluder undersides, pits between boxes), filled by FlagOccluded.
  std::vector<char> occluded;

  PlantedModel Model() const { return PlantedModel(blobs); }
};

// Deterministic for fixed (spec, seed). Throws ConfigError on an invalid
// spec.
SyntheticScene GenerateScene(const SceneSpec& spec, std::uint64_t seed);

// Marks triangles visible from fewer than `min_cameras` cameras.
void FlagOccluded(SyntheticScene& scene, int min_cameras, int threads = 1);

// Camera at `center` looking at `target`; image x to the right, y down.
Camera LookAtCamera(int id, const Vec3& center, const Vec3& target,
                    double focal_px, int width, int height);

// Independent Bernoulli draw for the match of (key, partner) at a triangle.
// Stateless: the outcome depends only on its arguments.
bool MatchSucceeds(std::uint64_t seed, int key, int partner, int triangle,
                   double probability);

// Fraction of `trials` in which at least two of the independent events with
// the given probabilities succeed.
double SimulateAtLeastTwo(std::span<const double> probabilities, int trials,
                          std::uint64_t seed);

// Realized objective after each cluster of `order`: f_conf in the triangle
// fulfillment is replaced by the simulated outcome (1 when at least two
// partner matches succeed). Requires the pipeline's caches in `mesh`.
std::vector<double> SimulateRealized(
    std::span<const int> order, std::span<const ViewCluster> clusters,
    const ClusterFulfillments& fulfillments, std::span<const Camera> cameras,
    const SurfaceMesh& mesh, const QualityConfig& config, std::uint64_t seed);

enum class Strategy { kPrioritized, kRandom, kMaxPoints };

std::string StrategyName(Strategy s);

// Full cluster order of a strategy. kPrioritized follows the ranking and
// appends unranked clusters by id; kRandom is a seeded permutation;
// kMaxPoints repeatedly takes the cluster whose key view observes the most
// not-yet-removed sparse points and removes them.
std::vector<int> StrategyOrder(Strategy strategy, const PipelineResult& run,
                               const SparsePointCloud& cloud,
                               std::uint64_t seed);

// For each threshold, the smallest number of clusters whose realized
// objective reaches threshold * (final value of the curve).
std::vector<int> ClustersNeeded(std::span<const double> curve,
                                std::span<const double> thresholds);

inline const std::vector<double>& DefaultDeciles() {
  static const std::vector<double> kDeciles = {0.1, 0.2, 0.3, 0.4, 0.5,
                                               0.6, 0.7, 0.8, 0.9};
  return kDeciles;
}

struct StrategyRow {
  Strategy strategy;
  double decile = 0.0;
  double clusters_mean = 0.0;
  double clusters_std = 0.0;
};

struct Comparison {
  std::vector<Strategy> strategies;
  std::vector<double> thresholds;
  std::vector<std::uint64_t> seeds;
  // needed[seed][strategy][threshold]
  std::vector<std::vector<std::vector<int>>> needed;
  std::vector<StrategyRow> rows;
};

// For every seed: generates the scene, runs the pipeline, simulates realized
// fulfillment for each strategy's order (same outcomes for all strategies)
// and records the clusters needed per threshold.
Comparison CompareStrategies(const SceneSpec& spec, const QualityConfig& config,
                             std::span<const Strategy> strategies,
                             std::span<const double> thresholds,
                             std::span<const std::uint64_t> seeds,
                             int threads = 1);

// Same protocol on an already prepared run (one scene, one seed).
std::vector<std::vector<int>> CompareOnRun(const PipelineResult& run,
                                           const SyntheticScene& scene,
                                           const QualityConfig& config,
                                           std::span<const Strategy> strategies,
                                           std::span<const double> thresholds,
                                           std::uint64_t seed);

// strategy,decile,clusters_mean,clusters_std
std::string ComparisonCsv(const Comparison& comparison);

}  // namespace mvsprio

#endif  // MVSPRIO_SIM_EVAL_H_
