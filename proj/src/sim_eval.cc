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

#include "mvsprio/sim_eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include "mvsprio/errors.h"
#include "mvsprio/random.h"
#include "mvsprio/visibility.h"

namespace mvsprio {
namespace {

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * UnitFromBits(rng());
}

struct Hill {
  Vec2 center;
  double sigma;
  double height;
};

// Closed box (without bottom face) with outward normals.
void AddBox(SurfaceMesh& mesh, const Vec3& lo, const Vec3& hi) {
  const int base = static_cast<int>(mesh.vertices.size());
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.emplace_back((i & 1) ? hi.x() : lo.x(),
                               (i & 2) ? hi.y() : lo.y(),
                               (i & 4) ? hi.z() : lo.z());
  }
  // Corner index bits: x = 1, y = 2, z = 4.
  const int faces[5][4] = {
      {4, 5, 7, 6},  // top (+z)
      {0, 1, 5, 4},  // -y
      {1, 3, 7, 5},  // +x
      {3, 2, 6, 7},  // +y
      {2, 0, 4, 6},  // -x
  };
  for (const auto& q : faces) {
    mesh.triangles.push_back({base + q[0], base + q[1], base + q[2]});
    mesh.triangles.push_back({base + q[0], base + q[2], base + q[3]});
  }
}

}  // namespace

void SceneSpec::Validate() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("synthetic scene: " + what);
  };
  if (!(extent_x > 0.0) || !(extent_y > 0.0)) fail("extent must be > 0");
  if (cells_x < 1 || cells_y < 1) fail("cells must be >= 1");
  if (occluders < 0) fail("occluders must be >= 0");
  if (cameras < 2) fail("need at least two cameras");
  if (!(altitude > 0.0) || !(focal_px > 0.0)) fail("altitude/focal > 0");
  if (image_width < 1 || image_height < 1) fail("image size must be >= 1");
  if (!(dome_fraction >= 0.0 && dome_fraction <= 1.0)) {
    fail("dome fraction must lie in [0, 1]");
  }
  if (sparse_points < 0 || texture_blobs < 0) fail("counts must be >= 0");
}

double PlantedModel::Texture(const Vec3& point) const {
  double texture = 1.0;
  for (const Blob& b : blobs_) {
    const double d2 = (point.head<2>() - b.center).squaredNorm();
    texture *= 1.0 - b.depth * std::exp(-d2 / (2.0 * b.radius * b.radius));
  }
  return std::clamp(texture, 0.05, 1.0);
}

UnaryBins PlantedModel::Predict(const Camera& camera,
                                const TrianglePatch& triangle) const {
  const Vec3 to_camera = (camera.center - triangle.centroid).normalized();
  const double frontal = std::max(0.0, triangle.normal.dot(to_camera));
  const double scale = Texture(triangle.centroid) * (0.5 + 0.5 * frontal);
  UnaryBins out;
  for (int b = 0; b < kAngleBins; ++b) {
    out[b] = std::clamp(
        scale * HeuristicModel::AngleResponse((b + 0.5) * kAngleBinWidthDeg),
        0.0, 1.0);
  }
  return out;
}

Camera LookAtCamera(int id, const Vec3& center, const Vec3& target,
                    double focal_px, int width, int height) {
  const Vec3 forward = (target - center).normalized();
  Vec3 up = Vec3::UnitZ();
  if (std::abs(forward.dot(up)) > 0.999) up = Vec3::UnitY();
  const Vec3 x_axis = forward.cross(up).normalized();
  const Vec3 y_axis = forward.cross(x_axis);
  Camera c;
  c.id = id;
  c.focal = Vec2(focal_px, focal_px);
  c.principal_point = Vec2(0.5 * width, 0.5 * height);
  c.rotation.row(0) = x_axis.transpose();
  c.rotation.row(1) = y_axis.transpose();
  c.rotation.row(2) = forward.transpose();
  c.center = center;
  c.width = width;
  c.height = height;
  return c;
}

SyntheticScene GenerateScene(const SceneSpec& spec, std::uint64_t seed) {
  spec.Validate();
  std::mt19937_64 rng(HashCombine(seed, 0x5ce9e));
  SyntheticScene scene;

  std::vector<Hill> hills(3);
  for (Hill& h : hills) {
    h.center =
        Vec2(Uniform(rng, 0, spec.extent_x), Uniform(rng, 0, spec.extent_y));
    h.sigma = Uniform(rng, 0.15, 0.35) * std::min(spec.extent_x, spec.extent_y);
    h.height = Uniform(rng, -1.0, 1.0) * spec.relief;
  }
  auto height_at = [&](double x, double y) {
    double z = 0.0;
    for (const Hill& h : hills) {
      const double d2 = (Vec2(x, y) - h.center).squaredNorm();
      z += h.height * std::exp(-d2 / (2.0 * h.sigma * h.sigma));
    }
    return z;
  };

  SurfaceMesh& mesh = scene.mesh;
  const int nx = spec.cells_x + 1;
  for (int j = 0; j <= spec.cells_y; ++j) {
    for (int i = 0; i <= spec.cells_x; ++i) {
      const double x = spec.extent_x * i / spec.cells_x;
      const double y = spec.extent_y * j / spec.cells_y;
      mesh.vertices.emplace_back(x, y, height_at(x, y));
    }
  }
  for (int j = 0; j < spec.cells_y; ++j) {
    for (int i = 0; i < spec.cells_x; ++i) {
      const int v00 = j * nx + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + nx;
      const int v11 = v01 + 1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  for (int o = 0; o < spec.occluders; ++o) {
    const bool column = o % 2 == 1;
    const double w = column ? Uniform(rng, 0.3, 0.6) : Uniform(rng, 0.8, 2.5);
    const double d = column ? w : Uniform(rng, 0.8, 2.5);
    const double cx = Uniform(rng, 0.15, 0.85) * spec.extent_x;
    const double cy = Uniform(rng, 0.15, 0.85) * spec.extent_y;
    const double base = height_at(cx, cy) - 0.3;
    const double h = spec.occluder_height *
                     (column ? Uniform(rng, 0.8, 1.0) : Uniform(rng, 0.3, 0.7));
    AddBox(mesh, Vec3(cx - 0.5 * w, cy - 0.5 * d, base),
           Vec3(cx + 0.5 * w, cy + 0.5 * d, base + h + 0.3));
  }
  mesh.RebuildPatches();

  // Camera rig.
  const Vec3 scene_center(0.5 * spec.extent_x, 0.5 * spec.extent_y, 0.0);
  int dome_count = 0;
  if (spec.rig == RigType::kDome) dome_count = spec.cameras;
  if (spec.rig == RigType::kMixed) {
    dome_count =
        static_cast<int>(std::lround(spec.dome_fraction * spec.cameras));
  }
  const int grid_count = spec.cameras - dome_count;
  int id = 0;
  if (grid_count > 0) {
    const double aspect = spec.extent_x / spec.extent_y;
    const int cols = std::max(
        1, static_cast<int>(std::lround(std::sqrt(grid_count * aspect))));
    const int rows = (grid_count + cols - 1) / cols;
    const bool jitter = spec.rig != RigType::kGrid;
    for (int r = 0; r < rows && id < grid_count; ++r) {
      for (int c = 0; c < cols && id < grid_count; ++c) {
        const double x =
            cols == 1 ? 0.5 * spec.extent_x : spec.extent_x * c / (cols - 1);
        const double y =
            rows == 1 ? 0.5 * spec.extent_y : spec.extent_y * r / (rows - 1);
        const Vec3 center(x, y, spec.altitude);
        Vec3 target(x, y, 0.0);
        if (jitter) {
          // Small tilts, up to about 6 degrees.
          target += Vec3(Uniform(rng, -1.0, 1.0), Uniform(rng, -1.0, 1.0), 0.0);
        }
        scene.cameras.push_back(LookAtCamera(id++, center, target,
                                             spec.focal_px, spec.image_width,
                                             spec.image_height));
      }
    }
  }
  const double radius = 1.2 * spec.altitude;
  for (int i = 0; i < dome_count; ++i) {
    const double azimuth = 2.0 * std::numbers::pi *
                           (i + Uniform(rng, 0.0, 0.5)) /
                           std::max(1, dome_count);
    const double elevation =
        (30.0 + 40.0 * ((i * 7) % 11) / 10.0) * std::numbers::pi / 180.0;
    const Vec3 center =
        scene_center + radius * Vec3(std::cos(elevation) * std::cos(azimuth),
                                     std::cos(elevation) * std::sin(azimuth),
                                     std::sin(elevation));
    scene.cameras.push_back(LookAtCamera(id++, center, scene_center,
                                         spec.focal_px, spec.image_width,
                                         spec.image_height));
  }

  // Planted low-texture blobs.
  for (int b = 0; b < spec.texture_blobs; ++b) {
    PlantedModel::Blob blob;
    blob.center =
        Vec2(Uniform(rng, 0, spec.extent_x), Uniform(rng, 0, spec.extent_y));
    blob.radius =
        Uniform(rng, 0.06, 0.15) * std::min(spec.extent_x, spec.extent_y);
    blob.depth = Uniform(rng, 0.6, 0.95);
    scene.blobs.push_back(blob);
  }
  const PlantedModel model(scene.blobs);

  // Sparse cloud: area-weighted surface samples with simulated feature
  // tracks among the cameras that see them.
  std::vector<double> cumulative_area;
  double total_area = 0.0;
  for (const TrianglePatch& p : mesh.patches) {
    total_area += p.area3d;
    cumulative_area.push_back(total_area);
  }
  const Bvh bvh(mesh);
  const double eps = kOcclusionEpsilonFraction * mesh.Diameter();
  static const double kMinCos =
      std::cos(kMaxViewAngleDeg * std::numbers::pi / 180.0);
  for (int s = 0; s < spec.sparse_points && total_area > 0.0; ++s) {
    const double pick = Uniform(rng, 0.0, total_area);
    const int t = static_cast<int>(std::min<std::size_t>(
        mesh.size() - 1,
        std::upper_bound(cumulative_area.begin(), cumulative_area.end(), pick) -
            cumulative_area.begin()));
    double a = Uniform(rng, 0.0, 1.0);
    double b = Uniform(rng, 0.0, 1.0);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const TrianglePatch& patch = mesh.patches[t];
    const Vec3 point = patch.corners[0] +
                       a * (patch.corners[1] - patch.corners[0]) +
                       b * (patch.corners[2] - patch.corners[0]);
    const double keep = 0.3 + 0.7 * model.Texture(point);
    SparsePoint sp;
    sp.position = point;
    for (int c = 0; c < static_cast<int>(scene.cameras.size()); ++c) {
      const Camera& cam = scene.cameras[c];
      const double draw = UnitFromBits(rng());
      auto px = Project(cam, point);
      if (!px || px->x() < 0 || px->y() < 0 || px->x() >= cam.width ||
          px->y() >= cam.height) {
        continue;
      }
      Vec3 dir = point - cam.center;
      const double dist = dir.norm();
      dir /= dist;
      if (-patch.normal.dot(dir) <= kMinCos) continue;
      if (draw >= keep) continue;
      if (bvh.Occluded(cam.center, dir, dist - eps, t)) continue;
      sp.track.push_back(c);
    }
    if (sp.track.size() >= 2) scene.cloud.points.push_back(std::move(sp));
  }
  scene.occluded.assign(mesh.size(), 0);
  return scene;
}

void FlagOccluded(SyntheticScene& scene, int min_cameras, int threads) {
  const Bvh bvh(scene.mesh);
  const auto table = ComputeVisibility(scene.mesh, bvh, scene.cameras, threads);
  scene.occluded.assign(scene.mesh.size(), 0);
  for (std::size_t t = 0; t < scene.mesh.size(); ++t) {
    scene.occluded[t] =
        static_cast<int>(table.cameras_of_triangle[t].size()) < min_cameras;
  }
}

bool MatchSucceeds(std::uint64_t seed, int key, int partner, int triangle,
                   double probability) {
  std::uint64_t h = HashCombine(seed, static_cast<std::uint64_t>(key));
  h = HashCombine(h, static_cast<std::uint64_t>(partner));
  h = HashCombine(h, static_cast<std::uint64_t>(triangle));
  return UnitFromBits(h) < probability;
}

double SimulateAtLeastTwo(std::span<const double> probabilities, int trials,
                          std::uint64_t seed) {
  if (trials <= 0) return 0.0;
  int hits = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed =
        HashCombine(seed, static_cast<std::uint64_t>(trial));
    int successes = 0;
    for (std::size_t j = 0; j < probabilities.size(); ++j) {
      successes += MatchSucceeds(trial_seed, 0, static_cast<int>(j), 0,
                                 probabilities[j]);
    }
    hits += successes >= 2;
  }
  return static_cast<double>(hits) / trials;
}

std::vector<double> SimulateRealized(
    std::span<const int> order, std::span<const ViewCluster> clusters,
    const ClusterFulfillments& fulfillments, std::span<const Camera> cameras,
    const SurfaceMesh& mesh, const QualityConfig& config, std::uint64_t seed) {
  std::vector<double> curve;
  curve.reserve(order.size());
  const std::size_t triangle_count =
      ObjectiveTriangleCount(mesh, config.min_cameras);
  if (triangle_count == 0) {
    curve.assign(order.size(), 0.0);
    return curve;
  }
  std::vector<double> current(mesh.size(), 0.0);
  double total = 0.0;
  for (int v : order) {
    const ViewCluster& cluster = clusters[v];
    double gain = 0.0;
    for (const TriangleValue& e : fulfillments[v]) {
      const TrianglePatch& patch = mesh.patches[e.triangle];
      double realized = 0.0;
      const double f_cov =
          CoverageFulfillment(cluster, patch, config.min_cameras);
      if (f_cov != 0.0) {
        int successes = 0;
        for (int p : cluster.partners) {
          const double pairwise =
              PairwiseConfidence(cameras, cluster.key_view, p, patch);
          successes +=
              MatchSucceeds(seed, cluster.key_view, p, e.triangle, pairwise);
        }
        if (successes >= 2) {
          const double f_res = ResolutionFulfillment(cameras, cluster.key_view,
                                                     patch, config.gsd_desired);
          const double f_unc =
              config.alpha == 1.0
                  ? 0.0
                  : UncertaintyFulfillment(cameras, cluster.Cameras(), patch,
                                           config.accuracy_desired,
                                           config.pixel_noise);
          realized = (config.alpha * f_res + (1.0 - config.alpha) * f_unc) *
                     f_cov * 1.0;
        }
      }
      double& cur = current[e.triangle];
      gain += std::max(0.0, realized - cur);
      cur = std::max(cur, realized);
    }
    total += gain / static_cast<double>(triangle_count);
    curve.push_back(total);
  }
  return curve;
}

std::string StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kPrioritized:
      return "prioritized";
    case Strategy::kRandom:
      return "random";
    case Strategy::kMaxPoints:
      return "max_points";
  }
  return "unknown";
}

std::vector<int> StrategyOrder(Strategy strategy, const PipelineResult& run,
                               const SparsePointCloud& cloud,
                               std::uint64_t seed) {
  const int n = static_cast<int>(run.clusters.size());
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> used(n, 0);
  switch (strategy) {
    case Strategy::kPrioritized:
      for (const RankingEntry& e : run.ranking.entries) {
        order.push_back(e.cluster.id);
        used[e.cluster.id] = 1;
      }
      for (int v = 0; v < n; ++v) {
        if (!used[v]) order.push_back(v);
      }
      break;
    case Strategy::kRandom: {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
      std::mt19937_64 rng(HashCombine(seed, 0x4a4d0aULL));
      for (int i = n - 1; i > 0; --i) {
        std::swap(order[i], order[UniformIndex(rng, i + 1)]);
      }
      break;
    }
    case Strategy::kMaxPoints: {
      int camera_count = 0;
      for (const ViewCluster& c : run.clusters) {
        camera_count = std::max(camera_count, c.key_view + 1);
      }
      std::vector<std::vector<int>> points_of(camera_count);
      for (std::size_t p = 0; p < cloud.points.size(); ++p) {
        for (int c : cloud.points[p].track) {
          if (c < camera_count) points_of[c].push_back(static_cast<int>(p));
        }
      }
      std::vector<char> removed(cloud.points.size(), 0);
      while (static_cast<int>(order.size()) < n) {
        int best = -1;
        int best_count = 0;
        for (int v = 0; v < n; ++v) {
          if (used[v]) continue;
          int count = 0;
          for (int p : points_of[run.clusters[v].key_view])
            count += !removed[p];
          if (best < 0 || count > best_count) {
            best = v;
            best_count = count;
          }
        }
        used[best] = 1;
        order.push_back(best);
        for (int p : points_of[run.clusters[best].key_view]) removed[p] = 1;
      }
      break;
    }
  }
  return order;
}

std::vector<int> ClustersNeeded(std::span<const double> curve,
                                std::span<const double> thresholds) {
  std::vector<int> out(thresholds.size(), 0);
  if (curve.empty()) return out;
  const double final_value = curve.back();
  if (!(final_value > 0.0)) return out;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    // Relative slack absorbs summation-order rounding.
    const double target = thresholds[i] * final_value * (1.0 - 1e-12);
    auto it = std::find_if(curve.begin(), curve.end(),
                           [&](double v) { return v >= target; });
    out[i] = static_cast<int>(it - curve.begin()) + 1;
  }
  return out;
}

std::vector<std::vector<int>> CompareOnRun(const PipelineResult& run,
                                           const SyntheticScene& scene,
                                           const QualityConfig& config,
                                           std::span<const Strategy> strategies,
                                           std::span<const double> thresholds,
                                           std::uint64_t seed) {
  std::vector<std::vector<int>> needed;
  const std::uint64_t sim_seed = HashCombine(seed, 0x51317ULL);
  for (Strategy s : strategies) {
    const auto order = StrategyOrder(s, run, scene.cloud, seed);
    const auto curve =
        SimulateRealized(order, run.clusters, run.fulfillments, scene.cameras,
                         run.mesh, config, sim_seed);
    needed.push_back(ClustersNeeded(curve, thresholds));
  }
  return needed;
}

Comparison CompareStrategies(const SceneSpec& spec, const QualityConfig& config,
                             std::span<const Strategy> strategies,
                             std::span<const double> thresholds,
                             std::span<const std::uint64_t> seeds,
                             int threads) {
  if (strategies.empty()) throw ConfigError("compare: no strategy given");
  Comparison out;
  out.strategies.assign(strategies.begin(), strategies.end());
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  out.seeds.assign(seeds.begin(), seeds.end());
  for (std::uint64_t seed : seeds) {
    const SyntheticScene scene = GenerateScene(spec, seed);
    QualityConfig run_config = config;
    run_config.rng_seed = seed;
    const PipelineResult run =
        RunPipeline(scene.cameras, scene.cloud, scene.mesh, scene.Model(),
                    run_config, threads);
    out.needed.push_back(
        CompareOnRun(run, scene, run_config, strategies, thresholds, seed));
  }
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    for (std::size_t d = 0; d < thresholds.size(); ++d) {
      double sum = 0.0;
      for (const auto& per_seed : out.needed) sum += per_seed[s][d];
      const double n = static_cast<double>(out.needed.size());
      const double mean = n > 0 ? sum / n : 0.0;
      double sq = 0.0;
      for (const auto& per_seed : out.needed) {
        sq += (per_seed[s][d] - mean) * (per_seed[s][d] - mean);
      }
      const double stddev = n > 1 ? std::sqrt(sq / (n - 1)) : 0.0;
      out.rows.push_back({strategies[s], thresholds[d], mean, stddev});
    }
  }
  return out;
}

std::string ComparisonCsv(const Comparison& comparison) {
  std::string out = "strategy,decile,clusters_mean,clusters_std\n";
  char buf[128];
  for (const StrategyRow& r : comparison.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.1f,%.6f,%.6f\n",
                  StrategyName(r.strategy).c_str(), r.decile, r.clusters_mean,
                  r.clusters_std);
    out += buf;
  }
  return out;
}

}  // namespace mvsprio
