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

// Core scene types shared by the whole pipeline: calibrated pinhole cameras,
// the sparse structure-from-motion cloud, the triangle surface proxy with its
// per-triangle caches, and the quality requirements driving prioritization.
//
// Cameras are referenced everywhere by their index in the camera list; the
// `id` field is only the external identifier used by the file formats.

#ifndef MVSPRIO_SCENE_MODEL_H_
#define MVSPRIO_SCENE_MODEL_H_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mvsprio {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr int kAngleBins = 9;
inline constexpr double kAngleBinWidthDeg = 5.0;
using UnaryBins = std::array<double, kAngleBins>;

struct Camera {
  int id = 0;
  Vec2 focal{1.0, 1.0};
  Vec2 principal_point{0.0, 0.0};
  // World to camera rotation.
  Mat3 rotation = Mat3::Identity();
  // Projection center in world coordinates.
  Vec3 center = Vec3::Zero();
  int width = 1;
  int height = 1;
  std::string image_path;

  Vec3 ToCameraFrame(const Vec3& world) const {
    return rotation * (world - center);
  }
  // Unit viewing direction (optical axis) in world coordinates.
  Vec3 OpticalAxis() const { return rotation.row(2).transpose(); }

  // Throws InvariantViolation naming the camera.
  void Validate() const;
};

struct SparsePoint {
  Vec3 position = Vec3::Zero();
  // Indices of the cameras observing the point.
  std::vector<int> track;
};

struct SparsePointCloud {
  std::vector<SparsePoint> points;

  // Every track entry must be a valid camera index and every track must hold
  // at least two distinct cameras.
  void Validate(int camera_count) const;
};

// Geometry plus the caches attached to one triangle of the surface proxy.
struct TrianglePatch {
  std::array<Vec3, 3> corners;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double area3d = 0.0;

  // Sorted camera indices with a direct line of sight to the centroid.
  std::vector<int> visible_cameras;
  // Parallel to visible_cameras once the unary cache is populated.
  std::vector<UnaryBins> unary_confidence;

  // Maximum over the selected clusters of cluster_fulfillment.
  double current_fulfillment = 0.0;
  // (cluster id, f(t, v)) sorted by cluster id.
  std::vector<std::pair<int, double>> cluster_fulfillment;

  bool Sees(int camera) const;
  // Cached unary bins of `camera`, or nullptr when the camera does not see
  // the triangle or the cache is empty.
  const UnaryBins* Unary(int camera) const;
  // Cached f(t, v) of a cluster, 0 when absent.
  double ClusterFulfillment(int cluster_id) const;
};

struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<TrianglePatch> patches;

  std::size_t size() const { return triangles.size(); }
  bool empty() const { return triangles.empty(); }

  // Recomputes per-triangle geometry and clears all caches.
  void RebuildPatches();
  // Indices in range and no triangle with area <= kMinTriangleArea.
  void Validate() const;
  // Diagonal of the vertex bounding box.
  double Diameter() const;
  double TotalArea() const;
};

inline constexpr double kMinTriangleArea = 1e-12;

double TriangleArea(const Vec3& a, const Vec3& b, const Vec3& c);

struct QualityConfig {
  double gsd_desired = 0.01;       // g_d [m/px]
  double accuracy_desired = 0.01;  // a_d [m]
  double alpha = 0.5;
  int min_cameras = 3;              // x
  int partners = 5;                 // k
  int top_connected = 22;           // n
  int combinations = 100;           // y
  int triangle_fraction = 10;       // z
  double simplify_factor = 20.0;    // r
  double subdivide_factor = 100.0;  // e
  double pixel_noise = 1.0;         // sigma [px]
  std::uint64_t rng_seed = 0;

  // Throws ConfigError on an invalid field.
  void Validate() const;
};

// Pinhole projection; std::nullopt when the point is not in front of the
// camera.
std::optional<Vec2> Project(const Camera& camera, const Vec3& point);

// Projected 2D area [px^2] divided by the 3D area [m^2]; 0 when any corner
// is behind the camera.
double EstimateResolution(const Camera& camera, const TrianglePatch& triangle);

// Largest eigenvalue [m^2] of the first-order forward-intersection
// covariance of `point` observed with isotropic pixel noise. Cameras that
// have the point behind them are skipped. Returns +inf for fewer than two
// usable cameras or when the information matrix is numerically singular.
double TriangulationUncertainty(std::span<const Camera* const> cameras,
                                const Vec3& point, double pixel_noise);
double TriangulationUncertainty(std::span<const Camera> cameras,
                                const Vec3& point, double pixel_noise);

// 2x3 Jacobian of the pixel projection with respect to the world point.
Eigen::Matrix<double, 2, 3> ProjectionJacobian(const Camera& camera,
                                               const Vec3& point);

// Angle in degrees at `point` between the rays towards both camera centers.
double TriangulationAngle(const Camera& a, const Camera& b, const Vec3& point);

}  // namespace mvsprio

#endif  // MVSPRIO_SCENE_MODEL_H_
