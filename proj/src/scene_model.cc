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

#include "mvsprio/scene_model.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mvsprio/errors.h"

namespace mvsprio {
namespace {

// Information matrices with a larger condition number are treated as
// singular (e.g. all rays parallel).
constexpr double kMaxConditionNumber = 1e12;

}  // namespace

void Camera::Validate() const {
  const std::string name = "camera " + std::to_string(id);
  if (!(focal.x() > 0.0) || !(focal.y() > 0.0)) {
    throw InvariantViolation(name + ": focal length must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw InvariantViolation(name + ": image size must be positive");
  }
  if (!rotation.allFinite() || !center.allFinite() ||
      !principal_point.allFinite()) {
    throw InvariantViolation(name + ": non-finite pose or intrinsics");
  }
  const Mat3 defect = rotation.transpose() * rotation - Mat3::Identity();
  if (defect.cwiseAbs().maxCoeff() >= 1e-9) {
    throw InvariantViolation(name + ": rotation is not orthonormal");
  }
  if (rotation.determinant() <= 0.0) {
    throw InvariantViolation(name + ": rotation has determinant -1");
  }
}

void SparsePointCloud::Validate(int camera_count) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& track = points[i].track;
    std::vector<int> sorted = track;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() < 2) {
      throw InvariantViolation("sparse point " + std::to_string(i) +
                               ": track needs at least two cameras");
    }
    for (int c : sorted) {
      if (c < 0 || c >= camera_count) {
        throw InvariantViolation("sparse point " + std::to_string(i) +
                                 ": track references unknown camera");
      }
    }
  }
}

bool TrianglePatch::Sees(int camera) const {
  return std::binary_search(visible_cameras.begin(), visible_cameras.end(),
                            camera);
}

const UnaryBins* TrianglePatch::Unary(int camera) const {
  auto it =
      std::lower_bound(visible_cameras.begin(), visible_cameras.end(), camera);
  if (it == visible_cameras.end() || *it != camera) return nullptr;
  const auto pos = static_cast<std::size_t>(it - visible_cameras.begin());
  if (pos >= unary_confidence.size()) return nullptr;
  return &unary_confidence[pos];
}

double TrianglePatch::ClusterFulfillment(int cluster_id) const {
  auto it = std::lower_bound(
      cluster_fulfillment.begin(), cluster_fulfillment.end(), cluster_id,
      [](const std::pair<int, double>& e, int id) { return e.first < id; });
  if (it == cluster_fulfillment.end() || it->first != cluster_id) return 0.0;
  return it->second;
}

double TriangleArea(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

void SurfaceMesh::RebuildPatches() {
  patches.assign(triangles.size(), TrianglePatch{});
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& tri = triangles[i];
    TrianglePatch& p = patches[i];
    for (int j = 0; j < 3; ++j) p.corners[j] = vertices[tri[j]];
    p.centroid = (p.corners[0] + p.corners[1] + p.corners[2]) / 3.0;
    const Vec3 n =
        (p.corners[1] - p.corners[0]).cross(p.corners[2] - p.corners[0]);
    const double len = n.norm();
    p.area3d = 0.5 * len;
    p.normal = len > 0.0 ? Vec3(n / len) : Vec3::UnitZ();
  }
}

void SurfaceMesh::Validate() const {
  const int nv = static_cast<int>(vertices.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& t = triangles[i];
    for (int v : t) {
      if (v < 0 || v >= nv) {
        throw InvariantViolation("triangle " + std::to_string(i) +
                                 ": vertex index out of range");
      }
    }
    if (TriangleArea(vertices[t[0]], vertices[t[1]], vertices[t[2]]) <=
        kMinTriangleArea) {
      throw InvariantViolation("triangle " + std::to_string(i) +
                               ": degenerate (zero area)");
    }
  }
}

double SurfaceMesh::Diameter() const {
  if (vertices.empty()) return 0.0;
  Vec3 lo = vertices.front();
  Vec3 hi = vertices.front();
  for (const Vec3& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

double SurfaceMesh::TotalArea() const {
  double total = 0.0;
  for (const auto& t : triangles) {
    total += TriangleArea(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
  }
  return total;
}

void QualityConfig::Validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!(gsd_desired > 0.0)) fail("gsd must be > 0");
  if (!(accuracy_desired > 0.0)) fail("accuracy must be > 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (min_cameras < 2) fail("min-cameras must be >= 2");
  if (partners < 2) fail("partners must be >= 2");
  if (partners > top_connected) fail("partners must not exceed top-n");
  if (combinations < 1) fail("combinations must be >= 1");
  if (triangle_fraction < 1) fail("triangle-fraction must be >= 1");
  if (!(simplify_factor > 0.0)) fail("simplify factor must be > 0");
  if (!(subdivide_factor > 0.0)) fail("subdivide factor must be > 0");
  if (!(pixel_noise > 0.0)) fail("pixel noise must be > 0");
}

std::optional<Vec2> Project(const Camera& camera, const Vec3& point) {
  const Vec3 p = camera.ToCameraFrame(point);
  if (p.z() <= 0.0) return std::nullopt;
  return Vec2(camera.focal.x() * p.x() / p.z() + camera.principal_point.x(),
              camera.focal.y() * p.y() / p.z() + camera.principal_point.y());
}

double EstimateResolution(const Camera& camera, const TrianglePatch& triangle) {
  std::array<Vec2, 3> px;
  for (int i = 0; i < 3; ++i) {
    auto projected = Project(camera, triangle.corners[i]);
    if (!projected) return 0.0;
    px[i] = *projected;
  }
  if (!(triangle.area3d > 0.0)) return 0.0;
  const Vec2 ab = px[1] - px[0];
  const Vec2 ac = px[2] - px[0];
  const double area2d = 0.5 * std::abs(ab.x() * ac.y() - ab.y() * ac.x());
  return area2d / triangle.area3d;
}

Eigen::Matrix<double, 2, 3> ProjectionJacobian(const Camera& camera,
                                               const Vec3& point) {
  const Vec3 p = camera.ToCameraFrame(point);
  const double inv_z = 1.0 / p.z();
  Eigen::Matrix<double, 2, 3> d_proj;
  d_proj << camera.focal.x() * inv_z, 0.0,
      -camera.focal.x() * p.x() * inv_z * inv_z,  //
      0.0, camera.focal.y() * inv_z, -camera.focal.y() * p.y() * inv_z * inv_z;
  return d_proj * camera.rotation;
}

double TriangulationUncertainty(std::span<const Camera* const> cameras,
                                const Vec3& point, double pixel_noise) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Mat3 information = Mat3::Zero();
  int used = 0;
  for (const Camera* camera : cameras) {
    if (camera->ToCameraFrame(point).z() <= 0.0) continue;
    const auto jacobian = ProjectionJacobian(*camera, point);
    information.noalias() += jacobian.transpose() * jacobian;
    ++used;
  }
  if (used < 2) return kInf;
  information /= pixel_noise * pixel_noise;
  Eigen::SelfAdjointEigenSolver<Mat3> solver(information,
                                             Eigen::EigenvaluesOnly);
  const double lambda_min = solver.eigenvalues()(0);
  const double lambda_max = solver.eigenvalues()(2);
  if (!(lambda_max > 0.0) || !(lambda_min > 0.0) ||
      lambda_max / lambda_min > kMaxConditionNumber) {
    return kInf;
  }
  // The covariance is the inverse; its largest eigenvalue is 1 / lambda_min.
  return 1.0 / lambda_min;
}

double TriangulationUncertainty(std::span<const Camera> cameras,
                                const Vec3& point, double pixel_noise) {
  std::vector<const Camera*> ptrs;
  ptrs.reserve(cameras.size());
  for (const Camera& c : cameras) ptrs.push_back(&c);
  return TriangulationUncertainty(ptrs, point, pixel_noise);
}

double TriangulationAngle(const Camera& a, const Camera& b, const Vec3& point) {
  const Vec3 ra = a.center - point;
  const Vec3 rb = b.center - point;
  const double na = ra.norm();
  const double nb = rb.norm();
  if (na == 0.0 || nb == 0.0 || (a.center - b.center).norm() == 0.0) {
    return 0.0;
  }
  // atan2 form stays accurate for tiny and near-180 degree angles.
  const double angle = std::atan2(ra.cross(rb).norm(), ra.dot(rb));
  return angle * 180.0 / std::numbers::pi;
}

}  // namespace mvsprio
