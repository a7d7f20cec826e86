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

#include "mvsprio/confidence.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mvsprio/errors.h"
#include "mvsprio/parallel.h"

namespace mvsprio {
namespace {

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Projects all corners; false when any lies behind the camera or the
// centroid falls outside the image.
bool ProjectTriangle(const Camera& camera, const TrianglePatch& triangle,
                     std::array<Vec2, 3>* corners, Vec2* centroid) {
  for (int i = 0; i < 3; ++i) {
    auto p = Project(camera, triangle.corners[i]);
    if (!p) return false;
    (*corners)[i] = *p;
  }
  auto c = Project(camera, triangle.centroid);
  if (!c) return false;
  *centroid = *c;
  return c->x() >= 0.0 && c->y() >= 0.0 && c->x() < camera.width &&
         c->y() < camera.height;
}

double Cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Inclusive point-in-triangle test for either winding.
bool InsideTriangle(const std::array<Vec2, 3>& t, const Vec2& p) {
  const double d0 = Cross2(t[1] - t[0], p - t[0]);
  const double d1 = Cross2(t[2] - t[1], p - t[1]);
  const double d2 = Cross2(t[0] - t[2], p - t[2]);
  const bool has_neg = d0 < 0 || d1 < 0 || d2 < 0;
  const bool has_pos = d0 > 0 || d1 > 0 || d2 > 0;
  return !(has_neg && has_pos);
}

}  // namespace

int AngleBin(double angle_deg) {
  if (!(angle_deg > 0.0)) return 0;
  const double bin = std::floor(angle_deg / kAngleBinWidthDeg);
  return static_cast<int>(std::min(bin, double{kAngleBins - 1}));
}

void ConfidenceGrid::Validate() const {
  if (bin_count != static_cast<std::uint32_t>(kAngleBins)) {
    throw InvariantViolation("confidence grid: bin count must be 9");
  }
  if (width_cells == 0 || height_cells == 0 || stride_px == 0) {
    throw InvariantViolation("confidence grid: empty dimensions");
  }
  const std::size_t expected =
      static_cast<std::size_t>(width_cells) * height_cells * bin_count;
  if (values.size() != expected) {
    throw InvariantViolation("confidence grid: value count mismatch");
  }
  for (float v : values) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw InvariantViolation("confidence grid: value outside [0, 1]");
    }
  }
}

void FileBackedModel::SetGrid(int camera_id, ConfidenceGrid grid) {
  grid.Validate();
  grids_[camera_id] = std::move(grid);
}

UnaryBins FileBackedModel::Predict(const Camera& camera,
                                   const TrianglePatch& triangle) const {
  UnaryBins out{};
  auto it = grids_.find(camera.id);
  if (it == grids_.end()) return out;
  const ConfidenceGrid& grid = it->second;
  std::array<Vec2, 3> tri;
  Vec2 centroid;
  if (!ProjectTriangle(camera, triangle, &tri, &centroid)) return out;

  const double s = grid.stride_px;
  const int w = static_cast<int>(grid.width_cells);
  const int h = static_cast<int>(grid.height_cells);
  double lo_x = std::min({tri[0].x(), tri[1].x(), tri[2].x()});
  double hi_x = std::max({tri[0].x(), tri[1].x(), tri[2].x()});
  double lo_y = std::min({tri[0].y(), tri[1].y(), tri[2].y()});
  double hi_y = std::max({tri[0].y(), tri[1].y(), tri[2].y()});
  // Cell x has its center at (x + 0.5) * s.
  const int x0 = std::max(0, static_cast<int>(std::ceil(lo_x / s - 0.5)));
  const int x1 = std::min(w - 1, static_cast<int>(std::floor(hi_x / s - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(lo_y / s - 0.5)));
  const int y1 = std::min(h - 1, static_cast<int>(std::floor(hi_y / s - 0.5)));
  std::vector<std::pair<int, int>> cells;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (InsideTriangle(tri, Vec2((x + 0.5) * s, (y + 0.5) * s))) {
        cells.emplace_back(x, y);
      }
    }
  }
  if (cells.empty()) {
    const int x =
        std::clamp(static_cast<int>(std::floor(centroid.x() / s)), 0, w - 1);
    const int y =
        std::clamp(static_cast<int>(std::floor(centroid.y() / s)), 0, h - 1);
    cells.emplace_back(x, y);
  }
  for (int b = 0; b < kAngleBins; ++b) {
    double sum = 0.0;
    for (const auto& [x, y] : cells) sum += grid.at(b, x, y);
    out[b] = Clamp01(sum / static_cast<double>(cells.size()));
  }
  return out;
}

GrayImage ReadPgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") {
    throw ParseError(path + ": not a P2/P5 PGM file");
  }
  auto next_int = [&]() {
    int v = 0;
    while (in >> std::ws && in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
    }
    if (!(in >> v)) throw ParseError(path + ": truncated PGM header");
    return v;
  };
  GrayImage img;
  img.width = next_int();
  img.height = next_int();
  const int max_value = next_int();
  if (img.width <= 0 || img.height <= 0 || max_value <= 0 || max_value > 255) {
    throw ParseError(path + ": unsupported PGM dimensions or depth");
  }
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(n);
  if (magic == "P5") {
    in.get();
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw ParseError(path + ": truncated PGM data");
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      img.pixels[i] = static_cast<std::uint8_t>(next_int());
    }
  }
  return img;
}

void HeuristicModel::SetImage(int camera_id, GrayImage image) {
  images_[camera_id] = std::move(image);
}

double HeuristicModel::AngleResponse(double angle_deg) {
  if (angle_deg <= 0.0 || angle_deg >= 45.0) return 0.0;
  if (angle_deg < 10.0) return angle_deg / 10.0;
  if (angle_deg <= 25.0) return 1.0;
  return (45.0 - angle_deg) / 20.0;
}

double HeuristicModel::GradientGain(const Camera& camera,
                                    const TrianglePatch& triangle) const {
  auto it = images_.find(camera.id);
  if (it == images_.end()) return 1.0;
  const GrayImage& img = it->second;
  std::array<Vec2, 3> tri;
  Vec2 centroid;
  if (!ProjectTriangle(camera, triangle, &tri, &centroid)) return 0.0;
  // Image coordinates may be a scaled version of the calibrated size.
  const double sx = static_cast<double>(img.width) / camera.width;
  const double sy = static_cast<double>(img.height) / camera.height;
  for (Vec2& p : tri) p = Vec2(p.x() * sx, p.y() * sy);
  const int x0 = std::max(1, static_cast<int>(std::floor(std::min(
                                 {tri[0].x(), tri[1].x(), tri[2].x()}))));
  const int x1 = std::min(img.width - 2,
                          static_cast<int>(std::ceil(
                              std::max({tri[0].x(), tri[1].x(), tri[2].x()}))));
  const int y0 = std::max(1, static_cast<int>(std::floor(std::min(
                                 {tri[0].y(), tri[1].y(), tri[2].y()}))));
  const int y1 = std::min(img.height - 2,
                          static_cast<int>(std::ceil(
                              std::max({tri[0].y(), tri[1].y(), tri[2].y()}))));
  double sum = 0.0;
  int count = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (!InsideTriangle(tri, Vec2(x + 0.5, y + 0.5))) continue;
      const double gx = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
      const double gy = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
      sum += std::hypot(gx, gy);
      ++count;
    }
  }
  if (count == 0) {
    const int x = std::clamp(static_cast<int>(centroid.x() * sx), 1,
                             std::max(1, img.width - 2));
    const int y = std::clamp(static_cast<int>(centroid.y() * sy), 1,
                             std::max(1, img.height - 2));
    if (img.width < 3 || img.height < 3) return 0.0;
    sum = std::hypot(0.5 * (img.at(x + 1, y) - img.at(x - 1, y)),
                     0.5 * (img.at(x, y + 1) - img.at(x, y - 1)));
    count = 1;
  }
  return Clamp01(sum / count / gradient_reference_);
}

UnaryBins HeuristicModel::Predict(const Camera& camera,
                                  const TrianglePatch& triangle) const {
  const double gain = GradientGain(camera, triangle);
  UnaryBins out;
  for (int b = 0; b < kAngleBins; ++b) {
    const double center = (b + 0.5) * kAngleBinWidthDeg;
    out[b] = Clamp01(gain * AngleResponse(center));
  }
  return out;
}

UnaryBins UnaryConfidence(const ConfidenceModel& model,
                          std::span<const Camera> cameras, int camera,
                          const TrianglePatch& triangle) {
  if (!triangle.Sees(camera)) return UnaryBins{};
  UnaryBins bins = model.Predict(cameras[camera], triangle);
  for (double& v : bins) v = Clamp01(v);
  return bins;
}

double PairwiseConfidence(std::span<const Camera> cameras, int key, int partner,
                          const TrianglePatch& triangle) {
  const UnaryBins* key_bins = triangle.Unary(key);
  const UnaryBins* partner_bins = triangle.Unary(partner);
  if (key_bins == nullptr || partner_bins == nullptr) return 0.0;
  const int bin = AngleBin(
      TriangulationAngle(cameras[key], cameras[partner], triangle.centroid));
  return 0.5 * ((*key_bins)[bin] + (*partner_bins)[bin]);
}

double KPartnerConfidence(std::span<const double> pairwise) {
  if (pairwise.size() < 2) {
    throw InvalidClusterError("k-partner confidence needs k >= 2 partners");
  }
  // Fixed evaluation order, so that permuted inputs give identical bits.
  std::vector<double> sorted(pairwise.begin(), pairwise.end());
  std::sort(sorted.begin(), sorted.end());
  double none = 1.0;
  double one = 0.0;
  double at_least_two = 0.0;
  for (double p : sorted) {
    const double q = 1.0 - p;
    at_least_two += p * one;
    one = one * q + p * none;
    none *= q;
  }
  return Clamp01(at_least_two);
}

double KPartnerConfidenceAlternating(std::span<const double> pairwise) {
  if (pairwise.size() < 2) {
    throw InvalidClusterError("k-partner confidence needs k >= 2 partners");
  }
  const std::size_t k = pairwise.size();
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (double p : pairwise) {
    for (std::size_t i = k; i >= 1; --i) e[i] += p * e[i - 1];
  }
  double total = 0.0;
  for (std::size_t i = 2; i <= k; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    total += sign * static_cast<double>(i - 1) * e[i];
  }
  return total;
}

double KPartnerConfidenceComplement(std::span<const double> pairwise) {
  if (pairwise.size() < 2) {
    throw InvalidClusterError("k-partner confidence needs k >= 2 partners");
  }
  const std::size_t k = pairwise.size();
  // prefix[j] = prod_{m<j}(1-p_m), suffix[j] = prod_{m>=j}(1-p_m).
  std::vector<double> prefix(k + 1, 1.0), suffix(k + 1, 1.0);
  for (std::size_t j = 0; j < k; ++j) {
    prefix[j + 1] = prefix[j] * (1.0 - pairwise[j]);
  }
  for (std::size_t j = k; j-- > 0;) {
    suffix[j] = suffix[j + 1] * (1.0 - pairwise[j]);
  }
  double exactly_one = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    exactly_one += pairwise[j] * prefix[j] * suffix[j + 1];
  }
  return 1.0 - prefix[k] - exactly_one;
}

namespace {

void GrowTree(std::span<const double> p, std::size_t depth, int successes,
              double probability, double* total) {
  if (successes == 2) {
    *total += probability;
    return;
  }
  if (depth == p.size()) return;
  GrowTree(p, depth + 1, successes + 1, probability * p[depth], total);
  GrowTree(p, depth + 1, successes, probability * (1.0 - p[depth]), total);
}

}  // namespace

double TreeOracle(std::span<const double> pairwise) {
  if (pairwise.size() < 2) {
    throw InvalidClusterError("tree oracle needs k >= 2 partners");
  }
  if (pairwise.size() > 20) {
    throw ConfigError("tree oracle is limited to k <= 20");
  }
  double total = 0.0;
  GrowTree(pairwise, 0, 0, 1.0, &total);
  return total;
}

void CacheUnaries(const ConfidenceModel& model, std::span<const Camera> cameras,
                  SurfaceMesh& mesh, int threads) {
  ParallelFor(mesh.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      TrianglePatch& patch = mesh.patches[t];
      patch.unary_confidence.clear();
      patch.unary_confidence.reserve(patch.visible_cameras.size());
      for (int c : patch.visible_cameras) {
        patch.unary_confidence.push_back(
            UnaryConfidence(model, cameras, c, patch));
      }
    }
  });
}

}  // namespace mvsprio
