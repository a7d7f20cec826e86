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

// MVS match-success prediction. Unary predictions are binned by
// triangulation angle (9 bins of 5 degrees) and cached per visible
// (camera, triangle) pair; pairwise confidences average two unaries, and the
// k-partner confidence is the probability of at least two independent
// successful partner matches.

#ifndef MVSPRIO_CONFIDENCE_H_
#define MVSPRIO_CONFIDENCE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mvsprio/scene_model.h"

namespace mvsprio {

// Angle bin of a triangulation angle in degrees: floor(angle / 5) clamped to
// [0, 8].
int AngleBin(double angle_deg);

class ConfidenceModel {
 public:
  virtual ~ConfidenceModel() = default;

  // Unary success probabilities in [0, 1] for every angle bin. Must be
  // deterministic for fixed inputs.
  virtual UnaryBins Predict(const Camera& camera,
                            const TrianglePatch& triangle) const = 0;

  double PredictUnary(const Camera& camera, const TrianglePatch& triangle,
                      int angle_bin) const {
    return Predict(camera, triangle)[angle_bin];
  }
};

// Per-camera confidence raster: bin-major float values on a grid of cells
// with `stride` pixel spacing. Cell (x, y) has its center at pixel
// ((x + 0.5) * stride, (y + 0.5) * stride).
struct ConfidenceGrid {
  std::uint32_t width_cells = 0;
  std::uint32_t height_cells = 0;
  std::uint32_t stride_px = 8;
  std::uint32_t bin_count = kAngleBins;
  std::vector<float> values;

  float at(int bin, int x, int y) const {
    return values[(static_cast<std::size_t>(bin) * height_cells + y) *
                      width_cells +
                  x];
  }
  // Dimensions consistent and every value in [0, 1]; throws
  // InvariantViolation otherwise.
  void Validate() const;
};

// Confidence backed by externally predicted rasters, one per camera id.
class FileBackedModel : public ConfidenceModel {
 public:
  FileBackedModel() = default;
  explicit FileBackedModel(std::map<int, ConfidenceGrid> grids)
      : grids_(std::move(grids)) {}

  void SetGrid(int camera_id, ConfidenceGrid grid);
  const std::map<int, ConfidenceGrid>& grids() const { return grids_; }

  // Mean of the cells whose centers fall inside the projected triangle, per
  // bin; the cell nearest to the projected centroid when none does. Zeros
  // when the triangle does not project into the image or the camera has no
  // grid.
  UnaryBins Predict(const Camera& camera,
                    const TrianglePatch& triangle) const override;

 private:
  std::map<int, ConfidenceGrid> grids_;
};

// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  int at(int x, int y) const { return pixels[y * width + x]; }
};

// Reads binary (P5) or ASCII (P2) 8-bit PGM files.
GrayImage ReadPgm(const std::string& path);

// Zero-dependency stand-in predictor: a piecewise-linear hat over the bin's
// center angle (0 at 0 degrees, 1 from 10 to 25 degrees, 0 from 45 degrees
// on), optionally scaled by image texture.
class HeuristicModel : public ConfidenceModel {
 public:
  HeuristicModel() = default;

  // Images keyed by camera id enable the gradient gain: the mean gradient
  // magnitude inside the projected triangle divided by
  // `gradient_reference`, clamped to [0, 1].
  void SetImage(int camera_id, GrayImage image);
  void set_gradient_reference(double value) { gradient_reference_ = value; }

  static double AngleResponse(double angle_deg);

  UnaryBins Predict(const Camera& camera,
                    const TrianglePatch& triangle) const override;

 private:
  double GradientGain(const Camera& camera,
                      const TrianglePatch& triangle) const;

  std::map<int, GrayImage> images_;
  double gradient_reference_ = 16.0;
};

// Model prediction for a camera index, or all zeros when the camera does not
// see the triangle.
UnaryBins UnaryConfidence(const ConfidenceModel& model,
                          std::span<const Camera> cameras, int camera,
                          const TrianglePatch& triangle);

// Mean of both cached unaries in the bin of the key/partner triangulation
// angle at the centroid; 0 when either camera does not see the triangle.
double PairwiseConfidence(std::span<const Camera> cameras, int key, int partner,
                          const TrianglePatch& triangle);

// Probability of at least two successes among independent events with the
// given probabilities. Evaluated by growing the success-count distribution
// one partner at a time in ascending order of probability (states 0, 1,
// >= 2); every step only adds non-negative terms. Throws InvalidClusterError
// for fewer than two probabilities.
double KPartnerConfidence(std::span<const double> pairwise);

// The same probability as the alternating inclusion-exclusion sum
// sum_{i=2..k} (-1)^i (i-1) e_i(p), with e_i the elementary symmetric
// polynomials.
double KPartnerConfidenceAlternating(std::span<const double> pairwise);

// The same probability as 1 - prod(1 - p) - sum_j p_j prod_{m != j}(1 - p_m).
double KPartnerConfidenceComplement(std::span<const double> pairwise);

// Explicit probability tree: each level adds one partner, branches stop
// growing after their second success, and the probabilities of all
// successful branches are summed. Exponential in k; k is limited to 20.
double TreeOracle(std::span<const double> pairwise);

// Fills unary_confidence of every patch for all of its visible cameras.
void CacheUnaries(const ConfidenceModel& model, std::span<const Camera> cameras,
                  SurfaceMesh& mesh, int threads = 1);

}  // namespace mvsprio

#endif  // MVSPRIO_CONFIDENCE_H_
