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

// File formats and run configuration.
//
//   cameras.json  [{"id", "fx", "fy", "cx", "cy", "width", "height",
//                   "R": row-major 3x3 world->camera, "C": center,
//                   "image": optional path}]
//   cloud.json    {"points": [{"xyz": [x, y, z], "track": [camera ids]}]}
//   mesh          PLY, ascii or binary_little_endian, vertex x/y/z and a
//                 face vertex list (polygons are fan-triangulated)
//   *.mvsc        confidence grid: "MVSC1", u32 width_cells, u32
//                 height_cells, u32 stride_px, u32 bin_count (9), then
//                 bin-major little-endian float32 values
//   ranking.json  {"config_echo": {...}, "entries": [{"rank", "key_view",
//                 "partners", "gain", "cumulative_fulfillment"}]}
//   curve.csv     rank,cumulative_fulfillment,normalized
//
// Camera ids are used in files; in memory cameras are referenced by index.

#ifndef MVSPRIO_IO_H_
#define MVSPRIO_IO_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvsprio/confidence.h"
#include "mvsprio/ranking.h"
#include "mvsprio/scene_model.h"

namespace mvsprio {

struct Scene {
  std::vector<Camera> cameras;
  SparsePointCloud cloud;
  SurfaceMesh mesh;
};

std::vector<Camera> ParseCameras(const std::string& json_text);
std::vector<Camera> ReadCameras(const std::filesystem::path& path);
void WriteCameras(const std::filesystem::path& path,
                  const std::vector<Camera>& cameras);

// Track ids are mapped to camera indices.
SparsePointCloud ParseSparseCloud(const std::string& json_text,
                                  const std::vector<Camera>& cameras);
SparsePointCloud ReadSparseCloud(const std::filesystem::path& path,
                                 const std::vector<Camera>& cameras);
void WriteSparseCloud(const std::filesystem::path& path,
                      const SparsePointCloud& cloud,
                      const std::vector<Camera>& cameras);

SurfaceMesh ParsePly(const std::string& bytes);
SurfaceMesh ReadPly(const std::filesystem::path& path);
enum class PlyEncoding { kAscii, kBinaryLittleEndian };
void WritePly(const std::filesystem::path& path, const SurfaceMesh& mesh,
              PlyEncoding encoding = PlyEncoding::kBinaryLittleEndian);

// Loads and validates cameras, cloud and mesh. Parse failures raise
// ParseError with the byte offset; invariant failures raise
// InvariantViolation naming the entity.
Scene LoadScene(const std::filesystem::path& cameras,
                const std::filesystem::path& cloud,
                const std::filesystem::path& mesh);

ConfidenceGrid ParseConfidenceGrid(const std::string& bytes);
ConfidenceGrid ReadConfidenceGrid(const std::filesystem::path& path);
void WriteConfidenceGrid(const std::filesystem::path& path,
                         const ConfidenceGrid& grid);
// Reads "<camera id>.mvsc" for every camera that has one.
FileBackedModel ReadConfidenceDirectory(const std::filesystem::path& dir,
                                        const std::vector<Camera>& cameras);

nlohmann::json ConfigToJson(const QualityConfig& config);
// Rejects unknown keys; missing keys keep their current value.
void ApplyConfigJson(const nlohmann::json& j, QualityConfig& config);

nlohmann::json RankingToJson(const RankingResult& result,
                             const std::vector<Camera>& cameras);
RankingResult RankingFromJson(const nlohmann::json& j,
                              const std::vector<Camera>& cameras);
RankingResult ReadRanking(const std::filesystem::path& path,
                          const std::vector<Camera>& cameras);

// Equality on everything ranking.json stores.
bool SameRanking(const RankingResult& a, const RankingResult& b);

// Writes ranking.json, curve.csv and fulfillment.ply (faces colored from
// blue at 0 to red at 1 by current_fulfillment) into `dir`.
void WriteOutputs(const RankingResult& result, const SurfaceMesh& mesh,
                  const std::vector<Camera>& cameras,
                  const std::filesystem::path& dir);

std::string CurveCsv(const std::vector<CurvePoint>& curve);

struct RunConfig {
  QualityConfig quality;
  std::filesystem::path cameras;
  std::filesystem::path cloud;
  std::filesystem::path mesh;
  // Directory of confidence grids, or "heuristic".
  std::string confidence = "heuristic";
  std::filesystem::path output = "out";
  // Run simplify + subdivide on the input mesh before ranking.
  bool prepare_mesh = false;
  int threads = 1;

  // Paths exist and the quality config is valid; throws ConfigError.
  void Validate() const;
};

// Parses a run config file; unknown keys raise ConfigError.
RunConfig ParseRunConfig(const nlohmann::json& j);
RunConfig ReadRunConfig(const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& bytes);

}  // namespace mvsprio

#endif  // MVSPRIO_IO_H_
