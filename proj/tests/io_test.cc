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

#include "mvsprio/io.h"

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mvsprio/errors.h"
#include "mvsprio/sim_eval.h"
#include "test_util.h"

namespace mvsprio {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ =
        fs::temp_directory_path() /
        ("mvsprio_io_" +
         std::string(
             ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

const char kCameras[] = R"([
  {"id": 10, "fx": 1000, "fy": 1000, "cx": 500, "cy": 375, "width": 1000,
   "height": 750, "R": [1, 0, 0, 0, -1, 0, 0, 0, -1], "C": [0, 0, 10]},
  {"id": 20, "fx": 1000, "fy": 1000, "cx": 500, "cy": 375, "width": 1000,
   "height": 750, "R": [1, 0, 0, 0, -1, 0, 0, 0, -1], "C": [1, 0, 10]}
])";

TEST_F(IoTest, MinimalSceneLoads) {
  WriteFile(dir_ / "cameras.json", kCameras);
  WriteFile(dir_ / "cloud.json",
            R"({"points": [{"xyz": [0, 0, 0], "track": [20, 10]}]})");
  WriteFile(dir_ / "mesh.ply",
            "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\n"
            "property float y\nproperty float z\nelement face 1\n"
            "property list uchar int vertex_indices\nend_header\n"
            "0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  const Scene scene =
      LoadScene(dir_ / "cameras.json", dir_ / "cloud.json", dir_ / "mesh.ply");
  ASSERT_EQ(scene.cameras.size(), 2u);
  EXPECT_EQ(scene.cameras[1].id, 20);
  ASSERT_EQ(scene.cloud.points.size(), 1u);
  EXPECT_EQ(scene.cloud.points[0].track, (std::vector<int>{1, 0}));
  EXPECT_EQ(scene.mesh.size(), 1u);
}

TEST_F(IoTest, UnknownTrackIdIsInvariantViolation) {
  const auto cams = ParseCameras(kCameras);
  EXPECT_THROW(
      ParseSparseCloud(R"({"points": [{"xyz": [0, 0, 0], "track": [10, 99]}]})",
                       cams),
      InvariantViolation);
}

TEST_F(IoTest, ParseErrorsCarryOffsets) {
  try {
    ParseCameras("[{\"id\": 1,, }]");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
    EXPECT_EQ(e.code(), ExitCode::kParseError);
  }
  EXPECT_THROW(ParseCameras(R"([{"id": 1}])"), ParseError);
  EXPECT_THROW(ParsePly("plx\n"), ParseError);
  EXPECT_THROW(ParsePly("ply\nformat ascii 1.0\nelement vertex 3\nproperty "
                        "float x\nproperty float y\nproperty float z\n"
                        "end_header\n0 0 0\n1 0\n"),
               ParseError);
  const std::string duplicate =
      std::string(kCameras).replace(std::string(kCameras).find("20"), 2, "10");
  EXPECT_THROW(ParseCameras(duplicate), InvariantViolation);
}

TEST_F(IoTest, SceneRoundTrip) {
  SceneSpec spec;
  spec.cells_x = 6;
  spec.cells_y = 5;
  spec.cameras = 12;
  spec.sparse_points = 200;
  SyntheticScene scene = GenerateScene(spec, 3);
  for (Camera& c : scene.cameras) c.id = 100 + 7 * c.id;
  WriteCameras(dir_ / "c.json", scene.cameras);
  WriteSparseCloud(dir_ / "p.json", scene.cloud, scene.cameras);
  for (PlyEncoding enc :
       {PlyEncoding::kAscii, PlyEncoding::kBinaryLittleEndian}) {
    WritePly(dir_ / "m.ply", scene.mesh, enc);
    const Scene back =
        LoadScene(dir_ / "c.json", dir_ / "p.json", dir_ / "m.ply");
    ASSERT_EQ(back.cameras.size(), scene.cameras.size());
    for (std::size_t i = 0; i < back.cameras.size(); ++i) {
      const Camera& a = scene.cameras[i];
      const Camera& b = back.cameras[i];
      EXPECT_EQ(a.id, b.id);
      EXPECT_EQ(a.focal, b.focal);
      EXPECT_EQ(a.principal_point, b.principal_point);
      EXPECT_EQ(a.rotation, b.rotation);
      EXPECT_EQ(a.center, b.center);
      EXPECT_EQ(a.width, b.width);
      EXPECT_EQ(a.height, b.height);
    }
    ASSERT_EQ(back.cloud.points.size(), scene.cloud.points.size());
    for (std::size_t i = 0; i < back.cloud.points.size(); ++i) {
      EXPECT_EQ(back.cloud.points[i].position, scene.cloud.points[i].position);
      EXPECT_EQ(back.cloud.points[i].track, scene.cloud.points[i].track);
    }
    EXPECT_EQ(back.mesh.vertices, scene.mesh.vertices);
    EXPECT_EQ(back.mesh.triangles, scene.mesh.triangles);
  }
}

TEST_F(IoTest, PolygonsAreFanTriangulated) {
  const SurfaceMesh mesh = ParsePly(
      "ply\nformat ascii 1.0\nelement vertex 4\nproperty double x\n"
      "property double y\nproperty double z\nelement face 1\n"
      "property list uchar int vertex_indices\nend_header\n"
      "0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  ASSERT_EQ(mesh.size(), 2u);
  EXPECT_EQ(mesh.triangles[0], (std::array<int, 3>{0, 1, 2}));
  EXPECT_EQ(mesh.triangles[1], (std::array<int, 3>{0, 2, 3}));
}

TEST_F(IoTest, ConfidenceGridRoundTrip) {
  ConfidenceGrid grid;
  grid.width_cells = 4;
  grid.height_cells = 3;
  grid.stride_px = 16;
  for (int i = 0; i < kAngleBins * 12; ++i) grid.values.push_back(i / 200.0f);
  WriteConfidenceGrid(dir_ / "7.mvsc", grid);
  const std::string bytes = ReadFile(dir_ / "7.mvsc");
  EXPECT_EQ(bytes.size(), 5u + 16u + 4u * kAngleBins * 12);
  EXPECT_EQ(bytes.substr(0, 5), "MVSC1");
  const ConfidenceGrid back = ReadConfidenceGrid(dir_ / "7.mvsc");
  EXPECT_EQ(back.width_cells, 4u);
  EXPECT_EQ(back.stride_px, 16u);
  EXPECT_EQ(back.values, grid.values);
  EXPECT_THROW(ParseConfidenceGrid("MVSC2" + bytes.substr(5)), ParseError);
  EXPECT_THROW(ParseConfidenceGrid(bytes.substr(0, 30)), ParseError);

  std::vector<Camera> cams(2);
  cams[0].id = 7;
  cams[1].id = 8;
  const FileBackedModel model = ReadConfidenceDirectory(dir_, cams);
  EXPECT_EQ(model.grids().size(), 1u);
  EXPECT_EQ(model.grids().count(7), 1u);
}

TEST_F(IoTest, ConfigJson) {
  QualityConfig c;
  c.alpha = 0.25;
  c.partners = 4;
  c.rng_seed = 99;
  QualityConfig back;
  ApplyConfigJson(ConfigToJson(c), back);
  EXPECT_EQ(ConfigToJson(back), ConfigToJson(c));
  EXPECT_THROW(ApplyConfigJson(nlohmann::json{{"aplha", 0.3}}, back),
               ConfigError);
  EXPECT_THROW(ApplyConfigJson(nlohmann::json{{"alpha", "high"}}, back),
               ConfigError);
}

TEST_F(IoTest, RunConfigResolvesRelativePaths) {
  fs::create_directories(dir_ / "sub");
  WriteFile(dir_ / "sub" / "cameras.json", kCameras);
  WriteFile(dir_ / "sub" / "cloud.json", R"({"points": []})");
  WriteFile(dir_ / "sub" / "mesh.ply", "ply\n");
  WriteFile(dir_ / "sub" / "run.json",
            R"({"cameras": "cameras.json", "cloud": "cloud.json",
                "mesh": "mesh.ply", "output": "out", "partners": 3,
                "threads": 2})");
  const RunConfig rc = ReadRunConfig(dir_ / "sub" / "run.json");
  EXPECT_EQ(rc.cameras, dir_ / "sub" / "cameras.json");
  EXPECT_EQ(rc.output, dir_ / "sub" / "out");
  EXPECT_EQ(rc.quality.partners, 3);
  EXPECT_EQ(rc.threads, 2);
  EXPECT_NO_THROW(rc.Validate());

  WriteFile(dir_ / "bad.json", R"({"cameras": "x.json", "colour": 1})");
  EXPECT_THROW(ReadRunConfig(dir_ / "bad.json"), ConfigError);
  WriteFile(dir_ / "missing.json", R"({"cameras": "nope.json", "cloud": "a",
                                        "mesh": "b"})");
  EXPECT_THROW(ReadRunConfig(dir_ / "missing.json").Validate(), ConfigError);
}

TEST_F(IoTest, OutputsRoundTrip) {
  const auto cams = ParseCameras(kCameras);
  std::vector<Camera> three = cams;
  three.push_back(cams[0]);
  three.back().id = 30;
  RankingResult result;
  result.config.partners = 2;
  result.config.rng_seed = 5;
  double cumulative = 0.0;
  for (int i = 0; i < 3; ++i) {
    RankingEntry e;
    e.rank = i + 1;
    e.cluster.id = i;
    e.cluster.key_view = i;
    e.cluster.partners = {(i + 1) % 3, (i + 2) % 3};
    e.gain = 0.1 / (i + 1) + 1e-17 * i;
    cumulative += e.gain;
    e.cumulative_fulfillment = cumulative;
    result.entries.push_back(e);
  }
  SurfaceMesh mesh = ::mvsprio::testing::GridMesh(2, 1, 1.0, 1.0);
  mesh.patches[0].current_fulfillment = 1.0;
  WriteOutputs(result, mesh, three, dir_);
  const RankingResult back = ReadRanking(dir_ / "ranking.json", three);
  EXPECT_TRUE(SameRanking(back, result));
  const std::string json_text = ReadFile(dir_ / "ranking.json");
  EXPECT_NE(json_text.find("\"config_echo\""), std::string::npos);
  EXPECT_NE(json_text.find("\"key_view\": 30"), std::string::npos);

  const std::string csv = ReadFile(dir_ / "curve.csv");
  EXPECT_EQ(csv.rfind("rank,cumulative_fulfillment,normalized\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);

  const std::string ply = ReadFile(dir_ / "fulfillment.ply");
  EXPECT_NE(ply.find("3 0 1 4 255 0 0 1\n"), std::string::npos);

  // Writing twice gives identical bytes.
  const fs::path again = dir_ / "again";
  WriteOutputs(result, mesh, three, again);
  EXPECT_EQ(ReadFile(again / "ranking.json"), json_text);
  EXPECT_EQ(ReadFile(again / "fulfillment.ply"), ply);
}

TEST_F(IoTest, EmptyRankingWritesHeaderOnlyFiles) {
  const auto cams = ParseCameras(kCameras);
  RankingResult empty;
  const SurfaceMesh mesh = ::mvsprio::testing::GridMesh(1, 1, 1.0, 1.0);
  WriteOutputs(empty, mesh, cams, dir_);
  EXPECT_EQ(ReadFile(dir_ / "curve.csv"),
            "rank,cumulative_fulfillment,normalized\n");
  const RankingResult back = ReadRanking(dir_ / "ranking.json", cams);
  EXPECT_TRUE(back.entries.empty());
  EXPECT_TRUE(fs::exists(dir_ / "fulfillment.ply"));
}

TEST_F(IoTest, MissingFileIsIoError) {
  try {
    ReadFile(dir_ / "nothing.json");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.code(), ExitCode::kIoError);
  }
}

}  // namespace
}  // namespace mvsprio
