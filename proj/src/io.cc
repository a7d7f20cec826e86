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
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "mvsprio/errors.h"

namespace mvsprio {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

json ParseJson(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
}

template <typename T>
T Field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": field '" + key + "': " + e.what());
  }
}

std::unordered_map<int, int> IdToIndex(const std::vector<Camera>& cameras) {
  std::unordered_map<int, int> map;
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    map[cameras[i].id] = static_cast<int>(i);
  }
  return map;
}

}  // namespace

std::vector<Camera> ParseCameras(const std::string& json_text) {
  const json j = ParseJson(json_text, "cameras");
  if (!j.is_array()) throw ParseError("cameras: expected a JSON array");
  std::vector<Camera> cameras;
  std::map<int, int> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string where = "cameras[" + std::to_string(i) + "]";
    Camera c;
    c.id = Field<int>(e, "id", where);
    c.focal =
        Vec2(Field<double>(e, "fx", where), Field<double>(e, "fy", where));
    c.principal_point =
        Vec2(Field<double>(e, "cx", where), Field<double>(e, "cy", where));
    c.width = Field<int>(e, "width", where);
    c.height = Field<int>(e, "height", where);
    const auto r = Field<std::vector<double>>(e, "R", where);
    const auto center = Field<std::vector<double>>(e, "C", where);
    if (r.size() != 9) throw ParseError(where + ": R needs 9 values");
    if (center.size() != 3) throw ParseError(where + ": C needs 3 values");
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) c.rotation(row, col) = r[row * 3 + col];
    }
    c.center = Vec3(center[0], center[1], center[2]);
    if (e.contains("image"))
      c.image_path = Field<std::string>(e, "image", where);
    if (!seen.emplace(c.id, static_cast<int>(i)).second) {
      throw InvariantViolation("camera " + std::to_string(c.id) +
                               ": duplicate id");
    }
    c.Validate();
    cameras.push_back(std::move(c));
  }
  return cameras;
}

std::vector<Camera> ReadCameras(const std::filesystem::path& path) {
  return ParseCameras(ReadFile(path));
}

void WriteCameras(const std::filesystem::path& path,
                  const std::vector<Camera>& cameras) {
  json j = json::array();
  for (const Camera& c : cameras) {
    json e;
    e["id"] = c.id;
    e["fx"] = c.focal.x();
    e["fy"] = c.focal.y();
    e["cx"] = c.principal_point.x();
    e["cy"] = c.principal_point.y();
    e["width"] = c.width;
    e["height"] = c.height;
    std::vector<double> r(9);
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) r[row * 3 + col] = c.rotation(row, col);
    }
    e["R"] = r;
    e["C"] = {c.center.x(), c.center.y(), c.center.z()};
    if (!c.image_path.empty()) e["image"] = c.image_path;
    j.push_back(std::move(e));
  }
  WriteFile(path, j.dump(1) + "\n");
}

SparsePointCloud ParseSparseCloud(const std::string& json_text,
                                  const std::vector<Camera>& cameras) {
  const json j = ParseJson(json_text, "sparse cloud");
  const auto id_to_index = IdToIndex(cameras);
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw ParseError("sparse cloud: expected {\"points\": [...]}");
  }
  SparsePointCloud cloud;
  const json& points = j["points"];
  cloud.points.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string where = "points[" + std::to_string(i) + "]";
    const auto xyz = Field<std::vector<double>>(points[i], "xyz", where);
    const auto track = Field<std::vector<int>>(points[i], "track", where);
    if (xyz.size() != 3) throw ParseError(where + ": xyz needs 3 values");
    SparsePoint p;
    p.position = Vec3(xyz[0], xyz[1], xyz[2]);
    for (int id : track) {
      auto it = id_to_index.find(id);
      if (it == id_to_index.end()) {
        throw InvariantViolation("sparse point " + std::to_string(i) +
                                 ": track references unknown camera id " +
                                 std::to_string(id));
      }
      p.track.push_back(it->second);
    }
    cloud.points.push_back(std::move(p));
  }
  cloud.Validate(static_cast<int>(cameras.size()));
  return cloud;
}

SparsePointCloud ReadSparseCloud(const std::filesystem::path& path,
                                 const std::vector<Camera>& cameras) {
  return ParseSparseCloud(ReadFile(path), cameras);
}

void WriteSparseCloud(const std::filesystem::path& path,
                      const SparsePointCloud& cloud,
                      const std::vector<Camera>& cameras) {
  json points = json::array();
  for (const SparsePoint& p : cloud.points) {
    std::vector<int> ids;
    for (int c : p.track) ids.push_back(cameras[c].id);
    points.push_back({{"xyz", {p.position.x(), p.position.y(), p.position.z()}},
                      {"track", ids}});
  }
  WriteFile(path, json{{"points", points}}.dump() + "\n");
}

// ---------------------------------------------------------------------------
// PLY

namespace {

enum class PlyType {
  kInt8,
  kUint8,
  kInt16,
  kUint16,
  kInt32,
  kUint32,
  kFloat32,
  kFloat64
};

std::optional<PlyType> ParsePlyType(const std::string& s) {
  static const std::map<std::string, PlyType> kTypes = {
      {"char", PlyType::kInt8},      {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUint8},    {"uint8", PlyType::kUint8},
      {"short", PlyType::kInt16},    {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUint16},  {"uint16", PlyType::kUint16},
      {"int", PlyType::kInt32},      {"int32", PlyType::kInt32},
      {"uint", PlyType::kUint32},    {"uint32", PlyType::kUint32},
      {"float", PlyType::kFloat32},  {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64}};
  auto it = kTypes.find(s);
  if (it == kTypes.end()) return std::nullopt;
  return it->second;
}

std::size_t PlyTypeSize(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUint8:
      return 1;
    case PlyType::kInt16:
    case PlyType::kUint16:
      return 2;
    case PlyType::kInt32:
    case PlyType::kUint32:
    case PlyType::kFloat32:
      return 4;
    case PlyType::kFloat64:
      return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

class BinaryCursor {
 public:
  BinaryCursor(const std::string& bytes, std::size_t pos)
      : bytes_(bytes), pos_(pos) {}

  double Read(PlyType type) {
    const std::size_t n = PlyTypeSize(type);
    if (pos_ + n > bytes_.size()) {
      throw ParseError("ply: unexpected end of data at byte " +
                       std::to_string(pos_));
    }
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    switch (type) {
      case PlyType::kInt8:
        return Load<std::int8_t>(p);
      case PlyType::kUint8:
        return Load<std::uint8_t>(p);
      case PlyType::kInt16:
        return Load<std::int16_t>(p);
      case PlyType::kUint16:
        return Load<std::uint16_t>(p);
      case PlyType::kInt32:
        return Load<std::int32_t>(p);
      case PlyType::kUint32:
        return Load<std::uint32_t>(p);
      case PlyType::kFloat32:
        return Load<float>(p);
      case PlyType::kFloat64:
        return Load<double>(p);
    }
    return 0.0;
  }
  std::size_t pos() const { return pos_; }

 private:
  template <typename T>
  static double Load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  }

  const std::string& bytes_;
  std::size_t pos_;
};

class AsciiCursor {
 public:
  AsciiCursor(const std::string& bytes, std::size_t pos, int line)
      : bytes_(bytes), pos_(pos), line_(line) {}

  double Read(PlyType) {
    while (pos_ < bytes_.size() &&
           std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      if (bytes_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= bytes_.size()) {
      throw ParseError("ply: unexpected end of data at line " +
                       std::to_string(line_));
    }
    const char* begin = bytes_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) {
      throw ParseError("ply: malformed number at line " +
                       std::to_string(line_));
    }
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_;
  int line_;
};

template <typename Cursor>
SurfaceMesh ReadPlyBody(const std::vector<PlyElement>& elements,
                        Cursor cursor) {
  SurfaceMesh mesh;
  for (const PlyElement& element : elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";
    for (std::size_t i = 0; i < element.count; ++i) {
      Vec3 position = Vec3::Zero();
      for (const PlyProperty& prop : element.properties) {
        if (prop.is_list) {
          const double n = cursor.Read(prop.count_type);
          if (n < 0 || n != std::floor(n)) {
            throw ParseError("ply: invalid list length");
          }
          std::vector<int> indices(static_cast<std::size_t>(n));
          for (int& v : indices) v = static_cast<int>(cursor.Read(prop.type));
          if (is_face &&
              (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
            if (indices.size() < 3) {
              throw ParseError("ply: face " + std::to_string(i) +
                               " has fewer than 3 vertices");
            }
            for (std::size_t k = 1; k + 1 < indices.size(); ++k) {
              mesh.triangles.push_back(
                  {indices[0], indices[k], indices[k + 1]});
            }
          }
          continue;
        }
        const double v = cursor.Read(prop.type);
        if (is_vertex) {
          if (prop.name == "x") position.x() = v;
          if (prop.name == "y") position.y() = v;
          if (prop.name == "z") position.z() = v;
        }
      }
      if (is_vertex) mesh.vertices.push_back(position);
    }
  }
  return mesh;
}

}  // namespace

SurfaceMesh ParsePly(const std::string& bytes) {
  std::size_t pos = 0;
  int line_no = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= bytes.size()) {
      throw ParseError("ply: header ended early at line " +
                       std::to_string(line_no));
    }
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(pos, end - pos);
    pos = std::min(bytes.size(), end + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next_line() != "ply") throw ParseError("ply: missing magic at line 1");
  std::string format;
  std::vector<PlyElement> elements;
  while (true) {
    const std::string line = next_line();
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    const std::string where = "ply: line " + std::to_string(line_no);
    if (word == "end_header") break;
    if (word.empty() || word == "comment" || word == "obj_info") continue;
    if (word == "format") {
      std::string version;
      ss >> format >> version;
    } else if (word == "element") {
      PlyElement e;
      long long count = -1;
      ss >> e.name >> count;
      if (e.name.empty() || count < 0)
        throw ParseError(where + ": bad element");
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (word == "property") {
      if (elements.empty())
        throw ParseError(where + ": property before element");
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ss >> count_type >> item_type >> p.name;
        auto ct = ParsePlyType(count_type);
        auto it = ParsePlyType(item_type);
        if (!ct || !it) throw ParseError(where + ": unknown list type");
        p.is_list = true;
        p.count_type = *ct;
        p.type = *it;
      } else {
        auto t = ParsePlyType(type);
        if (!t) throw ParseError(where + ": unknown type '" + type + "'");
        p.type = *t;
        ss >> p.name;
      }
      elements.back().properties.push_back(std::move(p));
    } else {
      throw ParseError(where + ": unexpected keyword '" + word + "'");
    }
  }
  SurfaceMesh mesh;
  if (format == "ascii") {
    mesh = ReadPlyBody(elements, AsciiCursor(bytes, pos, line_no + 1));
  } else if (format == "binary_little_endian") {
    mesh = ReadPlyBody(elements, BinaryCursor(bytes, pos));
  } else {
    throw ParseError("ply: unsupported format '" + format + "'");
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    for (int v : mesh.triangles[i]) {
      if (v < 0 || v >= nv) {
        throw InvariantViolation("triangle " + std::to_string(i) +
                                 ": vertex index out of range");
      }
    }
  }
  mesh.RebuildPatches();
  return mesh;
}

SurfaceMesh ReadPly(const std::filesystem::path& path) {
  try {
    return ParsePly(ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace {

template <typename T>
void Append(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void WritePly(const std::filesystem::path& path, const SurfaceMesh& mesh,
              PlyEncoding encoding) {
  std::string out = "ply\nformat ";
  out += encoding == PlyEncoding::kAscii ? "ascii" : "binary_little_endian";
  out += " 1.0\nelement vertex " + std::to_string(mesh.vertices.size()) +
         "\nproperty double x\nproperty double y\nproperty double z\n"
         "element face " +
         std::to_string(mesh.triangles.size()) +
         "\nproperty list uchar int vertex_indices\nend_header\n";
  if (encoding == PlyEncoding::kAscii) {
    for (const Vec3& v : mesh.vertices) {
      out += FormatDouble(v.x()) + " " + FormatDouble(v.y()) + " " +
             FormatDouble(v.z()) + "\n";
    }
    for (const auto& t : mesh.triangles) {
      out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
             std::to_string(t[2]) + "\n";
    }
  } else {
    for (const Vec3& v : mesh.vertices) {
      Append(out, v.x());
      Append(out, v.y());
      Append(out, v.z());
    }
    for (const auto& t : mesh.triangles) {
      Append(out, std::uint8_t{3});
      for (int i : t) Append(out, static_cast<std::int32_t>(i));
    }
  }
  WriteFile(path, out);
}

Scene LoadScene(const std::filesystem::path& cameras,
                const std::filesystem::path& cloud,
                const std::filesystem::path& mesh) {
  Scene scene;
  scene.cameras = ReadCameras(cameras);
  scene.cloud = ReadSparseCloud(cloud, scene.cameras);
  scene.mesh = ReadPly(mesh);
  scene.mesh.Validate();
  return scene;
}

// ---------------------------------------------------------------------------
// Confidence grids

namespace {
constexpr char kGridMagic[5] = {'M', 'V', 'S', 'C', '1'};
}  // namespace

ConfidenceGrid ParseConfidenceGrid(const std::string& bytes) {
  constexpr std::size_t kHeader = 5 + 4 * 4;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), kGridMagic, 5) != 0) {
    throw ParseError("confidence grid: bad magic at byte 0");
  }
  ConfidenceGrid grid;
  auto u32 = [&](std::size_t offset) {
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + offset, 4);
    return v;
  };
  grid.width_cells = u32(5);
  grid.height_cells = u32(9);
  grid.stride_px = u32(13);
  grid.bin_count = u32(17);
  const std::size_t n = static_cast<std::size_t>(grid.width_cells) *
                        grid.height_cells * grid.bin_count;
  if (bytes.size() != kHeader + 4 * n) {
    throw ParseError("confidence grid: expected " +
                     std::to_string(kHeader + 4 * n) + " bytes, found " +
                     std::to_string(bytes.size()));
  }
  grid.values.resize(n);
  std::memcpy(grid.values.data(), bytes.data() + kHeader, 4 * n);
  grid.Validate();
  return grid;
}

ConfidenceGrid ReadConfidenceGrid(const std::filesystem::path& path) {
  try {
    return ParseConfidenceGrid(ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteConfidenceGrid(const std::filesystem::path& path,
                         const ConfidenceGrid& grid) {
  grid.Validate();
  std::string out(kGridMagic, 5);
  Append(out, grid.width_cells);
  Append(out, grid.height_cells);
  Append(out, grid.stride_px);
  Append(out, grid.bin_count);
  for (float v : grid.values) Append(out, v);
  WriteFile(path, out);
}

FileBackedModel ReadConfidenceDirectory(const std::filesystem::path& dir,
                                        const std::vector<Camera>& cameras) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("confidence directory not found: " + dir.string());
  }
  FileBackedModel model;
  for (const Camera& c : cameras) {
    const auto path = dir / (std::to_string(c.id) + ".mvsc");
    if (std::filesystem::exists(path)) {
      model.SetGrid(c.id, ReadConfidenceGrid(path));
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Config and ranking JSON

json ConfigToJson(const QualityConfig& c) {
  return json{{"gsd", c.gsd_desired},
              {"accuracy", c.accuracy_desired},
              {"alpha", c.alpha},
              {"min_cameras", c.min_cameras},
              {"partners", c.partners},
              {"top_n", c.top_connected},
              {"combinations", c.combinations},
              {"triangle_fraction", c.triangle_fraction},
              {"simplify_factor", c.simplify_factor},
              {"subdivide_factor", c.subdivide_factor},
              {"pixel_noise", c.pixel_noise},
              {"seed", c.rng_seed}};
}

void ApplyConfigJson(const json& j, QualityConfig& c) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "gsd")
        c.gsd_desired = value.get<double>();
      else if (key == "accuracy")
        c.accuracy_desired = value.get<double>();
      else if (key == "alpha")
        c.alpha = value.get<double>();
      else if (key == "min_cameras")
        c.min_cameras = value.get<int>();
      else if (key == "partners")
        c.partners = value.get<int>();
      else if (key == "top_n")
        c.top_connected = value.get<int>();
      else if (key == "combinations")
        c.combinations = value.get<int>();
      else if (key == "triangle_fraction")
        c.triangle_fraction = value.get<int>();
      else if (key == "simplify_factor")
        c.simplify_factor = value.get<double>();
      else if (key == "subdivide_factor")
        c.subdivide_factor = value.get<double>();
      else if (key == "pixel_noise")
        c.pixel_noise = value.get<double>();
      else if (key == "seed")
        c.rng_seed = value.get<std::uint64_t>();
      else
        throw ConfigError("config: unknown key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config: key '" + key + "': " + e.what());
    }
  }
}

json RankingToJson(const RankingResult& result,
                   const std::vector<Camera>& cameras) {
  json entries = json::array();
  for (const RankingEntry& e : result.entries) {
    std::vector<int> partners;
    for (int p : e.cluster.partners) partners.push_back(cameras[p].id);
    entries.push_back({{"rank", e.rank},
                       {"key_view", cameras[e.cluster.key_view].id},
                       {"partners", partners},
                       {"gain", e.gain},
                       {"cumulative_fulfillment", e.cumulative_fulfillment}});
  }
  return json{{"config_echo", ConfigToJson(result.config)},
              {"entries", entries}};
}

RankingResult RankingFromJson(const json& j,
                              const std::vector<Camera>& cameras) {
  const auto id_to_index = IdToIndex(cameras);
  auto index_of = [&](int id) {
    auto it = id_to_index.find(id);
    if (it == id_to_index.end()) {
      throw InvariantViolation("ranking references unknown camera id " +
                               std::to_string(id));
    }
    return it->second;
  };
  RankingResult result;
  if (!j.is_object() || !j.contains("entries") || !j.contains("config_echo")) {
    throw ParseError("ranking: expected config_echo and entries");
  }
  ApplyConfigJson(j["config_echo"], result.config);
  int position = 0;
  for (const json& e : j["entries"]) {
    const std::string where = "entries[" + std::to_string(position) + "]";
    RankingEntry entry;
    entry.rank = Field<int>(e, "rank", where);
    entry.cluster.id = position++;
    entry.cluster.key_view = index_of(Field<int>(e, "key_view", where));
    for (int id : Field<std::vector<int>>(e, "partners", where)) {
      entry.cluster.partners.push_back(index_of(id));
    }
    entry.gain = Field<double>(e, "gain", where);
    entry.cumulative_fulfillment =
        Field<double>(e, "cumulative_fulfillment", where);
    result.entries.push_back(std::move(entry));
  }
  return result;
}

RankingResult ReadRanking(const std::filesystem::path& path,
                          const std::vector<Camera>& cameras) {
  return RankingFromJson(ParseJson(ReadFile(path), path.string()), cameras);
}

bool SameRanking(const RankingResult& a, const RankingResult& b) {
  if (ConfigToJson(a.config) != ConfigToJson(b.config)) return false;
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& x = a.entries[i];
    const auto& y = b.entries[i];
    if (x.rank != y.rank || x.cluster.key_view != y.cluster.key_view ||
        x.cluster.partners != y.cluster.partners || x.gain != y.gain ||
        x.cumulative_fulfillment != y.cumulative_fulfillment) {
      return false;
    }
  }
  return true;
}

std::string CurveCsv(const std::vector<CurvePoint>& curve) {
  std::string out = "rank,cumulative_fulfillment,normalized\n";
  for (const CurvePoint& p : curve) {
    out += std::to_string(p.rank) + "," +
           FormatDouble(p.cumulative_fulfillment) + "," +
           FormatDouble(p.normalized) + "\n";
  }
  return out;
}

namespace {

std::string FulfillmentPly(const SurfaceMesh& mesh) {
  std::string out =
      "ply\nformat ascii 1.0\ncomment faces colored by final fulfillment\n"
      "element vertex " +
      std::to_string(mesh.vertices.size()) +
      "\nproperty double x\nproperty double y\nproperty double z\n"
      "element face " +
      std::to_string(mesh.triangles.size()) +
      "\nproperty list uchar int vertex_indices\nproperty uchar red\n"
      "property uchar green\nproperty uchar blue\n"
      "property double fulfillment\nend_header\n";
  for (const Vec3& v : mesh.vertices) {
    out += FormatDouble(v.x()) + " " + FormatDouble(v.y()) + " " +
           FormatDouble(v.z()) + "\n";
  }
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    const double f =
        i < mesh.patches.size()
            ? std::clamp(mesh.patches[i].current_fulfillment, 0.0, 1.0)
            : 0.0;
    const int red = static_cast<int>(std::lround(255.0 * f));
    const int blue = 255 - red;
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
           std::to_string(t[2]) + " " + std::to_string(red) + " 0 " +
           std::to_string(blue) + " " + FormatDouble(f) + "\n";
  }
  return out;
}

}  // namespace

void WriteOutputs(const RankingResult& result, const SurfaceMesh& mesh,
                  const std::vector<Camera>& cameras,
                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  WriteFile(dir / "ranking.json",
            RankingToJson(result, cameras).dump(2) + "\n");
  WriteFile(dir / "curve.csv", CurveCsv(FulfillmentCurve(result.entries)));
  WriteFile(dir / "fulfillment.ply", FulfillmentPly(mesh));
}

void RunConfig::Validate() const {
  quality.Validate();
  for (const auto& [name, path] :
       {std::pair{"cameras", cameras}, std::pair{"cloud", cloud},
        std::pair{"mesh", mesh}}) {
    if (path.empty()) throw ConfigError(std::string(name) + " path missing");
    if (!std::filesystem::exists(path)) {
      throw ConfigError(std::string(name) + " not found: " + path.string());
    }
  }
  if (confidence != "heuristic" && !std::filesystem::is_directory(confidence)) {
    throw ConfigError("confidence directory not found: " + confidence);
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

RunConfig ParseRunConfig(const json& j) {
  if (!j.is_object()) throw ConfigError("run config: expected an object");
  RunConfig rc;
  json quality = json::object();
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "cameras")
        rc.cameras = value.get<std::string>();
      else if (key == "cloud")
        rc.cloud = value.get<std::string>();
      else if (key == "mesh")
        rc.mesh = value.get<std::string>();
      else if (key == "confidence")
        rc.confidence = value.get<std::string>();
      else if (key == "output")
        rc.output = value.get<std::string>();
      else if (key == "prepare_mesh")
        rc.prepare_mesh = value.get<bool>();
      else if (key == "threads")
        rc.threads = value.get<int>();
      else
        quality[key] = value;
    } catch (const json::exception& e) {
      throw ConfigError("run config: key '" + key + "': " + e.what());
    }
  }
  ApplyConfigJson(quality, rc.quality);
  return rc;
}

RunConfig ReadRunConfig(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": byte " + std::to_string(e.byte) +
                      ": " + e.what());
  }
  RunConfig rc = ParseRunConfig(j);
  // Relative paths are resolved against the config file's directory.
  const auto base = path.parent_path();
  for (auto* p : {&rc.cameras, &rc.cloud, &rc.mesh, &rc.output}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  if (rc.confidence != "heuristic" &&
      std::filesystem::path(rc.confidence).is_relative()) {
    rc.confidence = (base / rc.confidence).string();
  }
  return rc;
}

}  // namespace mvsprio
