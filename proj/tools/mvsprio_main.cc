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

// Command-line front end: mesh preparation, ranking, synthetic strategy
// comparison and the confidence oracle check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvsprio/confidence.h"
#include "mvsprio/errors.h"
#include "mvsprio/io.h"
#include "mvsprio/mesh_prep.h"
#include "mvsprio/pipeline.h"
#include "mvsprio/random.h"
#include "mvsprio/sim_eval.h"

namespace mvsprio {
namespace {

// Quality flags shared by the subcommands. Values only override the config
// when given on the command line.
struct QualityFlags {
  QualityConfig values;

  template <typename T>
  void Add(CLI::App* app, const std::string& name, T QualityConfig::* field,
           const std::string& help) {
    CLI::Option* opt = app->add_option(name, values.*field, help);
    pending_.push_back(
        {opt, [field](const QualityConfig& from, QualityConfig& to) {
           to.*field = from.*field;
         }});
  }

  void Register(CLI::App* app) {
    Add(app, "--gsd", &QualityConfig::gsd_desired, "desired GSD g_d [m/px]");
    Add(app, "--accuracy", &QualityConfig::accuracy_desired,
        "desired 3D accuracy a_d [m]");
    Add(app, "--alpha", &QualityConfig::alpha,
        "weight of resolution vs. accuracy");
    Add(app, "--min-cameras", &QualityConfig::min_cameras, "coverage filter x");
    Add(app, "--partners", &QualityConfig::partners, "partners per cluster k");
    Add(app, "--top-n", &QualityConfig::top_connected, "partner pool size n");
    Add(app, "--combinations", &QualityConfig::combinations,
        "partner combinations y");
    Add(app, "--triangle-fraction", &QualityConfig::triangle_fraction,
        "triangle subsample divisor z");
    Add(app, "--simplify-factor", &QualityConfig::simplify_factor,
        "simplification edge factor r");
    Add(app, "--subdivide-factor", &QualityConfig::subdivide_factor,
        "subdivision edge factor e");
    Add(app, "--pixel-noise", &QualityConfig::pixel_noise,
        "image noise sigma [px]");
    Add(app, "--seed", &QualityConfig::rng_seed, "random seed");
  }

  void ApplyTo(QualityConfig& config) const {
    for (const auto& p : pending_) {
      if (p.first->count() > 0) p.second(values, config);
    }
  }

 private:
  std::vector<std::pair<
      CLI::Option*, std::function<void(const QualityConfig&, QualityConfig&)>>>
      pending_;
};

struct PrepArgs {
  std::string mesh;
  std::string output = "prepared.ply";
  bool ascii = false;
  bool skip_simplify = false;
};

int RunPrep(const PrepArgs& args, const QualityFlags& flags) {
  QualityConfig config;
  flags.ApplyTo(config);
  config.Validate();
  const SurfaceMesh mesh = ReadPly(args.mesh);
  mesh.Validate();
  const MeshStats before = ComputeMeshStats(mesh);
  SurfaceMesh prepared;
  bool exhausted = false;
  if (args.skip_simplify) {
    prepared = Subdivide(mesh, config.gsd_desired, config.subdivide_factor);
  } else {
    prepared = PrepareMesh(mesh, config, &exhausted);
  }
  const MeshStats after = ComputeMeshStats(prepared);
  WritePly(args.output, prepared,
           args.ascii ? PlyEncoding::kAscii : PlyEncoding::kBinaryLittleEndian);
  std::printf("triangles %d -> %d, 5th percentile edge %.6g -> %.6g m%s\n",
              before.triangle_count, after.triangle_count, before.percentile_05,
              after.percentile_05,
              exhausted ? " (simplification exhausted)" : "");
  return 0;
}

struct RankArgs {
  std::string config;
  std::string cameras;
  std::string cloud;
  std::string mesh;
  std::string confidence;
  std::string output;
  bool prepare_mesh = false;
  bool images = false;
  int threads = 0;
};

int RunRank(const RankArgs& args, const QualityFlags& flags) {
  RunConfig rc;
  if (!args.config.empty()) rc = ReadRunConfig(args.config);
  if (!args.cameras.empty()) rc.cameras = args.cameras;
  if (!args.cloud.empty()) rc.cloud = args.cloud;
  if (!args.mesh.empty()) rc.mesh = args.mesh;
  if (!args.confidence.empty()) rc.confidence = args.confidence;
  if (!args.output.empty()) rc.output = args.output;
  if (args.prepare_mesh) rc.prepare_mesh = true;
  if (args.threads > 0) rc.threads = args.threads;
  flags.ApplyTo(rc.quality);
  rc.Validate();

  Scene scene = LoadScene(rc.cameras, rc.cloud, rc.mesh);
  if (rc.prepare_mesh) scene.mesh = PrepareMesh(scene.mesh, rc.quality);

  std::unique_ptr<ConfidenceModel> model;
  if (rc.confidence == "heuristic") {
    auto heuristic = std::make_unique<HeuristicModel>();
    if (args.images) {
      const auto base = rc.cameras.parent_path();
      for (const Camera& c : scene.cameras) {
        if (c.image_path.empty()) continue;
        std::filesystem::path p = c.image_path;
        if (p.is_relative()) p = base / p;
        heuristic->SetImage(c.id, ReadPgm(p.string()));
      }
    }
    model = std::move(heuristic);
  } else {
    model = std::make_unique<FileBackedModel>(
        ReadConfidenceDirectory(rc.confidence, scene.cameras));
  }

  const PipelineResult run =
      RunPipeline(scene.cameras, scene.cloud, std::move(scene.mesh), *model,
                  rc.quality, rc.threads);
  for (const std::string& s : run.skipped) {
    std::fprintf(stderr, "skipped %s\n", s.c_str());
  }
  std::filesystem::create_directories(rc.output);
  WriteOutputs(run.ranking, run.mesh, scene.cameras, rc.output);
  const double final_value =
      run.ranking.entries.empty()
          ? 0.0
          : run.ranking.entries.back().cumulative_fulfillment;
  std::printf(
      "%zu clusters ranked (%zu built), final fulfillment %.6f, "
      "%llu gain evaluations\n",
      run.ranking.entries.size(), run.clusters.size(), final_value,
      static_cast<unsigned long long>(run.stats.gain_evaluations));
  return 0;
}

struct SimulateArgs {
  int seeds = 20;
  std::uint64_t first_seed = 1;
  int cameras = 200;
  int occluders = 8;
  std::string rig = "mixed";
  std::string output;
  int threads = 1;
};

int RunSimulate(const SimulateArgs& args, const QualityFlags& flags) {
  QualityConfig config;
  flags.ApplyTo(config);
  config.Validate();
  SceneSpec spec;
  spec.cameras = args.cameras;
  spec.occluders = args.occluders;
  if (args.rig == "grid")
    spec.rig = RigType::kGrid;
  else if (args.rig == "dome")
    spec.rig = RigType::kDome;
  else if (args.rig == "mixed")
    spec.rig = RigType::kMixed;
  else
    throw ConfigError("unknown rig '" + args.rig + "'");
  if (args.seeds < 1) throw ConfigError("--seeds must be >= 1");

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < args.seeds; ++i) seeds.push_back(args.first_seed + i);
  const std::vector<Strategy> strategies = {
      Strategy::kPrioritized, Strategy::kRandom, Strategy::kMaxPoints};
  const Comparison result = CompareStrategies(
      spec, config, strategies, DefaultDeciles(), seeds, args.threads);
  const std::string csv = ComparisonCsv(result);
  if (args.output.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    WriteFile(args.output, csv);
  }
  return 0;
}

struct OracleArgs {
  int max_k = 12;
  int vectors = 1000;
  std::uint64_t seed = 0;
  double tolerance = 1e-12;
};

int RunOracle(const OracleArgs& args) {
  if (args.max_k < 2 || args.max_k > 20) {
    throw ConfigError("--max-k must lie in [2, 20]");
  }
  std::mt19937_64 rng(HashCombine(args.seed, 0x0a11ce));
  double worst = 0.0;
  for (int k = 2; k <= args.max_k; ++k) {
    double worst_k = 0.0;
    for (int i = 0; i < args.vectors; ++i) {
      std::vector<double> p(k);
      for (double& v : p) v = UnitFromBits(rng());
      worst_k =
          std::max(worst_k, std::abs(KPartnerConfidence(p) - TreeOracle(p)));
    }
    std::printf("k=%2d max |delta| %.3g\n", k, worst_k);
    worst = std::max(worst, worst_k);
  }
  const bool ok = worst <= args.tolerance;
  std::printf("%s: max |delta| %.3g (tolerance %.3g)\n", ok ? "ok" : "FAIL",
              worst, args.tolerance);
  return ok ? 0 : static_cast<int>(ExitCode::kInvariantViolation);
}

}  // namespace
}  // namespace mvsprio

int main(int argc, char** argv) {
  using namespace mvsprio;
  CLI::App app{"View-cluster prioritization for multi-view stereo"};
  app.require_subcommand(1);

  PrepArgs prep_args;
  QualityFlags prep_flags;
  CLI::App* prep = app.add_subcommand("prep", "simplify and subdivide a mesh");
  prep->add_option("--mesh", prep_args.mesh, "input PLY")->required();
  prep->add_option("-o,--output", prep_args.output, "output PLY");
  prep->add_flag("--ascii", prep_args.ascii, "write ASCII PLY");
  prep->add_flag("--subdivide-only", prep_args.skip_simplify,
                 "skip simplification");
  prep_flags.Register(prep);

  RankArgs rank_args;
  QualityFlags rank_flags;
  CLI::App* rank = app.add_subcommand("rank", "rank view clusters");
  rank->add_option("-c,--config", rank_args.config, "run config JSON");
  rank->add_option("--cameras", rank_args.cameras, "cameras JSON");
  rank->add_option("--cloud", rank_args.cloud, "sparse cloud JSON");
  rank->add_option("--mesh", rank_args.mesh, "mesh PLY");
  rank->add_option("--confidence", rank_args.confidence,
                   "confidence grid directory or 'heuristic'");
  rank->add_option("-o,--output", rank_args.output, "output directory");
  rank->add_flag("--prepare-mesh", rank_args.prepare_mesh,
                 "simplify and subdivide the mesh first");
  rank->add_flag("--images", rank_args.images,
                 "use PGM images for the heuristic gradient gain");
  rank->add_option("--threads", rank_args.threads, "worker threads");
  rank_flags.Register(rank);

  SimulateArgs sim_args;
  QualityFlags sim_flags;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "compare ranking strategies on synthetic scenes");
  simulate->add_option("--seeds", sim_args.seeds, "number of scene seeds");
  simulate->add_option("--first-seed", sim_args.first_seed, "first scene seed");
  simulate->add_option("--cameras", sim_args.cameras, "cameras per scene");
  simulate->add_option("--occluders", sim_args.occluders,
                       "occluders per scene");
  simulate->add_option("--rig", sim_args.rig, "grid, dome or mixed");
  simulate->add_option("-o,--output", sim_args.output,
                       "CSV path (default stdout)");
  simulate->add_option("--threads", sim_args.threads, "worker threads");
  sim_flags.Register(simulate);

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "check k-partner confidence against the tree");
  oracle->add_option("--max-k", oracle_args.max_k, "largest k");
  oracle->add_option("--vectors", oracle_args.vectors, "vectors per k");
  oracle->add_option("--seed", oracle_args.seed, "random seed");
  oracle->add_option("--tolerance", oracle_args.tolerance, "allowed |delta|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfigError);
  }

  try {
    if (*prep) return RunPrep(prep_args, prep_flags);
    if (*rank) return RunRank(rank_args, rank_flags);
    if (*simulate) return RunSimulate(sim_args, sim_flags);
    if (*oracle) return RunOracle(oracle_args);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::kIoError);
  }
  return 0;
}
