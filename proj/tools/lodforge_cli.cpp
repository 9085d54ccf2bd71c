#include "lodforge/checkpoint.hpp"
#include "lodforge/error.hpp"
#include "lodforge/io.hpp"
#include "lodforge/metrics.hpp"
#include "lodforge/pipeline.hpp"
#include "lodforge/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace lodforge;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  PipelineConfig config;
  std::string input;
  std::string out = "out";
  std::string format;
  std::string merge_metric = "per-structure";
  std::string up_axis = "z";
  std::vector<CLI::Option*> tuning;

  void add_tuning(CLI::App* app) {
    const std::vector<CLI::Option*> opts = {
        app->add_option("--epsilon", config.detect.epsilon, "max point-to-plane distance (m)"),
        app->add_option("--theta", config.detect.theta, "max normal deviation (degrees)"),
        app->add_option("--sigma", config.detect.sigma, "min inliers per primitive"),
        app->add_option("--alpha", config.detect.alpha, "alpha-shape radius (m)"),
        app->add_option("--merge-k", config.merge_k, "merge threshold K"),
        app->add_option("--interp-pct", config.interp_pct, "interpolation threshold"),
        app->add_option("--merge-metric", merge_metric, "per-structure or per-cluster")
            ->check(CLI::IsMember({"per-structure", "per-cluster"})),
        app->add_option("--up-axis", up_axis, "x, y or z")->check(CLI::IsMember({"x", "y", "z"})),
        app->add_option("--rays", config.rays, "rays per cell"),
        app->add_option("--rmse-samples", config.rmse_samples, "surface samples for RMSE"),
        app->add_option("--seed", config.seed, "RMSE sampling and synthetic noise seed"),
    };
    tuning.insert(tuning.end(), opts.begin(), opts.end());
  }

  void finish() {
    config.merge_metric = *parse_merge_metric(merge_metric);
    config.up_axis = up_axis.at(0);
  }

  /// Checkpoint values overridden by the flags given on the command line.
  PipelineConfig merged(const PipelineConfig& stored) const {
    PipelineConfig c = stored;
    auto given = [&](const char* name) {
      for (auto* o : tuning)
        if (o->check_name(name) && o->count() > 0) return true;
      return false;
    };
    if (given("--epsilon")) c.detect.epsilon = config.detect.epsilon;
    if (given("--theta")) c.detect.theta = config.detect.theta;
    if (given("--sigma")) c.detect.sigma = config.detect.sigma;
    if (given("--alpha")) c.detect.alpha = config.detect.alpha;
    if (given("--merge-k")) c.merge_k = config.merge_k;
    if (given("--interp-pct")) c.interp_pct = config.interp_pct;
    if (given("--merge-metric")) c.merge_metric = config.merge_metric;
    if (given("--up-axis")) c.up_axis = config.up_axis;
    if (given("--rays")) c.rays = config.rays;
    if (given("--rmse-samples")) c.rmse_samples = config.rmse_samples;
    if (given("--seed")) c.seed = config.seed;
    return c;
  }
};

void validated(const PipelineConfig& c) {
  try {
    c.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

InputModel read_input(const std::string& path, const std::string& format) {
  if (path.empty()) throw UsageError("--input is required");
  if (!fs::exists(path)) throw UsageError("input file not found: " + path);
  if (!fs::is_regular_file(path)) throw UsageError("input is not a file: " + path);
  InputModel m;
  if (format.empty()) {
    m = load_input(path);
  } else {
    const auto f = parse_format(format);
    if (!f) throw UsageError("unknown format '" + format + "'");
    m = load_input(path, *f);
  }
  m.source = path;
  return m;
}

void print_table(const std::vector<std::pair<std::string, double>>& rows) {
  for (const auto& [k, v] : rows) std::printf("  %-15s %g\n", k.c_str(), v);
}

int cmd_detect(const Flags& f) {
  validated(f.config);
  const InputModel input = read_input(f.input, f.format);
  const DetectResult r = run_detect(input, f.config);
  save_detect(fs::path(f.out) / kPrimitivesFile, r);
  const std::vector<std::pair<std::string, double>> rows = {
      {"samples", double(r.samples)}, {"P", double(r.primitives.size())}, {"T_detect", r.seconds}};
  update_summary(fs::path(f.out) / kSummaryFile, rows);
  std::printf("detect: %s\n", (fs::path(f.out) / kPrimitivesFile).string().c_str());
  print_table(rows);
  return kOk;
}

int cmd_analyze(const Flags& f) {
  const DetectResult det = load_detect(fs::path(f.out) / kPrimitivesFile);
  const PipelineConfig config = f.merged(det.config);
  validated(config);
  const AnalysisResult r = run_analyze(det, config);
  save_analysis(fs::path(f.out) / kAnalysisFile, r);
  const std::vector<std::pair<std::string, double>> rows = {
      {"P", double(r.detected)},
      {"cells", double(r.cells)},
      {"regions", double(r.regions.size())},
      {"addons", double(r.structures.addon_count())},
      {"cutouts", double(r.structures.cutout_count())},
      {"clusters", double(r.clusters.size())},
      {"levels", double(r.sorted.level_count())},
      {"S", double(r.sorted.order().size())},
      {"T1", r.seconds}};
  update_summary(fs::path(f.out) / kSummaryFile, rows);
  std::printf("analyze: %s\n", (fs::path(f.out) / kAnalysisFile).string().c_str());
  print_table(rows);
  return kOk;
}

int cmd_build(const Flags& f) {
  const AnalysisResult ana = load_analysis(fs::path(f.out) / kAnalysisFile);
  const PipelineConfig config = f.merged(ana.config);
  validated(config);
  const TreeResult r = run_build(ana, config);
  save_tree(fs::path(f.out) / kTreeFile, r);
  const std::vector<std::pair<std::string, double>> rows = {
      {"S", double(r.sorted)},
      {"cells", double(r.tree.complex.cells.size())},
      {"nodes", double(r.tree.nodes.size())},
      {"merged_nodes", double(r.tree.merged_nodes)},
      {"bsp_cuts", double(r.bsp_cuts)},
      {"T2", r.seconds}};
  update_summary(fs::path(f.out) / kSummaryFile, rows);
  std::printf("build: %s\n", (fs::path(f.out) / kTreeFile).string().c_str());
  print_table(rows);
  return kOk;
}

int cmd_traverse(const Flags& f) {
  const TreeResult tree = load_tree(fs::path(f.out) / kTreeFile);
  const PipelineConfig config = f.merged(tree.config);
  validated(config);
  const auto start = std::chrono::steady_clock::now();
  const Traversal tr = run_traverse(tree, config);
  const Manifest m = export_candidates(tr, tree, config, f.out);
  const double t3 = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  int anchors = 0;
  for (const auto& x : m.models) anchors += x.tag == CandidateTag::Anchor;
  const std::vector<std::pair<std::string, double>> rows = {
      {"models", double(m.models.size())},
      {"anchors", double(anchors)},
      {"interpolations", double(int(m.models.size()) - anchors)},
      {"lod_cuts", double(m.models.back().cuts)},
      {"T3", t3}};
  update_summary(fs::path(f.out) / kSummaryFile, rows);
  std::printf("traverse: %s\n", (fs::path(f.out) / kManifestFile).string().c_str());
  print_table(rows);
  return kOk;
}

int cmd_metrics(const Flags& f, const std::string& selection) {
  const fs::path out(f.out);
  Manifest m = load_manifest(out / kManifestFile);
  std::vector<int> steps;
  if (!selection.empty()) {
    steps = load_selection(selection);
  } else if (fs::exists(out / kSelectionFile)) {
    steps = load_selection(out / kSelectionFile);
  } else {
    for (const auto& x : m.models) steps.push_back(x.steps);
  }
  validated(f.config);
  const InputModel input = read_input(f.input.empty() ? m.input : f.input, f.format);
  const double diagonal = bbox(input, 0.0).diagonal();
  std::printf("metrics: %zu model(s), diagonal %g\n", steps.size(), diagonal);
  std::printf("  %5s %-13s %5s %5s %5s %10s %8s %8s\n", "steps", "tag", "level", "cuts", "faces", "s", "e1%",
              "e2%");
  for (int step : steps) {
    auto it = std::find_if(m.models.begin(), m.models.end(), [&](const ManifestModel& x) { return x.steps == step; });
    if (it == m.models.end()) throw UsageError("selection lists unknown step " + std::to_string(step));
    const PolygonMesh mesh = load_polygon_obj(out / it->file);
    const ModelMetrics mm =
        evaluate_model(mesh, input, size_t(f.config.rmse_samples), diagonal, f.config.seed);
    if (input.is_mesh()) it->s = mm.s;
    it->e1 = mm.e1;
    it->e2 = mm.e2;
    std::printf("  %5d %-13s %5d %5d %5d %10.6f %8.4f %8.4f\n", it->steps, tag_name(it->tag).c_str(), it->level,
                it->cuts, it->faces, mm.s, mm.e1, mm.e2);
  }
  save_manifest(out / kManifestFile, m);
  save_metrics_csv(out / "metrics.csv", m);
  return kOk;
}

int cmd_pipeline(const Flags& f) {
  validated(f.config);
  const InputModel input = read_input(f.input, f.format);
  const PipelineSummary s = run_pipeline(input, f.out, f.config);
  std::printf("pipeline: %s\n", (fs::path(f.out) / kManifestFile).string().c_str());
  print_table(summary_fields(s));
  return kOk;
}

int cmd_synth(const Flags& f, const std::string& scene_name_arg, double noise, int windows, double resolution) {
  const auto scene = parse_scene(scene_name_arg);
  if (!scene) throw UsageError("unknown scene '" + scene_name_arg + "'");
  if (noise < 0) throw UsageError("--noise must be non-negative");
  SynthOptions so;
  so.noise_sigma = noise;
  so.seed = f.config.seed;
  so.windows = windows;
  so.resolution = resolution;
  const SynthResult r = make_scene(*scene, so);
  const fs::path out(f.out);
  fs::create_directories(out);
  const std::string name = scene_name(*scene);
  fs::path mesh_path;
  if (f.format.empty() || f.format == "obj") {
    mesh_path = out / (name + ".obj");
    save_obj(mesh_path, r.mesh);
  } else if (f.format == "ply") {
    mesh_path = out / (name + ".ply");
    save_ply(mesh_path, r.mesh);
  } else {
    throw UsageError("unknown format '" + f.format + "'");
  }
  save_truth(out / (name + ".truth.json"), r.truth);
  std::printf("synth: %s (%zu triangles)\n", mesh_path.string().c_str(), r.mesh.triangles.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-aware level-of-detail building models"};
  app.require_subcommand(1);
  Flags flags;
  std::string selection;
  std::string scene = "full_house";
  double noise = 0.0, resolution = 0.0;
  int windows = 4;

  auto add_io = [&](CLI::App* sub, bool input) {
    if (input) sub->add_option("--input", flags.input, "input OBJ or PLY");
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--format", flags.format, "obj or ply");
    flags.add_tuning(sub);
  };

  auto* detect = app.add_subcommand("detect", "detect planar primitives");
  add_io(detect, true);
  auto* analyze = app.add_subcommand("analyze", "in/out view analysis and scale sorting");
  add_io(analyze, false);
  auto* build = app.add_subcommand("build", "construct the LOD tree");
  add_io(build, false);
  auto* trav = app.add_subcommand("traverse", "extract candidate models");
  add_io(trav, false);
  auto* metrics = app.add_subcommand("metrics", "evaluate candidate models");
  add_io(metrics, true);
  metrics->add_option("--selection", selection, "selection.json (default: <out>/selection.json)");
  auto* pipeline = app.add_subcommand("pipeline", "run every stage");
  add_io(pipeline, true);
  auto* synth = app.add_subcommand("synth", "write a synthetic building");
  add_io(synth, false);
  synth->add_option("--scene", scene, "box, box_chimney, box_windows, lshape or full_house")->capture_default_str();
  synth->add_option("--noise", noise, "Gaussian vertex noise (m)");
  synth->add_option("--windows", windows, "window niches")->check(CLI::Range(1, 4));
  synth->add_option("--resolution", resolution, "grid spacing (m)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    flags.finish();
    if (detect->parsed()) return cmd_detect(flags);
    if (analyze->parsed()) return cmd_analyze(flags);
    if (build->parsed()) return cmd_build(flags);
    if (trav->parsed()) return cmd_traverse(flags);
    if (metrics->parsed()) return cmd_metrics(flags, selection);
    if (pipeline->parsed()) return cmd_pipeline(flags);
    if (synth->parsed()) return cmd_synth(flags, scene, noise, windows, resolution);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const CheckpointError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kUsageError;
}
