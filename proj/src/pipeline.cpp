#include "lodforge/pipeline.hpp"

#include "lodforge/checkpoint.hpp"
#include "lodforge/error.hpp"
#include "lodforge/io.hpp"

#include <chrono>
#include <cstdio>
#include <regex>

namespace lodforge {

namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

Vec3 PipelineConfig::up() const {
  switch (up_axis) {
    case 'x': return Vec3::UnitX();
    case 'y': return Vec3::UnitY();
    default: return Vec3::UnitZ();
  }
}

void PipelineConfig::validate() const {
  detect.validate();
  if (merge_k < 1) throw Error("merge-k must be at least 1");
  if (!(interp_pct > 0.0 && interp_pct < 1.0)) throw Error("interp-pct must lie in (0, 1)");
  if (rays < 1) throw Error("rays must be at least 1");
  if (rmse_samples < 1) throw Error("rmse-samples must be at least 1");
  if (up_axis != 'x' && up_axis != 'y' && up_axis != 'z') throw Error("up-axis must be x, y or z");
}

std::string merge_metric_name(MergeMetric metric) {
  return metric == MergeMetric::PerStructure ? "per-structure" : "per-cluster";
}

std::optional<MergeMetric> parse_merge_metric(const std::string& name) {
  if (name == "per-structure") return MergeMetric::PerStructure;
  if (name == "per-cluster") return MergeMetric::PerCluster;
  return std::nullopt;
}

DetectResult run_detect(const InputModel& input, const PipelineConfig& config) {
  config.validate();
  Stopwatch clock;
  DetectResult r;
  r.input = input.source;
  r.config = config;
  const SampleSet samples = make_samples(input);
  r.samples = samples.size();
  r.primitives = detect_planes(samples, input, config.detect);
  r.box = bbox(input, 0.01);
  r.seconds = clock.seconds();
  return r;
}

AnalysisResult run_analyze(const DetectResult& detected, const PipelineConfig& config) {
  config.validate();
  Stopwatch clock;
  AnalysisResult r;
  r.input = detected.input;
  r.config = config;
  r.box = detected.box;
  r.detected = detected.primitives.size();
  r.primitives = detected.primitives;

  const Partition part = build_partition(r.primitives, r.box, {});
  r.cells = part.complex.cells.size();
  std::vector<const AlphaShape*> shapes;
  for (const auto& p : r.primitives) shapes.push_back(&p.alpha_shape);
  const CellLabels labels = label_cells(part.complex, shapes, config.rays);
  r.regions = merge_regions(part.complex, labels.label);
  r.structures = classify_structures(part.complex, r.regions);
  r.clusters = cluster_stage1(r.structures);
  r.levels = cluster_stage2(r.clusters);

  RegularizeParams rp;
  rp.epsilon = config.detect.epsilon;
  rp.alpha = config.detect.alpha;
  rp.up = config.up();
  r.regularization = regularize(r.primitives, r.structures, r.clusters, part.complex, r.regions, rp);
  r.sorted = sort_primitives(r.primitives, r.structures, r.clusters, r.levels);
  r.seconds = clock.seconds();
  return r;
}

TreeResult run_build(const AnalysisResult& analysis, const PipelineConfig& config) {
  config.validate();
  Stopwatch clock;
  TreeResult r;
  r.input = analysis.input;
  r.config = config;
  r.detected = analysis.detected;
  const std::vector<int> order = analysis.sorted.order();
  r.sorted = order.size();
  r.tree = build_lod_tree(analysis.primitives, analysis.sorted, analysis.box, config.merge_k,
                          config.merge_metric);
  compute_labels(r.tree, analysis.primitives, analysis.sorted, config.rays);
  compute_diff_values(r.tree);
  r.seconds = clock.seconds();

  std::vector<PlanarPrimitive> list;
  for (int id : order) list.push_back(analysis.primitives[size_t(id)]);
  r.bsp_cuts = int(build_partition(list, analysis.box, {CutOrder::LargestFragment, FragmentExtent::ConvexHull})
                       .trace.size());
  return r;
}

Traversal run_traverse(const TreeResult& tree, const PipelineConfig& config) {
  config.validate();
  return traverse(tree.tree, config.interp_pct);
}

std::string model_file_name(int steps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "model_%03d.obj", steps);
  return buf;
}

Manifest export_candidates(const Traversal& traversal, const TreeResult& tree,
                           const PipelineConfig& config, const fs::path& out_dir) {
  if (traversal.models.empty()) throw Error("no candidate models to export");
  fs::create_directories(out_dir);
  static const std::regex stale(R"(model_\d+\.obj)");
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), stale)) {
      fs::remove(entry.path());
    }
  }
  Manifest m;
  m.input = tree.input;
  m.params = config;
  m.levels = tree.tree.level_count;
  for (const auto& model : traversal.models) {
    ManifestModel e;
    e.file = model_file_name(model.steps);
    e.tag = model.tag;
    e.level = model.level;
    e.steps = model.steps;
    e.cuts = model.cuts;
    e.diff_sum = model.diff_sum;
    e.faces = model.faces;
    save_obj(out_dir / e.file, model.mesh);
    m.models.push_back(std::move(e));
  }
  save_manifest(out_dir / kManifestFile, m);
  return m;
}

PipelineSummary run_pipeline(const fs::path& input, const fs::path& out_dir, const PipelineConfig& config) {
  InputModel model = load_input(input);
  model.source = input.string();
  return run_pipeline(model, out_dir, config);
}

PipelineSummary run_pipeline(const InputModel& model, const fs::path& out_dir, const PipelineConfig& config) {
  config.validate();
  fs::create_directories(out_dir);
  PipelineSummary s;
  const DetectResult det = run_detect(model, config);
  save_detect(out_dir / kPrimitivesFile, det);
  s.primitives = det.primitives.size();
  s.t_detect = det.seconds;

  const AnalysisResult ana = run_analyze(det, config);
  save_analysis(out_dir / kAnalysisFile, ana);
  s.addons = ana.structures.addon_count();
  s.cutouts = ana.structures.cutout_count();
  s.clusters = int(ana.clusters.size());
  s.levels = ana.sorted.level_count();
  s.t1 = ana.seconds;

  const TreeResult tree = run_build(ana, config);
  save_tree(out_dir / kTreeFile, tree);
  s.sorted = tree.sorted;
  s.cells = tree.tree.complex.cells.size();
  s.nodes = tree.tree.nodes.size();
  s.merged_nodes = tree.tree.merged_nodes;
  s.bsp_cuts = tree.bsp_cuts;
  s.t2 = tree.seconds;

  Stopwatch clock;
  const Traversal tr = run_traverse(tree, config);
  export_candidates(tr, tree, config, out_dir);
  s.t3 = clock.seconds();
  s.lod_cuts = tr.models.empty() ? 0 : tr.models.back().cuts;
  for (const auto& m : tr.models) (m.tag == CandidateTag::Anchor ? s.anchors : s.interpolations)++;

  fs::remove(out_dir / kSummaryFile);
  update_summary(out_dir / kSummaryFile, summary_fields(s));
  return s;
}

}  // namespace lodforge
