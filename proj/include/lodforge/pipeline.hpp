#pragma once

#include "lodforge/ioview.hpp"
#include "lodforge/lodtree.hpp"
#include "lodforge/primitives.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lodforge {

struct PipelineConfig {
  DetectParams detect;
  int merge_k = 10;
  double interp_pct = 0.8;
  MergeMetric merge_metric = MergeMetric::PerStructure;
  char up_axis = 'z';
  int rays = 100;
  int rmse_samples = 100000;
  std::uint64_t seed = 0;

  Vec3 up() const;
  /// Throws Error on out-of-range values.
  void validate() const;
};

std::string merge_metric_name(MergeMetric metric);
std::optional<MergeMetric> parse_merge_metric(const std::string& name);

struct DetectResult {
  std::string input;
  PipelineConfig config;
  Aabb box;  ///< input bounds padded by 1 % per side
  size_t samples = 0;
  std::vector<PlanarPrimitive> primitives;
  double seconds = 0.0;
};

struct AnalysisResult {
  std::string input;
  PipelineConfig config;
  Aabb box;
  size_t detected = 0;  ///< P
  std::vector<PlanarPrimitive> primitives;  ///< regularized; ids unchanged
  size_t cells = 0;
  std::vector<Region> regions;
  StructureSet structures;
  std::vector<Cluster> clusters;
  std::vector<LevelSet> levels;
  ScaleSortedPrimitives sorted;
  RegularizeReport regularization;
  double seconds = 0.0;  ///< T1
};

struct TreeResult {
  std::string input;
  PipelineConfig config;
  size_t detected = 0;
  size_t sorted = 0;     ///< S
  int bsp_cuts = 0;      ///< cuts of an area-sorted BSP over the same primitives
  LodTree tree;
  double seconds = 0.0;  ///< T2
};

struct ManifestModel {
  std::string file;
  CandidateTag tag = CandidateTag::Anchor;
  int level = 0;
  int steps = 0;
  int cuts = 0;
  double diff_sum = 0.0;
  int faces = 0;
  std::optional<double> s, e1, e2;
};

struct Manifest {
  int version = 1;
  std::string input;
  PipelineConfig params;
  int levels = 0;
  std::vector<ManifestModel> models;
};

DetectResult run_detect(const InputModel& input, const PipelineConfig& config);
AnalysisResult run_analyze(const DetectResult& detected, const PipelineConfig& config);
TreeResult run_build(const AnalysisResult& analysis, const PipelineConfig& config);
Traversal run_traverse(const TreeResult& tree, const PipelineConfig& config);

/// One OBJ per model plus manifest.json in `out_dir`. Earlier model files
/// in `out_dir` are removed.
Manifest export_candidates(const Traversal& traversal, const TreeResult& tree,
                           const PipelineConfig& config, const std::filesystem::path& out_dir);

std::string model_file_name(int steps);

struct PipelineSummary {
  size_t primitives = 0;  ///< P
  size_t sorted = 0;      ///< S
  int addons = 0;
  int cutouts = 0;
  int clusters = 0;
  int levels = 0;
  size_t cells = 0;
  size_t nodes = 0;
  int merged_nodes = 0;
  int lod_cuts = 0;
  int bsp_cuts = 0;
  int anchors = 0;
  int interpolations = 0;
  double t_detect = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
};

/// All stages with checkpoints written to `out_dir`.
PipelineSummary run_pipeline(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                             const PipelineConfig& config);
PipelineSummary run_pipeline(const InputModel& input, const std::filesystem::path& out_dir,
                             const PipelineConfig& config);

}  // namespace lodforge
