#pragma once

#include "lodforge/pipeline.hpp"
#include "lodforge/synth.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace lodforge {

inline constexpr const char* kPrimitivesFile = "primitives.json";
inline constexpr const char* kAnalysisFile = "analysis.json";
inline constexpr const char* kTreeFile = "lodtree.json";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kSelectionFile = "selection.json";

// Loaders throw CheckpointError naming the file when it is missing or
// malformed. Timings are not stored.

void save_detect(const std::filesystem::path& path, const DetectResult& r);
DetectResult load_detect(const std::filesystem::path& path);

void save_analysis(const std::filesystem::path& path, const AnalysisResult& r);
AnalysisResult load_analysis(const std::filesystem::path& path);

void save_tree(const std::filesystem::path& path, const TreeResult& r);
TreeResult load_tree(const std::filesystem::path& path);

std::string manifest_to_string(const Manifest& m);
Manifest manifest_from_string(const std::string& text);
void save_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest load_manifest(const std::filesystem::path& path);

/// Steps listed in a selection.json `{"selected": [...]}`.
std::vector<int> load_selection(const std::filesystem::path& path);
void save_selection(const std::filesystem::path& path, const std::vector<int>& steps);

std::string truth_to_string(const SynthTruth& t);
void save_truth(const std::filesystem::path& path, const SynthTruth& t);

/// Per-model metrics as CSV: steps,tag,level,cuts,faces,s,e1,e2.
void save_metrics_csv(const std::filesystem::path& path, const Manifest& m);

/// Merges counts and timings into the flat object in summary.json.
void update_summary(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, double>>& fields);
std::vector<std::pair<std::string, double>> summary_fields(const PipelineSummary& s);

}  // namespace lodforge
