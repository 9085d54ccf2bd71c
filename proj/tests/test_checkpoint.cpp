#include "lodforge/checkpoint.hpp"
#include "lodforge/error.hpp"
#include "lodforge/synth.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace lodforge;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lodforge_ckpt_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("stage checkpoints reload byte for byte") {
  const fs::path dir = scratch("stages");
  const SynthResult r = make_scene(SynthScene::FullHouse);
  PipelineConfig cfg;
  const DetectResult d = run_detect(InputModel{r.mesh, "house.obj"}, cfg);
  save_detect(dir / "a.json", d);
  save_detect(dir / "b.json", load_detect(dir / "a.json"));
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

  const AnalysisResult a = run_analyze(load_detect(dir / "a.json"), cfg);
  save_analysis(dir / "c.json", a);
  save_analysis(dir / "d.json", load_analysis(dir / "c.json"));
  CHECK(slurp(dir / "c.json") == slurp(dir / "d.json"));

  // Stages downstream of a reloaded checkpoint behave as if run in memory.
  const TreeResult t1 = run_build(a, cfg);
  const TreeResult t2 = run_build(load_analysis(dir / "c.json"), cfg);
  save_tree(dir / "e.json", t1);
  save_tree(dir / "f.json", t2);
  CHECK(slurp(dir / "e.json") == slurp(dir / "f.json"));
  save_tree(dir / "g.json", load_tree(dir / "e.json"));
  CHECK(slurp(dir / "e.json") == slurp(dir / "g.json"));
  CHECK(run_traverse(load_tree(dir / "e.json"), cfg).models.size() == run_traverse(t1, cfg).models.size());
  fs::remove_all(dir);
}

TEST_CASE("manifest round trip") {
  Manifest m;
  m.input = "in.obj";
  m.params.detect.epsilon = 0.2;
  m.params.merge_k = 7;
  m.params.interp_pct = 0.65;
  m.levels = 2;
  ManifestModel a;
  a.file = model_file_name(0);
  a.faces = 6;
  ManifestModel b;
  b.file = model_file_name(1);
  b.tag = CandidateTag::Interpolation;
  b.level = 1;
  b.steps = 1;
  b.cuts = 9;
  b.diff_sum = 12.5;
  b.faces = 20;
  b.s = 0.01;
  b.e1 = 0.5;
  b.e2 = 0.25;
  m.models = {a, b};
  const std::string text = manifest_to_string(m);
  CHECK(manifest_to_string(manifest_from_string(text)) == text);
  const Manifest back = manifest_from_string(text);
  CHECK(back.models[1].tag == CandidateTag::Interpolation);
  CHECK(back.models[1].e2 == 0.25);
  CHECK_FALSE(back.models[0].s);
  CHECK(back.params.merge_k == 7);
  CHECK(model_file_name(3) == "model_003.obj");
  CHECK(text.find("\"s\": null") != std::string::npos);
}

TEST_CASE("selection and summary files") {
  const fs::path dir = scratch("files");
  save_selection(dir / kSelectionFile, {0, 4, 2});
  CHECK(load_selection(dir / kSelectionFile) == std::vector<int>{0, 4, 2});
  update_summary(dir / kSummaryFile, {{"P", 31}, {"T1", 0.5}});
  update_summary(dir / kSummaryFile, {{"T2", 0.25}});
  const std::string s = slurp(dir / kSummaryFile);
  CHECK(s.find("\"P\": 31") != std::string::npos);
  CHECK(s.find("\"T1\": 0.5") != std::string::npos);
  CHECK(s.find("\"T2\": 0.25") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("missing or malformed checkpoints name the file") {
  const fs::path dir = scratch("missing");
  try {
    load_detect(dir / kPrimitivesFile);
    FAIL("expected CheckpointError");
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find(kPrimitivesFile) != std::string::npos);
  }
  std::ofstream(dir / kAnalysisFile) << "{\"kind\": \"lodtree\"}";
  CHECK_THROWS_AS(load_analysis(dir / kAnalysisFile), CheckpointError);
  std::ofstream(dir / kTreeFile) << "not json";
  CHECK_THROWS_AS(load_tree(dir / kTreeFile), CheckpointError);
  CHECK_THROWS_AS(load_manifest(dir / kManifestFile), CheckpointError);
  fs::remove_all(dir);
}
