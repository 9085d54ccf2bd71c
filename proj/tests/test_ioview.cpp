#include "lodforge/error.hpp"
#include "lodforge/ioview.hpp"
#include "lodforge/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace lodforge;

namespace {

struct Analysis {
  SynthResult scene;
  std::vector<PlanarPrimitive> prims;
  Partition part;
  std::vector<Region> regions;
  StructureSet structs;
  std::vector<Cluster> clusters;
  std::vector<LevelSet> levels;
};

Analysis analyse(SynthScene which) {
  Analysis a;
  a.scene = make_scene(which);
  const InputModel in{a.scene.mesh, ""};
  DetectParams dp;
  dp.alpha = a.scene.truth.alpha;
  a.prims = detect_planes(in, dp);
  a.part = build_partition(a.prims, bbox(in, 0.01));
  std::vector<const AlphaShape*> shapes;
  for (const auto& p : a.prims) shapes.push_back(&p.alpha_shape);
  const CellLabels labels = label_cells(a.part.complex, shapes, 100);
  a.regions = merge_regions(a.part.complex, labels.label);
  a.structs = classify_structures(a.part.complex, a.regions);
  a.clusters = cluster_stage1(a.structs);
  a.levels = cluster_stage2(a.clusters);
  return a;
}

std::vector<double> sorted_volumes(const StructureSet& s, StructureKind kind) {
  std::vector<double> v;
  for (const auto& st : s.structures) {
    if (st.kind == kind) v.push_back(st.volume);
  }
  std::sort(v.begin(), v.end());
  return v;
}


}  // namespace

TEST_CASE("mean shift recovers well separated groups") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double bw = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
    const int k = std::uniform_int_distribution<int>(1, 5)(rng);
    std::uniform_real_distribution<double> jitter(-0.4 * bw, 0.4 * bw);
    std::vector<double> values;
    std::vector<int> truth;
    std::vector<double> means(size_t(k), 0.0);
    std::vector<int> counts(size_t(k), 0);
    double centre = std::uniform_real_distribution<double>(-10, 10)(rng);
    for (int g = 0; g < k; ++g) {
      const int n = std::uniform_int_distribution<int>(1, 12)(rng);
      for (int i = 0; i < n; ++i) {
        values.push_back(centre + jitter(rng));
        truth.push_back(g);
        means[size_t(g)] += values.back();
        ++counts[size_t(g)];
      }
      centre += std::uniform_real_distribution<double>(3.0, 6.0)(rng) * bw;
    }
    std::vector<size_t> perm(values.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> shuffled;
    for (size_t i : perm) shuffled.push_back(values[i]);

    const MeanShift ms = mean_shift_1d(shuffled, bw);
    REQUIRE(ms.modes.size() == size_t(k));
    for (size_t i = 0; i < perm.size(); ++i) CHECK(ms.assignment[i] == truth[perm[i]]);
    for (int g = 0; g < k; ++g) {
      CHECK(ms.modes[size_t(g)] == doctest::Approx(means[size_t(g)] / counts[size_t(g)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("mean shift matches an exhaustive fixed-point oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 20)(rng);
    const double bw = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    std::uniform_real_distribution<double> u(0, 30);
    std::vector<double> values;
    for (int i = 0; i < n; ++i) values.push_back(u(rng));
    const MeanShift ms = mean_shift_1d(values, bw);
    const auto expected = oracle::exhaustive_mean_shift(values, bw);
    CHECK(ms.assignment == expected);
    CHECK(ms.modes.size() == size_t(*std::max_element(expected.begin(), expected.end()) + 1));
  }
}

TEST_CASE("mean shift edge cases") {
  CHECK(mean_shift_1d(std::vector<double>{}, 1.0).modes.empty());
  const MeanShift one = mean_shift_1d(std::vector<double>{3.0}, 1.0);
  CHECK(one.modes == std::vector<double>{3.0});
  const MeanShift same = mean_shift_1d(std::vector<double>{2.0, 2.0, 2.0}, 1.0);
  CHECK(same.modes.size() == 1);
}

TEST_CASE("full house structures match the construction") {
  const Analysis a = analyse(SynthScene::FullHouse);
  const SynthTruth& t = a.scene.truth;
  CHECK(a.structs.addon_count() == t.addons);
  CHECK(a.structs.cutout_count() == t.cutouts);
  const auto add = sorted_volumes(a.structs, StructureKind::Addon);
  const auto cut = sorted_volumes(a.structs, StructureKind::Cutout);
  auto tadd = t.addon_volumes, tcut = t.cutout_volumes;
  std::sort(tadd.begin(), tadd.end());
  std::sort(tcut.begin(), tcut.end());
  REQUIRE(add.size() == tadd.size());
  REQUIRE(cut.size() == tcut.size());
  for (size_t i = 0; i < add.size(); ++i) CHECK(add[i] == doctest::Approx(tadd[i]).epsilon(1e-6));
  for (size_t i = 0; i < cut.size(); ++i) CHECK(cut[i] == doctest::Approx(tcut[i]).epsilon(1e-6));

  CHECK(int(a.levels.size()) == t.levels);
  for (size_t i = 0; i < a.levels.size(); ++i) {
    CHECK(a.levels[i].id == int(i) + 1);
    if (i > 0) CHECK(a.levels[i - 1].mean_volume > a.levels[i].mean_volume);
  }
  for (const auto& c : a.clusters) {
    CHECK(c.level >= 1);
    CHECK(c.level <= int(a.levels.size()));
  }
  // All windows share one cluster.
  int window_clusters = 0;
  for (const auto& c : a.clusters) window_clusters += c.kind == StructureKind::Cutout;
  CHECK(window_clusters == 1);
}

TEST_CASE("regions partition the cells") {
  const Analysis a = analyse(SynthScene::BoxChimney);
  std::vector<int> seen(a.part.complex.cells.size(), 0);
  double in_volume = 0;
  for (const auto& r : a.regions) {
    for (int c : r.cells) ++seen[size_t(c)];
    if (r.label == Label::In) in_volume += r.volume;
  }
  for (int s : seen) CHECK(s == 1);
  CHECK(in_volume == doctest::Approx(a.scene.truth.volume).epsilon(1e-9));
  CHECK(a.structs.core_interior >= 0);
  CHECK(a.structs.core_exterior >= 0);
  CHECK(a.structs.addon_count() == 1);
  CHECK(a.structs.cutout_count() == 0);
}

TEST_CASE("sorted primitives put principal planes first by area") {
  Analysis a = analyse(SynthScene::FullHouse);
  const ScaleSortedPrimitives s = sort_primitives(a.prims, a.structs, a.clusters, a.levels);
  REQUIRE(s.level_count() == a.scene.truth.levels);
  const std::set<int> principal(a.structs.principal.begin(), a.structs.principal.end());
  CHECK(std::set<int>(s.levels[0].begin(), s.levels[0].end()) == principal);
  const auto& s0 = s.levels[0];
  for (size_t i = 1; i < s0.size(); ++i) CHECK(a.prims[size_t(s0[i - 1])].area >= a.prims[size_t(s0[i])].area);
  for (const auto& g : s.groups) {
    for (size_t i = 1; i < g.primitives.size(); ++i) {
      CHECK(a.prims[size_t(g.primitives[i - 1])].area >= a.prims[size_t(g.primitives[i])].area);
    }
  }
  const auto order = s.order();
  CHECK(std::set<int>(order.begin(), order.end()).size() == order.size());
  CHECK(std::equal(s.levels[0].begin(), s.levels[0].end(), order.begin()));
}

TEST_CASE("no interior region is an error") {
  CellComplex cx;
  cx.box.min = Point3(0, 0, 0);
  cx.box.max = Point3(1, 1, 1);
  cx.cells.push_back(box_cell(cx.box, {0, 1, 2, 3, 4, 5}));
  cx.cell_facets.emplace_back();
  const std::vector<Label> labels{Label::Out};
  const auto regions = merge_regions(cx, labels);
  CHECK_THROWS_AS(classify_structures(cx, regions), NoInterior);
}
