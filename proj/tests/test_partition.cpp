#include "lodforge/error.hpp"
#include "lodforge/partition.hpp"
#include "lodforge/synth.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace lodforge;

namespace {

Aabb unit_box() {
  Aabb b;
  b.min = Point3(0, 0, 0);
  b.max = Point3(1, 1, 1);
  return b;
}

// Axis-aligned square primitive covering the whole box section at `offset`.
PlanarPrimitive slab(int id, int axis, double offset) {
  PlanarPrimitive p;
  p.id = id;
  Vec3 n = Vec3::Zero();
  n[axis] = 1;
  p.plane = PlaneEq{n, offset};
  const int u = (axis + 1) % 3, v = (axis + 2) % 3;
  for (double a : {0.0, 1.0})
    for (double b : {0.0, 1.0}) {
      Point3 q;
      q[axis] = offset;
      q[u] = a;
      q[v] = b;
      p.support.push_back(q);
    }
  refresh_footprint(p, 7.0);
  return p;
}

std::vector<PlanarPrimitive> thirds() {
  std::vector<PlanarPrimitive> prims;
  for (int axis = 0; axis < 3; ++axis) {
    prims.push_back(slab(int(prims.size()), axis, 1.0 / 3));
    prims.push_back(slab(int(prims.size()), axis, 2.0 / 3));
  }
  return prims;
}

double surface_area(const PolyhedralCell& c) {
  double a = 0;
  for (const auto& f : c.faces) a += f.polygon.area();
  return a;
}

}  // namespace

TEST_CASE("cube cut in thirds gives 27 cells with distinct sign vectors") {
  const auto prims = thirds();
  for (auto extent : {FragmentExtent::FullPlane, FragmentExtent::ConvexHull}) {
    const Partition part = build_partition(prims, unit_box(), {CutOrder::LargestFragment, extent});
    REQUIRE(part.complex.cells.size() == 27);
    std::set<std::vector<int>> signs;
    double total = 0;
    for (const auto& c : part.complex.cells) {
      const Point3 m = c.centroid();
      std::vector<int> sv;
      for (const auto& p : prims) sv.push_back(p.plane.signed_distance(m) > 0 ? 1 : -1);
      signs.insert(sv);
      CHECK(c.volume() == doctest::Approx(1.0 / 27));
      CHECK(is_closed(c, 1e-9));
      CHECK(is_convex(c, 1e-9));
      total += c.volume();
    }
    CHECK(signs.size() == 27);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(part.trace.size() == 26);  // each split adds one cell
    CHECK(part.primitive_plane.size() == prims.size());
  }
}

TEST_CASE("facets tile the cell boundaries") {
  const Partition part = build_partition(thirds(), unit_box());
  const auto& cx = part.complex;
  REQUIRE(cx.cell_facets.size() == cx.cells.size());
  int interior = 0, boundary = 0;
  for (const auto& f : cx.facets) {
    CHECK(f.cell_back != f.cell_front);
    if (f.cell_back == kOutside || f.cell_front == kOutside) {
      ++boundary;
    } else {
      ++interior;
      // The back cell lies behind the facet plane.
      const PlaneEq& pl = cx.planes.plane(f.plane_id);
      CHECK(pl.signed_distance(cx.cells[size_t(f.cell_back)].centroid()) < 0);
      CHECK(pl.signed_distance(cx.cells[size_t(f.cell_front)].centroid()) > 0);
    }
  }
  CHECK(boundary == 54);
  CHECK(interior == 54);
  for (size_t c = 0; c < cx.cells.size(); ++c) {
    double a = 0;
    for (int f : cx.cell_facets[c]) a += cx.facets[size_t(f)].polygon.area();
    CHECK(a == doctest::Approx(surface_area(cx.cells[c])));
  }
}

TEST_CASE("fibonacci directions are unit and balanced") {
  const auto d = fibonacci_directions(800);
  REQUIRE(d.size() == 800);
  Vec3 mean = Vec3::Zero();
  std::map<int, int> octants;
  for (const auto& v : d) {
    CHECK(v.norm() == doctest::Approx(1.0));
    mean += v;
    ++octants[(v.x() > 0) + 2 * (v.y() > 0) + 4 * (v.z() > 0)];
  }
  CHECK((mean / 800).norm() < 0.01);
  REQUIRE(octants.size() == 8);
  for (const auto& [k, n] : octants) CHECK(std::abs(n - 100) < 10);
}

TEST_CASE("facet alpha coverage") {
  const PlaneEq ground{Vec3::UnitZ(), 0.0};
  const ConvexPolygon3 facet{ground, {Point3(0, 0, 0), Point3(2, 0, 0), Point3(2, 2, 0), Point3(0, 2, 0)}};
  const std::vector<Point3> left{{0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {0, 2, 0}};
  const AlphaShape shape = compute_alpha_shape(left, ground, 7.0);
  CHECK(facet_alpha_coverage(facet, shape, 1e-9) == doctest::Approx(0.5));
  const std::vector<Point3> big{{-1, -1, 0}, {3, -1, 0}, {3, 3, 0}, {-1, 3, 0}};
  CHECK(facet_alpha_coverage(facet, compute_alpha_shape(big, ground, 7.0), 1e-9) == doctest::Approx(1.0));
  const PlaneEq lifted{Vec3::UnitZ(), 0.5};
  CHECK_THROWS_AS(facet_alpha_coverage(facet, compute_alpha_shape(left, lifted, 7.0), 1e-9), NotCoplanar);
}

TEST_CASE("lshape cell labels match solid membership") {
  const SynthResult r = make_scene(SynthScene::LShape);
  const InputModel in{r.mesh, ""};
  DetectParams dp;
  dp.alpha = r.truth.alpha;
  const auto prims = detect_planes(in, dp);
  CHECK(prims.size() == 8);
  const Partition part = build_partition(prims, bbox(in, 0.01));
  std::vector<const AlphaShape*> shapes;
  for (const auto& p : prims) shapes.push_back(&p.alpha_shape);
  const CellLabels labels = label_cells(part.complex, shapes, 100);
  REQUIRE(labels.label.size() == part.complex.cells.size());
  double in_volume = 0, total = 0;
  for (size_t c = 0; c < part.complex.cells.size(); ++c) {
    const auto& cell = part.complex.cells[c];
    const bool inside = r.solid.contains(chebyshev_center(cell));
    CHECK((labels.label[c] == Label::In) == inside);
    if (labels.label[c] == Label::In) in_volume += cell.volume();
    total += cell.volume();
  }
  CHECK(in_volume == doctest::Approx(r.truth.volume).epsilon(1e-9));
  CHECK(total == doctest::Approx(bbox(in, 0.01).volume()).epsilon(1e-9));
}

TEST_CASE("chebyshev centre is the deepest point") {
  const PolyhedralCell c = box_cell(unit_box(), {0, 1, 2, 3, 4, 5});
  CHECK((chebyshev_center(c) - Point3(0.5, 0.5, 0.5)).norm() < 1e-3);
}
