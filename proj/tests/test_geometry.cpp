#include "lodforge/geometry.hpp"

#include <doctest.h>

#include <random>

using namespace lodforge;

namespace {

Aabb unit_box() {
  Aabb b;
  b.min = Point3(0, 0, 0);
  b.max = Point3(1, 1, 1);
  return b;
}

bool inside_cell(const PolyhedralCell& c, const Point3& p) {
  for (const auto& f : c.faces) {
    if (f.polygon.plane.signed_distance(p) > 0) return false;
  }
  return true;
}

double mc_volume(const PolyhedralCell& c, const Aabb& bounds, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const Point3 p = bounds.min + (bounds.max - bounds.min).cwiseProduct(Point3(u(rng), u(rng), u(rng)));
    hits += inside_cell(c, p);
  }
  return bounds.volume() * hits / n;
}

}  // namespace

TEST_CASE("plane through point") {
  const PlaneEq p = PlaneEq::through(Point3(0, 0, 2), Vec3(0, 0, 3));
  CHECK(p.normal.norm() == doctest::Approx(1.0));
  CHECK(p.offset == doctest::Approx(2.0));
  CHECK(p.signed_distance(Point3(5, 5, 3)) == doctest::Approx(1.0));
  CHECK(p.flipped().signed_distance(Point3(5, 5, 3)) == doctest::Approx(-1.0));
}

TEST_CASE("plane frame round trip") {
  const PlaneEq p = PlaneEq::through(Point3(1, 2, 3), Vec3(1, 1, 1));
  const PlaneFrame f(p);
  const Point3 q = p.project(Point3(4, -1, 0.5));
  CHECK((f.to_3d(f.to_2d(q)) - q).norm() < 1e-12);
  CHECK(f.u().dot(f.v()) == doctest::Approx(0.0));
  CHECK(f.u().cross(f.v()).dot(p.normal) == doctest::Approx(1.0));
}

TEST_CASE("box cell volume and closure") {
  const PolyhedralCell c = box_cell(unit_box(), {0, 1, 2, 3, 4, 5});
  CHECK(c.faces.size() == 6);
  CHECK(c.volume() == doctest::Approx(1.0));
  CHECK((c.centroid() - Point3(0.5, 0.5, 0.5)).norm() < 1e-12);
  CHECK(is_closed(c, 1e-9));
  CHECK(is_convex(c, 1e-9));
}

TEST_CASE("split cell conserves volume against Monte Carlo") {
  const Tolerances tol = Tolerances::for_diagonal(std::sqrt(3.0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  PolyhedralCell cell = box_cell(unit_box(), {0, 1, 2, 3, 4, 5});
  for (int i = 0; i < 4; ++i) {
    const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
    const PlaneEq cutter = PlaneEq::through(Point3(u(rng), u(rng), u(rng)), n);
    const CellSplit s = split_cell(cell, cutter, 6 + i, tol);
    REQUIRE(s.front);
    REQUIRE(s.back);
    REQUIRE(s.interface_polygon);
    CHECK(s.front->volume() + s.back->volume() == doctest::Approx(cell.volume()).epsilon(1e-12));
    CHECK(is_closed(*s.front, 1e-9));
    CHECK(is_closed(*s.back, 1e-9));
    CHECK(is_convex(*s.back, 1e-9));
    const double mc = mc_volume(*s.back, unit_box(), 200000, rng);
    CHECK(s.back->volume() == doctest::Approx(mc).epsilon(0.02));
    cell = *s.back;
  }
}

TEST_CASE("split cell missing plane keeps the cell whole") {
  const Tolerances tol = Tolerances::for_diagonal(std::sqrt(3.0));
  const PolyhedralCell cell = box_cell(unit_box(), {0, 1, 2, 3, 4, 5});
  const CellSplit s = split_cell(cell, PlaneEq::through(Point3(0, 0, 2), Vec3::UnitZ()), 6, tol);
  CHECK(static_cast<bool>(s.back) != static_cast<bool>(s.front));
  CHECK_FALSE(s.interface_polygon);
}

TEST_CASE("split polygon") {
  const Tolerances tol = Tolerances::for_diagonal(1.0);
  ConvexPolygon3 sq{PlaneEq::through(Point3::Zero(), Vec3::UnitZ()),
                    {Point3(0, 0, 0), Point3(1, 0, 0), Point3(1, 1, 0), Point3(0, 1, 0)}};
  CHECK(sq.area() == doctest::Approx(1.0));
  const PolygonSplit s = split_polygon(sq, PlaneEq::through(Point3(0.25, 0, 0), Vec3::UnitX()), tol);
  REQUIRE(s.front);
  REQUIRE(s.back);
  CHECK(s.front->area() == doctest::Approx(0.75));
  CHECK(s.back->area() == doctest::Approx(0.25));
  CHECK(split_polygon(sq, PlaneEq::through(Point3::Zero(), Vec3::UnitZ()), tol).coplanar);
}

TEST_CASE("convex hull matches brute-force extreme points") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec2> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(u(rng), u(rng));
  const auto hull = convex_hull_2d(pts);
  REQUIRE(hull.size() >= 3);
  // Every input point lies on the inner side of every hull edge.
  for (size_t i = 0; i < hull.size(); ++i) {
    const Vec2 &a = hull[i], &b = hull[(i + 1) % hull.size()];
    for (const auto& p : pts) CHECK(orient2d(a, b, p) >= -1e-12);
  }
  // A point is a hull vertex iff some direction makes it the unique maximum.
  int extreme = 0;
  for (const auto& p : pts) {
    bool is_extreme = false;
    for (int k = 0; k < 3600 && !is_extreme; ++k) {
      const double t = 2 * M_PI * k / 3600;
      const Vec2 d(std::cos(t), std::sin(t));
      bool best = true;
      for (const auto& q : pts) {
        if (&q != &p && q.dot(d) >= p.dot(d)) {
          best = false;
          break;
        }
      }
      is_extreme = best;
    }
    extreme += is_extreme;
  }
  CHECK(extreme == int(hull.size()));
}

TEST_CASE("convex clip area against Monte Carlo") {
  const std::vector<Vec2> a{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const std::vector<Vec2> b{{1, -0.5}, {2.5, 1}, {1, 2.5}, {-0.5, 1}};
  const auto c = clip_convex(a, b);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 2);
  auto inside = [](const std::vector<Vec2>& poly, const Vec2& p) {
    for (size_t i = 0; i < poly.size(); ++i) {
      if (orient2d(poly[i], poly[(i + 1) % poly.size()], p) < 0) return false;
    }
    return true;
  };
  int hits = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const Vec2 p(u(rng), u(rng));
    hits += inside(b, p) && inside(a, p);
  }
  CHECK(polygon_area_2d(c) == doctest::Approx(4.0 * hits / n).epsilon(0.01));
  CHECK(polygon_area_2d(c) == doctest::Approx(3.5));
}

TEST_CASE("circumradius") {
  CHECK(triangle_circumradius({0, 0}, {2, 0}, {0, 2}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("tolerances scale with the diagonal") {
  const Tolerances t = Tolerances::for_diagonal(100.0);
  CHECK(t.coplanar == doctest::Approx(1e-4));
  CHECK(t.min_area == doctest::Approx(1e-6));
}
