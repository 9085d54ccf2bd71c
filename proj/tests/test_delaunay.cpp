#include "lodforge/delaunay.hpp"
#include "lodforge/geometry.hpp"

#include <doctest.h>

#include <random>

using namespace lodforge;

namespace {

bool in_circle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const double ax = a.x() - p.x(), ay = a.y() - p.y();
  const double bx = b.x() - p.x(), by = b.y() - p.y();
  const double cx = c.x() - p.x(), cy = c.y() - p.y();
  const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                     (cx * cx + cy * cy) * (ax * by - bx * ay);
  return det > 1e-9;
}

}  // namespace

TEST_CASE("random points satisfy the empty circumcircle property") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<Vec2> pts;
  for (int i = 0; i < 150; ++i) pts.emplace_back(u(rng), u(rng));
  const auto tris = delaunay_triangulation(pts);
  const auto hull = convex_hull_2d(pts);
  // Euler: 2n - 2 - h triangles for points in general position.
  CHECK(tris.size() == 2 * pts.size() - 2 - hull.size());
  double area = 0;
  for (const auto& t : tris) {
    const Vec2 &a = pts[size_t(t[0])], &b = pts[size_t(t[1])], &c = pts[size_t(t[2])];
    CHECK(orient2d(a, b, c) > 0);
    area += 0.5 * orient2d(a, b, c);
    for (size_t k = 0; k < pts.size(); ++k) {
      if (int(k) == t[0] || int(k) == t[1] || int(k) == t[2]) continue;
      CHECK_FALSE(in_circle(a, b, c, pts[k]));
    }
  }
  CHECK(area == doctest::Approx(polygon_area_2d(hull)));
}

TEST_CASE("grid points tile the square") {
  std::vector<Vec2> pts;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) pts.emplace_back(i, j);
  const auto tris = delaunay_triangulation(pts);
  CHECK(tris.size() == 200);
  double area = 0;
  for (const auto& t : tris) area += 0.5 * orient2d(pts[size_t(t[0])], pts[size_t(t[1])], pts[size_t(t[2])]);
  CHECK(area == doctest::Approx(100.0));
}

TEST_CASE("duplicates and collinear input") {
  std::vector<Vec2> line{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  CHECK(delaunay_triangulation(line).empty());
  std::vector<Vec2> dup{{0, 0}, {1, 0}, {0, 1}, {0, 0}, {1, 0}};
  CHECK(delaunay_triangulation(dup).size() == 1);
  CHECK(delaunay_triangulation(std::vector<Vec2>{}).empty());
}
