#include "lodforge/bvh.hpp"

#include <doctest.h>

#include <random>

using namespace lodforge;

namespace {

std::vector<Triangle3> random_soup(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5, 5), s(-0.7, 0.7);
  std::vector<Triangle3> tris;
  for (int i = 0; i < n; ++i) {
    const Point3 c(u(rng), u(rng), u(rng));
    tris.push_back({c + Point3(s(rng), s(rng), s(rng)), c + Point3(s(rng), s(rng), s(rng)),
                    c + Point3(s(rng), s(rng), s(rng))});
  }
  return tris;
}

// Moller-Trumbore without culling.
std::optional<double> ray_triangle(const Point3& o, const Vec3& d, const Triangle3& t) {
  const Vec3 e1 = t[1] - t[0], e2 = t[2] - t[0];
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return std::nullopt;
  const Vec3 s = o - t[0];
  const double u = s.dot(p) / det;
  if (u < 0 || u > 1) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = d.dot(q) / det;
  if (v < 0 || u + v > 1) return std::nullopt;
  const double tt = e2.dot(q) / det;
  if (tt <= 0) return std::nullopt;
  return tt;
}

}  // namespace

TEST_CASE("closest point agrees with brute force") {
  std::mt19937_64 rng(1);
  const auto tris = random_soup(300, rng);
  const TriangleBvh bvh(tris);
  std::uniform_real_distribution<double> u(-7, 7);
  for (int i = 0; i < 200; ++i) {
    const Point3 p(u(rng), u(rng), u(rng));
    double best = 1e300;
    for (const auto& t : tris) best = std::min(best, (closest_point_on_triangle(p, t) - p).norm());
    const auto c = bvh.closest(p);
    REQUIRE(c);
    CHECK(c->distance == doctest::Approx(best).epsilon(1e-12));
    CHECK((c->point - p).norm() == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("first hit agrees with brute force") {
  std::mt19937_64 rng(2);
  const auto tris = random_soup(300, rng);
  const TriangleBvh bvh(tris);
  std::uniform_real_distribution<double> u(-7, 7);
  std::normal_distribution<double> g(0, 1);
  int hits = 0;
  for (int i = 0; i < 500; ++i) {
    const Point3 o(u(rng), u(rng), u(rng));
    const Vec3 d = Vec3(g(rng), g(rng), g(rng)).normalized();
    std::optional<double> best;
    for (const auto& t : tris) {
      const auto h = ray_triangle(o, d, t);
      if (h && (!best || *h < *best)) best = h;
    }
    const auto h = bvh.first_hit(o, d);
    REQUIRE(static_cast<bool>(h) == static_cast<bool>(best));
    if (h) {
      ++hits;
      CHECK(h->t == doctest::Approx(*best).epsilon(1e-9));
    }
  }
  CHECK(hits > 50);
}

TEST_CASE("closest point on triangle regions") {
  const Triangle3 t{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)};
  CHECK((closest_point_on_triangle(Point3(0.2, 0.2, 3), t) - Point3(0.2, 0.2, 0)).norm() < 1e-12);
  CHECK((closest_point_on_triangle(Point3(-1, -1, 0), t) - Point3(0, 0, 0)).norm() < 1e-12);
  CHECK((closest_point_on_triangle(Point3(1, 1, 0), t) - Point3(0.5, 0.5, 0)).norm() < 1e-12);
  CHECK((closest_point_on_triangle(Point3(0.5, -2, 1), t) - Point3(0.5, 0, 0)).norm() < 1e-12);
}

TEST_CASE("empty hierarchy") {
  const TriangleBvh bvh;
  CHECK(bvh.empty());
  CHECK_FALSE(bvh.closest(Point3::Zero()));
  CHECK_FALSE(bvh.first_hit(Point3::Zero(), Vec3::UnitX()));
}
