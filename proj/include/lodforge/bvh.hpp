#pragma once

#include "lodforge/geometry.hpp"

#include <array>
#include <optional>
#include <vector>

namespace lodforge {

using Triangle3 = std::array<Point3, 3>;

/// Bounding volume hierarchy over a static triangle set.
class TriangleBvh {
 public:
  struct Hit {
    double t = 0.0;
    int triangle = -1;
  };
  struct Closest {
    double distance = 0.0;
    Point3 point = Point3::Zero();
    int triangle = -1;
  };

  TriangleBvh() = default;
  explicit TriangleBvh(std::vector<Triangle3> triangles);

  bool empty() const { return tris_.empty(); }
  size_t size() const { return tris_.size(); }
  const Triangle3& triangle(int i) const { return tris_[size_t(i)]; }

  /// First intersection along `origin + t * dir` with t > t_min. Triangle
  /// edges are inflated by a relative epsilon so rays cannot slip between
  /// triangles sharing an edge.
  std::optional<Hit> first_hit(const Point3& origin, const Vec3& dir, double t_min = 0.0) const;

  std::optional<Closest> closest(const Point3& p) const;

 private:
  struct Node {
    Aabb box;
    int left = -1, right = -1;  // children; -1 for leaves
    int begin = 0, end = 0;     // triangle range for leaves
  };
  int build(int begin, int end);

  std::vector<Triangle3> tris_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

Point3 closest_point_on_triangle(const Point3& p, const Triangle3& t);

}  // namespace lodforge
