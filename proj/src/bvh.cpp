#include "lodforge/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lodforge {

namespace {

constexpr int kLeafSize = 4;
constexpr double kEdgeSlack = 1e-9;

double box_distance2(const Aabb& b, const Point3& p) {
  const Vec3 d = (b.min - p).cwiseMax(p - b.max).cwiseMax(Vec3::Zero());
  return d.squaredNorm();
}

bool ray_box(const Aabb& b, const Point3& o, const Vec3& inv, double t_max) {
  double t0 = 0.0, t1 = t_max;
  for (int i = 0; i < 3; ++i) {
    double a = (b.min[i] - o[i]) * inv[i];
    double c = (b.max[i] - o[i]) * inv[i];
    if (std::isnan(a) || std::isnan(c)) {
      // Ray parallel to the slab and exactly on its boundary.
      if (o[i] < b.min[i] || o[i] > b.max[i]) return false;
      continue;
    }
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

TriangleBvh::TriangleBvh(std::vector<Triangle3> triangles) : tris_(std::move(triangles)) {
  order_.resize(tris_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!tris_.empty()) build(0, int(tris_.size()));
}

int TriangleBvh::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  Aabb centroids;
  for (int i = begin; i < end; ++i) {
    const auto& t = tris_[size_t(order_[size_t(i)])];
    for (const auto& v : t) node.box.extend(v);
    centroids.extend((t[0] + t[1] + t[2]) / 3.0);
  }
  const int id = int(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  const Vec3 ext = centroids.max - centroids.min;
  if (ext.y() > ext[axis]) axis = 1;
  if (ext.z() > ext[axis]) axis = 2;
  const int mid = (begin + end) / 2;
  auto key = [&](int i) {
    const auto& t = tris_[size_t(i)];
    return t[0][axis] + t[1][axis] + t[2][axis];
  };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
  const int l = build(begin, mid);
  const int r = build(mid, end);
  nodes_[size_t(id)].left = l;
  nodes_[size_t(id)].right = r;
  return id;
}

std::optional<TriangleBvh::Hit> TriangleBvh::first_hit(const Point3& origin, const Vec3& dir,
                                                       double t_min) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv = dir.cwiseInverse();
  std::optional<Hit> best;
  double t_best = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[size_t(stack.back())];
    stack.pop_back();
    if (!ray_box(n.box, origin, inv, t_best)) continue;
    if (n.left < 0) {
      for (int k = n.begin; k < n.end; ++k) {
        const int i = order_[size_t(k)];
        const auto& t = tris_[size_t(i)];
        // Moller-Trumbore with slack on the barycentric bounds.
        const Vec3 e1 = t[1] - t[0], e2 = t[2] - t[0];
        const Vec3 p = dir.cross(e2);
        const double det = e1.dot(p);
        if (std::abs(det) < 1e-300) continue;
        const double inv_det = 1.0 / det;
        const Vec3 s = origin - t[0];
        const double u = s.dot(p) * inv_det;
        if (u < -kEdgeSlack || u > 1.0 + kEdgeSlack) continue;
        const Vec3 q = s.cross(e1);
        const double v = dir.dot(q) * inv_det;
        if (v < -kEdgeSlack || u + v > 1.0 + kEdgeSlack) continue;
        const double tt = e2.dot(q) * inv_det;
        if (tt > t_min && (tt < t_best || (tt == t_best && best && i < best->triangle))) {
          t_best = tt;
          best = Hit{tt, i};
        }
      }
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return best;
}

Point3 closest_point_on_triangle(const Point3& p, const Triangle3& tri) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Point3 &a = tri[0], &b = tri[1], &c = tri[2];
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

std::optional<TriangleBvh::Closest> TriangleBvh::closest(const Point3& p) const {
  if (nodes_.empty()) return std::nullopt;
  Closest best;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[size_t(stack.back())];
    stack.pop_back();
    if (box_distance2(n.box, p) > best_d2) continue;
    if (n.left < 0) {
      for (int k = n.begin; k < n.end; ++k) {
        const int i = order_[size_t(k)];
        const Point3 q = closest_point_on_triangle(p, tris_[size_t(i)]);
        const double d2 = (q - p).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && i < best.triangle)) {
          best_d2 = d2;
          best.point = q;
          best.triangle = i;
        }
      }
    } else {
      const double dl = box_distance2(nodes_[size_t(n.left)].box, p);
      const double dr = box_distance2(nodes_[size_t(n.right)].box, p);
      if (dl < dr) {
        stack.push_back(n.right);
        stack.push_back(n.left);
      } else {
        stack.push_back(n.left);
        stack.push_back(n.right);
      }
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

}  // namespace lodforge
