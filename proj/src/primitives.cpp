#include "lodforge/primitives.hpp"

#include "lodforge/delaunay.hpp"
#include "lodforge/error.hpp"

#include <Eigen/Eigenvalues>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <string>

namespace lodforge {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

constexpr int kNeighbours = 16;
constexpr size_t kRefitInterval = 32;

using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using BValue = std::pair<BPoint, int>;

BPoint to_bpoint(const Point3& p) { return BPoint(p.x(), p.y(), p.z()); }

/// Running first and second moments of a point set, shifted by a reference
/// point for numerical stability.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(const Point3& ref) : ref_(ref) {}

  void add(const Point3& p, const Vec3& n) {
    const Vec3 d = p - ref_;
    sum_ += d;
    outer_ += d * d.transpose();
    normal_sum_ += n;
    ++count_;
  }

  /// Returns false when the points are (nearly) collinear.
  bool plane(PlaneEq& out) const {
    if (count_ < 3) return false;
    const double n = double(count_);
    const Vec3 mean = sum_ / n;
    const Eigen::Matrix3d cov = outer_ / n - mean * mean.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const Vec3 ev = es.eigenvalues();
    if (ev[1] <= 1e-14 * std::max(ev[2], 1e-300)) return false;
    Vec3 normal = es.eigenvectors().col(0).normalized();
    if (normal.dot(normal_sum_) < 0) normal = -normal;
    out = PlaneEq::through(ref_ + mean, normal);
    return true;
  }

 private:
  Point3 ref_;
  Vec3 sum_ = Vec3::Zero();
  Eigen::Matrix3d outer_ = Eigen::Matrix3d::Zero();
  Vec3 normal_sum_ = Vec3::Zero();
  size_t count_ = 0;
};

double rms_residual(std::span<const Point3> pts) {
  if (pts.size() < 3) return std::numeric_limits<double>::infinity();
  Point3 mean = Point3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= double(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= double(pts.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()[0]));
}

std::vector<std::vector<int>> knn_graph(const std::vector<Point3>& pts, int k) {
  std::vector<BValue> values;
  values.reserve(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) values.emplace_back(to_bpoint(pts[i]), int(i));
  const bgi::rtree<BValue, bgi::quadratic<16>> tree(values.begin(), values.end());

  std::vector<std::vector<int>> graph(pts.size());
  std::vector<BValue> found;
  for (size_t i = 0; i < pts.size(); ++i) {
    found.clear();
    tree.query(bgi::nearest(values[i].first, unsigned(k + 1)), std::back_inserter(found));
    auto& nb = graph[i];
    for (const auto& v : found) {
      if (v.second != int(i)) nb.push_back(v.second);
    }
    std::sort(nb.begin(), nb.end(), [&](int a, int b) {
      const double da = (pts[size_t(a)] - pts[i]).squaredNorm();
      const double db = (pts[size_t(b)] - pts[i]).squaredNorm();
      return da < db || (da == db && a < b);
    });
    if (nb.size() > size_t(k)) nb.resize(size_t(k));
  }
  return graph;
}

std::vector<Point3> support_points(const SampleSet& samples, const InputModel& input,
                                   const std::vector<int>& inliers) {
  std::vector<Point3> pts;
  for (int i : inliers) {
    const int t = samples.triangle[size_t(i)];
    if (t >= 0 && input.is_mesh()) {
      const auto& mesh = input.mesh();
      for (int v : mesh.triangles[size_t(t)]) pts.push_back(mesh.vertices[size_t(v)]);
    } else {
      pts.push_back(samples.points[size_t(i)]);
    }
  }
  std::sort(pts.begin(), pts.end(), [](const Point3& a, const Point3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

void DetectParams::validate() const {
  if (!(epsilon > 0)) throw Error("epsilon must be positive");
  if (!(theta > 0 && theta < 90)) throw Error("theta must lie in (0, 90) degrees");
  if (sigma < 3) throw Error("sigma must be at least 3");
  if (!(alpha > 0)) throw Error("alpha must be positive");
}

SampleSet make_samples(const InputModel& input) {
  SampleSet s;
  if (!input.is_mesh()) {
    const auto& c = input.cloud();
    s.points = c.points;
    s.normals = c.normals;
    s.triangle.assign(c.points.size(), -1);
    return s;
  }
  const auto& m = input.mesh();
  std::vector<Vec3> vnormal(m.vertices.size(), Vec3::Zero());
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    const Point3 &a = m.vertices[size_t(tri[0])], &b = m.vertices[size_t(tri[1])],
                 &c = m.vertices[size_t(tri[2])];
    const Vec3 area_vec = 0.5 * (b - a).cross(c - a);
    s.points.push_back((a + b + c) / 3.0);
    s.normals.push_back(m.normals[t]);
    s.triangle.push_back(int(t));
    for (int v : tri) vnormal[size_t(v)] += area_vec.norm() * m.normals[t];
  }
  for (size_t v = 0; v < m.vertices.size(); ++v) {
    if (vnormal[v].norm() <= 0) continue;
    s.points.push_back(m.vertices[v]);
    s.normals.push_back(vnormal[v].normalized());
    s.triangle.push_back(-1);
  }
  return s;
}

double AlphaShape::area() const {
  double a = 0.0;
  for (const auto& t : triangles) a += 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
  return a;
}

PlaneEq fit_plane(std::span<const Point3> points, std::span<const Vec3> normals) {
  if (points.size() < 3) throw CollinearInput("plane fit needs at least 3 points");
  MomentAccumulator acc(points[0]);
  for (size_t i = 0; i < points.size(); ++i) {
    acc.add(points[i], i < normals.size() ? normals[i] : Vec3::Zero());
  }
  PlaneEq plane;
  if (!acc.plane(plane)) throw CollinearInput("points are collinear");
  if (normals.empty()) {
    int axis = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(plane.normal[i]) > std::abs(plane.normal[axis])) axis = i;
    if (plane.normal[axis] < 0) plane = plane.flipped();
  }
  return plane;
}

AlphaShape compute_alpha_shape(std::span<const Point3> points, const PlaneEq& plane, double alpha) {
  const PlaneFrame frame(plane);
  std::vector<Vec2> pts2;
  pts2.reserve(points.size());
  for (const auto& p : points) pts2.push_back(frame.to_2d(p));
  const auto tris = delaunay_triangulation(pts2);
  if (tris.empty()) throw DegenerateProjection("alpha-shape input is collinear after projection");

  AlphaShape shape;
  shape.plane = plane;
  for (const auto& t : tris) {
    const Vec2 &a = pts2[size_t(t[0])], &b = pts2[size_t(t[1])], &c = pts2[size_t(t[2])];
    if (triangle_circumradius(a, b, c) > alpha) continue;
    shape.triangles.push_back({frame.to_3d(a), frame.to_3d(b), frame.to_3d(c)});
  }
  return shape;
}

void refresh_footprint(PlanarPrimitive& prim, double alpha) {
  const PlaneFrame frame(prim.plane);
  std::vector<Vec2> pts2;
  pts2.reserve(prim.support.size());
  for (const auto& p : prim.support) pts2.push_back(frame.to_2d(p));
  const auto hull = convex_hull_2d(std::move(pts2));
  if (hull.size() < 3) throw DegenerateProjection("primitive footprint is collinear");
  prim.hull.plane = prim.plane;
  prim.hull.vertices.clear();
  for (const auto& q : hull) prim.hull.vertices.push_back(frame.to_3d(q));
  prim.area = prim.hull.area();
  prim.alpha_shape = compute_alpha_shape(prim.support, prim.plane, alpha);
}

std::vector<PlanarPrimitive> detect_planes(const SampleSet& samples, const InputModel& input,
                                           const DetectParams& params) {
  params.validate();
  const size_t n = samples.size();
  const auto graph = knn_graph(samples.points, kNeighbours);
  const double cos_theta = std::cos(params.theta * std::numbers::pi / 180.0);

  std::vector<double> score(n);
  {
    std::vector<Point3> local;
    for (size_t i = 0; i < n; ++i) {
      local.assign(1, samples.points[i]);
      for (int j : graph[i]) local.push_back(samples.points[size_t(j)]);
      score[i] = 1.0 / (1.0 + rms_residual(local));
    }
  }
  std::vector<int> seeds(n);
  std::iota(seeds.begin(), seeds.end(), 0);
  std::stable_sort(seeds.begin(), seeds.end(),
                   [&](int a, int b) { return score[size_t(a)] > score[size_t(b)]; });

  std::vector<int> owner(n, -1);
  std::vector<int> stamp(n, -1);
  std::vector<PlanarPrimitive> out;
  auto accepts = [&](int j, const PlaneEq& plane) {
    return std::abs(plane.signed_distance(samples.points[size_t(j)])) < params.epsilon &&
           samples.normals[size_t(j)].dot(plane.normal) >= cos_theta;
  };

  for (size_t si = 0; si < seeds.size(); ++si) {
    const int seed = seeds[si];
    if (owner[size_t(seed)] != -1) continue;
    PlaneEq plane = PlaneEq::through(samples.points[size_t(seed)], samples.normals[size_t(seed)]);
    MomentAccumulator acc(samples.points[size_t(seed)]);
    std::vector<int> region{seed};
    acc.add(samples.points[size_t(seed)], samples.normals[size_t(seed)]);
    stamp[size_t(seed)] = int(si);
    std::deque<int> queue{seed};
    size_t next_refit = kRefitInterval;
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      for (int j : graph[size_t(i)]) {
        if (owner[size_t(j)] != -1 || stamp[size_t(j)] == int(si)) continue;
        if (!accepts(j, plane)) continue;
        stamp[size_t(j)] = int(si);
        region.push_back(j);
        acc.add(samples.points[size_t(j)], samples.normals[size_t(j)]);
        queue.push_back(j);
        if (region.size() >= next_refit) {
          acc.plane(plane);
          next_refit += kRefitInterval;
        }
      }
    }
    if (region.size() < size_t(params.sigma)) continue;
    if (!acc.plane(plane)) continue;
    std::erase_if(region, [&](int j) { return !accepts(j, plane); });
    if (region.size() < size_t(params.sigma)) continue;
    std::sort(region.begin(), region.end());

    PlanarPrimitive prim;
    prim.id = int(out.size());
    prim.plane = plane;
    prim.inliers = region;
    prim.support = support_points(samples, input, region);
    try {
      refresh_footprint(prim, params.alpha);
    } catch (const DegenerateProjection&) {
      continue;
    }
    for (int j : region) owner[size_t(j)] = prim.id;
    out.push_back(std::move(prim));
  }
  if (out.empty()) throw NoPrimitives("no region reached " + std::to_string(params.sigma) + " inliers");
  return out;
}

std::vector<PlanarPrimitive> detect_planes(const InputModel& input, const DetectParams& params) {
  return detect_planes(make_samples(input), input, params);
}

}  // namespace lodforge
