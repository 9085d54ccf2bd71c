#include "lodforge/metrics.hpp"

#include "lodforge/error.hpp"
#include "lodforge/parallel.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace lodforge {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

double simplification_rate(size_t output_triangles, size_t input_triangles) {
  if (input_triangles == 0) throw Error("input has no triangles");
  return double(output_triangles) / double(input_triangles);
}

double simplification_rate(const PolygonMesh& output, const InputModel& input) {
  if (!input.is_mesh()) throw UndefinedForPointCloud("simplification rate needs a mesh input");
  return simplification_rate(output.triangle_count(), input.mesh().triangles.size());
}

std::vector<Point3> sample_surface(const TriangleMesh& mesh, size_t n, std::uint64_t seed) {
  std::vector<double> cumulative;
  cumulative.reserve(mesh.triangles.size());
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const Point3 &a = mesh.vertices[size_t(t[0])], &b = mesh.vertices[size_t(t[1])],
                 &c = mesh.vertices[size_t(t[2])];
    total += 0.5 * (b - a).cross(c - a).norm();
    cumulative.push_back(total);
  }
  std::vector<Point3> out;
  if (total <= 0 || n == 0) return out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (size_t i = 0; i < n; ++i) {
    const double r = uni(rng) * total;
    size_t k = size_t(std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
    k = std::min(k, cumulative.size() - 1);
    const auto& t = mesh.triangles[k];
    double u = uni(rng), v = uni(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Point3& a = mesh.vertices[size_t(t[0])];
    out.push_back(a + u * (mesh.vertices[size_t(t[1])] - a) + v * (mesh.vertices[size_t(t[2])] - a));
  }
  return out;
}

namespace {

std::vector<Triangle3> soup(const TriangleMesh& m) {
  std::vector<Triangle3> tris;
  tris.reserve(m.triangles.size());
  for (const auto& t : m.triangles) {
    tris.push_back({m.vertices[size_t(t[0])], m.vertices[size_t(t[1])], m.vertices[size_t(t[2])]});
  }
  return tris;
}

double finish(std::span<const double> d2, double diagonal) {
  if (d2.empty()) return 0.0;
  long double s = 0.0;
  for (double v : d2) s += v;
  return std::sqrt(double(s / d2.size())) * 100.0 / diagonal;
}

double rmse_to_cloud(std::span<const Point3> samples, const PointCloud& cloud, double diagonal) {
  using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
  std::vector<BPoint> pts;
  for (const auto& p : cloud.points) pts.emplace_back(p.x(), p.y(), p.z());
  const bgi::rtree<BPoint, bgi::quadratic<16>> tree(pts.begin(), pts.end());
  std::vector<double> d2(samples.size());
  parallel_for(samples.size(), [&](size_t i) {
    const BPoint q(samples[i].x(), samples[i].y(), samples[i].z());
    std::vector<BPoint> nn;
    tree.query(bgi::nearest(q, 1), std::back_inserter(nn));
    d2[i] = nn.empty() ? 0.0 : bg::comparable_distance(q, nn[0]);
  });
  return finish(d2, diagonal);
}

}  // namespace

double rmse_percent(std::span<const Point3> samples, const TriangleBvh& target, double diagonal) {
  std::vector<double> d2(samples.size());
  parallel_for(samples.size(), [&](size_t i) {
    const auto c = target.closest(samples[i]);
    d2[i] = c ? c->distance * c->distance : 0.0;
  });
  return finish(d2, diagonal);
}

double rmse(const TriangleMesh& a, const TriangleMesh& b, size_t n_samples, double diagonal,
            std::uint64_t seed) {
  const auto samples = sample_surface(a, n_samples, seed);
  return rmse_percent(samples, TriangleBvh(soup(b)), diagonal);
}

ModelMetrics evaluate_model(const PolygonMesh& output, const InputModel& input, size_t n_samples,
                            double diagonal, std::uint64_t seed) {
  ModelMetrics m;
  m.faces = int(output.faces.size());
  const TriangleMesh out_tris = triangulate(output);
  const auto out_samples = sample_surface(out_tris, n_samples, seed);
  const TriangleBvh out_bvh(soup(out_tris));
  if (input.is_mesh()) {
    m.s = simplification_rate(output, input);
    m.e1 = rmse_percent(out_samples, TriangleBvh(soup(input.mesh())), diagonal);
    m.e2 = rmse_percent(sample_surface(input.mesh(), n_samples, seed + 1), out_bvh, diagonal);
  } else {
    m.s = std::numeric_limits<double>::quiet_NaN();
    m.e1 = rmse_to_cloud(out_samples, input.cloud(), diagonal);
    m.e2 = rmse_percent(input.cloud().points, out_bvh, diagonal);
  }
  return m;
}

CutsSteps cuts_and_steps(const Traversal& traversal, size_t model_index) {
  const auto& m = traversal.models.at(model_index);
  return {m.cuts, int(model_index)};
}

}  // namespace lodforge
