#include "lodforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lodforge {

namespace {

constexpr double kCoincidentCos = 0.99999847691328769;  // cos(0.1 deg)

int side_of(double d, double tol) { return d > tol ? 1 : (d < -tol ? -1 : 0); }

void drop_repeats(std::vector<Point3>& pts, double tol) {
  std::vector<Point3> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (out.empty() || (out.back() - p).norm() > tol) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
  pts = std::move(out);
}

}  // namespace

Tolerances Tolerances::for_diagonal(double diagonal) {
  return {1e-6 * diagonal, 1e-10 * diagonal * diagonal};
}

PlaneEq PlaneEq::through(const Point3& point, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  return {n, n.dot(point)};
}

bool near_coincident(const PlaneEq& a, const PlaneEq& b, double offset_tol, bool* opposite) {
  const double c = a.normal.dot(b.normal);
  if (std::abs(c) < kCoincidentCos) return false;
  const bool flip = c < 0.0;
  const double gap = flip ? std::abs(a.offset + b.offset) : std::abs(a.offset - b.offset);
  if (gap >= offset_tol) return false;
  if (opposite) *opposite = flip;
  return true;
}

PlaneFrame::PlaneFrame(const PlaneEq& plane) : n_(plane.normal) {
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(n_[i]) < std::abs(n_[axis])) axis = i;
  }
  u_ = n_.cross(Vec3::Unit(axis)).normalized();
  v_ = n_.cross(u_);
  origin_ = plane.offset * n_;
}

Aabb Aabb::padded(double pad) const {
  Aabb b = *this;
  b.min.array() -= pad;
  b.max.array() += pad;
  return b;
}

bool Aabb::overlaps(const Aabb& o, double tol) const {
  return (min.array() <= o.max.array() + tol).all() && (o.min.array() <= max.array() + tol).all();
}

Vec3 ConvexPolygon3::vector_area() const {
  Vec3 a = Vec3::Zero();
  if (vertices.size() < 3) return a;
  const Point3& o = vertices[0];
  for (size_t i = 1; i + 1 < vertices.size(); ++i) {
    a += (vertices[i] - o).cross(vertices[i + 1] - o);
  }
  return 0.5 * a;
}

Point3 ConvexPolygon3::centroid() const {
  if (vertices.size() < 3) {
    Point3 c = Point3::Zero();
    for (const auto& v : vertices) c += v;
    return vertices.empty() ? c : Point3(c / double(vertices.size()));
  }
  const Point3& o = vertices[0];
  Point3 c = Point3::Zero();
  double total = 0.0;
  for (size_t i = 1; i + 1 < vertices.size(); ++i) {
    const double w = (vertices[i] - o).cross(vertices[i + 1] - o).dot(plane.normal);
    c += w * (o + vertices[i] + vertices[i + 1]) / 3.0;
    total += w;
  }
  if (std::abs(total) < 1e-300) return o;
  return c / total;
}

Aabb ConvexPolygon3::bounds() const {
  Aabb b;
  for (const auto& v : vertices) b.extend(v);
  return b;
}

PolygonSplit split_polygon(const ConvexPolygon3& poly, const PlaneEq& cutter,
                           const Tolerances& tol) {
  PolygonSplit out;
  const size_t n = poly.vertices.size();
  std::vector<double> d(n);
  bool pos = false, neg = false;
  for (size_t i = 0; i < n; ++i) {
    d[i] = cutter.signed_distance(poly.vertices[i]);
    const int s = side_of(d[i], tol.coplanar);
    pos |= s > 0;
    neg |= s < 0;
  }
  if (!pos && !neg) {
    out.coplanar = true;
    return out;
  }
  if (!neg) {
    out.front = poly;
    return out;
  }
  if (!pos) {
    out.back = poly;
    return out;
  }

  ConvexPolygon3 f{poly.plane, {}}, b{poly.plane, {}};
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    const int si = side_of(d[i], tol.coplanar);
    const int sj = side_of(d[j], tol.coplanar);
    if (si >= 0) f.vertices.push_back(poly.vertices[i]);
    if (si <= 0) b.vertices.push_back(poly.vertices[i]);
    if (si * sj < 0) {
      const double t = d[i] / (d[i] - d[j]);
      const Point3 x = poly.vertices[i] + t * (poly.vertices[j] - poly.vertices[i]);
      f.vertices.push_back(x);
      b.vertices.push_back(x);
    }
  }
  drop_repeats(f.vertices, 0.0);
  drop_repeats(b.vertices, 0.0);
  if (f.vertices.size() >= 3 && f.area() >= tol.min_area) out.front = std::move(f);
  if (b.vertices.size() >= 3 && b.area() >= tol.min_area) out.back = std::move(b);
  return out;
}

double PolyhedralCell::volume() const {
  if (faces.empty() || faces[0].polygon.vertices.empty()) return 0.0;
  const Point3 r = faces[0].polygon.vertices[0];
  double v = 0.0;
  for (const auto& f : faces) {
    const auto& vs = f.polygon.vertices;
    for (size_t i = 1; i + 1 < vs.size(); ++i) {
      v += (vs[0] - r).dot((vs[i] - r).cross(vs[i + 1] - r));
    }
  }
  return v / 6.0;
}

Point3 PolyhedralCell::centroid() const {
  if (faces.empty()) return Point3::Zero();
  const Point3 r = faces[0].polygon.vertices[0];
  Point3 c = Point3::Zero();
  double total = 0.0;
  for (const auto& f : faces) {
    const auto& vs = f.polygon.vertices;
    for (size_t i = 1; i + 1 < vs.size(); ++i) {
      const double w = (vs[0] - r).dot((vs[i] - r).cross(vs[i + 1] - r));
      c += w * (r + vs[0] + vs[i] + vs[i + 1]) / 4.0;
      total += w;
    }
  }
  if (std::abs(total) < 1e-300) return r;
  return c / total;
}

Aabb PolyhedralCell::bounds() const {
  Aabb b;
  for (const auto& f : faces)
    for (const auto& v : f.polygon.vertices) b.extend(v);
  return b;
}

std::vector<Point3> PolyhedralCell::vertices(double weld_tol) const {
  std::vector<Point3> out;
  for (const auto& f : faces) {
    for (const auto& v : f.polygon.vertices) {
      const bool seen = std::any_of(out.begin(), out.end(),
                                    [&](const Point3& q) { return (q - v).norm() <= weld_tol; });
      if (!seen) out.push_back(v);
    }
  }
  return out;
}

CellSplit split_cell(const PolyhedralCell& cell, const PlaneEq& cutter, int cutter_plane_id,
                     const Tolerances& tol) {
  CellSplit out;
  double max_pos = 0.0, max_neg = 0.0;
  for (const auto& f : cell.faces) {
    for (const auto& v : f.polygon.vertices) {
      const double d = cutter.signed_distance(v);
      max_pos = std::max(max_pos, d);
      max_neg = std::max(max_neg, -d);
    }
  }
  auto whole = [&]() {
    if (max_pos >= max_neg) {
      out.front = cell;
    } else {
      out.back = cell;
    }
    return out;
  };
  if (max_pos <= tol.coplanar || max_neg <= tol.coplanar) return whole();

  PolyhedralCell front{{}, cell.id}, back{{}, cell.id};
  std::vector<Vec2> section;
  const PlaneFrame frame(cutter);
  for (const auto& f : cell.faces) {
    PolygonSplit s = split_polygon(f.polygon, cutter, tol);
    if (s.coplanar) return whole();
    for (const auto* piece : {&s.front, &s.back}) {
      if (!*piece) continue;
      for (const auto& v : (*piece)->vertices) {
        if (std::abs(cutter.signed_distance(v)) <= tol.coplanar) section.push_back(frame.to_2d(v));
      }
    }
    if (s.front) front.faces.push_back({std::move(*s.front), f.plane_id});
    if (s.back) back.faces.push_back({std::move(*s.back), f.plane_id});
  }
  std::vector<Vec2> hull = convex_hull_2d(std::move(section), tol.coplanar);
  if (hull.size() < 3 || polygon_area_2d(hull) < tol.min_area || front.faces.size() < 3 ||
      back.faces.size() < 3) {
    return whole();
  }

  ConvexPolygon3 iface{cutter, {}};
  for (const auto& q : hull) iface.vertices.push_back(frame.to_3d(q));
  ConvexPolygon3 front_cap{cutter.flipped(), {iface.vertices.rbegin(), iface.vertices.rend()}};
  back.faces.push_back({iface, cutter_plane_id});
  front.faces.push_back({std::move(front_cap), cutter_plane_id});
  out.front = std::move(front);
  out.back = std::move(back);
  out.interface_polygon = std::move(iface);
  return out;
}

PolyhedralCell box_cell(const Aabb& box, const std::array<int, 6>& plane_ids) {
  const Point3& lo = box.min;
  const Point3& hi = box.max;
  auto corner = [&](int i) {
    return Point3((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  };
  // Corner index bits: x=1, y=2, z=4. Each face listed CCW seen from outside.
  const int quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  const Vec3 normals[6] = {-Vec3::UnitX(), Vec3::UnitX(), -Vec3::UnitY(),
                           Vec3::UnitY(),  -Vec3::UnitZ(), Vec3::UnitZ()};
  PolyhedralCell cell;
  for (int f = 0; f < 6; ++f) {
    ConvexPolygon3 poly{PlaneEq::through(corner(quads[f][0]), normals[f]), {}};
    for (int k = 0; k < 4; ++k) poly.vertices.push_back(corner(quads[f][k]));
    cell.faces.push_back({std::move(poly), plane_ids[f]});
  }
  return cell;
}

bool is_closed(const PolyhedralCell& cell, double tol) {
  std::vector<Point3> welded;
  auto index_of = [&](const Point3& p) {
    for (size_t i = 0; i < welded.size(); ++i) {
      if ((welded[i] - p).norm() <= tol) return int(i);
    }
    welded.push_back(p);
    return int(welded.size() - 1);
  };
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : cell.faces) {
    const auto& vs = f.polygon.vertices;
    if (vs.size() < 3) return false;
    std::vector<int> ids;
    for (const auto& v : vs) ids.push_back(index_of(v));
    for (size_t i = 0; i < ids.size(); ++i) {
      const int a = ids[i], b = ids[(i + 1) % ids.size()];
      if (a == b) continue;
      ++directed[{a, b}];
    }
  }
  for (const auto& [e, count] : directed) {
    if (count != 1) return false;
    auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

bool is_convex(const PolyhedralCell& cell, double tol) {
  for (const auto& f : cell.faces) {
    for (const auto& g : cell.faces) {
      for (const auto& v : g.polygon.vertices) {
        if (f.polygon.plane.signed_distance(v) > tol) return false;
      }
    }
  }
  return true;
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); }

double polygon_area_2d(std::span<const Vec2> poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts, double eps) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  // Merge points closer than eps so near-duplicates do not create slivers.
  std::vector<Vec2> uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (auto it = uniq.rbegin(); it != uniq.rend() && p.x() - it->x() <= eps; ++it) {
      if ((*it - p).norm() <= eps) {
        dup = true;
        break;
      }
    }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() < 3) return uniq;
  std::vector<Vec2> hull(2 * uniq.size());
  size_t k = 0;
  // A turn counts as left only when it clears eps scaled by the edge length.
  auto left = [&](const Vec2& o, const Vec2& a, const Vec2& b) {
    return orient2d(o, a, b) > eps * (b - o).norm();
  };
  for (size_t i = 0; i < uniq.size(); ++i) {
    while (k >= 2 && !left(hull[k - 2], hull[k - 1], uniq[i])) --k;
    hull[k++] = uniq[i];
  }
  for (size_t i = uniq.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && !left(hull[k - 2], hull[k - 1], uniq[i - 1])) --k;
    hull[k++] = uniq[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip) {
  std::vector<Vec2> out = subject;
  for (size_t i = 0; i < clip.size() && !out.empty(); ++i) {
    const Vec2& a = clip[i];
    const Vec2& b = clip[(i + 1) % clip.size()];
    std::vector<Vec2> in = std::move(out);
    out.clear();
    for (size_t j = 0; j < in.size(); ++j) {
      const Vec2& p = in[j];
      const Vec2& q = in[(j + 1) % in.size()];
      const double dp = orient2d(a, b, p);
      const double dq = orient2d(a, b, q);
      if (dp >= 0) out.push_back(p);
      if ((dp >= 0) != (dq >= 0)) {
        const double t = dp / (dp - dq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  return out;
}

double triangle_circumradius(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
  const double area2 = std::abs(orient2d(a, b, c));
  if (area2 <= 0.0) return std::numeric_limits<double>::infinity();
  return ab * bc * ca / (2.0 * area2);
}

}  // namespace lodforge
