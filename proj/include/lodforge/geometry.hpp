#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace lodforge {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Point3 = Eigen::Vector3d;

/// Scale-relative tolerances. Both are derived from the bounding box
/// diagonal D of the scene being processed.
struct Tolerances {
  double coplanar = 1e-6;   ///< 1e-6 * D
  double min_area = 1e-10;  ///< 1e-10 * D^2

  static Tolerances for_diagonal(double diagonal);
};

/// Plane `normal . x = offset` with a unit normal.
struct PlaneEq {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  static PlaneEq through(const Point3& point, const Vec3& normal);

  double signed_distance(const Point3& p) const { return normal.dot(p) - offset; }
  Point3 project(const Point3& p) const { return p - signed_distance(p) * normal; }
  PlaneEq flipped() const { return {-normal, -offset}; }
};

/// Two planes are near-coincident when their normals are within 0.1 degrees
/// (either orientation) and their offsets differ by less than `offset_tol`.
/// `opposite` reports whether the normals point in opposite directions.
bool near_coincident(const PlaneEq& a, const PlaneEq& b, double offset_tol,
                     bool* opposite = nullptr);

/// Orthonormal in-plane frame. The frame depends only on the plane, so any two
/// callers projecting onto the same plane agree on 2D coordinates.
class PlaneFrame {
 public:
  explicit PlaneFrame(const PlaneEq& plane);

  Vec2 to_2d(const Point3& p) const { return {u_.dot(p - origin_), v_.dot(p - origin_)}; }
  Point3 to_3d(const Vec2& q) const { return origin_ + q.x() * u_ + q.y() * v_; }

  const Vec3& u() const { return u_; }
  const Vec3& v() const { return v_; }
  const Vec3& normal() const { return n_; }

 private:
  Point3 origin_;
  Vec3 u_, v_, n_;
};

struct Aabb {
  Point3 min = Point3::Constant(std::numeric_limits<double>::infinity());
  Point3 max = Point3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Point3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool valid() const { return (min.array() <= max.array()).all(); }
  double diagonal() const { return (max - min).norm(); }
  double volume() const { return (max - min).prod(); }
  Point3 center() const { return 0.5 * (min + max); }
  Aabb padded(double pad) const;
  bool overlaps(const Aabb& o, double tol = 0.0) const;
};

/// Convex planar polygon; vertices are counter-clockwise about `plane.normal`.
struct ConvexPolygon3 {
  PlaneEq plane;
  std::vector<Point3> vertices;

  Vec3 vector_area() const;
  double area() const { return vector_area().norm(); }
  Point3 centroid() const;
  Aabb bounds() const;
};

struct PolygonSplit {
  std::optional<ConvexPolygon3> front;
  std::optional<ConvexPolygon3> back;
  /// All vertices lie within tolerance of the cutter; front/back are empty.
  bool coplanar = false;
};

/// Splits a convex polygon by a plane. Vertices within `tol.coplanar` of the
/// cutter are shared by both sides. A side whose area falls below
/// `tol.min_area` is reported as absent.
PolygonSplit split_polygon(const ConvexPolygon3& poly, const PlaneEq& cutter,
                           const Tolerances& tol);

struct CellFace {
  ConvexPolygon3 polygon;  ///< outward oriented
  int plane_id = -1;       ///< supporting plane in the owning registry
};

/// Closed convex polyhedron bounded by outward-oriented convex faces.
struct PolyhedralCell {
  std::vector<CellFace> faces;
  int id = -1;

  double volume() const;
  Point3 centroid() const;
  Aabb bounds() const;
  std::vector<Point3> vertices(double weld_tol) const;
};

struct CellSplit {
  std::optional<PolyhedralCell> front;
  std::optional<PolyhedralCell> back;
  /// Cross-section shared by both halves, oriented along the cutter normal.
  std::optional<ConvexPolygon3> interface_polygon;
};

/// Splits a convex cell by a plane. When the plane misses the cell (or would
/// only shave off a degenerate sliver) the whole cell is returned on one side.
/// The new faces carry `cutter_plane_id`.
CellSplit split_cell(const PolyhedralCell& cell, const PlaneEq& cutter, int cutter_plane_id,
                     const Tolerances& tol);

/// Axis-aligned box as a cell. `plane_ids` are assigned in the order
/// -x, +x, -y, +y, -z, +z.
PolyhedralCell box_cell(const Aabb& box, const std::array<int, 6>& plane_ids);

/// Every edge is shared by exactly two faces traversed in opposite directions.
bool is_closed(const PolyhedralCell& cell, double tol);
/// No vertex lies strictly in front of any face plane.
bool is_convex(const PolyhedralCell& cell, double tol);

// 2D helpers ---------------------------------------------------------------

double cross2(const Vec2& a, const Vec2& b);
double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);
double polygon_area_2d(std::span<const Vec2> poly);

/// Andrew's monotone chain; counter-clockwise, collinear points removed.
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts, double eps = 0.0);

/// Intersection of two counter-clockwise convex polygons.
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip);

double triangle_circumradius(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace lodforge
