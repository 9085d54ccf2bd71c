#pragma once

#include "lodforge/geometry.hpp"

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace lodforge {

struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> normals;  ///< one unit normal per triangle, outward
};

struct PointCloud {
  std::vector<Point3> points;
  std::vector<Vec3> normals;  ///< unit, one per point
};

/// Oriented triangle mesh or point cloud, in meters.
struct InputModel {
  std::variant<TriangleMesh, PointCloud> data;
  std::string source;

  bool is_mesh() const { return std::holds_alternative<TriangleMesh>(data); }
  const TriangleMesh& mesh() const { return std::get<TriangleMesh>(data); }
  const PointCloud& cloud() const { return std::get<PointCloud>(data); }
};

/// Polygon soup with shared vertices. Faces may be non-convex but must be
/// simple and planar.
struct PolygonMesh {
  std::vector<Point3> vertices;
  std::vector<std::vector<int>> faces;

  size_t triangle_count() const;
};

struct SurfaceReport {
  bool watertight = false;   ///< each edge has exactly two incident faces
  bool consistent = false;   ///< those two faces traverse it in opposite directions
  bool manifold = false;     ///< watertight + consistent + every vertex link is one fan
  int euler = 0;             ///< V - E + F over referenced vertices
  int components = 0;
  int boundary_edges = 0;
  int nonmanifold_edges = 0;

  /// Closed orientable 2-manifold with an admissible Euler characteristic
  /// (even and at most 2 per component).
  bool closed_manifold() const {
    return watertight && consistent && manifold && euler % 2 == 0 && euler <= 2 * components;
  }
};

SurfaceReport check_surface(const PolygonMesh& mesh);

double mesh_volume(const PolygonMesh& mesh);
double mesh_area(const PolygonMesh& mesh);
Aabb mesh_bounds(const PolygonMesh& mesh);

/// Ear-clipping triangulation of every face. Works for non-convex simple faces.
TriangleMesh triangulate(const PolygonMesh& mesh);
PolygonMesh to_polygon_mesh(const TriangleMesh& mesh);

/// Recomputes per-triangle normals from the counter-clockwise winding.
void compute_face_normals(TriangleMesh& mesh);

/// Bounding box of the model samples, padded on every side by `pad_fraction`
/// of the unpadded diagonal.
Aabb bbox(const InputModel& input, double pad_fraction);

}  // namespace lodforge
