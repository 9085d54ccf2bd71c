#pragma once

#include "lodforge/bvh.hpp"
#include "lodforge/geometry.hpp"
#include "lodforge/primitives.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lodforge {

enum class Label : std::uint8_t { Out = 0, In = 1 };

inline constexpr int kOutside = -1;

/// Deduplicates near-coincident planes. Ids are dense and stable.
class PlaneRegistry {
 public:
  explicit PlaneRegistry(double offset_tol = 0.0) : offset_tol_(offset_tol) {}

  /// Returns the id of a registered plane near-coincident with `plane`, or
  /// registers it. `opposite` reports whether the registered normal points the
  /// other way.
  int intern(const PlaneEq& plane, bool* opposite = nullptr);

  const PlaneEq& plane(int id) const { return planes_[size_t(id)]; }
  size_t size() const { return planes_.size(); }
  const std::vector<PlaneEq>& planes() const { return planes_; }
  double offset_tol() const { return offset_tol_; }

 private:
  double offset_tol_;
  std::vector<PlaneEq> planes_;
};

/// Interface between two cells, or between a cell and the outside. The
/// polygon is oriented along the registry normal of `plane_id`: `cell_back`
/// lies behind it, `cell_front` in front.
struct Facet {
  ConvexPolygon3 polygon;
  int plane_id = -1;
  int cell_back = kOutside;
  int cell_front = kOutside;
  int source_primitive = -1;
  double coverage = 0.0;
  bool alpha_covered = false;

  int other(int cell) const { return cell == cell_back ? cell_front : cell_back; }
};

struct CellComplex {
  Aabb box;
  PlaneRegistry planes;
  std::vector<PolyhedralCell> cells;
  std::vector<Facet> facets;
  std::vector<std::vector<int>> cell_facets;  ///< facet ids per cell
};

struct BspNode {
  int id = -1;
  int parent = -1;
  int back = -1;   ///< child behind the cutter
  int front = -1;  ///< child in front of the cutter
  int cutter = -1;    ///< index into the primitive list; -1 for leaves
  int plane_id = -1;  ///< registry plane of the cutter
  int cell = -1;      ///< leaf cell id; -1 for internal nodes
  double volume = 0.0;

  bool is_leaf() const { return back < 0; }
};

struct BspCut {
  int primitive = -1;
  int node = -1;
};

/// Cut log, in the order the splits were performed.
struct BspTrace {
  std::vector<BspCut> cuts;
  size_t size() const { return cuts.size(); }
};

enum class CutOrder {
  LargestFragment,  ///< largest remaining fragment area in the subspace cuts next
  ListOrder,        ///< fragment of the earliest listed primitive cuts next
};

enum class FragmentExtent {
  ConvexHull,  ///< fragments start as the primitive convex hulls
  FullPlane,   ///< fragments start as the full plane section of the box
};

struct PartitionOptions {
  CutOrder order = CutOrder::LargestFragment;
  FragmentExtent extent = FragmentExtent::ConvexHull;
};

struct Partition {
  CellComplex complex;
  std::vector<BspNode> nodes;  ///< nodes[0] is the root
  BspTrace trace;
  std::vector<int> primitive_plane;  ///< registry plane id per primitive
  int dropped_fragments = 0;
};

/// Recursive binary space partition of `box` by the primitive planes,
/// followed by facet adjacency and alpha coverage. Primitive ids in the
/// result (cutters, facet sources) are indices into `primitives`.
Partition build_partition(std::span<const PlanarPrimitive> primitives, const Aabb& box,
                          const PartitionOptions& options = {});

/// Builds cell adjacency facets from the faces of a finished partition.
void build_facets(CellComplex& complex, const Tolerances& tol);

/// Fraction of the facet covered by the shape triangles. Throws NotCoplanar
/// when the two are not on the same plane within `tol`.
double facet_alpha_coverage(const ConvexPolygon3& facet, const AlphaShape& shape, double tol);

/// Fills coverage, alpha_covered and source_primitive for every facet.
void mark_alpha_coverage(CellComplex& complex, std::span<const PlanarPrimitive> primitives,
                         std::span<const int> primitive_plane);

struct RayStats {
  int hits_in = 0;
  int hits_out = 0;
  int misses = 0;
};

struct CellLabels {
  std::vector<Label> label;
  std::vector<RayStats> stats;
};

/// `n` unit directions on a Fibonacci sphere lattice.
std::vector<Vec3> fibonacci_directions(int n);

/// Outward-oriented triangle soup for ray casting.
struct ShapeScene {
  TriangleBvh bvh;
  std::vector<Vec3> normals;

  static ShapeScene from_shapes(std::span<const AlphaShape* const> shapes);
};

/// Ray-cast majority vote from each cell centroid. In iff more than half of
/// the rays first hit the back of a shape triangle.
CellLabels label_cells(std::span<const PolyhedralCell> cells, const ShapeScene& scene,
                       int rays_per_cell, double tol);
CellLabels label_cells(const CellComplex& complex, std::span<const AlphaShape* const> shapes,
                       int rays_per_cell = 100);

/// Approximate Chebyshev centre (deepest interior point) of a convex cell.
Point3 chebyshev_center(const PolyhedralCell& cell);

}  // namespace lodforge
