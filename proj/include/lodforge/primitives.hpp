#pragma once

#include "lodforge/bvh.hpp"
#include "lodforge/geometry.hpp"
#include "lodforge/mesh.hpp"

#include <span>
#include <vector>

namespace lodforge {

struct DetectParams {
  double epsilon = 0.15;  ///< m, max point-to-plane distance
  double theta = 40.0;    ///< degrees, max normal deviation
  int sigma = 15;         ///< min inliers
  double alpha = 7.0;     ///< m, circumradius bound of alpha-shape triangles

  /// Throws Error on out-of-range values.
  void validate() const;
};

/// Oriented samples the detector grows regions on. Meshes contribute one
/// sample per triangle centroid followed by one per vertex.
struct SampleSet {
  std::vector<Point3> points;
  std::vector<Vec3> normals;
  /// Source triangle of each sample, or -1 for vertex and cloud samples.
  std::vector<int> triangle;

  size_t size() const { return points.size(); }
};

SampleSet make_samples(const InputModel& input);

/// Alpha-shape triangles, lifted onto the plane and counter-clockwise about
/// its normal.
struct AlphaShape {
  PlaneEq plane;
  std::vector<Triangle3> triangles;

  double area() const;
};

struct PlanarPrimitive {
  int id = -1;
  PlaneEq plane;
  std::vector<int> inliers;     ///< sample indices
  std::vector<Point3> support;  ///< points spanning the footprint (hull and alpha-shape input)
  ConvexPolygon3 hull;
  double area = 0.0;  ///< hull area
  AlphaShape alpha_shape;
};

/// Total least squares plane. With normals given, the plane normal agrees
/// with the majority of them. Throws CollinearInput.
PlaneEq fit_plane(std::span<const Point3> points, std::span<const Vec3> normals = {});

/// Throws DegenerateProjection when the projected points are collinear.
AlphaShape compute_alpha_shape(std::span<const Point3> points, const PlaneEq& plane, double alpha);

/// Recomputes hull, area and alpha-shape from `support` and `plane`.
void refresh_footprint(PlanarPrimitive& prim, double alpha);

/// Region growing over k-nearest-neighbour adjacency, seeds in order of
/// decreasing local planarity. Throws NoPrimitives when no region reaches
/// sigma inliers.
std::vector<PlanarPrimitive> detect_planes(const SampleSet& samples, const InputModel& input,
                                           const DetectParams& params);
std::vector<PlanarPrimitive> detect_planes(const InputModel& input, const DetectParams& params);

}  // namespace lodforge
