#pragma once

#include "lodforge/geometry.hpp"

#include <array>
#include <span>
#include <vector>

namespace lodforge {

/// Delaunay triangulation of a planar point set (incremental Bowyer-Watson).
/// Returns counter-clockwise triangles as indices into `points`. Points closer
/// than `duplicate_tol` to an already inserted point are skipped. Collinear
/// input yields no triangles.
std::vector<std::array<int, 3>> delaunay_triangulation(std::span<const Vec2> points,
                                                       double duplicate_tol = 0.0);

}  // namespace lodforge
