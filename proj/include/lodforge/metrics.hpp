#pragma once

#include "lodforge/bvh.hpp"
#include "lodforge/lodtree.hpp"
#include "lodforge/mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lodforge {

struct ModelMetrics {
  double s = 0.0;   ///< simplification rate; NaN for point-cloud input
  double e1 = 0.0;  ///< RMSE output -> input, % of diagonal
  double e2 = 0.0;  ///< RMSE input -> output, % of diagonal
  int cuts = 0;
  int steps = 0;
  int faces = 0;
};

/// Triangulated output faces over input triangles. Throws
/// UndefinedForPointCloud for point-cloud input.
double simplification_rate(const PolygonMesh& output, const InputModel& input);
double simplification_rate(size_t output_triangles, size_t input_triangles);

/// `n` points drawn uniformly by area from the mesh surface.
std::vector<Point3> sample_surface(const TriangleMesh& mesh, size_t n, std::uint64_t seed);

/// Root mean square distance from `samples` to `target`, times 100 / diagonal.
double rmse_percent(std::span<const Point3> samples, const TriangleBvh& target, double diagonal);

/// Area-weighted samples of `a`, closest-point distances to `b`.
double rmse(const TriangleMesh& a, const TriangleMesh& b, size_t n_samples, double diagonal,
            std::uint64_t seed = 0);

/// Bidirectional RMSE between a candidate and the input. Point clouds are
/// used directly as the input sample set and as nearest-point target.
ModelMetrics evaluate_model(const PolygonMesh& output, const InputModel& input, size_t n_samples,
                            double diagonal, std::uint64_t seed = 0);

struct CutsSteps {
  int cuts = 0;
  int steps = 0;
};

/// Cuts applied up to the model's extraction and its index in the candidate set.
CutsSteps cuts_and_steps(const Traversal& traversal, size_t model_index);

}  // namespace lodforge
