#pragma once

#include "lodforge/geometry.hpp"
#include "lodforge/mesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lodforge {

enum class SynthScene { Box, BoxChimney, BoxWindows, LShape, FullHouse };

std::optional<SynthScene> parse_scene(const std::string& name);
std::string scene_name(SynthScene scene);

/// Union of `add` boxes minus the union of `sub` boxes.
struct CsgSolid {
  std::vector<Aabb> add;
  std::vector<Aabb> sub;

  bool contains(const Point3& p) const;
  Aabb bounds() const;
};

struct SynthOptions {
  double noise_sigma = 0.0;  ///< m, isotropic Gaussian vertex noise
  std::uint64_t seed = 0;
  int windows = 4;           ///< window niches for box_windows / full_house
  double resolution = 0.0;   ///< grid spacing; 0 selects the scene default
};

/// Analytic description of a synthetic scene.
struct SynthTruth {
  std::string scene;
  double volume = 0.0;
  int levels = 0;
  int addons = 0;
  int cutouts = 0;
  std::vector<double> addon_volumes;
  std::vector<double> cutout_volumes;
  double alpha = 7.0;  ///< alpha suited to the scene
};

struct SynthResult {
  TriangleMesh mesh;
  CsgSolid solid;
  SynthTruth truth;
};

CsgSolid scene_solid(SynthScene scene, const SynthOptions& options = {});

/// Watertight, outward-oriented triangulation of the solid boundary on a
/// regular grid of spacing `h`. Box corners must lie on the grid.
TriangleMesh voxel_surface(const CsgSolid& solid, double h);

SynthResult make_scene(SynthScene scene, const SynthOptions& options = {});

}  // namespace lodforge
