#pragma once

#include "lodforge/partition.hpp"
#include "lodforge/primitives.hpp"

#include <span>
#include <vector>

namespace lodforge {

/// Connected same-label cells not separated by an alpha-covered facet.
struct Region {
  int id = -1;
  Label label = Label::Out;
  std::vector<int> cells;
  double volume = 0.0;
  std::vector<int> boundary_primitives;  ///< sources of covered facets on the boundary
};

enum class StructureKind { Addon, Cutout };

/// Secondary structure: a region other than the two cores.
struct Structure {
  int id = -1;
  int region = -1;
  StructureKind kind = StructureKind::Addon;
  double volume = 0.0;
  int host = -1;                ///< principal primitive it sits on, -1 if none
  double projected_area = 0.0;  ///< covered facet area shared with the host
  std::vector<int> primitives;  ///< non-principal primitives bounding it
};

struct StructureSet {
  int core_interior = -1;  ///< region id of V_in
  int core_exterior = -1;  ///< region id of V_out
  std::vector<Structure> structures;
  std::vector<int> principal;  ///< S0 primitive ids, ascending
  int multi_host = 0;          ///< structures touching more than one principal primitive

  int addon_count() const;
  int cutout_count() const;
};

struct Cluster {
  int id = -1;
  StructureKind kind = StructureKind::Addon;
  int host = -1;
  std::vector<int> structures;
  std::vector<int> primitives;
  double projected_area = 0.0;  ///< mean over members
  double mean_volume = 0.0;
  int level = -1;  ///< 1-based level set id
};

struct LevelSet {
  int id = -1;  ///< 1..N_l, coarse to fine
  std::vector<int> clusters;
  double mean_volume = 0.0;
};

struct MeanShift {
  std::vector<int> assignment;  ///< cluster index per value, clusters by ascending mode
  std::vector<double> modes;
};

/// Flat-kernel mean shift in 1D. Values whose converged modes lie closer than
/// half the bandwidth share a cluster.
MeanShift mean_shift_1d(std::span<const double> values, double bandwidth);

std::vector<Region> merge_regions(const CellComplex& complex, std::span<const Label> labels);

/// Throws NoInterior when no region is labelled In.
StructureSet classify_structures(const CellComplex& complex, std::span<const Region> regions);

/// Mean shift on projected areas per (host, kind) group.
std::vector<Cluster> cluster_stage1(const StructureSet& structs, double bandwidth = 2.0);

/// Mean shift on cluster mean volumes. Sets Cluster::level; levels ordered by
/// descending mean volume.
std::vector<LevelSet> cluster_stage2(std::vector<Cluster>& clusters, double bandwidth = 4.0);

struct RegularizeParams {
  double principal_angle = 5.0;    ///< degrees
  double cluster_angle = 15.0;     ///< degrees
  double coplanar_distance = 0.01; ///< m
  double epsilon = 0.15;           ///< snaps moving a support point further than 10 epsilon are rejected
  double alpha = 7.0;
  Vec3 up = Vec3::UnitZ();
  double vertical_angle = 5.0;     ///< degrees
  int window_min_cutouts = 3;      ///< templates when a cluster has more cutouts than this
  bool templates = true;
};

struct RegularizeReport {
  int snapped = 0;
  int rejected = 0;
  int merged = 0;
  int templates = 0;  ///< structures replaced by cuboids
};

/// Snaps parallel/orthogonal/coplanar relations among principal primitives
/// and between cluster members and their host, and replaces window-like
/// cutouts by cuboids. Updates primitive ids referenced by `structs` and
/// `clusters`; merged primitives are left without inliers or support.
RegularizeReport regularize(std::vector<PlanarPrimitive>& primitives, StructureSet& structs,
                            std::vector<Cluster>& clusters, const CellComplex& complex,
                            std::span<const Region> regions, const RegularizeParams& params);

struct ScaleSortedPrimitives {
  /// levels[0] is S0; levels[k] is S_k.
  std::vector<std::vector<int>> levels;

  struct Group {
    int level = 0;
    int cluster = -1;
    int structures = 0;
    std::vector<int> primitives;
  };
  std::vector<Group> groups;  ///< secondary clusters in sorted order

  int level_count() const { return levels.empty() ? 0 : int(levels.size()) - 1; }
  std::vector<int> order() const;
};

ScaleSortedPrimitives sort_primitives(std::span<const PlanarPrimitive> primitives,
                                      const StructureSet& structs,
                                      std::span<const Cluster> clusters,
                                      std::span<const LevelSet> levels);

}  // namespace lodforge
