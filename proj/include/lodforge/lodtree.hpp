#pragma once

#include "lodforge/ioview.hpp"
#include "lodforge/mesh.hpp"
#include "lodforge/partition.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lodforge {

enum class LodKind { BspInternal, LodMerged, Leaf };

enum class MergeMetric {
  PerStructure,  ///< cluster primitives / cluster structures < K
  PerCluster,    ///< cluster primitives < K
};

struct LodNode {
  int id = -1;
  LodKind kind = LodKind::Leaf;
  int parent = -1;
  std::vector<int> children;
  std::vector<int> cutters;  ///< primitive ids splitting this node
  int level_of_cut = -1;     ///< -1 for leaves
  int cut_count = 0;         ///< BSP splits applied when this node opens
  double volume = 0.0;
  int cell = -1;             ///< leaf cell id in the complex
  std::vector<Label> labels; ///< per level 0..N_l
  std::vector<double> in_volume;  ///< In-labelled leaf volume per level
  std::vector<double> diff;       ///< effective diff-value per level
  int leaf_begin = 0, leaf_end = 0;  ///< range into LodTree::leaf_order

  bool is_leaf() const { return kind == LodKind::Leaf; }
  /// Diff-value at the level this node is cut at.
  double diff_value() const;
};

struct LodTree {
  std::vector<LodNode> nodes;  ///< nodes[0] is the root; ids are preorder
  int level_count = 0;         ///< N_l
  int merge_threshold = 10;
  CellComplex complex;
  std::vector<int> leaf_order;  ///< leaf node ids in preorder
  BspTrace trace;               ///< cut log with primitive ids
  int merged_nodes = 0;

  const LodNode& root() const { return nodes[0]; }
};

/// Space partition with cut order equal to the scale-sorted order, then
/// collapse of BSP chains cut by small clusters into LodMerged nodes.
LodTree build_lod_tree(std::span<const PlanarPrimitive> primitives, const ScaleSortedPrimitives& sorted,
                       const Aabb& box, int merge_threshold = 10,
                       MergeMetric metric = MergeMetric::PerStructure);

/// In iff the In-labelled leaf volume exceeds 65 % of the node volume.
Label volume_label(double in_volume, double volume);

/// Leaf labels per level by ray casting against the alpha-shapes of
/// S_0..S_k; internal nodes In iff their In leaf volume exceeds 65 %.
void compute_labels(LodTree& tree, std::span<const PlanarPrimitive> primitives,
                    const ScaleSortedPrimitives& sorted, int rays_per_cell = 100);

/// diff_k(n) = |x_k(n) V(n) - sum of In leaf volume under n|, zero for leaves
/// and for nodes cut at a level finer than k.
void compute_diff_values(LodTree& tree);

enum class CandidateTag { Anchor, Interpolation };

struct CandidateModel {
  PolygonMesh mesh;
  CandidateTag tag = CandidateTag::Anchor;
  int level = 0;
  int steps = 0;
  int cuts = 0;
  double diff_sum = 0.0;
  int faces = 0;
  std::vector<int> frontier;  ///< node ids, ascending
};

struct TraversalStep {
  int level = 0;
  int expanded = -1;  ///< node opened by this step, -1 for level changes
  int cuts = 0;
  double diff_sum = 0.0;
  double frontier_volume = 0.0;
  int frontier_size = 0;
  int positive = 0;  ///< frontier nodes with positive diff
};

struct Traversal {
  std::vector<CandidateModel> models;
  std::vector<TraversalStep> log;
  int skipped_empty = 0;
};

/// Diff-value guided traversal emitting anchors (diff-sum zero at a level)
/// and interpolations (diff-sum below `pct` of the previous extraction).
Traversal traverse(const LodTree& tree, double pct = 0.8);

/// Facets between differently labelled leaves, oriented from In to Out, with
/// coplanar neighbours merged. Throws EmptyModel when nothing is In.
PolygonMesh extract_mesh(const CellComplex& complex, std::span<const Label> cell_labels);

/// Cell labels induced by a frontier at `level`.
std::vector<Label> frontier_cell_labels(const LodTree& tree, std::span<const int> frontier, int level);

std::string tag_name(CandidateTag tag);

}  // namespace lodforge
