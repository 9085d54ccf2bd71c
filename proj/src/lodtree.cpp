#include "lodforge/lodtree.hpp"

#include "lodforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace lodforge {

double LodNode::diff_value() const {
  if (level_of_cut < 0 || diff.empty()) return 0.0;
  return diff[size_t(std::min<int>(level_of_cut, int(diff.size()) - 1))];
}

std::string tag_name(CandidateTag tag) {
  return tag == CandidateTag::Anchor ? "anchor" : "interpolation";
}

LodTree build_lod_tree(std::span<const PlanarPrimitive> primitives, const ScaleSortedPrimitives& sorted,
                       const Aabb& box, int merge_threshold, MergeMetric metric) {
  const std::vector<int> order = sorted.order();
  if (order.empty()) throw NoPrimitives("scale-sorted primitive set is empty");
  std::vector<int> level_of_prim(primitives.size(), -1);
  for (size_t k = 0; k < sorted.levels.size(); ++k)
    for (int id : sorted.levels[k]) level_of_prim[size_t(id)] = int(k);

  std::vector<PlanarPrimitive> list;
  list.reserve(order.size());
  for (int id : order) list.push_back(primitives[size_t(id)]);
  Partition part = build_partition(list, box, {CutOrder::ListOrder, FragmentExtent::ConvexHull});
  for (auto& f : part.complex.facets) {
    if (f.source_primitive >= 0) f.source_primitive = order[size_t(f.source_primitive)];
  }

  std::vector<int> group_of_prim(primitives.size(), -1);
  for (size_t g = 0; g < sorted.groups.size(); ++g) {
    const auto& grp = sorted.groups[g];
    const size_t n = grp.primitives.size();
    const bool small = metric == MergeMetric::PerStructure
                           ? n < size_t(merge_threshold) * size_t(std::max(1, grp.structures))
                           : n < size_t(merge_threshold);
    if (!small) continue;
    for (int id : grp.primitives) group_of_prim[size_t(id)] = int(g);
  }
  auto cutter_prim = [&](int bsp) { return order[size_t(part.nodes[size_t(bsp)].cutter)]; };
  auto group_of_node = [&](int bsp) {
    const BspNode& b = part.nodes[size_t(bsp)];
    return b.is_leaf() ? -1 : group_of_prim[size_t(cutter_prim(bsp))];
  };

  LodTree tree;
  tree.level_count = sorted.level_count();
  tree.merge_threshold = merge_threshold;
  for (const auto& c : part.trace.cuts) tree.trace.cuts.push_back({order[size_t(c.primitive)], c.node});

  std::function<int(int, int)> emit = [&](int bsp, int parent) -> int {
    const BspNode& b = part.nodes[size_t(bsp)];
    const int id = int(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[size_t(id)].id = id;
    tree.nodes[size_t(id)].parent = parent;
    tree.nodes[size_t(id)].leaf_begin = int(tree.leaf_order.size());
    if (b.is_leaf()) {
      LodNode& n = tree.nodes[size_t(id)];
      n.kind = LodKind::Leaf;
      n.cell = b.cell;
      n.volume = part.complex.cells[size_t(b.cell)].volume();
      tree.leaf_order.push_back(id);
      n.leaf_end = int(tree.leaf_order.size());
      return id;
    }

    std::vector<int> members, child_bsp;
    const int g = group_of_node(bsp);
    if (g >= 0) {
      std::function<void(int)> collect = [&](int x) {
        if (!part.nodes[size_t(x)].is_leaf() && group_of_node(x) == g) {
          members.push_back(x);
          collect(part.nodes[size_t(x)].back);
          collect(part.nodes[size_t(x)].front);
        } else {
          child_bsp.push_back(x);
        }
      };
      collect(bsp);
    }
    if (members.size() >= 2) {
      LodNode& n = tree.nodes[size_t(id)];
      n.kind = LodKind::LodMerged;
      for (int m : members) n.cutters.push_back(cutter_prim(m));
      n.cut_count = int(members.size());
      n.level_of_cut = sorted.groups[size_t(g)].level;
      ++tree.merged_nodes;
    } else {
      LodNode& n = tree.nodes[size_t(id)];
      n.kind = LodKind::BspInternal;
      n.cutters = {cutter_prim(bsp)};
      n.cut_count = 1;
      n.level_of_cut = level_of_prim[size_t(cutter_prim(bsp))];
      child_bsp = {b.back, b.front};
    }
    std::vector<int> children;
    for (int c : child_bsp) children.push_back(emit(c, id));
    LodNode& n = tree.nodes[size_t(id)];
    n.children = std::move(children);
    for (int c : n.children) n.volume += tree.nodes[size_t(c)].volume;
    n.leaf_end = int(tree.leaf_order.size());
    return id;
  };
  emit(0, -1);
  tree.complex = std::move(part.complex);
  return tree;
}

Label volume_label(double in_volume, double volume) {
  return in_volume > 0.65 * volume ? Label::In : Label::Out;
}

void compute_labels(LodTree& tree, std::span<const PlanarPrimitive> primitives,
                    const ScaleSortedPrimitives& sorted, int rays_per_cell) {
  const int levels = tree.level_count + 1;
  const double tol = Tolerances::for_diagonal(tree.complex.box.diagonal()).coplanar;
  std::vector<std::vector<Label>> cell_labels;
  std::vector<const AlphaShape*> shapes;
  for (int k = 0; k < levels; ++k) {
    if (size_t(k) < sorted.levels.size()) {
      for (int id : sorted.levels[size_t(k)]) shapes.push_back(&primitives[size_t(id)].alpha_shape);
    }
    const ShapeScene scene = ShapeScene::from_shapes(shapes);
    cell_labels.push_back(label_cells(tree.complex.cells, scene, rays_per_cell, tol).label);
  }
  for (auto it = tree.nodes.rbegin(); it != tree.nodes.rend(); ++it) {
    LodNode& n = *it;
    n.labels.assign(size_t(levels), Label::Out);
    n.in_volume.assign(size_t(levels), 0.0);
    if (n.is_leaf()) {
      for (int k = 0; k < levels; ++k) {
        n.labels[size_t(k)] = cell_labels[size_t(k)][size_t(n.cell)];
        n.in_volume[size_t(k)] = n.labels[size_t(k)] == Label::In ? n.volume : 0.0;
      }
      continue;
    }
    for (int c : n.children) {
      for (int k = 0; k < levels; ++k) n.in_volume[size_t(k)] += tree.nodes[size_t(c)].in_volume[size_t(k)];
    }
    for (int k = 0; k < levels; ++k) {
      n.labels[size_t(k)] = volume_label(n.in_volume[size_t(k)], n.volume);
    }
  }
}

void compute_diff_values(LodTree& tree) {
  const int levels = tree.level_count + 1;
  for (auto& n : tree.nodes) {
    n.diff.assign(size_t(levels), 0.0);
    if (n.is_leaf()) continue;
    for (int k = n.level_of_cut; k < levels; ++k) {
      const double x = n.labels[size_t(k)] == Label::In ? n.volume : 0.0;
      n.diff[size_t(k)] = std::abs(x - n.in_volume[size_t(k)]);
    }
  }
}

std::vector<Label> frontier_cell_labels(const LodTree& tree, std::span<const int> frontier, int level) {
  std::vector<Label> labels(tree.complex.cells.size(), Label::Out);
  for (int id : frontier) {
    const LodNode& n = tree.nodes[size_t(id)];
    const Label l = n.labels[size_t(level)];
    for (int k = n.leaf_begin; k < n.leaf_end; ++k) {
      labels[size_t(tree.nodes[size_t(tree.leaf_order[size_t(k)])].cell)] = l;
    }
  }
  return labels;
}

Traversal traverse(const LodTree& tree, double pct) {
  Traversal out;
  const int last_level = tree.level_count;
  int level = 0;
  std::set<int> frontier{0};
  std::set<std::pair<double, int>> positive;  // (-diff, id)
  auto diff_of = [&](int id) { return tree.nodes[size_t(id)].diff[size_t(level)]; };
  auto admit = [&](int id) {
    frontier.insert(id);
    if (diff_of(id) > 0) positive.insert({-diff_of(id), id});
  };
  auto diff_sum = [&] {
    double s = 0.0;
    for (const auto& [neg, id] : positive) s -= neg;
    return s;
  };
  long double volume = tree.root().volume;
  int cuts = 0;

  auto log_step = [&](int expanded, double ds) {
    out.log.push_back({level, expanded, cuts, ds, double(volume), int(frontier.size()),
                       int(positive.size())});
  };
  auto extract = [&](CandidateTag tag, double ds) {
    const std::vector<int> nodes(frontier.begin(), frontier.end());
    PolygonMesh mesh;
    try {
      mesh = extract_mesh(tree.complex, frontier_cell_labels(tree, nodes, level));
    } catch (const EmptyModel&) {
      if (tag == CandidateTag::Interpolation) {
        ++out.skipped_empty;
        return false;
      }
      throw;
    }
    CandidateModel m;
    m.faces = int(mesh.faces.size());
    m.mesh = std::move(mesh);
    m.tag = tag;
    m.level = level;
    m.steps = int(out.models.size());
    m.cuts = cuts;
    m.diff_sum = ds;
    m.frontier = nodes;
    out.models.push_back(std::move(m));
    return true;
  };

  admit(0);
  double last = diff_sum();
  log_step(-1, last);
  while (true) {
    if (positive.empty()) {
      extract(CandidateTag::Anchor, 0.0);
      if (level == last_level) break;
      ++level;
      positive.clear();
      for (int id : frontier) {
        if (diff_of(id) > 0) positive.insert({-diff_of(id), id});
      }
      last = diff_sum();
      log_step(-1, last);
      continue;
    }
    const int id = positive.begin()->second;
    positive.erase(positive.begin());
    frontier.erase(id);
    const LodNode& n = tree.nodes[size_t(id)];
    volume -= n.volume;
    for (int c : n.children) {
      admit(c);
      volume += tree.nodes[size_t(c)].volume;
    }
    cuts += n.cut_count;
    const double ds = diff_sum();
    log_step(id, ds);
    if (!positive.empty() && ds < pct * last) {
      if (extract(CandidateTag::Interpolation, ds)) last = ds;
    }
  }
  return out;
}

}  // namespace lodforge
