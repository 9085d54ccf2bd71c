#include "lodforge/ioview.hpp"

#include "lodforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

namespace lodforge {

namespace {

class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[size_t(x)] != x) {
      parent_[size_t(x)] = parent_[size_t(parent_[size_t(x)])];
      x = parent_[size_t(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[size_t(b)] = a;
  }

 private:
  std::vector<int> parent_;
};

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

std::vector<int> cell_region_map(const CellComplex& complex, std::span<const Region> regions) {
  std::vector<int> map(complex.cells.size(), -1);
  for (const auto& r : regions)
    for (int c : r.cells) map[size_t(c)] = r.id;
  return map;
}

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

/// Moves `prim` onto the plane with normal `n` through the mean of its
/// support. Refuses when a support point would move further than `max_move`.
bool snap_plane(PlanarPrimitive& prim, const Vec3& n, double max_move, double alpha) {
  if (prim.support.empty()) return false;
  double offset = 0.0;
  for (const auto& p : prim.support) offset += n.dot(p);
  offset /= double(prim.support.size());
  const PlaneEq plane{n, offset};
  for (const auto& p : prim.support) {
    if (std::abs(plane.signed_distance(p)) > max_move) return false;
  }
  PlanarPrimitive next = prim;
  next.plane = plane;
  for (auto& p : next.support) p = plane.project(p);
  try {
    refresh_footprint(next, alpha);
  } catch (const DegenerateProjection&) {
    return false;
  }
  prim = std::move(next);
  return true;
}

/// Normal of `n` snapped parallel or orthogonal to `ref` when within `angle`.
std::optional<Vec3> snap_relative(const Vec3& n, const Vec3& ref, double angle) {
  const double c = n.dot(ref);
  if (std::abs(c) >= std::cos(angle)) return c >= 0 ? ref : Vec3(-ref);
  if (std::abs(c) <= std::sin(angle)) {
    const Vec3 t = n - c * ref;
    if (t.norm() > 0) return t.normalized();
  }
  return std::nullopt;
}

void merge_into(PlanarPrimitive& target, PlanarPrimitive& source, double alpha) {
  target.inliers.insert(target.inliers.end(), source.inliers.begin(), source.inliers.end());
  sort_unique(target.inliers);
  target.support.insert(target.support.end(), source.support.begin(), source.support.end());
  source.inliers.clear();
  source.support.clear();
  source.alpha_shape.triangles.clear();
  source.area = 0.0;
  double offset = 0.0;
  for (const auto& p : target.support) offset += target.plane.normal.dot(p);
  target.plane.offset = offset / double(target.support.size());
  for (auto& p : target.support) p = target.plane.project(p);
  refresh_footprint(target, alpha);
}

/// Merges same-orientation coplanar members of `ids`. Returns merged pairs
/// (source, target).
std::vector<std::pair<int, int>> merge_coplanar(std::vector<PlanarPrimitive>& prims,
                                                const std::vector<int>& ids, double distance,
                                                double alpha) {
  std::vector<std::pair<int, int>> merged;
  std::vector<int> order = ids;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto &pa = prims[size_t(a)], &pb = prims[size_t(b)];
    return pa.area > pb.area || (pa.area == pb.area && a < b);
  });
  std::vector<bool> gone(prims.size(), false);
  for (size_t i = 0; i < order.size(); ++i) {
    const int t = order[i];
    if (gone[size_t(t)] || prims[size_t(t)].support.empty()) continue;
    for (size_t j = i + 1; j < order.size(); ++j) {
      const int s = order[j];
      if (gone[size_t(s)] || prims[size_t(s)].support.empty()) continue;
      const auto &pt = prims[size_t(t)].plane, &ps = prims[size_t(s)].plane;
      if (pt.normal.dot(ps.normal) < std::cos(deg2rad(0.1))) continue;
      if (std::abs(pt.offset - ps.offset) >= distance) continue;
      merge_into(prims[size_t(t)], prims[size_t(s)], alpha);
      gone[size_t(s)] = true;
      merged.emplace_back(s, t);
    }
  }
  return merged;
}

void remap_ids(std::vector<int>& ids, const std::map<int, int>& remap) {
  for (auto& id : ids) {
    auto it = remap.find(id);
    while (it != remap.end()) {
      id = it->second;
      it = remap.find(id);
    }
  }
  sort_unique(ids);
}

PlanarPrimitive rectangle_primitive(const Point3& corner, const Vec3& e1, const Vec3& e2,
                                    const Vec3& normal, double alpha) {
  PlanarPrimitive p;
  p.plane = PlaneEq::through(corner, normal);
  const double step = std::max(alpha / 2.0, 1e-9);
  const int n1 = std::max(1, int(std::ceil(e1.norm() / step)));
  const int n2 = std::max(1, int(std::ceil(e2.norm() / step)));
  for (int i = 0; i <= n1; ++i)
    for (int j = 0; j <= n2; ++j) p.support.push_back(corner + (double(i) / n1) * e1 + (double(j) / n2) * e2);
  refresh_footprint(p, alpha);
  return p;
}

}  // namespace

int StructureSet::addon_count() const {
  return int(std::count_if(structures.begin(), structures.end(),
                           [](const Structure& s) { return s.kind == StructureKind::Addon; }));
}

int StructureSet::cutout_count() const {
  return int(structures.size()) - addon_count();
}

MeanShift mean_shift_1d(std::span<const double> values, double bandwidth) {
  MeanShift out;
  const size_t n = values.size();
  out.assignment.assign(n, -1);
  if (n == 0) return out;
  std::vector<double> converged(n);
  for (size_t i = 0; i < n; ++i) {
    double x = values[i];
    for (int iter = 0; iter < 10000; ++iter) {
      double sum = 0.0;
      int count = 0;
      for (double v : values) {
        if (std::abs(v - x) <= bandwidth) {
          sum += v;
          ++count;
        }
      }
      const double next = sum / count;
      const double shift = std::abs(next - x);
      x = next;
      if (shift < 1e-6 * bandwidth) break;
    }
    converged[i] = x;
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return converged[a] < converged[b]; });
  int cluster = 0;
  double sum = converged[order[0]];
  int count = 1;
  out.assignment[order[0]] = 0;
  for (size_t k = 1; k < n; ++k) {
    if (converged[order[k]] - converged[order[k - 1]] >= bandwidth / 2.0) {
      out.modes.push_back(sum / count);
      ++cluster;
      sum = 0.0;
      count = 0;
    }
    out.assignment[order[k]] = cluster;
    sum += converged[order[k]];
    ++count;
  }
  out.modes.push_back(sum / count);
  return out;
}

std::vector<Region> merge_regions(const CellComplex& complex, std::span<const Label> labels) {
  const size_t n = complex.cells.size();
  UnionFind uf(n);
  for (const auto& f : complex.facets) {
    if (f.cell_back == kOutside || f.cell_front == kOutside || f.alpha_covered) continue;
    if (labels[size_t(f.cell_back)] != labels[size_t(f.cell_front)]) continue;
    uf.unite(f.cell_back, f.cell_front);
  }
  std::vector<int> region_of_root(n, -1);
  std::vector<Region> regions;
  std::vector<int> region_of(n);
  for (size_t c = 0; c < n; ++c) {
    const int root = uf.find(int(c));
    if (region_of_root[size_t(root)] < 0) {
      region_of_root[size_t(root)] = int(regions.size());
      Region r;
      r.id = int(regions.size());
      r.label = labels[c];
      regions.push_back(std::move(r));
    }
    Region& r = regions[size_t(region_of_root[size_t(root)])];
    r.cells.push_back(int(c));
    r.volume += complex.cells[c].volume();
    region_of[c] = r.id;
  }
  for (const auto& f : complex.facets) {
    if (!f.alpha_covered || f.source_primitive < 0) continue;
    const int rb = f.cell_back == kOutside ? -1 : region_of[size_t(f.cell_back)];
    const int rf = f.cell_front == kOutside ? -1 : region_of[size_t(f.cell_front)];
    if (rb == rf) continue;
    if (rb >= 0) regions[size_t(rb)].boundary_primitives.push_back(f.source_primitive);
    if (rf >= 0) regions[size_t(rf)].boundary_primitives.push_back(f.source_primitive);
  }
  for (auto& r : regions) sort_unique(r.boundary_primitives);
  return regions;
}

StructureSet classify_structures(const CellComplex& complex, std::span<const Region> regions) {
  StructureSet s;
  auto pick = [&](Label label) {
    int best = -1;
    for (const auto& r : regions) {
      if (r.label != label) continue;
      if (best < 0 || r.volume > regions[size_t(best)].volume) best = r.id;
    }
    return best;
  };
  s.core_interior = pick(Label::In);
  if (s.core_interior < 0) throw NoInterior("no cell was labelled inside; is the input enclosing a volume?");
  s.core_exterior = pick(Label::Out);
  if (s.core_exterior < 0) throw NoInterior("no cell was labelled outside");

  const auto region_of = cell_region_map(complex, regions);
  auto side_region = [&](int cell) { return cell == kOutside ? -1 : region_of[size_t(cell)]; };

  std::set<int> principal;
  for (const auto& f : complex.facets) {
    if (!f.alpha_covered || f.source_primitive < 0) continue;
    const int a = side_region(f.cell_back), b = side_region(f.cell_front);
    if ((a == s.core_interior && b == s.core_exterior) || (a == s.core_exterior && b == s.core_interior)) {
      principal.insert(f.source_primitive);
    }
  }
  s.principal.assign(principal.begin(), principal.end());

  std::map<int, int> structure_of_region;
  for (const auto& r : regions) {
    if (r.id == s.core_interior || r.id == s.core_exterior) continue;
    Structure st;
    st.id = int(s.structures.size());
    st.region = r.id;
    st.kind = r.label == Label::In ? StructureKind::Addon : StructureKind::Cutout;
    st.volume = r.volume;
    structure_of_region[r.id] = st.id;
    s.structures.push_back(std::move(st));
  }

  // Shared covered area per (structure, primitive).
  std::map<std::pair<int, int>, double> shared;
  for (const auto& f : complex.facets) {
    if (!f.alpha_covered || f.source_primitive < 0) continue;
    const int a = side_region(f.cell_back), b = side_region(f.cell_front);
    if (a == b) continue;
    const double area = f.polygon.area();
    for (int r : {a, b}) {
      auto it = structure_of_region.find(r);
      if (it != structure_of_region.end()) shared[{it->second, f.source_primitive}] += area;
    }
  }
  std::map<int, std::pair<int, double>> owner;  // primitive -> (structure, area)
  for (const auto& [key, area] : shared) {
    const auto [sid, prim] = key;
    Structure& st = s.structures[size_t(sid)];
    if (principal.count(prim)) {
      if (area > st.projected_area) {
        if (st.host >= 0) ++s.multi_host;
        st.host = prim;
        st.projected_area = area;
      } else {
        ++s.multi_host;
      }
      continue;
    }
    auto it = owner.find(prim);
    if (it == owner.end() || area > it->second.second) owner[prim] = {sid, area};
  }
  for (const auto& [prim, o] : owner) s.structures[size_t(o.first)].primitives.push_back(prim);
  return s;
}

std::vector<Cluster> cluster_stage1(const StructureSet& structs, double bandwidth) {
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (const auto& st : structs.structures) groups[{st.host, int(st.kind)}].push_back(st.id);
  std::vector<Cluster> clusters;
  for (const auto& [key, members] : groups) {
    std::vector<double> areas;
    for (int id : members) areas.push_back(structs.structures[size_t(id)].projected_area);
    const MeanShift ms = mean_shift_1d(areas, bandwidth);
    const size_t first = clusters.size();
    for (size_t m = 0; m < ms.modes.size(); ++m) {
      Cluster c;
      c.host = key.first;
      c.kind = StructureKind(key.second);
      clusters.push_back(std::move(c));
    }
    for (size_t i = 0; i < members.size(); ++i) {
      clusters[first + size_t(ms.assignment[i])].structures.push_back(members[i]);
    }
  }
  for (size_t i = 0; i < clusters.size(); ++i) {
    Cluster& c = clusters[i];
    c.id = int(i);
    for (int sid : c.structures) {
      const Structure& st = structs.structures[size_t(sid)];
      c.projected_area += st.projected_area;
      c.mean_volume += st.volume;
      c.primitives.insert(c.primitives.end(), st.primitives.begin(), st.primitives.end());
    }
    c.projected_area /= double(c.structures.size());
    c.mean_volume /= double(c.structures.size());
    sort_unique(c.primitives);
  }
  return clusters;
}

std::vector<LevelSet> cluster_stage2(std::vector<Cluster>& clusters, double bandwidth) {
  if (clusters.empty()) return {};
  std::vector<double> volumes;
  for (const auto& c : clusters) volumes.push_back(c.mean_volume);
  const MeanShift ms = mean_shift_1d(volumes, bandwidth);
  const int count = int(ms.modes.size());
  std::vector<LevelSet> levels(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) levels[size_t(i)].id = i + 1;
  for (size_t i = 0; i < clusters.size(); ++i) {
    const int level = count - ms.assignment[i];  // largest mode first
    clusters[i].level = level;
    levels[size_t(level - 1)].clusters.push_back(clusters[i].id);
  }
  for (auto& l : levels) {
    for (int cid : l.clusters) l.mean_volume += clusters[size_t(cid)].mean_volume;
    l.mean_volume /= double(l.clusters.size());
  }
  return levels;
}

RegularizeReport regularize(std::vector<PlanarPrimitive>& primitives, StructureSet& structs,
                            std::vector<Cluster>& clusters, const CellComplex& complex,
                            std::span<const Region> regions, const RegularizeParams& params) {
  RegularizeReport report;
  const double max_move = 10.0 * params.epsilon;
  std::map<int, int> remap;
  auto try_snap = [&](int id, const Vec3& n) {
    PlanarPrimitive& p = primitives[size_t(id)];
    if (p.support.empty()) return;
    if ((p.plane.normal - n).norm() == 0.0) {
      // Normal already exact; still settle the offset on the support mean.
      snap_plane(p, n, max_move, params.alpha);
      return;
    }
    if (snap_plane(p, n, max_move, params.alpha)) {
      ++report.snapped;
    } else {
      ++report.rejected;
    }
  };

  // (a) principal primitives: parallel groups, orthogonal snapping, coplanar merging.
  {
    const double angle = deg2rad(params.principal_angle);
    std::vector<int> order = structs.principal;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto &pa = primitives[size_t(a)], &pb = primitives[size_t(b)];
      return pa.area > pb.area || (pa.area == pb.area && a < b);
    });
    std::vector<Vec3> reps;
    std::vector<std::vector<int>> groups;
    for (int id : order) {
      const Vec3& n = primitives[size_t(id)].plane.normal;
      bool placed = false;
      for (size_t g = 0; g < reps.size() && !placed; ++g) {
        if (std::abs(n.dot(reps[g])) >= std::cos(angle)) {
          groups[g].push_back(id);
          placed = true;
        }
      }
      if (!placed) {
        reps.push_back(n);
        groups.push_back({id});
      }
    }
    for (size_t g = 1; g < reps.size(); ++g) {
      Vec3 r = reps[g];
      for (size_t h = 0; h < g; ++h) {
        if (std::abs(r.dot(reps[h])) <= std::sin(angle)) r -= r.dot(reps[h]) * reps[h];
      }
      reps[g] = r.normalized();
    }
    for (size_t g = 0; g < groups.size(); ++g) {
      for (int id : groups[g]) {
        const Vec3& n = primitives[size_t(id)].plane.normal;
        try_snap(id, n.dot(reps[g]) >= 0 ? reps[g] : Vec3(-reps[g]));
      }
      for (auto [s, t] : merge_coplanar(primitives, groups[g], params.coplanar_distance, params.alpha)) {
        remap[s] = t;
        ++report.merged;
      }
    }
    remap_ids(structs.principal, remap);
  }

  // (b) cluster members relative to their host.
  {
    const double angle = deg2rad(params.cluster_angle);
    for (auto& st : structs.structures) {
      remap_ids(st.primitives, remap);
      if (st.host < 0) continue;
      auto it = remap.find(st.host);
      if (it != remap.end()) st.host = it->second;
      const Vec3 ref = primitives[size_t(st.host)].plane.normal;
      for (int id : st.primitives) {
        if (auto n = snap_relative(primitives[size_t(id)].plane.normal, ref, angle)) try_snap(id, *n);
      }
      for (auto [s, t] : merge_coplanar(primitives, st.primitives, params.coplanar_distance, params.alpha)) {
        remap[s] = t;
        ++report.merged;
      }
      remap_ids(st.primitives, remap);
    }
  }

  // (c) window templates.
  if (params.templates) {
    const auto cell_in_region = [&](int region) -> const std::vector<int>& {
      return regions[size_t(region)].cells;
    };
    const Vec3 up = params.up.normalized();
    for (const auto& c : clusters) {
      if (c.host < 0 || c.kind != StructureKind::Cutout) continue;
      if (int(c.structures.size()) <= params.window_min_cutouts) continue;
      int host = c.host;
      if (auto it = remap.find(host); it != remap.end()) host = it->second;
      const PlaneEq hp = primitives[size_t(host)].plane;
      if (std::abs(hp.normal.dot(up)) > std::sin(deg2rad(params.vertical_angle))) continue;
      const Vec3 w = hp.normal;
      const Vec3 a = (up - up.dot(w) * w).normalized();
      const Vec3 b = a.cross(w);
      for (int sid : c.structures) {
        Structure& st = structs.structures[size_t(sid)];
        Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
        Eigen::Vector3d hi = -lo;
        for (int cell : cell_in_region(st.region)) {
          for (const auto& f : complex.cells[size_t(cell)].faces) {
            for (const auto& v : f.polygon.vertices) {
              const Eigen::Vector3d q(a.dot(v), b.dot(v), w.dot(v));
              lo = lo.cwiseMin(q);
              hi = hi.cwiseMax(q);
            }
          }
        }
        const Eigen::Vector3d ext = hi - lo;
        if (!(ext.minCoeff() > 1e-6 * complex.box.diagonal())) continue;
        const bool front_is_hi = std::abs(hi.z() - hp.offset) <= std::abs(lo.z() - hp.offset);
        const double sign = st.kind == StructureKind::Cutout ? 1.0 : -1.0;  // normals into the cuboid for cutouts
        const Point3 o = lo.x() * a + lo.y() * b + lo.z() * w;
        const Vec3 ea = ext.x() * a, eb = ext.y() * b, ew = ext.z() * w;
        std::vector<PlanarPrimitive> faces;
        faces.push_back(rectangle_primitive(o, eb, ew, sign * a, params.alpha));
        faces.push_back(rectangle_primitive(o + ea, eb, ew, -sign * a, params.alpha));
        faces.push_back(rectangle_primitive(o, ea, ew, sign * b, params.alpha));
        faces.push_back(rectangle_primitive(o + eb, ea, ew, -sign * b, params.alpha));
        if (front_is_hi) {
          faces.push_back(rectangle_primitive(o, ea, eb, sign * w, params.alpha));
        } else {
          faces.push_back(rectangle_primitive(o + ew, ea, eb, -sign * w, params.alpha));
        }
        for (int old : st.primitives) {
          primitives[size_t(old)].inliers.clear();
          primitives[size_t(old)].support.clear();
          primitives[size_t(old)].alpha_shape.triangles.clear();
          primitives[size_t(old)].area = 0.0;
        }
        st.primitives.clear();
        for (auto& f : faces) {
          f.id = int(primitives.size());
          st.primitives.push_back(f.id);
          primitives.push_back(std::move(f));
        }
        ++report.templates;
      }
    }
  }

  for (auto& c : clusters) {
    c.primitives.clear();
    if (auto it = remap.find(c.host); it != remap.end()) c.host = it->second;
    for (int sid : c.structures) {
      const auto& p = structs.structures[size_t(sid)].primitives;
      c.primitives.insert(c.primitives.end(), p.begin(), p.end());
    }
    sort_unique(c.primitives);
  }
  return report;
}

std::vector<int> ScaleSortedPrimitives::order() const {
  std::vector<int> out;
  for (const auto& l : levels) out.insert(out.end(), l.begin(), l.end());
  return out;
}

ScaleSortedPrimitives sort_primitives(std::span<const PlanarPrimitive> primitives,
                                      const StructureSet& structs,
                                      std::span<const Cluster> clusters,
                                      std::span<const LevelSet> levels) {
  auto by_area = [&](int a, int b) {
    const auto &pa = primitives[size_t(a)], &pb = primitives[size_t(b)];
    return pa.area > pb.area || (pa.area == pb.area && a < b);
  };
  auto alive = [&](int id) { return !primitives[size_t(id)].support.empty(); };

  ScaleSortedPrimitives out;
  std::set<int> used;
  std::vector<int> s0;
  for (int id : structs.principal) {
    if (alive(id) && used.insert(id).second) s0.push_back(id);
  }
  std::sort(s0.begin(), s0.end(), by_area);
  out.levels.push_back(std::move(s0));

  std::vector<LevelSet> sorted_levels(levels.begin(), levels.end());
  std::sort(sorted_levels.begin(), sorted_levels.end(),
            [](const LevelSet& a, const LevelSet& b) { return a.id < b.id; });
  for (const auto& level : sorted_levels) {
    std::vector<int> cids = level.clusters;
    std::sort(cids.begin(), cids.end(), [&](int a, int b) {
      const auto &ca = clusters[size_t(a)], &cb = clusters[size_t(b)];
      return ca.mean_volume > cb.mean_volume || (ca.mean_volume == cb.mean_volume && a < b);
    });
    std::vector<int> level_prims;
    std::vector<ScaleSortedPrimitives::Group> groups;
    for (int cid : cids) {
      const Cluster& c = clusters[size_t(cid)];
      std::vector<int> prims;
      for (int sid : c.structures) {
        for (int id : structs.structures[size_t(sid)].primitives) {
          if (alive(id) && used.insert(id).second) prims.push_back(id);
        }
      }
      if (prims.empty()) continue;
      std::sort(prims.begin(), prims.end(), by_area);
      level_prims.insert(level_prims.end(), prims.begin(), prims.end());
      groups.push_back({0, cid, int(c.structures.size()), std::move(prims)});
    }
    if (level_prims.empty()) continue;
    const int k = int(out.levels.size());
    for (auto& g : groups) {
      g.level = k;
      out.groups.push_back(std::move(g));
    }
    out.levels.push_back(std::move(level_prims));
  }
  return out;
}

}  // namespace lodforge
