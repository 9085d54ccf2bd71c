#include "lodforge/partition.hpp"

#include "lodforge/error.hpp"
#include "lodforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>

namespace lodforge {

int thread_count() {
  if (const char* env = std::getenv("LODFORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int PlaneRegistry::intern(const PlaneEq& plane, bool* opposite) {
  for (size_t i = 0; i < planes_.size(); ++i) {
    bool flip = false;
    if (near_coincident(planes_[i], plane, offset_tol_, &flip)) {
      if (opposite) *opposite = flip;
      return int(i);
    }
  }
  planes_.push_back(plane);
  if (opposite) *opposite = false;
  return int(planes_.size() - 1);
}

namespace {

struct Fragment {
  int primitive;
  int plane_id;
  ConvexPolygon3 polygon;
  double priority;
};

struct WorkItem {
  int node;
  PolyhedralCell cell;
  std::vector<Fragment> fragments;
};

std::vector<Vec2> to_frame_ccw(const std::vector<Point3>& pts, const PlaneFrame& frame) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(frame.to_2d(p));
  if (polygon_area_2d(out) < 0) std::reverse(out.begin(), out.end());
  return out;
}

bool boxes_overlap_2d(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  Vec2 alo = a[0], ahi = a[0], blo = b[0], bhi = b[0];
  for (const auto& p : a) {
    alo = alo.cwiseMin(p);
    ahi = ahi.cwiseMax(p);
  }
  for (const auto& p : b) {
    blo = blo.cwiseMin(p);
    bhi = bhi.cwiseMax(p);
  }
  return (alo.array() <= bhi.array()).all() && (blo.array() <= ahi.array()).all();
}

}  // namespace

Partition build_partition(std::span<const PlanarPrimitive> primitives, const Aabb& box,
                          const PartitionOptions& options) {
  const Tolerances tol = Tolerances::for_diagonal(box.diagonal());
  Partition out;
  out.complex.box = box;
  out.complex.planes = PlaneRegistry(tol.coplanar);
  auto& reg = out.complex.planes;

  std::array<int, 6> box_ids{};
  const PolyhedralCell root_cell = [&] {
    PolyhedralCell probe = box_cell(box, {0, 0, 0, 0, 0, 0});
    for (int f = 0; f < 6; ++f) box_ids[size_t(f)] = reg.intern(probe.faces[size_t(f)].polygon.plane);
    return box_cell(box, box_ids);
  }();

  std::vector<Fragment> initial;
  out.primitive_plane.resize(primitives.size());
  for (size_t i = 0; i < primitives.size(); ++i) {
    const auto& prim = primitives[i];
    const int pid = reg.intern(prim.plane);
    out.primitive_plane[i] = pid;
    ConvexPolygon3 poly;
    if (options.extent == FragmentExtent::ConvexHull) {
      poly = prim.hull;
    } else {
      const CellSplit s = split_cell(root_cell, reg.plane(pid), pid, tol);
      if (!s.interface_polygon) {
        ++out.dropped_fragments;
        continue;
      }
      poly = *s.interface_polygon;
    }
    if (poly.vertices.size() < 3 || poly.area() < tol.min_area) {
      ++out.dropped_fragments;
      continue;
    }
    const double priority =
        options.order == CutOrder::ListOrder
            ? -double(i)
            : (options.extent == FragmentExtent::ConvexHull ? poly.area() : prim.area);
    initial.push_back({int(i), pid, std::move(poly), priority});
  }

  auto& nodes = out.nodes;
  nodes.push_back(BspNode{0, -1, -1, -1, -1, -1, -1, root_cell.volume()});
  std::vector<WorkItem> stack;
  stack.push_back({0, root_cell, std::move(initial)});

  while (!stack.empty()) {
    WorkItem item = std::move(stack.back());
    stack.pop_back();
    bool split = false;
    while (!item.fragments.empty() && !split) {
      auto best = item.fragments.begin();
      for (auto it = item.fragments.begin(); it != item.fragments.end(); ++it) {
        if (it->priority > best->priority ||
            (it->priority == best->priority && it->primitive < best->primitive))
          best = it;
      }
      const Fragment cutter = *best;
      const PlaneEq& plane = reg.plane(cutter.plane_id);
      CellSplit s = split_cell(item.cell, plane, cutter.plane_id, tol);
      if (!s.front || !s.back) {
        // The plane misses this cell: the fragment (and anything on its plane) is spent.
        std::erase_if(item.fragments, [&](const Fragment& f) { return f.plane_id == cutter.plane_id; });
        continue;
      }
      split = true;
      std::vector<Fragment> front_frags, back_frags;
      for (auto& f : item.fragments) {
        if (f.plane_id == cutter.plane_id) continue;
        PolygonSplit ps = split_polygon(f.polygon, plane, tol);
        if (ps.coplanar) continue;
        if (ps.front) {
          const double pr = options.order == CutOrder::LargestFragment &&
                                    options.extent == FragmentExtent::ConvexHull
                                ? ps.front->area()
                                : f.priority;
          front_frags.push_back({f.primitive, f.plane_id, std::move(*ps.front), pr});
        }
        if (ps.back) {
          const double pr = options.order == CutOrder::LargestFragment &&
                                    options.extent == FragmentExtent::ConvexHull
                                ? ps.back->area()
                                : f.priority;
          back_frags.push_back({f.primitive, f.plane_id, std::move(*ps.back), pr});
        }
        if (!ps.front && !ps.back) ++out.dropped_fragments;
      }
      const int id = item.node;
      const int back_id = int(nodes.size());
      nodes.push_back(BspNode{back_id, id, -1, -1, -1, -1, -1, s.back->volume()});
      const int front_id = int(nodes.size());
      nodes.push_back(BspNode{front_id, id, -1, -1, -1, -1, -1, s.front->volume()});
      nodes[size_t(id)].back = back_id;
      nodes[size_t(id)].front = front_id;
      nodes[size_t(id)].cutter = cutter.primitive;
      nodes[size_t(id)].plane_id = cutter.plane_id;
      out.trace.cuts.push_back({cutter.primitive, id});
      // Front is pushed first so the back subtree is processed first.
      stack.push_back({front_id, std::move(*s.front), std::move(front_frags)});
      stack.push_back({back_id, std::move(*s.back), std::move(back_frags)});
    }
    if (!split) {
      item.cell.id = int(out.complex.cells.size());
      nodes[size_t(item.node)].cell = item.cell.id;
      out.complex.cells.push_back(std::move(item.cell));
    }
  }

  build_facets(out.complex, tol);
  mark_alpha_coverage(out.complex, primitives, out.primitive_plane);
  return out;
}

void build_facets(CellComplex& complex, const Tolerances& tol) {
  struct FaceRef {
    int cell;
    int face;
    Aabb bounds;
  };
  std::map<int, std::pair<std::vector<FaceRef>, std::vector<FaceRef>>> by_plane;  // (back, front)
  for (const auto& cell : complex.cells) {
    for (size_t f = 0; f < cell.faces.size(); ++f) {
      const auto& face = cell.faces[f];
      const PlaneEq& p = complex.planes.plane(face.plane_id);
      // Outward normal along +n means the cell lies behind the plane.
      auto& slot = by_plane[face.plane_id];
      FaceRef ref{cell.id, int(f), face.polygon.bounds()};
      if (face.polygon.plane.normal.dot(p.normal) > 0) {
        slot.first.push_back(ref);
      } else {
        slot.second.push_back(ref);
      }
    }
  }

  complex.facets.clear();
  complex.cell_facets.assign(complex.cells.size(), {});
  auto add = [&](Facet facet) {
    const int id = int(complex.facets.size());
    if (facet.cell_back != kOutside) complex.cell_facets[size_t(facet.cell_back)].push_back(id);
    if (facet.cell_front != kOutside) complex.cell_facets[size_t(facet.cell_front)].push_back(id);
    complex.facets.push_back(std::move(facet));
  };

  for (const auto& [plane_id, sides] : by_plane) {
    const PlaneEq& plane = complex.planes.plane(plane_id);
    const PlaneFrame frame(plane);
    const auto& [backs, fronts] = sides;
    auto lift = [&](const std::vector<Vec2>& poly) {
      ConvexPolygon3 out{plane, {}};
      for (const auto& q : poly) out.vertices.push_back(frame.to_3d(q));
      return out;
    };
    auto polygon_of = [&](const FaceRef& r) {
      return to_frame_ccw(complex.cells[size_t(r.cell)].faces[size_t(r.face)].polygon.vertices, frame);
    };
    if (backs.empty() || fronts.empty()) {
      for (const auto& r : backs) add({lift(polygon_of(r)), plane_id, r.cell, kOutside});
      for (const auto& r : fronts) add({lift(polygon_of(r)), plane_id, kOutside, r.cell});
      continue;
    }
    std::vector<std::vector<Vec2>> front_polys;
    for (const auto& r : fronts) front_polys.push_back(polygon_of(r));
    for (const auto& b : backs) {
      const auto bp = polygon_of(b);
      for (size_t k = 0; k < fronts.size(); ++k) {
        if (!b.bounds.overlaps(fronts[k].bounds, tol.coplanar)) continue;
        auto clipped = clip_convex(bp, front_polys[k]);
        if (clipped.size() < 3 || polygon_area_2d(clipped) < tol.min_area) continue;
        add({lift(clipped), plane_id, b.cell, fronts[k].cell});
      }
    }
  }
}

double facet_alpha_coverage(const ConvexPolygon3& facet, const AlphaShape& shape, double tol) {
  if (!near_coincident(facet.plane, shape.plane, std::max(tol, 1e-12))) {
    throw NotCoplanar("facet and alpha-shape are not coplanar");
  }
  const double area = facet.area();
  if (area <= 0) return 0.0;
  const PlaneFrame frame(facet.plane);
  const auto poly = to_frame_ccw(facet.vertices, frame);
  double overlap = 0.0;
  for (const auto& t : shape.triangles) {
    std::vector<Vec2> tri = to_frame_ccw({t[0], t[1], t[2]}, frame);
    if (!boxes_overlap_2d(tri, poly)) continue;
    const auto c = clip_convex(poly, tri);
    if (c.size() >= 3) overlap += polygon_area_2d(c);
  }
  return std::clamp(overlap / area, 0.0, 1.0);
}

void mark_alpha_coverage(CellComplex& complex, std::span<const PlanarPrimitive> primitives,
                         std::span<const int> primitive_plane) {
  struct Tri2 {
    int primitive;
    std::vector<Vec2> pts;
    Vec2 lo, hi;
  };
  std::map<int, std::vector<Tri2>> by_plane;
  for (size_t i = 0; i < primitives.size(); ++i) {
    const int pid = primitive_plane[i];
    const PlaneFrame frame(complex.planes.plane(pid));
    auto& list = by_plane[pid];
    for (const auto& t : primitives[i].alpha_shape.triangles) {
      Tri2 tri{int(i), to_frame_ccw({t[0], t[1], t[2]}, frame), {}, {}};
      tri.lo = tri.pts[0].cwiseMin(tri.pts[1]).cwiseMin(tri.pts[2]);
      tri.hi = tri.pts[0].cwiseMax(tri.pts[1]).cwiseMax(tri.pts[2]);
      list.push_back(std::move(tri));
    }
  }
  parallel_for(complex.facets.size(), [&](size_t fi) {
    Facet& facet = complex.facets[fi];
    facet.coverage = 0.0;
    facet.alpha_covered = false;
    facet.source_primitive = -1;
    const auto it = by_plane.find(facet.plane_id);
    if (it == by_plane.end()) return;
    const PlaneFrame frame(complex.planes.plane(facet.plane_id));
    const auto poly = to_frame_ccw(facet.polygon.vertices, frame);
    const double area = polygon_area_2d(poly);
    if (area <= 0) return;
    Vec2 lo = poly[0], hi = poly[0];
    for (const auto& p : poly) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    std::map<int, double> overlap;
    for (const auto& tri : it->second) {
      if ((tri.lo.array() > hi.array()).any() || (lo.array() > tri.hi.array()).any()) continue;
      const auto c = clip_convex(poly, tri.pts);
      if (c.size() >= 3) overlap[tri.primitive] += polygon_area_2d(c);
    }
    double total = 0.0, best = 0.0;
    for (const auto& [prim, a] : overlap) {
      total += a;
      if (a > best) {
        best = a;
        facet.source_primitive = prim;
      }
    }
    facet.coverage = std::clamp(total / area, 0.0, 1.0);
    facet.alpha_covered = facet.coverage >= 0.5;
  });
}

std::vector<Vec3> fibonacci_directions(int n) {
  std::vector<Vec3> dirs;
  dirs.reserve(size_t(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return dirs;
}

ShapeScene ShapeScene::from_shapes(std::span<const AlphaShape* const> shapes) {
  std::vector<Triangle3> tris;
  ShapeScene scene;
  for (const AlphaShape* s : shapes) {
    for (const auto& t : s->triangles) {
      tris.push_back(t);
      scene.normals.push_back(s->plane.normal);
    }
  }
  scene.bvh = TriangleBvh(std::move(tris));
  return scene;
}

Point3 chebyshev_center(const PolyhedralCell& cell) {
  Point3 x = cell.centroid();
  auto depth = [&](const Point3& p, int* arg) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < cell.faces.size(); ++i) {
      const double d = -cell.faces[i].polygon.plane.signed_distance(p);
      if (d < best) {
        best = d;
        if (arg) *arg = int(i);
      }
    }
    return best;
  };
  Point3 best_x = x;
  double best_depth = depth(x, nullptr);
  double step = 0.25 * cell.bounds().diagonal();
  for (int iter = 0; iter < 200; ++iter) {
    int arg = 0;
    depth(x, &arg);
    x -= step * cell.faces[size_t(arg)].polygon.plane.normal;
    const double d = depth(x, nullptr);
    if (d > best_depth) {
      best_depth = d;
      best_x = x;
    } else {
      x = best_x;
      step *= 0.7;
    }
  }
  return best_x;
}

CellLabels label_cells(std::span<const PolyhedralCell> cells, const ShapeScene& scene,
                       int rays_per_cell, double tol) {
  const auto dirs = fibonacci_directions(rays_per_cell);
  CellLabels out;
  out.label.assign(cells.size(), Label::Out);
  out.stats.assign(cells.size(), {});
  parallel_for(cells.size(), [&](size_t ci) {
    Point3 origin = cells[ci].centroid();
    if (!scene.bvh.empty()) {
      const auto near = scene.bvh.closest(origin);
      if (near && near->distance <= tol) origin = chebyshev_center(cells[ci]);
    }
    RayStats st;
    for (const auto& d : dirs) {
      const auto hit = scene.bvh.empty() ? std::nullopt : scene.bvh.first_hit(origin, d, tol);
      if (!hit) {
        ++st.misses;
      } else if (d.dot(scene.normals[size_t(hit->triangle)]) > 0) {
        ++st.hits_in;
      } else {
        ++st.hits_out;
      }
    }
    out.stats[ci] = st;
    out.label[ci] = 2 * st.hits_in > rays_per_cell ? Label::In : Label::Out;
  });
  return out;
}

CellLabels label_cells(const CellComplex& complex, std::span<const AlphaShape* const> shapes,
                       int rays_per_cell) {
  const Tolerances tol = Tolerances::for_diagonal(complex.box.diagonal());
  return label_cells(complex.cells, ShapeScene::from_shapes(shapes), rays_per_cell, tol.coplanar);
}

}  // namespace lodforge
