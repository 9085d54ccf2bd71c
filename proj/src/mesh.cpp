#include "lodforge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace lodforge {

namespace {

Vec3 newell_normal(const std::vector<Point3>& pts) {
  Vec3 n = Vec3::Zero();
  for (size_t i = 0; i < pts.size(); ++i) n += pts[i].cross(pts[(i + 1) % pts.size()]);
  return n;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Ear clipping on a simple polygon given in 2D; returns index triples into `poly`.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly) {
  std::vector<std::array<int, 3>> tris;
  std::vector<int> idx(poly.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (polygon_area_2d(poly) < 0) std::reverse(idx.begin(), idx.end());

  auto inside = [&](const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    return orient2d(a, b, p) >= 0 && orient2d(b, c, p) >= 0 && orient2d(c, a, p) >= 0;
  };
  size_t guard = 0;
  while (idx.size() > 3 && guard < 4 * poly.size() * poly.size()) {
    ++guard;
    bool clipped = false;
    for (size_t i = 0; i < idx.size(); ++i) {
      const int ia = idx[(i + idx.size() - 1) % idx.size()];
      const int ib = idx[i];
      const int ic = idx[(i + 1) % idx.size()];
      const Vec2 &a = poly[ia], &b = poly[ib], &c = poly[ic];
      if (orient2d(a, b, c) <= 0) continue;
      bool ear = true;
      for (int j : idx) {
        if (j == ia || j == ib || j == ic) continue;
        if ((poly[j] - a).norm() == 0 || (poly[j] - b).norm() == 0 || (poly[j] - c).norm() == 0)
          continue;
        if (inside(poly[j], a, b, c)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + long(i));
      clipped = true;
      break;
    }
    if (!clipped) {
      // Only collinear runs remain: drop a degenerate vertex.
      for (size_t i = 0; i < idx.size(); ++i) {
        const int ia = idx[(i + idx.size() - 1) % idx.size()];
        const int ib = idx[i];
        const int ic = idx[(i + 1) % idx.size()];
        if (std::abs(orient2d(poly[ia], poly[ib], poly[ic])) <= 1e-18) {
          idx.erase(idx.begin() + long(i));
          clipped = true;
          break;
        }
      }
      if (!clipped) break;
    }
  }
  if (idx.size() == 3 && orient2d(poly[idx[0]], poly[idx[1]], poly[idx[2]]) > 0) {
    tris.push_back({idx[0], idx[1], idx[2]});
  }
  return tris;
}

}  // namespace

size_t PolygonMesh::triangle_count() const {
  size_t n = 0;
  for (const auto& f : faces) n += f.size() >= 3 ? f.size() - 2 : 0;
  return n;
}

SurfaceReport check_surface(const PolygonMesh& mesh) {
  SurfaceReport r;
  std::map<std::pair<int, int>, int> directed;
  std::set<int> used;
  for (const auto& f : mesh.faces) {
    for (size_t i = 0; i < f.size(); ++i) {
      used.insert(f[i]);
      ++directed[{f[i], f[(i + 1) % f.size()]}];
    }
  }
  std::map<std::pair<int, int>, int> undirected;
  for (const auto& [e, c] : directed) {
    undirected[{std::min(e.first, e.second), std::max(e.first, e.second)}] += c;
  }
  r.watertight = true;
  r.consistent = true;
  for (const auto& [e, c] : undirected) {
    if (c < 2) ++r.boundary_edges;
    if (c > 2) ++r.nonmanifold_edges;
    if (c != 2) r.watertight = false;
    auto ab = directed.find({e.first, e.second});
    auto ba = directed.find({e.second, e.first});
    if (ab == directed.end() || ba == directed.end() || ab->second != 1 || ba->second != 1) {
      r.consistent = false;
    }
  }

  // Vertex links: following corners across shared edges must visit every
  // corner of the vertex in a single cycle.
  r.manifold = r.watertight && r.consistent;
  if (r.manifold) {
    std::map<int, std::map<int, int>> link;  // vertex -> (prev -> next)
    std::map<int, int> corner_count;
    for (const auto& f : mesh.faces) {
      const size_t n = f.size();
      for (size_t i = 0; i < n; ++i) {
        const int v = f[i];
        link[v][f[(i + n - 1) % n]] = f[(i + 1) % n];
        ++corner_count[v];
      }
    }
    for (const auto& [v, m] : link) {
      if (int(m.size()) != corner_count[v]) {
        r.manifold = false;
        break;
      }
      int start = m.begin()->first;
      int cur = start;
      int steps = 0;
      do {
        auto it = m.find(cur);
        if (it == m.end()) break;
        cur = it->second;
        ++steps;
      } while (cur != start && steps <= corner_count[v]);
      if (cur != start || steps != corner_count[v]) {
        r.manifold = false;
        break;
      }
    }
  }

  UnionFind uf(mesh.vertices.size());
  for (const auto& f : mesh.faces)
    for (size_t i = 1; i < f.size(); ++i) uf.unite(f[0], f[i]);
  std::set<int> roots;
  for (int v : used) roots.insert(uf.find(v));
  r.components = int(roots.size());
  r.euler = int(used.size()) - int(undirected.size()) + int(mesh.faces.size());
  return r;
}

double mesh_volume(const PolygonMesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  const Point3 ref = mesh.vertices[0];
  double v = 0.0;
  for (const auto& f : mesh.faces) {
    for (size_t i = 1; i + 1 < f.size(); ++i) {
      v += (mesh.vertices[f[0]] - ref)
               .dot((mesh.vertices[f[i]] - ref).cross(mesh.vertices[f[i + 1]] - ref));
    }
  }
  return v / 6.0;
}

double mesh_area(const PolygonMesh& mesh) {
  double a = 0.0;
  for (const auto& f : mesh.faces) {
    std::vector<Point3> pts;
    for (int i : f) pts.push_back(mesh.vertices[i]);
    a += 0.5 * newell_normal(pts).norm();
  }
  return a;
}

Aabb mesh_bounds(const PolygonMesh& mesh) {
  Aabb b;
  for (const auto& v : mesh.vertices) b.extend(v);
  return b;
}

TriangleMesh triangulate(const PolygonMesh& mesh) {
  TriangleMesh out;
  out.vertices = mesh.vertices;
  for (const auto& f : mesh.faces) {
    if (f.size() < 3) continue;
    std::vector<Point3> pts;
    for (int i : f) pts.push_back(mesh.vertices[i]);
    const Vec3 n = newell_normal(pts);
    if (n.norm() == 0.0) continue;
    if (f.size() == 3) {
      out.triangles.push_back({f[0], f[1], f[2]});
      continue;
    }
    const PlaneFrame frame(PlaneEq::through(pts[0], n));
    std::vector<Vec2> poly;
    for (const auto& p : pts) poly.push_back(frame.to_2d(p));
    for (const auto& t : ear_clip(poly)) out.triangles.push_back({f[t[0]], f[t[1]], f[t[2]]});
  }
  compute_face_normals(out);
  return out;
}

PolygonMesh to_polygon_mesh(const TriangleMesh& mesh) {
  PolygonMesh out;
  out.vertices = mesh.vertices;
  for (const auto& t : mesh.triangles) out.faces.push_back({t[0], t[1], t[2]});
  return out;
}

void compute_face_normals(TriangleMesh& mesh) {
  mesh.normals.clear();
  mesh.normals.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                       .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    const double len = n.norm();
    mesh.normals.push_back(len > 0 ? Vec3(n / len) : Vec3::UnitZ());
  }
}

Aabb bbox(const InputModel& input, double pad_fraction) {
  Aabb b;
  if (input.is_mesh()) {
    for (const auto& v : input.mesh().vertices) b.extend(v);
  } else {
    for (const auto& p : input.cloud().points) b.extend(p);
  }
  return b.padded(pad_fraction * b.diagonal());
}

}  // namespace lodforge
