#include "lodforge/error.hpp"
#include "lodforge/lodtree.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

namespace lodforge {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using BBox = bg::model::box<BPoint>;
using BValue = std::pair<BPoint, int>;

struct OutFace {
  std::vector<int> loop;
  int plane_id;
  int orientation;  // +1 along the registry normal, -1 against it
  bool alive = true;
};

class Welder {
 public:
  explicit Welder(double tol) : tol_(tol) {}

  int add(const Point3& p) {
    const Key k = key(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = grid_.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == grid_.end()) continue;
          for (int id : it->second) {
            if ((points_[size_t(id)] - p).norm() <= tol_) return id;
          }
        }
    const int id = int(points_.size());
    points_.push_back(p);
    grid_[k].push_back(id);
    return id;
  }

  std::vector<Point3>& points() { return points_; }

 private:
  using Key = std::array<long long, 3>;
  struct KeyHash {
    size_t operator()(const Key& k) const {
      return size_t(k[0] * 73856093LL) ^ size_t(k[1] * 19349663LL) ^ size_t(k[2] * 83492791LL);
    }
  };
  Key key(const Point3& p) const {
    return {(long long)std::floor(p.x() / tol_), (long long)std::floor(p.y() / tol_),
            (long long)std::floor(p.z() / tol_)};
  }

  double tol_;
  std::vector<Point3> points_;
  std::unordered_map<Key, std::vector<int>, KeyHash> grid_;
};

void split_t_junctions(std::vector<OutFace>& faces, const std::vector<Point3>& pts, double tol) {
  std::vector<BValue> values;
  for (size_t i = 0; i < pts.size(); ++i) values.emplace_back(BPoint(pts[i].x(), pts[i].y(), pts[i].z()), int(i));
  const bgi::rtree<BValue, bgi::quadratic<16>> tree(values.begin(), values.end());
  std::vector<BValue> found;
  for (auto& f : faces) {
    std::vector<int> loop;
    const size_t n = f.loop.size();
    for (size_t i = 0; i < n; ++i) {
      const int a = f.loop[i], b = f.loop[(i + 1) % n];
      loop.push_back(a);
      const Point3 &pa = pts[size_t(a)], &pb = pts[size_t(b)];
      const Vec3 d = pb - pa;
      const double len2 = d.squaredNorm();
      if (len2 <= 0) continue;
      const Point3 lo = pa.cwiseMin(pb).array() - tol, hi = pa.cwiseMax(pb).array() + tol;
      found.clear();
      tree.query(bgi::intersects(BBox(BPoint(lo.x(), lo.y(), lo.z()), BPoint(hi.x(), hi.y(), hi.z()))),
                 std::back_inserter(found));
      std::vector<std::pair<double, int>> inner;
      for (const auto& v : found) {
        const int id = v.second;
        if (id == a || id == b) continue;
        const Vec3 q = pts[size_t(id)] - pa;
        const double t = q.dot(d) / len2;
        if (t <= 0 || t >= 1) continue;
        if ((q - t * d).norm() > tol) continue;
        inner.emplace_back(t, id);
      }
      std::sort(inner.begin(), inner.end());
      for (const auto& [t, id] : inner) loop.push_back(id);
    }
    f.loop = std::move(loop);
  }
}

using EdgeCount = std::map<std::pair<int, int>, int>;

std::pair<int, int> undirected(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

EdgeCount count_edges(const std::vector<OutFace>& faces) {
  EdgeCount count;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    for (size_t i = 0; i < f.loop.size(); ++i) ++count[undirected(f.loop[i], f.loop[(i + 1) % f.loop.size()])];
  }
  return count;
}

/// Joins two faces across a single contiguous run of shared manifold edges.
bool try_merge(OutFace& a, const OutFace& b, const EdgeCount& uses) {
  const size_t na = a.loop.size(), nb = b.loop.size();
  std::map<std::pair<int, int>, size_t> b_edges;
  for (size_t i = 0; i < nb; ++i) b_edges[{b.loop[i], b.loop[(i + 1) % nb]}] = i;
  std::vector<char> shared(na, 0);
  size_t count = 0;
  for (size_t i = 0; i < na; ++i) {
    const int u = a.loop[i], v = a.loop[(i + 1) % na];
    if (b_edges.count({v, u}) && uses.at(undirected(u, v)) == 2) {
      shared[i] = 1;
      ++count;
    }
  }
  if (count == 0 || count >= na || count >= nb) return false;
  // The shared edges must form one run: exactly one start.
  size_t starts = 0, start = 0;
  for (size_t i = 0; i < na; ++i) {
    if (shared[i] && !shared[(i + na - 1) % na]) {
      ++starts;
      start = i;
    }
  }
  if (starts != 1) return false;
  const int first = a.loop[start];                   // chain start in a
  const int last = a.loop[(start + count) % na];     // chain end in a
  // a from `last` forward to `first`.
  std::vector<int> merged;
  for (size_t k = 0; k <= na - count; ++k) merged.push_back(a.loop[(start + count + k) % na]);
  // b from `first` forward to `last`, endpoints excluded.
  size_t bi = 0;
  while (b.loop[bi] != first) ++bi;
  for (size_t k = 1;; ++k) {
    const int v = b.loop[(bi + k) % nb];
    if (v == last) break;
    if (k > nb) return false;
    merged.push_back(v);
  }
  std::vector<int> check = merged;
  std::sort(check.begin(), check.end());
  if (std::adjacent_find(check.begin(), check.end()) != check.end()) return false;
  if (merged.size() < 3) return false;
  a.loop = std::move(merged);
  return true;
}

void merge_coplanar_faces(std::vector<OutFace>& faces) {
  for (bool changed = true; changed;) {
    changed = false;
    const EdgeCount uses = count_edges(faces);
    std::map<std::pair<int, int>, int> edge_face;
    for (size_t f = 0; f < faces.size(); ++f) {
      if (!faces[f].alive) continue;
      const auto& l = faces[f].loop;
      for (size_t i = 0; i < l.size(); ++i) edge_face[{l[i], l[(i + 1) % l.size()]}] = int(f);
    }
    std::vector<char> touched(faces.size(), 0);
    for (size_t f = 0; f < faces.size(); ++f) {
      if (!faces[f].alive || touched[f]) continue;
      const auto loop = faces[f].loop;
      for (size_t i = 0; i < loop.size(); ++i) {
        auto it = edge_face.find({loop[(i + 1) % loop.size()], loop[i]});
        if (it == edge_face.end()) continue;
        const int g = it->second;
        if (size_t(g) == f || !faces[size_t(g)].alive || touched[size_t(g)]) continue;
        if (faces[size_t(g)].plane_id != faces[f].plane_id ||
            faces[size_t(g)].orientation != faces[f].orientation)
          continue;
        if (try_merge(faces[f], faces[size_t(g)], uses)) {
          faces[size_t(g)].alive = false;
          touched[f] = touched[size_t(g)] = 1;
          changed = true;
          break;
        }
      }
    }
  }
}

void remove_collinear(std::vector<OutFace>& faces, const std::vector<Point3>& pts, double tol) {
  struct Use {
    int face;
    int prev, next;
    bool straight;
  };
  std::unordered_map<int, std::vector<Use>> uses;
  for (size_t f = 0; f < faces.size(); ++f) {
    if (!faces[f].alive) continue;
    const auto& l = faces[f].loop;
    const size_t n = l.size();
    for (size_t i = 0; i < n; ++i) {
      const int u = l[(i + n - 1) % n], v = l[i], w = l[(i + 1) % n];
      const Vec3 d1 = pts[size_t(v)] - pts[size_t(u)], d2 = pts[size_t(w)] - pts[size_t(v)];
      const double len = (pts[size_t(w)] - pts[size_t(u)]).norm();
      const bool straight = d1.dot(d2) > 0 && d1.cross(d2).norm() <= tol * len;
      uses[v].push_back({int(f), u, w, straight});
    }
  }
  std::vector<char> drop(pts.size(), 0);
  for (const auto& [v, list] : uses) {
    if (list.size() != 2) continue;
    if (!list[0].straight || !list[1].straight) continue;
    if (list[0].prev != list[1].next || list[0].next != list[1].prev) continue;
    drop[size_t(v)] = 1;
  }
  for (auto& f : faces) {
    if (!f.alive) continue;
    std::vector<int> kept;
    for (int v : f.loop)
      if (!drop[size_t(v)]) kept.push_back(v);
    if (kept.size() >= 3) f.loop = std::move(kept);
  }
}

/// Pairs the faces around edges shared by more than two faces so that each
/// pair bounds one In wedge, then gives every vertex fan its own copy of the
/// vertex. Touching solids become separate sheets.
void split_nonmanifold(std::vector<OutFace>& faces, std::vector<Point3>& pts, const PlaneRegistry& planes) {
  struct Use {
    int face;
    size_t index;  // edge loop[index] -> loop[index + 1]
  };
  std::map<std::pair<int, int>, std::vector<Use>> by_edge;
  for (size_t f = 0; f < faces.size(); ++f) {
    if (!faces[f].alive) continue;
    const auto& l = faces[f].loop;
    for (size_t i = 0; i < l.size(); ++i) by_edge[undirected(l[i], l[(i + 1) % l.size()])].push_back({int(f), i});
  }
  auto key = [](int f, size_t i) { return std::pair<int, size_t>(f, i); };
  std::map<std::pair<int, size_t>, std::pair<int, size_t>> mate;
  for (const auto& [edge, list] : by_edge) {
    if (list.size() == 2) {
      mate[key(list[0].face, list[0].index)] = key(list[1].face, list[1].index);
      mate[key(list[1].face, list[1].index)] = key(list[0].face, list[0].index);
      continue;
    }
    if (list.size() % 2 != 0) continue;
    const Point3 &pu = pts[size_t(edge.first)], &pv = pts[size_t(edge.second)];
    const Vec3 axis = (pv - pu).normalized();
    const PlaneFrame frame(PlaneEq::through(pu, axis));
    const Vec3 &r0 = frame.u(), &r1 = frame.v();
    struct Around {
      double angle;
      bool in_ahead;  // In lies at increasing angle
      Use use;
    };
    std::vector<Around> around;
    for (const Use& u : list) {
      const OutFace& f = faces[size_t(u.face)];
      const Vec3 n = double(f.orientation) * planes.plane(f.plane_id).normal;
      const Vec3 d = f.loop[u.index] == edge.first ? axis : Vec3(-axis);
      const Vec3 w = n.cross(d);  // into the face
      const Vec3 t = r0.cross(r1).cross(w);
      around.push_back({std::atan2(w.dot(r1), w.dot(r0)), n.dot(t) < 0, u});
    }
    std::sort(around.begin(), around.end(), [](const Around& x, const Around& y) { return x.angle < y.angle; });
    const size_t n = around.size();
    for (size_t i = 0; i < n; ++i) {
      const Around &x = around[i], &y = around[(i + 1) % n];
      if (!x.in_ahead || y.in_ahead) continue;
      mate[key(x.use.face, x.use.index)] = key(y.use.face, y.use.index);
      mate[key(y.use.face, y.use.index)] = key(x.use.face, x.use.index);
    }
  }

  // Corners around each vertex, linked across mated edges.
  std::map<std::pair<int, size_t>, std::pair<int, size_t>> parent;
  std::function<std::pair<int, size_t>(std::pair<int, size_t>)> find = [&](std::pair<int, size_t> c) {
    auto it = parent.find(c);
    if (it == parent.end() || it->second == c) return c;
    return it->second = find(it->second);
  };
  for (size_t f = 0; f < faces.size(); ++f) {
    if (!faces[f].alive) continue;
    const size_t n = faces[f].loop.size();
    for (size_t i = 0; i < n; ++i) {
      // Outgoing edge of corner (f, i) is (f, i); its mate's corner at the
      // same vertex is the mate edge's end.
      auto it = mate.find(key(int(f), i));
      if (it == mate.end()) continue;
      const auto [g, j] = it->second;
      const auto other = key(g, (j + 1) % faces[size_t(g)].loop.size());
      const auto a = find(key(int(f), i)), b = find(other);
      if (a != b) parent[a] = b;
    }
  }
  std::map<int, std::map<std::pair<int, size_t>, int>> copies;
  for (size_t f = 0; f < faces.size(); ++f) {
    if (!faces[f].alive) continue;
    for (size_t i = 0; i < faces[f].loop.size(); ++i) {
      const int v = faces[f].loop[i];
      auto& fans = copies[v];
      const auto root = find(key(int(f), i));
      auto it = fans.find(root);
      if (it == fans.end()) {
        const int id = fans.empty() ? v : int(pts.size());
        if (!fans.empty()) pts.push_back(pts[size_t(v)]);
        it = fans.emplace(root, id).first;
      }
      faces[f].loop[i] = it->second;
    }
  }

  // Edges whose endpoints share a single fan keep several pairs; every pair
  // after the first gets its own midpoint.
  std::map<std::pair<int, int>, std::vector<std::pair<int, size_t>>> still;
  for (size_t f = 0; f < faces.size(); ++f) {
    if (!faces[f].alive) continue;
    const auto& l = faces[f].loop;
    for (size_t i = 0; i < l.size(); ++i) still[undirected(l[i], l[(i + 1) % l.size()])].push_back(key(int(f), i));
  }
  std::map<int, std::vector<std::pair<size_t, int>>> inserts;  // face -> (after index, vertex)
  for (const auto& [edge, list] : still) {
    if (list.size() <= 2) continue;
    std::set<std::pair<int, size_t>> done{list[0], mate.count(list[0]) ? mate[list[0]] : list[0]};
    for (const auto& use : list) {
      if (done.count(use) || !mate.count(use)) continue;
      const auto other = mate[use];
      const int mid = int(pts.size());
      pts.push_back(0.5 * (pts[size_t(edge.first)] + pts[size_t(edge.second)]));
      inserts[use.first].emplace_back(use.second, mid);
      inserts[other.first].emplace_back(other.second, mid);
      done.insert(use);
      done.insert(other);
    }
  }
  for (auto& [f, list] : inserts) {
    std::sort(list.rbegin(), list.rend());
    auto& l = faces[size_t(f)].loop;
    for (const auto& [i, v] : list) l.insert(l.begin() + std::ptrdiff_t(i + 1), v);
  }
}

}  // namespace

PolygonMesh extract_mesh(const CellComplex& complex, std::span<const Label> cell_labels) {
  const double tol = Tolerances::for_diagonal(complex.box.diagonal()).coplanar;
  auto label_of = [&](int cell) { return cell == kOutside ? Label::Out : cell_labels[size_t(cell)]; };

  Welder welder(tol);
  std::vector<OutFace> faces;
  for (const auto& f : complex.facets) {
    const Label lb = label_of(f.cell_back), lf = label_of(f.cell_front);
    if (lb == lf) continue;
    OutFace face{{}, f.plane_id, lb == Label::In ? 1 : -1};
    for (const auto& v : f.polygon.vertices) {
      const int id = welder.add(v);
      if (face.loop.empty() || face.loop.back() != id) face.loop.push_back(id);
    }
    while (face.loop.size() > 1 && face.loop.front() == face.loop.back()) face.loop.pop_back();
    if (face.loop.size() < 3) continue;
    if (face.orientation < 0) std::reverse(face.loop.begin(), face.loop.end());
    faces.push_back(std::move(face));
  }
  if (faces.empty()) throw EmptyModel("no cell is labelled inside");

  auto& pts = welder.points();
  split_t_junctions(faces, pts, tol);
  merge_coplanar_faces(faces);
  remove_collinear(faces, pts, tol);
  split_nonmanifold(faces, pts, complex.planes);

  PolygonMesh mesh;
  std::vector<int> remap(pts.size(), -1);
  for (const auto& f : faces) {
    if (!f.alive) continue;
    std::vector<int> loop;
    for (int v : f.loop) {
      if (remap[size_t(v)] < 0) {
        remap[size_t(v)] = int(mesh.vertices.size());
        mesh.vertices.push_back(pts[size_t(v)]);
      }
      loop.push_back(remap[size_t(v)]);
    }
    mesh.faces.push_back(std::move(loop));
  }
  return mesh;
}

}  // namespace lodforge
