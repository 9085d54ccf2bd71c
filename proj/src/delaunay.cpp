#include "lodforge/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lodforge {

namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb{-1, -1, -1};  // nb[i] lies across edge (v[i+1], v[i+2])
  bool alive = true;
};

long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const long double adx = a.x() - p.x(), ady = a.y() - p.y();
  const long double bdx = b.x() - p.x(), bdy = b.y() - p.y();
  const long double cdx = c.x() - p.x(), cdy = c.y() - p.y();
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return ad * (bdx * cdy - cdx * bdy) - bd * (adx * cdy - cdx * ady) + cd * (adx * bdy - bdx * ady);
}

long double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (static_cast<long double>(b.x()) - a.x()) * (static_cast<long double>(c.y()) - a.y()) -
         (static_cast<long double>(b.y()) - a.y()) * (static_cast<long double>(c.x()) - a.x());
}

class Triangulator {
 public:
  explicit Triangulator(std::span<const Vec2> input) : n_(int(input.size())) {
    pts_.assign(input.begin(), input.end());
    Aabb2 box;
    for (const auto& p : pts_) box.extend(p);
    const Vec2 c = 0.5 * (box.lo + box.hi);
    const double r = std::max({box.hi.x() - box.lo.x(), box.hi.y() - box.lo.y(), 1e-9});
    extent_ = r;
    const double big = 1e3 * r;
    pts_.emplace_back(c.x() - big, c.y() - big);
    pts_.emplace_back(c.x() + big, c.y() - big);
    pts_.emplace_back(c.x(), c.y() + big);
    tris_.push_back(Tri{{n_, n_ + 1, n_ + 2}});
  }

  double extent() const { return extent_; }

  void insert(int pi, double dup_tol) {
    const Vec2& p = pts_[size_t(pi)];
    const int t = locate(p);
    for (int k : tris_[size_t(t)].v) {
      if ((pts_[size_t(k)] - p).norm() <= dup_tol) return;
    }
    ++stamp_;
    mark_.resize(tris_.size(), 0);
    std::vector<int> cavity{t};
    mark_[size_t(t)] = stamp_;
    for (size_t k = 0; k < cavity.size(); ++k) {
      const Tri& x = tris_[size_t(cavity[k])];
      for (int nbi : x.nb) {
        if (nbi < 0 || mark_[size_t(nbi)] == stamp_) continue;
        const Tri& y = tris_[size_t(nbi)];
        if (incircle(pts_[size_t(y.v[0])], pts_[size_t(y.v[1])], pts_[size_t(y.v[2])], p) > 0) {
          mark_[size_t(nbi)] = stamp_;
          cavity.push_back(nbi);
        }
      }
    }

    // Grow the cavity until p sees every boundary edge strictly from inside.
    struct Edge {
      int a, b, outer, inner;
    };
    std::vector<Edge> boundary;
    for (bool grown = true; grown;) {
      grown = false;
      boundary.clear();
      for (int ci : cavity) {
        const Tri& x = tris_[size_t(ci)];
        for (int i = 0; i < 3; ++i) {
          const int o = x.nb[size_t(i)];
          if (o >= 0 && mark_[size_t(o)] == stamp_) continue;
          const int a = x.v[size_t((i + 1) % 3)], b = x.v[size_t((i + 2) % 3)];
          if (o >= 0 && orient(pts_[size_t(a)], pts_[size_t(b)], p) <= 0) {
            mark_[size_t(o)] = stamp_;
            cavity.push_back(o);
            grown = true;
            break;
          }
          boundary.push_back({a, b, o, ci});
        }
        if (grown) break;
      }
    }

    const int first_new = int(tris_.size());
    for (const auto& e : boundary) {
      Tri nt{{e.a, e.b, pi}};
      nt.nb[2] = e.outer;
      const int id = int(tris_.size());
      tris_.push_back(nt);
      if (e.outer >= 0) {
        Tri& o = tris_[size_t(e.outer)];
        for (int j = 0; j < 3; ++j) {
          if (o.v[size_t((j + 1) % 3)] == e.b && o.v[size_t((j + 2) % 3)] == e.a) o.nb[size_t(j)] = id;
        }
      }
    }
    const int last_new = int(tris_.size());
    for (int id = first_new; id < last_new; ++id) {
      Tri& nt = tris_[size_t(id)];
      for (int other = first_new; other < last_new; ++other) {
        const Tri& ot = tris_[size_t(other)];
        if (ot.v[0] == nt.v[1]) nt.nb[0] = other;  // across (b, p)
        if (ot.v[1] == nt.v[0]) nt.nb[1] = other;  // across (p, a)
      }
    }
    for (int ci : cavity) tris_[size_t(ci)].alive = false;
    mark_.resize(tris_.size(), 0);
    last_ = first_new;
  }

  std::vector<std::array<int, 3>> result() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_ || t.v[1] >= n_ || t.v[2] >= n_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  struct Aabb2 {
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    void extend(const Vec2& p) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  };

  int locate(const Vec2& p) const {
    int t = last_;
    if (t < 0 || !tris_[size_t(t)].alive) t = first_alive();
    const size_t limit = 4 * tris_.size() + 64;
    for (size_t step = 0; step < limit; ++step) {
      const Tri& x = tris_[size_t(t)];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = int((k + step) % 3);
        const int a = x.v[size_t((i + 1) % 3)], b = x.v[size_t((i + 2) % 3)];
        if (orient(pts_[size_t(a)], pts_[size_t(b)], p) < 0) {
          next = x.nb[size_t(i)];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Walk failed to converge; fall back to a scan.
    for (size_t i = 0; i < tris_.size(); ++i) {
      const Tri& x = tris_[i];
      if (!x.alive) continue;
      if (orient(pts_[size_t(x.v[0])], pts_[size_t(x.v[1])], p) >= 0 &&
          orient(pts_[size_t(x.v[1])], pts_[size_t(x.v[2])], p) >= 0 &&
          orient(pts_[size_t(x.v[2])], pts_[size_t(x.v[0])], p) >= 0)
        return int(i);
    }
    return t;
  }

  int first_alive() const {
    for (size_t i = 0; i < tris_.size(); ++i)
      if (tris_[i].alive) return int(i);
    return 0;
  }

  int n_;
  double extent_ = 1.0;
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = 0;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulation(std::span<const Vec2> points,
                                                       double duplicate_tol) {
  if (points.size() < 3) return {};
  Triangulator tr(points);

  // Spatially coherent insertion order keeps the point-location walks short.
  Vec2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const auto side = std::max<long>(1, long(std::sqrt(double(points.size()) / 4.0)));
  const Vec2 span = (hi - lo).cwiseMax(Vec2::Constant(1e-12));
  std::vector<long> key(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const long gx = std::min(side - 1, long((points[i].x() - lo.x()) / span.x() * double(side)));
    const long gy = std::min(side - 1, long((points[i].y() - lo.y()) / span.y() * double(side)));
    key[i] = gy * side + ((gy & 1) ? side - 1 - gx : gx);
  }
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[size_t(a)] < key[size_t(b)]; });

  const double tol = std::max(duplicate_tol, 1e-14 * tr.extent());
  for (int i : order) tr.insert(i, tol);
  return tr.result();
}

}  // namespace lodforge
