#include "lodforge/synth.hpp"

#include "lodforge/error.hpp"

#include <cmath>
#include <random>

namespace lodforge {

namespace {

Aabb make_box(double x0, double y0, double z0, double x1, double y1, double z1) {
  Aabb b;
  b.min = Point3(x0, y0, z0);
  b.max = Point3(x1, y1, z1);
  return b;
}

bool strictly_inside(const Aabb& b, const Point3& p) {
  return (p.array() > b.min.array()).all() && (p.array() < b.max.array()).all();
}

const Aabb kHouse = make_box(0, 0, 0, 16, 10, 8);
const Aabb kChimney = make_box(11, 3, 8, 13, 5, 12);

std::vector<Aabb> window_niches(int count) {
  std::vector<Aabb> out;
  for (int i = 0; i < count; ++i) {
    const double x0 = 1.5 + 3.5 * i;
    out.push_back(make_box(x0, 0, 3, x0 + 2, 1, 5));
  }
  return out;
}

}  // namespace

std::optional<SynthScene> parse_scene(const std::string& name) {
  if (name == "box") return SynthScene::Box;
  if (name == "box_chimney") return SynthScene::BoxChimney;
  if (name == "box_windows") return SynthScene::BoxWindows;
  if (name == "lshape") return SynthScene::LShape;
  if (name == "full_house") return SynthScene::FullHouse;
  return std::nullopt;
}

std::string scene_name(SynthScene scene) {
  switch (scene) {
    case SynthScene::Box: return "box";
    case SynthScene::BoxChimney: return "box_chimney";
    case SynthScene::BoxWindows: return "box_windows";
    case SynthScene::LShape: return "lshape";
    case SynthScene::FullHouse: return "full_house";
  }
  return "unknown";
}

bool CsgSolid::contains(const Point3& p) const {
  bool in = false;
  for (const auto& b : add) in = in || strictly_inside(b, p);
  if (!in) return false;
  for (const auto& b : sub) {
    if (strictly_inside(b, p)) return false;
  }
  return true;
}

Aabb CsgSolid::bounds() const {
  Aabb out;
  for (const auto& b : add) {
    out.extend(b.min);
    out.extend(b.max);
  }
  return out;
}

CsgSolid scene_solid(SynthScene scene, const SynthOptions& options) {
  CsgSolid s;
  switch (scene) {
    case SynthScene::Box:
      s.add = {make_box(0, 0, 0, 1, 1, 1)};
      break;
    case SynthScene::BoxChimney:
      s.add = {kHouse, kChimney};
      break;
    case SynthScene::BoxWindows:
      s.add = {kHouse};
      s.sub = window_niches(options.windows);
      break;
    case SynthScene::LShape:
      s.add = {make_box(0, 0, 0, 8, 4, 4), make_box(0, 4, 0, 4, 8, 4)};
      break;
    case SynthScene::FullHouse:
      s.add = {kHouse, kChimney};
      s.sub = window_niches(options.windows);
      break;
  }
  return s;
}

TriangleMesh voxel_surface(const CsgSolid& solid, double h) {
  const Aabb box = solid.bounds();
  const Point3 origin = box.min;
  const Eigen::Vector3i dims = ((box.max - box.min) / h).array().round().cast<int>();
  const Vec3 grid_ext = dims.cast<double>() * h;
  if (((box.max - box.min) - grid_ext).cwiseAbs().maxCoeff() > 1e-9 * h) {
    throw Error("scene extent is not a multiple of the grid spacing");
  }
  const int nx = dims.x(), ny = dims.y(), nz = dims.z();
  std::vector<char> occ(size_t(nx) * ny * nz, 0);
  auto cell_index = [&](int i, int j, int k) { return (size_t(k) * ny + j) * nx + i; };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const Point3 c = origin + h * Vec3(i + 0.5, j + 0.5, k + 0.5);
        occ[cell_index(i, j, k)] = solid.contains(c) ? 1 : 0;
      }
  auto occupied = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return false;
    return occ[cell_index(i, j, k)] != 0;
  };

  TriangleMesh mesh;
  std::vector<int> vid(size_t(nx + 1) * (ny + 1) * (nz + 1), -1);
  auto vertex = [&](int i, int j, int k) {
    int& id = vid[(size_t(k) * (ny + 1) + j) * (nx + 1) + i];
    if (id < 0) {
      id = int(mesh.vertices.size());
      const Vec3 frac(double(i) / nx, double(j) / ny, double(k) / nz);
      mesh.vertices.push_back(box.min + frac.cwiseProduct(box.max - box.min));
    }
    return id;
  };

  const int dirs[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!occupied(i, j, k)) continue;
        for (const auto& d : dirs) {
          if (occupied(i + d[0], j + d[1], k + d[2])) continue;
          const int axis = d[0] != 0 ? 0 : (d[1] != 0 ? 1 : 2);
          const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
          std::array<int, 3> base{i, j, k};
          if (d[axis] > 0) ++base[size_t(axis)];
          std::array<int, 4> q{};
          const int offs[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
          for (int c = 0; c < 4; ++c) {
            auto p = base;
            p[size_t(a1)] += offs[c][0];
            p[size_t(a2)] += offs[c][1];
            q[size_t(c)] = vertex(p[0], p[1], p[2]);
          }
          // (a1, a2) is right-handed about +axis.
          if (d[axis] < 0) std::swap(q[1], q[3]);
          mesh.triangles.push_back({q[0], q[1], q[2]});
          mesh.triangles.push_back({q[0], q[2], q[3]});
        }
      }
  compute_face_normals(mesh);
  return mesh;
}

SynthResult make_scene(SynthScene scene, const SynthOptions& options) {
  SynthResult r;
  r.solid = scene_solid(scene, options);
  double h = options.resolution;
  if (h <= 0) h = scene == SynthScene::Box ? 1.0 / 12.0 : 0.5;
  r.mesh = voxel_surface(r.solid, h);
  if (options.noise_sigma > 0) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> noise(0.0, options.noise_sigma);
    for (auto& v : r.mesh.vertices) {
      for (int c = 0; c < 3; ++c) v[c] += noise(rng);
    }
    compute_face_normals(r.mesh);
  }

  auto& t = r.truth;
  t.scene = scene_name(scene);
  const double house = kHouse.volume();
  const double window = window_niches(1)[0].volume();
  switch (scene) {
    case SynthScene::Box:
      t.volume = 1.0;
      break;
    case SynthScene::BoxChimney:
      t.volume = house + kChimney.volume();
      t.levels = 1;
      t.addons = 1;
      t.addon_volumes = {kChimney.volume()};
      break;
    case SynthScene::BoxWindows:
      t.volume = house - options.windows * window;
      t.levels = options.windows > 0 ? 1 : 0;
      t.cutouts = options.windows;
      t.cutout_volumes.assign(size_t(options.windows), window);
      break;
    case SynthScene::LShape:
      t.volume = 8 * 4 * 4 + 4 * 4 * 4;
      t.alpha = 1.0;
      break;
    case SynthScene::FullHouse:
      t.volume = house + kChimney.volume() - options.windows * window;
      t.levels = options.windows > 0 ? 2 : 1;
      t.addons = 1;
      t.cutouts = options.windows;
      t.addon_volumes = {kChimney.volume()};
      t.cutout_volumes.assign(size_t(options.windows), window);
      break;
  }
  return r;
}

}  // namespace lodforge
