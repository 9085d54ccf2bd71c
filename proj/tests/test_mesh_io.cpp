#include "lodforge/error.hpp"
#include "lodforge/io.hpp"
#include "lodforge/mesh.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace lodforge;
namespace fs = std::filesystem;

namespace {

PolygonMesh cube(const Point3& lo = Point3::Zero(), double s = 1.0) {
  PolygonMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.push_back(lo + s * Point3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  m.faces = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  return m;
}

fs::path temp(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lodforge_test_mesh_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("cube is a closed manifold") {
  const PolygonMesh m = cube();
  const SurfaceReport r = check_surface(m);
  CHECK(r.closed_manifold());
  CHECK(r.euler == 2);
  CHECK(r.components == 1);
  CHECK(mesh_volume(m) == doctest::Approx(1.0));
  CHECK(mesh_area(m) == doctest::Approx(6.0));
  CHECK(m.triangle_count() == 12);
}

TEST_CASE("open and non-manifold surfaces are rejected") {
  PolygonMesh open = cube();
  open.faces.pop_back();
  const SurfaceReport r = check_surface(open);
  CHECK_FALSE(r.closed_manifold());
  CHECK(r.boundary_edges == 4);

  // Two cubes sharing one edge.
  PolygonMesh a = cube(), b = cube(Point3(1, 1, 0));
  PolygonMesh both = a;
  const int off = int(both.vertices.size());
  for (const auto& v : b.vertices) both.vertices.push_back(v);
  for (auto f : b.faces) {
    for (int& i : f) i += off;
    both.faces.push_back(f);
  }
  // Weld the shared edge.
  for (auto& f : both.faces)
    for (int& i : f) {
      if (i == off + 0) i = 3;
      if (i == off + 4) i = 7;
    }
  const SurfaceReport nm = check_surface(both);
  CHECK_FALSE(nm.closed_manifold());
  CHECK(nm.nonmanifold_edges == 1);

  PolygonMesh flipped = cube();
  std::reverse(flipped.faces[0].begin(), flipped.faces[0].end());
  CHECK_FALSE(check_surface(flipped).closed_manifold());
}

TEST_CASE("ear clipping keeps the area of a non-convex face") {
  PolygonMesh m;
  m.vertices = {{0, 0, 0}, {2, 0, 0}, {2, 1, 0}, {1, 1, 0}, {1, 2, 0}, {0, 2, 0}};
  m.faces = {{0, 1, 2, 3, 4, 5}};
  const TriangleMesh t = triangulate(m);
  CHECK(t.triangles.size() == 4);
  double area = 0;
  for (const auto& tri : t.triangles) {
    const Vec3 n = (t.vertices[size_t(tri[1])] - t.vertices[size_t(tri[0])])
                       .cross(t.vertices[size_t(tri[2])] - t.vertices[size_t(tri[0])]);
    CHECK(n.z() > 0);
    area += 0.5 * n.norm();
  }
  CHECK(area == doctest::Approx(3.0));
}

TEST_CASE("OBJ and PLY round trips") {
  TriangleMesh t = triangulate(cube());
  compute_face_normals(t);
  for (const auto& n : t.normals) CHECK(n.norm() == doctest::Approx(1.0));

  save_obj(temp("c.obj"), t);
  const InputModel a = load_input(temp("c.obj"));
  REQUIRE(a.is_mesh());
  CHECK(a.mesh().triangles == t.triangles);
  CHECK(a.mesh().vertices == t.vertices);

  for (auto enc : {PlyEncoding::Ascii, PlyEncoding::BinaryLittleEndian}) {
    save_ply(temp("c.ply"), t, enc);
    const InputModel b = load_input(temp("c.ply"));
    REQUIRE(b.is_mesh());
    CHECK(b.mesh().triangles == t.triangles);
    CHECK(b.mesh().vertices == t.vertices);
  }

  save_obj(temp("p.obj"), cube());
  const PolygonMesh p = load_polygon_obj(temp("p.obj"));
  CHECK(p.faces == cube().faces);
}

TEST_CASE("point clouds") {
  PointCloud c;
  c.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  c.normals = {{0, 0, 2}, {0, 0, 1}, {0, 0, 1}};
  save_obj(temp("cloud.obj"), c);
  const InputModel a = load_input(temp("cloud.obj"));
  REQUIRE_FALSE(a.is_mesh());
  CHECK(a.cloud().points.size() == 3);
  CHECK(a.cloud().normals[0].norm() == doctest::Approx(1.0));
  save_ply(temp("cloud.ply"), c, PlyEncoding::BinaryLittleEndian);
  CHECK(load_input(temp("cloud.ply")).cloud().points == c.points);

  std::ofstream(temp("bare.obj")) << "v 0 0 0\nv 1 0 0\nv 0 1 0\n";
  CHECK_THROWS_AS(load_input(temp("bare.obj")), MissingNormals);
}

TEST_CASE("malformed input") {
  std::ofstream(temp("bad.obj")) << "v 0 0\nf 1 2 3\n";
  CHECK_THROWS_AS(load_input(temp("bad.obj")), ParseError);
  std::ofstream(temp("bad.ply")) << "ply\nformat ascii 1.0\nelement vertex 2\nend_header\n0 0 0\n";
  CHECK_THROWS_AS(load_input(temp("bad.ply")), ParseError);
  CHECK(format_from_path("A.PLY") == InputFormat::Ply);
  CHECK_FALSE(format_from_path("a.stl"));
}

TEST_CASE("padded bounding box") {
  InputModel m{triangulate(cube()), ""};
  const Aabb b = bbox(m, 0.01);
  const double pad = 0.01 * std::sqrt(3.0);
  CHECK(b.min.x() == doctest::Approx(-pad));
  CHECK(b.max.z() == doctest::Approx(1 + pad));
}
