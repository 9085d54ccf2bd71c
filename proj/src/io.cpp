#include "lodforge/io.hpp"

#include "lodforge/error.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lodforge {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os.write(text.data(), std::streamsize(text.size()));
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int resolve_index(long idx, size_t count, const fs::path& path) {
  const long resolved = idx < 0 ? long(count) + idx : idx - 1;
  if (idx == 0 || resolved < 0 || resolved >= long(count)) {
    throw ParseError(path.string() + ": face index " + std::to_string(idx) + " out of range");
  }
  return int(resolved);
}

Vec3 checked_unit(const Vec3& n, const fs::path& path) {
  const double len = n.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw ParseError(path.string() + ": zero-length or non-finite normal");
  }
  return n / len;
}

InputModel load_obj(const fs::path& path) {
  const std::string text = read_file(path);
  std::istringstream is(text);
  std::vector<Point3> verts;
  std::vector<Vec3> vnormals;
  struct Corner {
    int v;
    int vn;
  };
  std::vector<std::vector<Corner>> faces;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    auto fail = [&](const std::string& what) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    if (tag == "v" || tag == "vn") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) fail("expected three coordinates");
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) fail("non-finite value");
      (tag == "v" ? verts : vnormals).emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<Corner> face;
      std::string tok;
      while (ls >> tok) {
        Corner c{-1, -1};
        const auto s1 = tok.find('/');
        try {
          c.v = resolve_index(std::stol(tok.substr(0, s1)), verts.size(), path);
          if (s1 != std::string::npos) {
            const auto s2 = tok.find('/', s1 + 1);
            if (s2 != std::string::npos && s2 + 1 < tok.size()) {
              c.vn = resolve_index(std::stol(tok.substr(s2 + 1)), vnormals.size(), path);
            }
          }
        } catch (const std::invalid_argument&) {
          fail("bad face token '" + tok + "'");
        }
        face.push_back(c);
      }
      if (face.size() < 3) fail("face with fewer than three vertices");
      faces.push_back(std::move(face));
    }
  }
  if (verts.empty()) throw ParseError(path.string() + ": no vertices");

  if (faces.empty()) {
    if (vnormals.empty()) throw MissingNormals(path.string() + ": point cloud has no normals");
    if (vnormals.size() != verts.size()) {
      throw ParseError(path.string() + ": point cloud needs one vn per v");
    }
    PointCloud cloud{verts, {}};
    for (const auto& n : vnormals) cloud.normals.push_back(checked_unit(n, path));
    return {std::move(cloud), path.string()};
  }

  TriangleMesh mesh;
  mesh.vertices = std::move(verts);
  for (const auto& face : faces) {
    Vec3 stored = Vec3::Zero();
    for (const auto& c : face) {
      if (c.vn >= 0) stored += vnormals[c.vn];
    }
    for (size_t i = 1; i + 1 < face.size(); ++i) {
      std::array<int, 3> t{face[0].v, face[i].v, face[i + 1].v};
      const Vec3 wn = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                          .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
      if (stored.squaredNorm() > 0 && wn.dot(stored) < 0) std::swap(t[1], t[2]);
      mesh.triangles.push_back(t);
    }
  }
  compute_face_normals(mesh);
  return {std::move(mesh), path.string()};
}

// PLY ------------------------------------------------------------------------

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

PlyType ply_type(const std::string& name, const fs::path& path) {
  static const std::pair<const char*, PlyType> table[] = {
      {"char", PlyType::I8},     {"int8", PlyType::I8},     {"uchar", PlyType::U8},
      {"uint8", PlyType::U8},    {"short", PlyType::I16},   {"int16", PlyType::I16},
      {"ushort", PlyType::U16},  {"uint16", PlyType::U16},  {"int", PlyType::I32},
      {"int32", PlyType::I32},   {"uint", PlyType::U32},    {"uint32", PlyType::U32},
      {"float", PlyType::F32},   {"float32", PlyType::F32}, {"double", PlyType::F64},
      {"float64", PlyType::F64}};
  for (const auto& [n, t] : table) {
    if (name == n) return t;
  }
  throw ParseError(path.string() + ": unknown PLY type '" + name + "'");
}

size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::I8:
    case PlyType::U8: return 1;
    case PlyType::I16:
    case PlyType::U16: return 2;
    case PlyType::I32:
    case PlyType::U32:
    case PlyType::F32: return 4;
    case PlyType::F64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::F32;
  bool is_list = false;
  PlyType count_type = PlyType::U8;
};

struct PlyElement {
  std::string name;
  size_t count = 0;
  std::vector<PlyProperty> props;
};

class PlyReader {
 public:
  PlyReader(const std::string& data, size_t pos, bool binary, bool big_endian, fs::path path)
      : data_(data), pos_(pos), binary_(binary), swap_(big_endian != (std::endian::native == std::endian::big)),
        path_(std::move(path)) {}

  double read(PlyType t) {
    if (!binary_) return read_ascii();
    const size_t n = ply_size(t);
    if (pos_ + n > data_.size()) throw ParseError(path_.string() + ": truncated binary PLY");
    unsigned char buf[8];
    std::memcpy(buf, data_.data() + pos_, n);
    if (swap_) std::reverse(buf, buf + n);
    pos_ += n;
    switch (t) {
      case PlyType::I8: return double(*reinterpret_cast<int8_t*>(buf));
      case PlyType::U8: return double(buf[0]);
      case PlyType::I16: { int16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::U16: { uint16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::I32: { int32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::U32: { uint32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::F32: { float v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::F64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
  }

 private:
  double read_ascii() {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (pos_ >= data_.size()) throw ParseError(path_.string() + ": truncated ASCII PLY");
    double v = 0.0;
    auto res = std::from_chars(data_.data() + pos_, data_.data() + data_.size(), v);
    if (res.ec != std::errc()) throw ParseError(path_.string() + ": bad number in PLY body");
    pos_ = size_t(res.ptr - data_.data());
    return v;
  }

  const std::string& data_;
  size_t pos_;
  bool binary_;
  bool swap_;
  fs::path path_;
};

InputModel load_ply(const fs::path& path) {
  const std::string data = read_file(path);
  std::istringstream hs(data);
  std::string line;
  if (!std::getline(hs, line) || line.rfind("ply", 0) != 0) {
    throw ParseError(path.string() + ": missing 'ply' magic");
  }
  std::string format;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(hs, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      ls >> format;
    } else if (kw == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) throw ParseError(path.string() + ": property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, it;
        ls >> ct >> it;
        p.is_list = true;
        p.count_type = ply_type(ct, path);
        p.type = ply_type(it, path);
      } else {
        p.type = ply_type(t, path);
      }
      ls >> p.name;
      elements.back().props.push_back(p);
    } else if (kw == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError(path.string() + ": unterminated PLY header");
  const auto body = size_t(hs.tellg());
  const bool binary = format != "ascii";
  if (binary && format != "binary_little_endian" && format != "binary_big_endian") {
    throw ParseError(path.string() + ": unsupported PLY format '" + format + "'");
  }
  PlyReader reader(data, body, binary, format == "binary_big_endian", path);

  std::vector<Point3> pts;
  std::vector<Vec3> nrm;
  std::vector<std::vector<int>> faces;
  bool has_normals = false;
  for (const auto& e : elements) {
    auto find = [&](const char* n) {
      for (size_t i = 0; i < e.props.size(); ++i)
        if (e.props[i].name == n) return int(i);
      return -1;
    };
    if (e.name == "vertex") {
      const int ix = find("x"), iy = find("y"), iz = find("z");
      const int inx = find("nx"), iny = find("ny"), inz = find("nz");
      if (ix < 0 || iy < 0 || iz < 0) throw ParseError(path.string() + ": vertex lacks x/y/z");
      has_normals = inx >= 0 && iny >= 0 && inz >= 0;
      std::vector<double> vals(e.props.size());
      for (size_t k = 0; k < e.count; ++k) {
        for (size_t i = 0; i < e.props.size(); ++i) {
          const auto& p = e.props[i];
          if (p.is_list) {
            const auto n = size_t(reader.read(p.count_type));
            for (size_t j = 0; j < n; ++j) reader.read(p.type);
            vals[i] = 0.0;
          } else {
            vals[i] = reader.read(p.type);
          }
        }
        pts.emplace_back(vals[ix], vals[iy], vals[iz]);
        if (!pts.back().allFinite()) throw ParseError(path.string() + ": non-finite vertex");
        if (has_normals) nrm.emplace_back(vals[inx], vals[iny], vals[inz]);
      }
    } else if (e.name == "face") {
      int il = find("vertex_indices");
      if (il < 0) il = find("vertex_index");
      for (size_t k = 0; k < e.count; ++k) {
        for (size_t i = 0; i < e.props.size(); ++i) {
          const auto& p = e.props[i];
          if (p.is_list) {
            const auto n = size_t(reader.read(p.count_type));
            std::vector<int> idx;
            for (size_t j = 0; j < n; ++j) idx.push_back(int(reader.read(p.type)));
            if (int(i) == il) faces.push_back(std::move(idx));
          } else {
            reader.read(p.type);
          }
        }
      }
    } else {
      for (size_t k = 0; k < e.count; ++k) {
        for (const auto& p : e.props) {
          if (p.is_list) {
            const auto n = size_t(reader.read(p.count_type));
            for (size_t j = 0; j < n; ++j) reader.read(p.type);
          } else {
            reader.read(p.type);
          }
        }
      }
    }
  }
  if (pts.empty()) throw ParseError(path.string() + ": no vertices");

  if (!faces.empty()) {
    TriangleMesh mesh;
    mesh.vertices = std::move(pts);
    for (const auto& f : faces) {
      if (f.size() < 3) throw ParseError(path.string() + ": face with fewer than three vertices");
      for (int v : f) {
        if (v < 0 || size_t(v) >= mesh.vertices.size())
          throw ParseError(path.string() + ": face index out of range");
      }
      for (size_t i = 1; i + 1 < f.size(); ++i) mesh.triangles.push_back({f[0], f[i], f[i + 1]});
    }
    compute_face_normals(mesh);
    return {std::move(mesh), path.string()};
  }
  if (!has_normals) throw MissingNormals(path.string() + ": point cloud has no nx/ny/nz");
  PointCloud cloud{std::move(pts), {}};
  for (const auto& n : nrm) cloud.normals.push_back(checked_unit(n, path));
  return {std::move(cloud), path.string()};
}

template <typename T>
void append_binary(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

std::optional<InputFormat> parse_format(const std::string& name) {
  const std::string n = lower(name);
  if (n == "obj") return InputFormat::Obj;
  if (n == "ply") return InputFormat::Ply;
  return std::nullopt;
}

std::optional<InputFormat> format_from_path(const fs::path& path) {
  std::string ext = path.extension().string();
  if (!ext.empty() && ext[0] == '.') ext.erase(0, 1);
  return parse_format(ext);
}

InputModel load_input(const fs::path& path, InputFormat format) {
  if (!fs::exists(path)) throw ParseError("input file '" + path.string() + "' does not exist");
  if (!fs::is_regular_file(path)) throw ParseError("input '" + path.string() + "' is not a file");
  return format == InputFormat::Obj ? load_obj(path) : load_ply(path);
}

InputModel load_input(const fs::path& path) {
  const auto fmt = format_from_path(path);
  if (!fmt) throw ParseError("cannot infer format of '" + path.string() + "' (use obj or ply)");
  return load_input(path, *fmt);
}

void save_obj(const fs::path& path, const PolygonMesh& mesh) {
  std::string out;
  for (const auto& v : mesh.vertices) {
    out += "v ";
    append_number(out, v.x());
    out += ' ';
    append_number(out, v.y());
    out += ' ';
    append_number(out, v.z());
    out += '\n';
  }
  for (const auto& f : mesh.faces) {
    out += 'f';
    for (int i : f) {
      out += ' ';
      out += std::to_string(i + 1);
    }
    out += '\n';
  }
  write_file(path, out);
}

void save_obj(const fs::path& path, const TriangleMesh& mesh) {
  save_obj(path, to_polygon_mesh(mesh));
}

void save_obj(const fs::path& path, const PointCloud& cloud) {
  std::string out;
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    for (const auto& [tag, v] : {std::pair{"v ", cloud.points[i]}, std::pair{"vn ", cloud.normals[i]}}) {
      out += tag;
      append_number(out, v.x());
      out += ' ';
      append_number(out, v.y());
      out += ' ';
      append_number(out, v.z());
      out += '\n';
    }
  }
  write_file(path, out);
}

namespace {

void save_ply_impl(const fs::path& path, const std::vector<Point3>& pts,
                   const std::vector<Vec3>* normals,
                   const std::vector<std::array<int, 3>>* tris, PlyEncoding enc) {
  std::string out = "ply\nformat ";
  out += enc == PlyEncoding::Ascii ? "ascii" : "binary_little_endian";
  out += " 1.0\nelement vertex " + std::to_string(pts.size()) +
         "\nproperty double x\nproperty double y\nproperty double z\n";
  if (normals) out += "property double nx\nproperty double ny\nproperty double nz\n";
  if (tris) {
    out += "element face " + std::to_string(tris->size()) + "\nproperty list uchar int vertex_indices\n";
  }
  out += "end_header\n";
  for (size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> vals{pts[i].x(), pts[i].y(), pts[i].z()};
    if (normals) vals.insert(vals.end(), {(*normals)[i].x(), (*normals)[i].y(), (*normals)[i].z()});
    for (size_t k = 0; k < vals.size(); ++k) {
      if (enc == PlyEncoding::Ascii) {
        if (k) out += ' ';
        append_number(out, vals[k]);
      } else {
        append_binary(out, vals[k]);
      }
    }
    if (enc == PlyEncoding::Ascii) out += '\n';
  }
  if (tris) {
    for (const auto& t : *tris) {
      if (enc == PlyEncoding::Ascii) {
        out += "3 " + std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
      } else {
        out += char(3);
        for (int v : t) append_binary(out, int32_t(v));
      }
    }
  }
  write_file(path, out);
}

}  // namespace

void save_ply(const fs::path& path, const PointCloud& cloud, PlyEncoding encoding) {
  save_ply_impl(path, cloud.points, &cloud.normals, nullptr, encoding);
}

void save_ply(const fs::path& path, const TriangleMesh& mesh, PlyEncoding encoding) {
  save_ply_impl(path, mesh.vertices, nullptr, &mesh.triangles, encoding);
}

PolygonMesh load_polygon_obj(const fs::path& path) {
  const std::string text = read_file(path);
  std::istringstream is(text);
  PolygonMesh mesh;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError(path.string() + ": bad vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> f;
      std::string tok;
      while (ls >> tok) {
        f.push_back(resolve_index(std::stol(tok.substr(0, tok.find('/'))), mesh.vertices.size(), path));
      }
      mesh.faces.push_back(std::move(f));
    }
  }
  return mesh;
}

}  // namespace lodforge
