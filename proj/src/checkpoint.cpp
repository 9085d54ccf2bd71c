#include "lodforge/checkpoint.hpp"

#include "lodforge/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace lodforge {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kVersion = 1;

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json points(const std::vector<Point3>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(vec(p));
  return a;
}

std::vector<Point3> points(const json& j) {
  std::vector<Point3> out;
  out.reserve(j.size());
  for (const auto& p : j) out.push_back(vec(p));
  return out;
}

json plane(const PlaneEq& p) { return {{"normal", vec(p.normal)}, {"offset", p.offset}}; }
PlaneEq plane(const json& j) { return {vec(j.at("normal")), j.at("offset").get<double>()}; }

json polygon(const ConvexPolygon3& p) {
  return {{"plane", plane(p.plane)}, {"vertices", points(p.vertices)}};
}
ConvexPolygon3 polygon(const json& j) { return {plane(j.at("plane")), points(j.at("vertices"))}; }

json box(const Aabb& b) { return {{"min", vec(b.min)}, {"max", vec(b.max)}}; }
Aabb box(const json& j) {
  Aabb b;
  b.min = vec(j.at("min"));
  b.max = vec(j.at("max"));
  return b;
}

json config(const PipelineConfig& c) {
  return {{"epsilon", c.detect.epsilon},
          {"theta", c.detect.theta},
          {"sigma", c.detect.sigma},
          {"alpha", c.detect.alpha},
          {"K", c.merge_k},
          {"pct", c.interp_pct},
          {"merge_metric", merge_metric_name(c.merge_metric)},
          {"up_axis", std::string(1, c.up_axis)},
          {"rays", c.rays},
          {"rmse_samples", c.rmse_samples},
          {"seed", c.seed}};
}

PipelineConfig config(const json& j) {
  PipelineConfig c;
  c.detect.epsilon = j.at("epsilon").get<double>();
  c.detect.theta = j.at("theta").get<double>();
  c.detect.sigma = j.at("sigma").get<int>();
  c.detect.alpha = j.at("alpha").get<double>();
  c.merge_k = j.at("K").get<int>();
  c.interp_pct = j.at("pct").get<double>();
  if (j.contains("merge_metric")) {
    const auto m = parse_merge_metric(j.at("merge_metric").get<std::string>());
    if (!m) throw Error("unknown merge metric");
    c.merge_metric = *m;
  }
  if (j.contains("up_axis")) c.up_axis = j.at("up_axis").get<std::string>().at(0);
  if (j.contains("rays")) c.rays = j.at("rays").get<int>();
  if (j.contains("rmse_samples")) c.rmse_samples = j.at("rmse_samples").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json primitive(const PlanarPrimitive& p) {
  json alpha = json::array();
  for (const auto& t : p.alpha_shape.triangles) alpha.push_back({vec(t[0]), vec(t[1]), vec(t[2])});
  return {{"id", p.id},
          {"plane", plane(p.plane)},
          {"area", p.area},
          {"inliers", p.inliers},
          {"support", points(p.support)},
          {"hull", polygon(p.hull)},
          {"alpha_shape", {{"plane", plane(p.alpha_shape.plane)}, {"triangles", alpha}}}};
}

PlanarPrimitive primitive(const json& j) {
  PlanarPrimitive p;
  p.id = j.at("id").get<int>();
  p.plane = plane(j.at("plane"));
  p.area = j.at("area").get<double>();
  p.inliers = j.at("inliers").get<std::vector<int>>();
  p.support = points(j.at("support"));
  p.hull = polygon(j.at("hull"));
  const json& a = j.at("alpha_shape");
  p.alpha_shape.plane = plane(a.at("plane"));
  for (const auto& t : a.at("triangles")) p.alpha_shape.triangles.push_back({vec(t.at(0)), vec(t.at(1)), vec(t.at(2))});
  return p;
}

json primitives(const std::vector<PlanarPrimitive>& prims) {
  json a = json::array();
  for (const auto& p : prims) a.push_back(primitive(p));
  return a;
}

std::vector<PlanarPrimitive> primitives(const json& j) {
  std::vector<PlanarPrimitive> out;
  for (const auto& p : j) out.push_back(primitive(p));
  return out;
}

std::string kind_name(StructureKind k) { return k == StructureKind::Addon ? "addon" : "cutout"; }
StructureKind kind_of(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "addon") return StructureKind::Addon;
  if (s == "cutout") return StructureKind::Cutout;
  throw Error("unknown structure kind '" + s + "'");
}

std::string label_name(Label l) { return l == Label::In ? "in" : "out"; }
Label label_of(const json& j) { return j.get<std::string>() == "in" ? Label::In : Label::Out; }

std::string lod_kind_name(LodKind k) {
  switch (k) {
    case LodKind::BspInternal: return "bsp";
    case LodKind::LodMerged: return "merged";
    case LodKind::Leaf: return "leaf";
  }
  return "leaf";
}
LodKind lod_kind_of(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "bsp") return LodKind::BspInternal;
  if (s == "merged") return LodKind::LodMerged;
  if (s == "leaf") return LodKind::Leaf;
  throw Error("unknown node kind '" + s + "'");
}

json labels(const std::vector<Label>& ls) {
  json a = json::array();
  for (Label l : ls) a.push_back(l == Label::In ? 1 : 0);
  return a;
}
std::vector<Label> labels(const json& j) {
  std::vector<Label> out;
  for (const auto& v : j) out.push_back(v.get<int>() ? Label::In : Label::Out);
  return out;
}

json complex_json(const CellComplex& c) {
  json planes = json::array();
  for (const auto& p : c.planes.planes()) planes.push_back(plane(p));
  json cells = json::array();
  for (const auto& cell : c.cells) {
    json faces = json::array();
    for (const auto& f : cell.faces) faces.push_back({{"plane_id", f.plane_id}, {"polygon", polygon(f.polygon)}});
    cells.push_back({{"id", cell.id}, {"faces", faces}});
  }
  json facets = json::array();
  for (const auto& f : c.facets) {
    facets.push_back({{"plane_id", f.plane_id},
                      {"cell_back", f.cell_back},
                      {"cell_front", f.cell_front},
                      {"source_primitive", f.source_primitive},
                      {"coverage", f.coverage},
                      {"alpha_covered", f.alpha_covered},
                      {"polygon", polygon(f.polygon)}});
  }
  return {{"box", box(c.box)},
          {"offset_tol", c.planes.offset_tol()},
          {"planes", planes},
          {"cells", cells},
          {"facets", facets},
          {"cell_facets", c.cell_facets}};
}

CellComplex complex_of(const json& j) {
  CellComplex c;
  c.box = box(j.at("box"));
  c.planes = PlaneRegistry(j.at("offset_tol").get<double>());
  int expected = 0;
  for (const auto& p : j.at("planes")) {
    if (c.planes.intern(plane(p)) != expected++) throw Error("plane registry does not round-trip");
  }
  for (const auto& cj : j.at("cells")) {
    PolyhedralCell cell;
    cell.id = cj.at("id").get<int>();
    for (const auto& f : cj.at("faces")) cell.faces.push_back({polygon(f.at("polygon")), f.at("plane_id").get<int>()});
    c.cells.push_back(std::move(cell));
  }
  for (const auto& fj : j.at("facets")) {
    Facet f;
    f.polygon = polygon(fj.at("polygon"));
    f.plane_id = fj.at("plane_id").get<int>();
    f.cell_back = fj.at("cell_back").get<int>();
    f.cell_front = fj.at("cell_front").get<int>();
    f.source_primitive = fj.at("source_primitive").get<int>();
    f.coverage = fj.at("coverage").get<double>();
    f.alpha_covered = fj.at("alpha_covered").get<bool>();
    c.facets.push_back(std::move(f));
  }
  c.cell_facets = j.at("cell_facets").get<std::vector<std::vector<int>>>();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(1) + "\n"); }

json read_json(const fs::path& path, const char* kind = nullptr) {
  if (!fs::exists(path)) throw CheckpointError("missing checkpoint: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  if (kind) {
    if (!j.is_object() || j.value("kind", "") != kind)
      throw CheckpointError(path.string() + " is not a " + kind + " checkpoint");
    if (j.value("version", 0) != kVersion)
      throw CheckpointError(path.string() + ": unsupported version");
  }
  return j;
}

template <class F>
auto parse_guard(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

json opt(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}
std::optional<double> opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

void save_detect(const fs::path& path, const DetectResult& r) {
  write_json(path, {{"kind", "primitives"},
                    {"version", kVersion},
                    {"input", r.input},
                    {"config", config(r.config)},
                    {"box", box(r.box)},
                    {"samples", r.samples},
                    {"primitives", primitives(r.primitives)}});
}

DetectResult load_detect(const fs::path& path) {
  const json j = read_json(path, "primitives");
  return parse_guard(path, [&] {
    DetectResult r;
    r.input = j.at("input").get<std::string>();
    r.config = config(j.at("config"));
    r.box = box(j.at("box"));
    r.samples = j.at("samples").get<size_t>();
    r.primitives = primitives(j.at("primitives"));
    return r;
  });
}

void save_analysis(const fs::path& path, const AnalysisResult& r) {
  json regions = json::array();
  for (const auto& g : r.regions) {
    regions.push_back({{"id", g.id},
                       {"label", label_name(g.label)},
                       {"volume", g.volume},
                       {"cells", g.cells},
                       {"boundary_primitives", g.boundary_primitives}});
  }
  json structures = json::array();
  for (const auto& s : r.structures.structures) {
    structures.push_back({{"id", s.id},
                          {"region", s.region},
                          {"kind", kind_name(s.kind)},
                          {"volume", s.volume},
                          {"host", s.host},
                          {"projected_area", s.projected_area},
                          {"primitives", s.primitives}});
  }
  json clusters = json::array();
  for (const auto& c : r.clusters) {
    clusters.push_back({{"id", c.id},
                        {"kind", kind_name(c.kind)},
                        {"host", c.host},
                        {"level", c.level},
                        {"mean_volume", c.mean_volume},
                        {"projected_area", c.projected_area},
                        {"structures", c.structures},
                        {"primitives", c.primitives}});
  }
  json levels = json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"id", l.id}, {"mean_volume", l.mean_volume}, {"clusters", l.clusters}});
  }
  json groups = json::array();
  for (const auto& g : r.sorted.groups) {
    groups.push_back({{"level", g.level},
                      {"cluster", g.cluster},
                      {"structures", g.structures},
                      {"primitives", g.primitives}});
  }
  write_json(path, {{"kind", "analysis"},
                    {"version", kVersion},
                    {"input", r.input},
                    {"config", config(r.config)},
                    {"box", box(r.box)},
                    {"detected", r.detected},
                    {"cells", r.cells},
                    {"regularization",
                     {{"snapped", r.regularization.snapped},
                      {"rejected", r.regularization.rejected},
                      {"merged", r.regularization.merged},
                      {"templates", r.regularization.templates}}},
                    {"regions", regions},
                    {"structures",
                     {{"core_interior", r.structures.core_interior},
                      {"core_exterior", r.structures.core_exterior},
                      {"principal", r.structures.principal},
                      {"multi_host", r.structures.multi_host},
                      {"items", structures}}},
                    {"clusters", clusters},
                    {"levels", levels},
                    {"sorted", {{"levels", r.sorted.levels}, {"groups", groups}}},
                    {"primitives", primitives(r.primitives)}});
}

AnalysisResult load_analysis(const fs::path& path) {
  const json j = read_json(path, "analysis");
  return parse_guard(path, [&] {
    AnalysisResult r;
    r.input = j.at("input").get<std::string>();
    r.config = config(j.at("config"));
    r.box = box(j.at("box"));
    r.detected = j.at("detected").get<size_t>();
    r.cells = j.at("cells").get<size_t>();
    const json& reg = j.at("regularization");
    r.regularization = {reg.at("snapped").get<int>(), reg.at("rejected").get<int>(),
                        reg.at("merged").get<int>(), reg.at("templates").get<int>()};
    for (const auto& g : j.at("regions")) {
      Region x;
      x.id = g.at("id").get<int>();
      x.label = label_of(g.at("label"));
      x.volume = g.at("volume").get<double>();
      x.cells = g.at("cells").get<std::vector<int>>();
      x.boundary_primitives = g.at("boundary_primitives").get<std::vector<int>>();
      r.regions.push_back(std::move(x));
    }
    const json& st = j.at("structures");
    r.structures.core_interior = st.at("core_interior").get<int>();
    r.structures.core_exterior = st.at("core_exterior").get<int>();
    r.structures.principal = st.at("principal").get<std::vector<int>>();
    r.structures.multi_host = st.at("multi_host").get<int>();
    for (const auto& s : st.at("items")) {
      Structure x;
      x.id = s.at("id").get<int>();
      x.region = s.at("region").get<int>();
      x.kind = kind_of(s.at("kind"));
      x.volume = s.at("volume").get<double>();
      x.host = s.at("host").get<int>();
      x.projected_area = s.at("projected_area").get<double>();
      x.primitives = s.at("primitives").get<std::vector<int>>();
      r.structures.structures.push_back(std::move(x));
    }
    for (const auto& c : j.at("clusters")) {
      Cluster x;
      x.id = c.at("id").get<int>();
      x.kind = kind_of(c.at("kind"));
      x.host = c.at("host").get<int>();
      x.level = c.at("level").get<int>();
      x.mean_volume = c.at("mean_volume").get<double>();
      x.projected_area = c.at("projected_area").get<double>();
      x.structures = c.at("structures").get<std::vector<int>>();
      x.primitives = c.at("primitives").get<std::vector<int>>();
      r.clusters.push_back(std::move(x));
    }
    for (const auto& l : j.at("levels")) {
      r.levels.push_back({l.at("id").get<int>(), l.at("clusters").get<std::vector<int>>(),
                          l.at("mean_volume").get<double>()});
    }
    r.sorted.levels = j.at("sorted").at("levels").get<std::vector<std::vector<int>>>();
    for (const auto& g : j.at("sorted").at("groups")) {
      r.sorted.groups.push_back({g.at("level").get<int>(), g.at("cluster").get<int>(),
                                 g.at("structures").get<int>(), g.at("primitives").get<std::vector<int>>()});
    }
    r.primitives = primitives(j.at("primitives"));
    return r;
  });
}

void save_tree(const fs::path& path, const TreeResult& r) {
  const LodTree& t = r.tree;
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    nodes.push_back({{"id", n.id},
                     {"kind", lod_kind_name(n.kind)},
                     {"parent", n.parent},
                     {"children", n.children},
                     {"cutters", n.cutters},
                     {"level_of_cut", n.level_of_cut},
                     {"cut_count", n.cut_count},
                     {"volume", n.volume},
                     {"cell", n.cell},
                     {"leaf_begin", n.leaf_begin},
                     {"leaf_end", n.leaf_end},
                     {"labels", labels(n.labels)},
                     {"in_volume", n.in_volume},
                     {"diff", n.diff}});
  }
  json trace = json::array();
  for (const auto& c : t.trace.cuts) trace.push_back({c.primitive, c.node});
  write_json(path, {{"kind", "lodtree"},
                    {"version", kVersion},
                    {"input", r.input},
                    {"config", config(r.config)},
                    {"detected", r.detected},
                    {"sorted", r.sorted},
                    {"bsp_cuts", r.bsp_cuts},
                    {"level_count", t.level_count},
                    {"merge_threshold", t.merge_threshold},
                    {"merged_nodes", t.merged_nodes},
                    {"leaf_order", t.leaf_order},
                    {"trace", trace},
                    {"nodes", nodes},
                    {"complex", complex_json(t.complex)}});
}

TreeResult load_tree(const fs::path& path) {
  const json j = read_json(path, "lodtree");
  return parse_guard(path, [&] {
    TreeResult r;
    r.input = j.at("input").get<std::string>();
    r.config = config(j.at("config"));
    r.detected = j.at("detected").get<size_t>();
    r.sorted = j.at("sorted").get<size_t>();
    r.bsp_cuts = j.at("bsp_cuts").get<int>();
    LodTree& t = r.tree;
    t.level_count = j.at("level_count").get<int>();
    t.merge_threshold = j.at("merge_threshold").get<int>();
    t.merged_nodes = j.at("merged_nodes").get<int>();
    t.leaf_order = j.at("leaf_order").get<std::vector<int>>();
    for (const auto& c : j.at("trace")) t.trace.cuts.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    for (const auto& nj : j.at("nodes")) {
      LodNode n;
      n.id = nj.at("id").get<int>();
      n.kind = lod_kind_of(nj.at("kind"));
      n.parent = nj.at("parent").get<int>();
      n.children = nj.at("children").get<std::vector<int>>();
      n.cutters = nj.at("cutters").get<std::vector<int>>();
      n.level_of_cut = nj.at("level_of_cut").get<int>();
      n.cut_count = nj.at("cut_count").get<int>();
      n.volume = nj.at("volume").get<double>();
      n.cell = nj.at("cell").get<int>();
      n.leaf_begin = nj.at("leaf_begin").get<int>();
      n.leaf_end = nj.at("leaf_end").get<int>();
      n.labels = labels(nj.at("labels"));
      n.in_volume = nj.at("in_volume").get<std::vector<double>>();
      n.diff = nj.at("diff").get<std::vector<double>>();
      t.nodes.push_back(std::move(n));
    }
    if (t.nodes.empty()) throw Error("tree has no nodes");
    t.complex = complex_of(j.at("complex"));
    return r;
  });
}

std::string manifest_to_string(const Manifest& m) {
  json models = json::array();
  for (const auto& x : m.models) {
    models.push_back({{"file", x.file},
                      {"tag", tag_name(x.tag)},
                      {"level", x.level},
                      {"steps", x.steps},
                      {"cuts", x.cuts},
                      {"diff_sum", x.diff_sum},
                      {"faces", x.faces},
                      {"s", opt(x.s)},
                      {"e1", opt(x.e1)},
                      {"e2", opt(x.e2)}});
  }
  const PipelineConfig& c = m.params;
  const json j = {{"version", m.version},
                  {"input", m.input},
                  {"params",
                   {{"epsilon", c.detect.epsilon},
                    {"theta", c.detect.theta},
                    {"sigma", c.detect.sigma},
                    {"alpha", c.detect.alpha},
                    {"K", c.merge_k},
                    {"pct", c.interp_pct}}},
                  {"levels", m.levels},
                  {"models", models}};
  return j.dump(2) + "\n";
}

Manifest manifest_from_string(const std::string& text) {
  const json j = json::parse(text);
  Manifest m;
  m.version = j.at("version").get<int>();
  if (m.version != kVersion) throw CheckpointError("unsupported manifest version " + std::to_string(m.version));
  m.input = j.at("input").get<std::string>();
  const json& p = j.at("params");
  m.params.detect.epsilon = p.at("epsilon").get<double>();
  m.params.detect.theta = p.at("theta").get<double>();
  m.params.detect.sigma = p.at("sigma").get<int>();
  m.params.detect.alpha = p.at("alpha").get<double>();
  m.params.merge_k = p.at("K").get<int>();
  m.params.interp_pct = p.at("pct").get<double>();
  m.levels = j.at("levels").get<int>();
  for (const auto& x : j.at("models")) {
    ManifestModel e;
    e.file = x.at("file").get<std::string>();
    const auto tag = x.at("tag").get<std::string>();
    if (tag == "anchor") {
      e.tag = CandidateTag::Anchor;
    } else if (tag == "interpolation") {
      e.tag = CandidateTag::Interpolation;
    } else {
      throw CheckpointError("unknown model tag '" + tag + "'");
    }
    e.level = x.at("level").get<int>();
    e.steps = x.at("steps").get<int>();
    e.cuts = x.at("cuts").get<int>();
    e.diff_sum = x.at("diff_sum").get<double>();
    e.faces = x.at("faces").get<int>();
    e.s = opt(x, "s");
    e.e1 = opt(x, "e1");
    e.e2 = opt(x, "e2");
    m.models.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const fs::path& path, const Manifest& m) { write_text(path, manifest_to_string(m)); }

Manifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw CheckpointError("missing checkpoint: " + path.string());
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_guard(path, [&] { return manifest_from_string(ss.str()); });
}

std::vector<int> load_selection(const fs::path& path) {
  const json j = read_json(path);
  return parse_guard(path, [&] { return j.at("selected").get<std::vector<int>>(); });
}

void save_selection(const fs::path& path, const std::vector<int>& steps) {
  write_json(path, {{"selected", steps}});
}

std::string truth_to_string(const SynthTruth& t) {
  const json j = {{"scene", t.scene},
                  {"volume", t.volume},
                  {"levels", t.levels},
                  {"addons", t.addons},
                  {"cutouts", t.cutouts},
                  {"addon_volumes", t.addon_volumes},
                  {"cutout_volumes", t.cutout_volumes},
                  {"alpha", t.alpha}};
  return j.dump(2) + "\n";
}

void save_truth(const fs::path& path, const SynthTruth& t) { write_text(path, truth_to_string(t)); }

void save_metrics_csv(const fs::path& path, const Manifest& m) {
  std::ostringstream out;
  out.precision(17);
  out << "steps,tag,level,cuts,faces,s,e1,e2\n";
  auto cell = [&](const std::optional<double>& v) {
    if (v && std::isfinite(*v)) out << *v;
  };
  for (const auto& x : m.models) {
    out << x.steps << ',' << tag_name(x.tag) << ',' << x.level << ',' << x.cuts << ',' << x.faces << ',';
    cell(x.s);
    out << ',';
    cell(x.e1);
    out << ',';
    cell(x.e2);
    out << '\n';
  }
  write_text(path, out.str());
}

void update_summary(const fs::path& path, const std::vector<std::pair<std::string, double>>& fields) {
  json j = json::object();
  if (fs::exists(path)) {
    try {
      j = read_json(path);
    } catch (const CheckpointError&) {
      j = json::object();
    }
  }
  for (const auto& [k, v] : fields) {
    if (std::floor(v) == v && std::abs(v) < 1e15) {
      j[k] = static_cast<long long>(v);
    } else {
      j[k] = v;
    }
  }
  write_text(path, j.dump(2) + "\n");
}

std::vector<std::pair<std::string, double>> summary_fields(const PipelineSummary& s) {
  return {{"P", double(s.primitives)},
          {"S", double(s.sorted)},
          {"addons", double(s.addons)},
          {"cutouts", double(s.cutouts)},
          {"clusters", double(s.clusters)},
          {"levels", double(s.levels)},
          {"cells", double(s.cells)},
          {"nodes", double(s.nodes)},
          {"merged_nodes", double(s.merged_nodes)},
          {"lod_cuts", double(s.lod_cuts)},
          {"bsp_cuts", double(s.bsp_cuts)},
          {"anchors", double(s.anchors)},
          {"interpolations", double(s.interpolations)},
          {"T_detect", s.t_detect},
          {"T1", s.t1},
          {"T2", s.t2},
          {"T3", s.t3}};
}

}  // namespace lodforge
