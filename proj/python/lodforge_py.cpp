#include "lodforge/checkpoint.hpp"
#include "lodforge/error.hpp"
#include "lodforge/io.hpp"
#include "lodforge/ioview.hpp"
#include "lodforge/metrics.hpp"
#include "lodforge/pipeline.hpp"
#include "lodforge/synth.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace lodforge;

namespace {

PipelineConfig make_config(double epsilon, double theta, int sigma, double alpha, int merge_k, double interp_pct,
                           const std::string& merge_metric, const std::string& up_axis, int rays,
                           int rmse_samples, std::uint64_t seed) {
  PipelineConfig c;
  c.detect.epsilon = epsilon;
  c.detect.theta = theta;
  c.detect.sigma = sigma;
  c.detect.alpha = alpha;
  c.merge_k = merge_k;
  c.interp_pct = interp_pct;
  const auto m = parse_merge_metric(merge_metric);
  if (!m) throw Error("unknown merge metric '" + merge_metric + "'");
  c.merge_metric = *m;
  if (up_axis.size() != 1) throw Error("up_axis must be x, y or z");
  c.up_axis = up_axis[0];
  c.rays = rays;
  c.rmse_samples = rmse_samples;
  c.seed = seed;
  c.validate();
  return c;
}

py::dict surface_dict(const PolygonMesh& mesh) {
  const SurfaceReport r = check_surface(mesh);
  py::dict d;
  d["closed_manifold"] = r.closed_manifold();
  d["watertight"] = r.watertight;
  d["euler"] = r.euler;
  d["components"] = r.components;
  d["volume"] = mesh_volume(mesh);
  d["faces"] = mesh.faces.size();
  return d;
}

}  // namespace

PYBIND11_MODULE(_lodforge, m) {
  m.doc() = "Structure-aware level-of-detail building models";

  py::register_exception<Error>(m, "LodforgeError");

  m.def(
      "synth",
      [](const std::string& scene, const std::filesystem::path& out, double noise, std::uint64_t seed, int windows) {
        const auto s = parse_scene(scene);
        if (!s) throw Error("unknown scene '" + scene + "'");
        SynthOptions so;
        so.noise_sigma = noise;
        so.seed = seed;
        so.windows = windows;
        const SynthResult r = make_scene(*s, so);
        save_obj(out, r.mesh);
        py::dict truth;
        truth["scene"] = r.truth.scene;
        truth["volume"] = r.truth.volume;
        truth["levels"] = r.truth.levels;
        truth["addons"] = r.truth.addons;
        truth["cutouts"] = r.truth.cutouts;
        truth["alpha"] = r.truth.alpha;
        truth["triangles"] = r.mesh.triangles.size();
        return truth;
      },
      py::arg("scene"), py::arg("out"), py::arg("noise") = 0.0, py::arg("seed") = 0, py::arg("windows") = 4,
      "Writes a synthetic building OBJ and returns its analytic ground truth.");

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& input, const std::filesystem::path& out, double epsilon, double theta,
         int sigma, double alpha, int merge_k, double interp_pct, const std::string& merge_metric,
         const std::string& up_axis, int rays, int rmse_samples, std::uint64_t seed) {
        const PipelineConfig c = make_config(epsilon, theta, sigma, alpha, merge_k, interp_pct, merge_metric,
                                             up_axis, rays, rmse_samples, seed);
        PipelineSummary s;
        {
          py::gil_scoped_release release;
          s = run_pipeline(input, out, c);
        }
        py::dict d;
        for (const auto& [k, v] : summary_fields(s)) d[py::str(k)] = v;
        return d;
      },
      py::arg("input"), py::arg("out"), py::arg("epsilon") = 0.15, py::arg("theta") = 40.0, py::arg("sigma") = 15,
      py::arg("alpha") = 7.0, py::arg("merge_k") = 10, py::arg("interp_pct") = 0.8,
      py::arg("merge_metric") = "per-structure", py::arg("up_axis") = "z", py::arg("rays") = 100,
      py::arg("rmse_samples") = 100000, py::arg("seed") = 0,
      "Runs every stage, writing checkpoints, OBJ models and manifest.json to `out`.");

  m.def(
      "load_manifest",
      [](const std::filesystem::path& path) {
        const Manifest man = load_manifest(path);
        py::list models;
        for (const auto& x : man.models) {
          py::dict d;
          d["file"] = x.file;
          d["tag"] = tag_name(x.tag);
          d["level"] = x.level;
          d["steps"] = x.steps;
          d["cuts"] = x.cuts;
          d["diff_sum"] = x.diff_sum;
          d["faces"] = x.faces;
          d["s"] = x.s ? py::object(py::float_(*x.s)) : py::object(py::none());
          d["e1"] = x.e1 ? py::object(py::float_(*x.e1)) : py::object(py::none());
          d["e2"] = x.e2 ? py::object(py::float_(*x.e2)) : py::object(py::none());
          models.append(d);
        }
        py::dict d;
        d["version"] = man.version;
        d["input"] = man.input;
        d["levels"] = man.levels;
        d["models"] = models;
        return d;
      },
      py::arg("path"));

  m.def(
      "check_obj", [](const std::filesystem::path& path) { return surface_dict(load_polygon_obj(path)); },
      py::arg("path"), "Closed-manifold check and volume of an OBJ polygon mesh.");

  m.def(
      "mean_shift_1d",
      [](const std::vector<double>& values, double bandwidth) {
        const MeanShift r = mean_shift_1d(values, bandwidth);
        return py::make_tuple(r.assignment, r.modes);
      },
      py::arg("values"), py::arg("bandwidth"));

  m.def(
      "rmse",
      [](const std::filesystem::path& a, const std::filesystem::path& b, size_t n, std::uint64_t seed) {
        const PolygonMesh ma = load_polygon_obj(a), mb = load_polygon_obj(b);
        Aabb box = mesh_bounds(ma);
        const Aabb bb = mesh_bounds(mb);
        box.extend(bb.min);
        box.extend(bb.max);
        return rmse(triangulate(ma), triangulate(mb), n, box.diagonal(), seed);
      },
      py::arg("a"), py::arg("b"), py::arg("samples") = 100000, py::arg("seed") = 0,
      "RMSE from samples of `a` to `b`, percent of the joint bounding-box diagonal.");
}
