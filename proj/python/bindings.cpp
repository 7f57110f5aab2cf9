#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmirt/experiment.hpp"
#include "rmirt/metrics.hpp"
#include "rmirt/model.hpp"
#include "rmirt/parallel.hpp"
#include "rmirt/selfcheck.hpp"
#include "rmirt/sim.hpp"

namespace py = pybind11;
using namespace rmirt;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vec to_vec(const Array& a) { return Vec(a.data(), a.data() + a.size()); }

Array from_vec(const Vec& v, std::vector<py::ssize_t> shape) {
  Array out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

void expect_ndim(const Array& a, int ndim, const char* name) {
  if (a.ndim() != ndim)
    throw DimensionError(std::string(name) + " must have " + std::to_string(ndim) + " dimensions");
}

Image to_image(const Array& a, double pixel_size = 1.0) {
  expect_ndim(a, 2, "image");
  return Image(GridGeom(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), pixel_size),
               to_vec(a));
}

Array from_image(const Image& img) {
  return from_vec(img.vec(), {img.geom().height, img.geom().width});
}

MaskStack to_masks(const Array& a, const GridGeom& g) {
  expect_ndim(a, 3, "alpha");
  if (a.shape(1) != g.height || a.shape(2) != g.width)
    throw DimensionError("alpha must have shape (n, height, width) matching the image");
  return MaskStack(g, static_cast<int>(a.shape(0)), to_vec(a));
}

Array from_masks(const MaskStack& m) {
  return from_vec(m.vec(), {m.n_subscans(), m.geom().height, m.geom().width});
}

MotionParams to_params(const Array& a, MotionModel kind, GridPoint center) {
  expect_ndim(a, 2, "params");
  if (a.shape(1) != param_count(kind))
    throw DimensionError("params must have " + std::to_string(param_count(kind)) + " columns");
  return MotionParams(kind, static_cast<int>(a.shape(0)), to_vec(a), center);
}

Array from_params(const MotionParams& p) {
  return from_vec(p.vec(), {p.n_subscans(), p.per_subscan()});
}

Array from_sino(const Sinogram& s) {
  return from_vec(s.vec(), {s.geom().n_angles(), s.geom().n_detectors});
}

Sinogram to_sino(const Array& a, const ProjGeom& geom) {
  expect_ndim(a, 2, "sinogram");
  return Sinogram(geom, to_vec(a));
}

GridPoint to_point(std::pair<double, double> rc) { return {rc.first, rc.second}; }

struct Problem {
  ModelConfig cfg;
  Image x;
  MaskStack alpha;
  MotionParams p;
};

Problem make_problem(const Array& x, const Array& alpha, const Array& params,
                     const ProjGeom& geom, const std::string& kind,
                     std::pair<double, double> center) {
  const MotionModel k = motion_model_from_string(kind);
  Image img = to_image(x);
  MaskStack a = to_masks(alpha, img.geom());
  MotionParams p = to_params(params, k, to_point(center));
  return {ModelConfig(img.geom(), geom, k), std::move(img), std::move(a), std::move(p)};
}

py::dict outcome_to_dict(const ExperimentOutcome& out) {
  py::dict d;
  d["x_true"] = from_image(out.truth.x_true);
  d["mask_true"] = from_masks(out.truth.mask_true);
  d["p_true"] = from_params(out.truth.p_true_subscan);
  d["sinogram"] = from_sino(out.truth.noisy);
  d["x_init"] = from_image(out.x_init);
  d["true_center"] = py::make_tuple(out.true_center.row, out.true_center.col);
  d["metrics_table"] = metrics_table(out);
  py::dict variants;
  for (const auto& v : out.variants) {
    py::dict e;
    e["x"] = from_image(v.result.x);
    e["alpha"] = from_masks(v.result.alpha);
    e["p"] = from_params(v.result.p);
    e["center"] = py::make_tuple(v.result.p.center().row, v.result.p.center().col);
    e["final_mse"] = v.final_mse;
    e["dice"] = v.dice;
    e["param_abs_error"] = v.param_abs_error;
    std::vector<double> obj, mse_curve;
    for (const auto& it : v.result.trace.iterations) {
      obj.push_back(it.objective);
      mse_curve.push_back(it.mse);
    }
    e["objective"] = obj;
    e["mse"] = mse_curve;
    variants[py::str(to_string(v.variant))] = e;
  }
  d["variants"] = variants;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rmirt, m) {
  m.doc() = "Region-based motion-compensated iterative reconstruction";

  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

  py::class_<ProjGeom>(m, "ProjGeom")
      .def_static("uniform", &ProjGeom::uniform, py::arg("n_angles"), py::arg("angular_range"),
                  py::arg("n_detectors"), py::arg("detector_spacing") = 1.0,
                  py::arg("n_subscans") = 1)
      .def_property_readonly("angles", [](const ProjGeom& g) { return g.angles; })
      .def_readonly("n_detectors", &ProjGeom::n_detectors)
      .def_readonly("detector_spacing", &ProjGeom::detector_spacing)
      .def_readonly("subscan_bounds", &ProjGeom::subscan_bounds)
      .def_property_readonly("n_angles", &ProjGeom::n_angles)
      .def_property_readonly("n_subscans", &ProjGeom::n_subscans);

  m.def("set_num_threads", &set_num_threads, py::arg("n"));
  m.def("num_threads", &num_threads);

  m.def(
      "project",
      [](const Array& img, const ProjGeom& geom) {
        const Image x = to_image(img);
        return from_sino(project_all(x.geom(), geom, x));
      },
      py::arg("image"), py::arg("geom"));
  m.def(
      "backproject",
      [](const Array& sino, const ProjGeom& geom, int height, int width) {
        const Sinogram s = to_sino(sino, geom);
        const GridGeom g(width, height);
        Vec out(g.size(), 0.0);
        const auto proj = make_subscan_projectors(g, geom);
        for (int i = 0; i < geom.n_subscans(); ++i) {
          const Vec bi = proj[i].backproject(s.block(i));
          for (std::size_t k = 0; k < out.size(); ++k) out[k] += bi[k];
        }
        return from_vec(out, {height, width});
      },
      py::arg("sinogram"), py::arg("geom"), py::arg("height"), py::arg("width"));

  m.def(
      "warp",
      [](const Array& img, const Array& params, const std::string& kind,
         std::pair<double, double> center, bool adjoint) {
        const Image x = to_image(img);
        expect_ndim(params, 1, "params");
        const AffineMap map =
            build_map(to_vec(params), motion_model_from_string(kind), to_point(center));
        const Vec out = adjoint ? warp_adjoint(map, x.geom(), x.vec())
                                : warp_apply(map, x.geom(), x.vec());
        return from_vec(out, {x.geom().height, x.geom().width});
      },
      py::arg("image"), py::arg("params"), py::arg("kind") = "scale2",
      py::arg("center") = std::pair<double, double>{0.0, 0.0}, py::arg("adjoint") = false);

  m.def(
      "forward",
      [](const Array& x, const Array& alpha, const Array& params, const ProjGeom& geom,
         const std::string& kind, std::pair<double, double> center) {
        const Problem pr = make_problem(x, alpha, params, geom, kind, center);
        return from_sino(forward(pr.cfg, pr.x, pr.alpha, pr.p));
      },
      py::arg("x"), py::arg("alpha"), py::arg("params"), py::arg("geom"),
      py::arg("kind") = "scale2", py::arg("center") = std::pair<double, double>{0.0, 0.0});
  m.def(
      "objective",
      [](const Array& x, const Array& alpha, const Array& params, const Array& b,
         const ProjGeom& geom, const std::string& kind, std::pair<double, double> center) {
        const Problem pr = make_problem(x, alpha, params, geom, kind, center);
        return objective(pr.cfg, pr.x, pr.alpha, pr.p, to_sino(b, geom));
      },
      py::arg("x"), py::arg("alpha"), py::arg("params"), py::arg("b"), py::arg("geom"),
      py::arg("kind") = "scale2", py::arg("center") = std::pair<double, double>{0.0, 0.0});
  m.def(
      "gradients",
      [](const Array& x, const Array& alpha, const Array& params, const Array& b,
         const ProjGeom& geom, const std::string& kind, std::pair<double, double> center) {
        const Problem pr = make_problem(x, alpha, params, geom, kind, center);
        const Residual r = residual(pr.cfg, pr.x, pr.alpha, pr.p, to_sino(b, geom));
        const Gradients g = gradients(pr.cfg, pr.x, pr.alpha, pr.p, r);
        py::dict d;
        d["x"] = from_vec(g.x, {pr.x.geom().height, pr.x.geom().width});
        d["alpha"] = from_vec(g.alpha, {pr.alpha.n_subscans(), pr.x.geom().height,
                                        pr.x.geom().width});
        d["p"] = from_vec(g.p, {pr.p.n_subscans(), pr.p.per_subscan()});
        return d;
      },
      py::arg("x"), py::arg("alpha"), py::arg("params"), py::arg("b"), py::arg("geom"),
      py::arg("kind") = "scale2", py::arg("center") = std::pair<double, double>{0.0, 0.0});

  m.def(
      "make_phantom",
      [](int width, int height, int static_band_rows, std::uint64_t seed,
         const std::string& structure) {
        PhantomSpec spec;
        spec.geom = GridGeom(width, height);
        spec.static_band_rows = static_band_rows;
        spec.texture_seed = seed;
        spec.structure = phantom_structure_from_string(structure);
        const Phantom ph = make_phantom(spec);
        return py::make_tuple(from_image(ph.image), from_image(ph.region));
      },
      py::arg("width"), py::arg("height"), py::arg("static_band_rows"), py::arg("seed") = 0,
      py::arg("structure") = "textured_disk");

  m.def(
      "mse", [](const Array& a, const Array& b) { return mse(to_image(a), to_image(b)); },
      py::arg("x"), py::arg("x_true"));
  m.def(
      "dice",
      [](const Array& est, const Array& truth) {
        expect_ndim(est, 3, "est");
        const GridGeom g(static_cast<int>(est.shape(2)), static_cast<int>(est.shape(1)));
        return dice(to_masks(est, g), to_masks(truth, g));
      },
      py::arg("est"), py::arg("truth"));

  m.def(
      "run_experiment",
      [](const std::string& config_path, std::optional<std::uint64_t> seed,
         std::optional<std::string> output_dir, bool write_outputs) {
        RunOverrides ov;
        ov.seed = seed;
        ov.output_dir = output_dir;
        const ExperimentConfig cfg = load_experiment_config(config_path);
        ExperimentOutcome out;
        {
          py::gil_scoped_release release;
          out = run_experiment(cfg, ov, write_outputs);
        }
        return outcome_to_dict(out);
      },
      py::arg("config_path"), py::arg("seed") = py::none(), py::arg("output_dir") = py::none(),
      py::arg("write_outputs") = false);

  m.def("selfcheck", []() {
    std::vector<py::tuple> out;
    for (const auto& c : run_selfcheck())
      out.push_back(py::make_tuple(c.name, c.passed, c.value, c.tolerance));
    return out;
  });
}
