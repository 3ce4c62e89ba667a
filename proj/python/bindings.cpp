#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spdflow/bench.hpp"

namespace py = pybind11;
using namespace spdflow;

namespace {

py::dict trajectory_dict(const Trajectory& traj) {
  py::dict out;
  out["times"] = traj.times;
  out["points"] = traj.points;
  out["min_eig"] = traj.min_eig;
  out["spd"] = std::vector<bool>(traj.spd.begin(), traj.spd.end());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Structure-preserving integrators for ODEs on SPD matrices";

  static py::exception<Error> error_type(m, "SpdflowError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  // matcore
  m.def("sym_eig", [](const Mat& s) {
    EigenSym e = sym_eig(s);
    return py::make_tuple(e.values, e.vectors);
  });
  m.def("expm", &expm);
  m.def("sqrtm_spd", &sqrtm_spd);
  m.def("invsqrtm_spd", &invsqrtm_spd);
  m.def("logm_spd", &logm_spd);
  m.def("commutator", &commutator);
  m.def("dexpinv", &dexpinv, py::arg("theta"), py::arg("a"), py::arg("order") = 4);
  m.def("is_spd", [](const Mat& s, double tol) {
    SpdCheck c = is_spd(s, tol);
    return py::make_tuple(c.spd, c.min_eig);
  }, py::arg("s"), py::arg("tol") = 0.0);

  // manifold
  py::enum_<BoundRegime>(m, "BoundRegime")
      .value("AllSafe", BoundRegime::AllSafe)
      .value("Bounded", BoundRegime::Bounded);
  py::class_<StepBounds>(m, "StepBounds")
      .def_readonly("rho_stay", &StepBounds::rho_stay)
      .def_readonly("rho_leave", &StepBounds::rho_leave)
      .def_readonly("regime", &StepBounds::regime);
  m.def("step_bounds", &step_bounds);
  m.def("spd_after_step", &spd_after_step);
  m.def("affine_distance", &affine_distance);
  m.def("affine_exp", &affine_exp);

  // actions
  m.def("congruence_act", &congruence_act);
  m.def("congruence_algebra", &congruence_algebra);
  m.def("siegel_act", &siegel_act);
  m.def("siegel_algebra", [](const Mat& a, const Mat& b, const Mat& c, const Mat& p) {
    return siegel_algebra(SpAlgebraElem{a, b, c}, p);
  });
  m.def("is_symplectic", &is_symplectic, py::arg("m"), py::arg("tol") = 1e-8);
  m.def("random_symplectic", &random_symplectic);

  // models
  py::class_<Model>(m, "Model")
      .def_readonly("name", &Model::name)
      .def_readonly("dim", &Model::dim)
      .def_readonly("aux0", &Model::aux0)
      .def("xi", [](const Model& self, const Mat& p, double t, std::optional<Vec> aux) {
        return self.xi(p, t, aux.value_or(self.aux0));
      }, py::arg("p"), py::arg("t") = 0.0, py::arg("aux") = py::none())
      .def("tangent", [](const Model& self, const Mat& p, double t, std::optional<Vec> aux) {
        return self.tangent(p, t, aux.value_or(self.aux0));
      }, py::arg("p"), py::arg("t") = 0.0, py::arg("aux") = py::none())
      .def_property_readonly("has_siegel", &Model::has_siegel);
  m.def("linear_model", &linear_model);
  m.def("ou_model", &ou_model);
  m.def("gbm_model", &gbm_model);
  m.def("riccati_model", &riccati_model);
  m.def("oscillating_model", &oscillating_model);
  m.def("case_study", [](int which, bool swap_pairing) {
    if (which != 1 && which != 2) throw Error(ErrorKind::InvalidArgument, "case study is 1 or 2");
    CaseStudyParams c = make_case_study(which == 1 ? CaseStudy::One : CaseStudy::Two, swap_pairing);
    py::dict out;
    out["a"] = c.a;
    out["b"] = c.b;
    out["p0"] = c.p0;
    out["m0"] = c.m0;
    out["t0"] = c.t0;
    out["t1"] = c.t1;
    out["points"] = c.points;
    return out;
  }, py::arg("which"), py::arg("swap_pairing") = false);

  // integrators
  m.def("linspace", &linspace);
  m.def("integrate", [](const std::string& integrator, const Model& model, const Mat& p0,
                        const std::vector<double>& grid, const std::string& action) {
    const ActionKind kind = action == "symplectic" ? ActionKind::Symplectic : ActionKind::Congruence;
    if (action != "symplectic" && action != "congruence") {
      throw Error(ErrorKind::InvalidArgument, "unknown action '" + action + "'");
    }
    auto stepper = make_stepper(stepper_from_string(integrator), kind);
    return trajectory_dict(integrate(*stepper, model, p0, grid));
  }, py::arg("integrator"), py::arg("model"), py::arg("p0"), py::arg("grid"),
     py::arg("action") = "congruence");
  m.def("reference_trajectory", [](const Model& model, const Mat& p0, const std::vector<double>& grid,
                                   int refine) {
    return trajectory_dict(reference_trajectory(model, p0, grid, refine));
  }, py::arg("model"), py::arg("p0"), py::arg("grid"), py::arg("refine") = 512);

  // bench
  m.def("bounds", [](const std::string& preset, const std::string& field) {
    bench::ExperimentConfig cfg = bench::preset_config(preset);
    if (field != "euler" && field != "rk4") {
      throw Error(ErrorKind::InvalidArgument, "field is 'euler' or 'rk4'");
    }
    return bench::compute_bounds(cfg, field == "euler" ? bench::BoundsField::Euler
                                                       : bench::BoundsField::Rk4).bounds;
  }, py::arg("preset"), py::arg("field") = "euler");
  m.def("run_preset", [](const std::string& preset, std::optional<std::filesystem::path> out_dir) {
    bench::ExperimentConfig cfg = bench::preset_config(preset);
    const bench::RunResult result = bench::run_experiment(cfg);
    if (out_dir) bench::write_run_csv(result, *out_dir);
    py::dict summary;
    for (const auto& run : result.runs) {
      py::dict row;
      row["final_frob"] = run.final_frob();
      row["final_affine"] = run.final_affine();
      row["max_frob"] = run.max_frob();
      row["spd_failures"] = run.trajectory.spd_failures();
      row["failure"] = run.failure;
      summary[py::str(run.name)] = row;
    }
    return summary;
  }, py::arg("preset"), py::arg("out_dir") = py::none());
  m.def("convergence", [](const std::string& model, const std::vector<double>& hs, std::uint64_t seed) {
    bench::ConvergenceConfig cfg;
    cfg.model_id = model;
    cfg.hs = hs;
    cfg.seed = seed;
    py::dict out;
    for (const auto& s : bench::run_convergence(cfg).series) {
      out[py::str(s.integrator)] = s.exact ? py::object(py::str("exact")) : py::object(py::float_(s.slope));
    }
    return out;
  }, py::arg("model") = "oscillating", py::arg("hs") = std::vector<double>{0.2, 0.1, 0.05, 0.025},
     py::arg("seed") = 0);
}
