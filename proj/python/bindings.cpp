#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "swnehari/config.hpp"
#include "swnehari/errors.hpp"
#include "swnehari/fibering.hpp"
#include "swnehari/functional.hpp"
#include "swnehari/grid.hpp"
#include "swnehari/model.hpp"
#include "swnehari/rayleigh.hpp"
#include "swnehari/solver.hpp"

namespace py = pybind11;
using namespace swnehari;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::vector<py::ssize_t> shape_of(const GridSpec& g) {
  return std::vector<py::ssize_t>(g.dim, g.points_per_axis);
}

Array to_array(const Field& f) {
  Array out(shape_of(f.grid()));
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Field to_field(const GridSpec& g, const Array& a) {
  if (a.size() != static_cast<py::ssize_t>(g.size()))
    throw py::value_error("array has " + std::to_string(a.size()) + " entries, grid has " + std::to_string(g.size()));
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict solution_dict(const NehariSolution& s) {
  py::dict d = to_py(nlohmann::json(s));
  d["field"] = to_array(s.field);
  return d;
}

py::dict estimate_dict(const MultistartEstimate& m) {
  py::dict d;
  d["value"] = m.best.value;
  d["minimizer"] = to_array(m.best.minimizer);
  d["iterations"] = m.best.iterations;
  d["values"] = m.values;
  d["relative_spread"] = m.relative_spread;
  return d;
}

MultistartOptions multistart(int starts, std::uint64_t seed) {
  MultistartOptions o;
  o.starts = starts;
  o.seed = seed;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nehari-manifold solver for a doubly weighted Stein-Weiss problem";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](double half_width, int points_per_axis, int dim) {
             GridSpec g{half_width, points_per_axis, dim};
             g.validate();
             return g;
           }),
           py::arg("half_width") = 4.0, py::arg("points_per_axis") = 16, py::arg("dim") = 3)
      .def_readonly("half_width", &GridSpec::half_width)
      .def_readonly("points_per_axis", &GridSpec::points_per_axis)
      .def_readonly("dim", &GridSpec::dim)
      .def_property_readonly("h", &GridSpec::h)
      .def_property_readonly("size", &GridSpec::size)
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(half_width=" + std::to_string(g.half_width) +
               ", points_per_axis=" + std::to_string(g.points_per_axis) + ", dim=" + std::to_string(g.dim) + ")";
      });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("dim_n", &ModelParams::dim_n)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("p", &ModelParams::p)
      .def_readwrite("q", &ModelParams::q)
      .def_readwrite("lambda_", &ModelParams::lambda)
      .def_readwrite("v0", &ModelParams::v0)
      .def_readwrite("v_inf", &ModelParams::v_inf)
      .def_readwrite("gamma1", &ModelParams::gamma1)
      .def_readwrite("gamma2", &ModelParams::gamma2)
      .def_readwrite("beta", &ModelParams::beta)
      .def("to_dict", [](const ModelParams& p) { return to_py(nlohmann::json(p)); });

  m.def(
      "load_config",
      [](const std::string& path) {
        const RunConfig c = load_config(path);
        return py::make_tuple(c.model, c.grid);
      },
      py::arg("path"), "Reads a key = value file and returns (ModelParams, GridSpec).");

  m.def(
      "validate", [](const ModelParams& p) { return to_py(nlohmann::json(validate_hypotheses(p))); },
      py::arg("params"), "Hypothesis checks as a dict with one entry per condition.");

  py::class_<Problem>(m, "Problem")
      .def(py::init<const ModelParams&, const GridSpec&>(), py::arg("params"), py::arg("grid"))
      .def_property_readonly("params", &Problem::params)
      .def_property_readonly("grid", &Problem::grid)
      .def("energy",
           [](const Problem& pr, const Array& u, double lambda) {
             return to_py(nlohmann::json(energy(pr, to_field(pr.grid(), u), lambda)));
           },
           py::arg("u"), py::arg("lambda_"))
      .def("slope", [](const Problem& pr, const Array& u, double l) { return slope(pr, to_field(pr.grid(), u), l); },
           py::arg("u"), py::arg("lambda_"))
      .def("second",
           [](const Problem& pr, const Array& u, double l) { return second_along(pr, to_field(pr.grid(), u), l); },
           py::arg("u"), py::arg("lambda_"))
      .def("residual",
           [](const Problem& pr, const Array& u, double l) { return to_array(residual(pr, to_field(pr.grid(), u), l)); },
           py::arg("u"), py::arg("lambda_"))
      .def("fibering",
           [](const Problem& pr, const Array& u, std::optional<double> lambda) {
             const FiberTriple tr = fiber_triple(pr, to_field(pr.grid(), u));
             py::dict d = to_py(nlohmann::json(fibering_report(tr, pr.p(), pr.q(), lambda)));
             d["s"] = tr.s;
             d["A"] = tr.a_val;
             d["B"] = tr.b_val;
             return d;
           },
           py::arg("u"), py::arg("lambda_") = py::none(),
           "t_n, t_e, Lambda_n, Lambda_e and, given lambda, the Nehari roots along u.")
      .def("gaussian_bump", [](const Problem& pr, double width) { return to_array(gaussian_bump(pr.grid(), width)); },
           py::arg("width") = 1.0);

  m.def(
      "fibering_constants",
      [](double p, double q) {
        const auto c = constants(p, q);
        py::dict d;
        d["c"] = c.c_pq;
        d["c_tilde"] = c.c_tilde_pq;
        d["ratio"] = c.ratio;
        return d;
      },
      py::arg("p"), py::arg("q"));

  m.def(
      "estimate_lambda_star",
      [](const Problem& pr, int starts, std::uint64_t seed) {
        return estimate_dict(estimate_lambda_star(pr, multistart(starts, seed)));
      },
      py::arg("problem"), py::arg("starts") = 5, py::arg("seed") = 1);
  m.def(
      "estimate_lambda_lower",
      [](const Problem& pr, int starts, std::uint64_t seed) {
        return estimate_dict(estimate_lambda_lower(pr, multistart(starts, seed)));
      },
      py::arg("problem"), py::arg("starts") = 5, py::arg("seed") = 1);

  m.def(
      "solve",
      [](const Problem& pr, double lambda, std::uint64_t seed) {
        const auto star = estimate_lambda_star(pr);
        if (!(lambda > 0.0 && lambda < star.best.value))
          throw py::value_error("lambda must lie in (0, " + std::to_string(star.best.value) + ")");
        SolverOptions opts;
        opts.seed = seed;
        opts.fallback_direction = star.best.minimizer;
        const auto u = minimize_on_nplus(pr, lambda, default_init(pr.grid(), Branch::plus), opts);
        const auto v = minimize_on_nminus(pr, lambda, default_init(pr.grid(), Branch::minus, seed), opts);
        return py::make_tuple(solution_dict(u), solution_dict(v));
      },
      py::arg("problem"), py::arg("lambda_"), py::arg("seed") = 7,
      "Ground state on N+ and bound state on N- as (u, v) dicts.");

  m.def(
      "trichotomy",
      [](const Problem& pr, std::optional<std::vector<double>> lambdas) {
        const auto star = estimate_lambda_star(pr);
        const auto lower = estimate_lambda_lower(pr);
        SolverOptions opts;
        opts.fallback_direction = star.best.minimizer;
        const auto ls = lambdas ? *lambdas : default_trichotomy_lambdas(lower.best.value, star.best.value);
        return to_py(nlohmann::json(trichotomy_experiment(pr, ls, lower.best.value, star.best.value, opts)));
      },
      py::arg("problem"), py::arg("lambdas") = py::none());
}
