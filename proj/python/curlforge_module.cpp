#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curlforge/catalog.hpp"
#include "curlforge/diagnostics.hpp"
#include "curlforge/integrate.hpp"
#include "curlforge/version.hpp"

namespace py = pybind11;
using namespace curlforge;

namespace {

SystemDefinition build(const std::string& name, const ParamMap& params,
                       const std::optional<std::string>& potential) {
  const CatalogEntry& entry = find_entry(name);
  std::optional<Potential> u;
  if (entry.takes_potential) u = Potential::named(potential.value_or("quadratic"));
  else if (potential) throw CatalogError("system '" + name + "' does not take a potential");
  return build_system(name, entry.with_defaults(params), u);
}

py::object json_to_python(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

py::dict stability_dict(const StabilityResult& r) {
  py::dict d;
  d["matrix"] = r.matrix;
  d["eigenvalues"] = Eigen::VectorXcd(r.eigenvalues);
  d["max_real_part"] = r.max_real_part;
  d["classification"] = std::string(to_string(r.classification));
  d["characteristic_residual"] = r.characteristic_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Curl-force simulation and verification core";
  m.attr("__version__") = kVersion;

  m.def("list_catalog", [] {
    py::list out;
    for (const CatalogEntry& e : list_catalog()) {
      py::dict d;
      d["name"] = e.name;
      d["formulation"] = std::string(to_string(e.formulation));
      d["params"] = e.defaults();
      d["takes_potential"] = e.takes_potential;
      d["equations"] = e.equations;
      out.append(d);
    }
    return out;
  });

  m.def(
      "default_initial_state",
      [](const std::string& system, const ParamMap& params, std::optional<std::string> potential) {
        return default_initial_state(build(system, params, potential));
      },
      py::arg("system"), py::arg("params") = ParamMap{}, py::arg("potential") = py::none());

  m.def(
      "simulate",
      [](const std::string& system, const ParamMap& params, std::optional<std::string> potential,
         std::optional<Vector> x0, double t0, double t1, double dt) {
        const SystemDefinition sys = build(system, params, potential);
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = integrate(sys, x0.value_or(default_initial_state(sys)), t0, t1, dt);
        }
        Eigen::VectorXd times = Eigen::Map<Eigen::VectorXd>(traj.times.data(), traj.times.size());
        Eigen::MatrixXd states(traj.size(), sys.dim);
        for (std::size_t k = 0; k < traj.size(); ++k) states.row(k) = traj.states[k].transpose();
        return py::make_tuple(times, states);
      },
      py::arg("system"), py::arg("params") = ParamMap{}, py::arg("potential") = py::none(),
      py::arg("x0") = py::none(), py::arg("t0") = 0.0, py::arg("t1") = 10.0, py::arg("dt") = 1e-3,
      "Integrate a catalog system; returns (times, states) with one state per row.");

  m.def(
      "check",
      [](const std::string& system, const ParamMap& params, std::optional<std::string> potential,
         std::optional<Vector> x0, double t0, double t1, double dt) {
        const SystemDefinition sys = build(system, params, potential);
        std::string text;
        {
          py::gil_scoped_release release;
          text = to_json(check_invariants(
              sys, integrate(sys, x0.value_or(default_initial_state(sys)), t0, t1, dt)));
        }
        return json_to_python(text);
      },
      py::arg("system"), py::arg("params") = ParamMap{}, py::arg("potential") = py::none(),
      py::arg("x0") = py::none(), py::arg("t0") = 0.0, py::arg("t1") = 10.0, py::arg("dt") = 1e-3,
      "Run the invariant suite; returns the JSON report as a dict.");

  m.def(
      "compare",
      [](const std::vector<std::string>& systems, const ParamMap& params,
         std::optional<std::string> potential, std::optional<Eigen::Vector4d> configuration,
         double t0, double t1, double dt, double tol) {
        std::vector<SystemDefinition> built;
        for (const std::string& name : systems) {
          const CatalogEntry& entry = find_entry(name);
          ParamMap own;
          for (const auto& [k, v] : params) {
            if (entry.has_param(k)) own[k] = v;
          }
          built.push_back(build(name, own, entry.takes_potential ? potential : std::nullopt));
        }
        std::string text;
        {
          py::gil_scoped_release release;
          text = to_json(compare_configurations(
              built, configuration.value_or(kDefaultConfiguration), t0, t1, dt, tol));
        }
        return json_to_python(text);
      },
      py::arg("systems"), py::arg("params") = ParamMap{}, py::arg("potential") = py::none(),
      py::arg("configuration") = py::none(), py::arg("t0") = 0.0, py::arg("t1") = 10.0,
      py::arg("dt") = 1e-3, py::arg("tol") = 1e-7,
      "Pairwise configuration divergence from a shared (x, y, xdot, ydot).");

  m.def(
      "linear_stability",
      [](const std::string& system, const ParamMap& params) {
        return stability_dict(linear_stability(build(system, params, std::nullopt)));
      },
      py::arg("system"), py::arg("params") = ParamMap{});

  m.def(
      "analyze_matrix", [](const Matrix& a) { return stability_dict(analyze_matrix(a)); },
      py::arg("matrix"));

  m.def(
      "curl",
      [](const std::string& system, double x, double y, double t, const ParamMap& params,
         std::optional<std::string> potential) {
        const SystemDefinition sys = build(system, params, potential);
        if (!sys.force) throw std::invalid_argument("system '" + system + "' has no position force");
        return curl2d(*sys.force, x, y, t);
      },
      py::arg("system"), py::arg("x"), py::arg("y"), py::arg("t") = 0.0,
      py::arg("params") = ParamMap{}, py::arg("potential") = py::none());

  m.def(
      "divergence",
      [](const std::string& system, const Vector& state, double t, const ParamMap& params,
         std::optional<std::string> potential) {
        return divergence(build(system, params, potential), state, t);
      },
      py::arg("system"), py::arg("state"), py::arg("t") = 0.0, py::arg("params") = ParamMap{},
      py::arg("potential") = py::none());
}
