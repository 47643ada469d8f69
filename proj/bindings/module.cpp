#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bfl/brinkman.hpp"
#include "bfl/config.hpp"
#include "bfl/constitutive.hpp"
#include "bfl/diagnostics.hpp"
#include "bfl/envara.hpp"
#include "bfl/evolution.hpp"
#include "bfl/experiments.hpp"
#include "bfl/runner.hpp"

#include <sstream>

namespace py = pybind11;
using namespace bfl;

namespace {

Grid make_grid(const std::vector<int>& n, const std::vector<double>& L) {
    if (n.size() != L.size() || n.empty() || n.size() > 2)
        throw std::invalid_argument("grid needs matching n/L of length 1 or 2");
    return n.size() == 1 ? Grid(n[0], L[0]) : Grid(n[0], n[1], L[0], L[1]);
}

ScalarField to_field(const Grid& g, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != g.cells())
        throw std::invalid_argument("field size does not match the grid");
    ScalarField f(g);
    f.values = values;
    return f;
}

py::dict solve_brinkman_py(const std::vector<int>& n, const std::vector<double>& L,
                           const std::vector<double>& rho, const std::vector<double>& theta,
                           const ModelParams& params, double solver_tol, int max_iter) {
    Grid g = make_grid(n, L);
    brinkman::BrinkmanSystem sys;
    sys.rho = to_field(g, rho);
    sys.theta = to_field(g, theta);
    sys.params = params;
    sys.solver_tol = solver_tol;
    sys.max_iter = max_iter;
    brinkman::BrinkmanSolution sol = brinkman::solve_brinkman(sys);

    py::dict out;
    py::list comps;
    for (int c = 0; c < g.dim; ++c) comps.append(sol.u[c]);
    out["u"] = comps;
    out["iterations"] = sol.iterations;
    out["rel_residual"] = sol.rel_residual;
    out["energy_identity_residual"] = brinkman::energy_identity_residual(sol.u, sys);
    return out;
}

py::dict run_simulation_py(const std::string& config_json) {
    config::RunConfig cfg = config::parse_config(config_json);
    ScalarField rho0 = config::build_field(cfg.rho0, cfg);
    ScalarField theta0 = config::build_field(cfg.theta0, cfg);
    evolution::State init = evolution::make_initial_state(
        rho0, theta0, cfg.params, cfg.time.solver_tol, cfg.time.solver_max_iter);

    diagnostics::Accumulator acc(cfg.params);
    std::vector<double> t, mass, energy, entropy, min_theta, min_rho;
    evolution::State prev = init;
    evolution::State last = init;
    evolution::RunSinks sinks;
    sinks.on_step = [&](int step, const evolution::State& s,
                        const evolution::StepStats& stats) {
        diagnostics::DiagnosticsRecord r = step == 0
                                               ? acc.on_start(s)
                                               : acc.on_step(prev, s, stats, s.t - prev.t);
        t.push_back(r.t);
        mass.push_back(r.mass);
        energy.push_back(r.internal_energy);
        entropy.push_back(r.total_entropy);
        min_theta.push_back(r.min_theta);
        min_rho.push_back(r.min_rho);
        prev = s;
        last = s;
    };
    evolution::RunSummary sum = evolution::run(init, cfg.time, cfg.params, sinks);

    py::dict out;
    out["termination"] = evolution::to_string(sum.cause);
    out["steps"] = sum.steps;
    out["dt"] = sum.dt;
    out["t"] = t;
    out["mass"] = mass;
    out["internal_energy"] = energy;
    out["total_entropy"] = entropy;
    out["min_theta"] = min_theta;
    out["min_rho"] = min_rho;
    out["rho"] = last.rho.values;
    out["theta"] = last.theta.values;
    py::list comps;
    for (int c = 0; c < last.u.grid.dim; ++c) comps.append(last.u[c]);
    out["u"] = comps;
    return out;
}

int derive_check_py() {
    std::ostringstream sink;
    return runner::derive_check(sink, false, 0);
}

} // namespace

PYBIND11_MODULE(_bfl, m) {
    m.doc() = "Cell-centered laboratory for a non-isothermal Brinkman gas model: "
              "ideal-gas thermodynamics, quasi-static momentum balance, and the "
              "conservation/entropy diagnostics of the regularized scheme.";

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("k1", &ModelParams::k1)
        .def_readwrite("k2", &ModelParams::k2)
        .def_readwrite("mu", &ModelParams::mu)
        .def_readwrite("nu", &ModelParams::nu)
        .def_readwrite("kappa", &ModelParams::kappa)
        .def_readwrite("eps", &ModelParams::eps)
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("gamma_exp", &ModelParams::gamma_exp)
        .def_readwrite("enforce_ideal_ratio", &ModelParams::enforce_ideal_ratio)
        .def("validate", &ModelParams::validate);

    m.def("free_energy",
          [](double rho, double theta, const ModelParams& p) {
              return constitutive::free_energy({rho, theta}, p);
          },
          py::arg("rho"), py::arg("theta"), py::arg("params"));
    m.def("entropy",
          [](double rho, double theta, const ModelParams& p) {
              return constitutive::entropy({rho, theta}, p);
          },
          py::arg("rho"), py::arg("theta"), py::arg("params"));
    m.def("internal_energy",
          [](double rho, double theta, const ModelParams& p) {
              return constitutive::internal_energy({rho, theta}, p);
          },
          py::arg("rho"), py::arg("theta"), py::arg("params"));
    m.def("pressure",
          [](double rho, double theta, const ModelParams& p) {
              return constitutive::pressure({rho, theta}, p);
          },
          py::arg("rho"), py::arg("theta"), py::arg("params"));
    m.def("temperature_from_entropy", &constitutive::temperature_from_entropy,
          py::arg("rho"), py::arg("s"), py::arg("params"));
    m.def("internal_energy_from_entropy", &constitutive::internal_energy_from_entropy,
          py::arg("rho"), py::arg("s"), py::arg("params"));
    m.def("entropy_production_density", &constitutive::entropy_production_density,
          py::arg("theta"), py::arg("grad_u_sq"), py::arg("u_sq"), py::arg("rho"),
          py::arg("grad_theta_sq"), py::arg("params"));
    m.def("helmholtz_functional",
          [](double rho, double theta, double theta_bar, const ModelParams& p) {
              return constitutive::helmholtz_functional_H({rho, theta}, theta_bar, p);
          },
          py::arg("rho"), py::arg("theta"), py::arg("theta_bar"), py::arg("params"));

    m.def("specht_ratio", &diagnostics::specht_ratio, py::arg("h"));
    m.def("reverse_young_check", &diagnostics::reverse_young_check, py::arg("a"),
          py::arg("b"), py::arg("nu"));
    m.def("inverse_jensen_bound",
          [](const std::vector<double>& samples, const std::vector<double>& weights,
             double p_exp, double m_, double M, double x0) {
              auto b = diagnostics::inverse_jensen_bound(samples, weights, p_exp, m_, M, x0);
              return py::make_tuple(b.lhs, b.rhs, b.alpha, b.beta);
          },
          py::arg("samples"), py::arg("weights"), py::arg("p"), py::arg("m"), py::arg("M"),
          py::arg("x0"));

    m.def("solve_brinkman", &solve_brinkman_py, py::arg("n"), py::arg("L"), py::arg("rho"),
          py::arg("theta"), py::arg("params"), py::arg("solver_tol") = 1e-12,
          py::arg("max_iter") = 20000,
          "Solve the quasi-static momentum balance on a cell-centered grid; returns "
          "the velocity components with the solver and energy-identity residuals.");

    m.def("run_simulation", &run_simulation_py, py::arg("config_json"),
          "Run the coupled scheme from a JSON configuration string and return the "
          "per-step balance series plus the final fields.");

    m.def("simulate_to_dir",
          [](const std::string& config_json, const std::string& out_dir) {
              return runner::simulate(config::parse_config(config_json), out_dir);
          },
          py::arg("config_json"), py::arg("out_dir"),
          "CSV-emitting run, same outputs as the command-line front end; returns the "
          "exit code.");

    m.def("derive_check_passes", &derive_check_py,
          "Run the thermodynamic identity suite; 0 means every identity held.");

    m.attr("__version__") = "0.1.0";
}
