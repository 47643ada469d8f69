#include "bfl/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bfl {
namespace config {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

struct Collector {
    std::vector<std::string> errors;
    void add(const std::string& path, const std::string& msg) {
        errors.push_back(path + ": " + msg);
    }
};

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& path, Collector& errs) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) errs.add(path + "." + it.key(), "unknown key");
}

double get_number(const json& obj, const char* key, double fallback, const std::string& path,
                  Collector& errs) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        errs.add(path + "." + key, "expected a number");
        return fallback;
    }
    return obj[key].get<double>();
}

int get_int(const json& obj, const char* key, int fallback, const std::string& path,
            Collector& errs) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) {
        errs.add(path + "." + key, "expected an integer");
        return fallback;
    }
    return obj[key].get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& path,
              Collector& errs) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) {
        errs.add(path + "." + key, "expected a boolean");
        return fallback;
    }
    return obj[key].get<bool>();
}

std::vector<double> get_array(const json& obj, const char* key, const std::string& path,
                              Collector& errs) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    if (!obj[key].is_array()) {
        errs.add(path + "." + key, "expected an array of numbers");
        return out;
    }
    for (const auto& v : obj[key]) {
        if (!v.is_number()) {
            errs.add(path + "." + key, "expected an array of numbers");
            return {};
        }
        out.push_back(v.get<double>());
    }
    return out;
}

FourierField parse_fourier(const json& obj, const std::string& path, Collector& errs) {
    FourierField f;
    reject_unknown(obj, {"offset", "sin", "cos", "sin_y", "cos_y"}, path, errs);
    f.offset = get_number(obj, "offset", 1.0, path, errs);
    f.sin_x = get_array(obj, "sin", path, errs);
    f.cos_x = get_array(obj, "cos", path, errs);
    f.sin_y = get_array(obj, "sin_y", path, errs);
    f.cos_y = get_array(obj, "cos_y", path, errs);
    return f;
}

FourierField preset_constant(double value) {
    FourierField f;
    f.offset = value;
    return f;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&errs] {
          std::string all = "invalid configuration:";
          for (const auto& e : errs) all += "\n  - " + e;
          return all;
      }()),
      errors(std::move(errs)) {}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("syntax error: ") + e.what()});
    }

    Collector errs;
    RunConfig cfg;

    if (!doc.is_object()) {
        throw ConfigError({"top level: expected an object"});
    }
    reject_unknown(doc, {"params", "grid", "time", "initial", "output", "solver", "seed"},
                   "$", errs);

    if (doc.contains("params")) {
        const json& p = doc["params"];
        reject_unknown(p,
                       {"k1", "k2", "mu", "nu", "kappa", "eps", "delta", "gamma_exp",
                        "enforce_ideal_ratio"},
                       "params", errs);
        cfg.params.k1 = get_number(p, "k1", cfg.params.k1, "params", errs);
        cfg.params.k2 = get_number(p, "k2", cfg.params.k2, "params", errs);
        cfg.params.mu = get_number(p, "mu", cfg.params.mu, "params", errs);
        cfg.params.nu = get_number(p, "nu", cfg.params.nu, "params", errs);
        cfg.params.kappa = get_number(p, "kappa", cfg.params.kappa, "params", errs);
        cfg.params.eps = get_number(p, "eps", cfg.params.eps, "params", errs);
        cfg.params.delta = get_number(p, "delta", cfg.params.delta, "params", errs);
        cfg.params.gamma_exp = get_number(p, "gamma_exp", cfg.params.gamma_exp, "params", errs);
        cfg.params.enforce_ideal_ratio =
            get_bool(p, "enforce_ideal_ratio", cfg.params.enforce_ideal_ratio, "params", errs);
    }
    for (const auto& msg : cfg.params.validation_errors()) errs.add("params", msg);

    if (doc.contains("grid")) {
        const json& gj = doc["grid"];
        reject_unknown(gj, {"dim", "n", "L"}, "grid", errs);
        cfg.dim = get_int(gj, "dim", 1, "grid", errs);
        if (cfg.dim != 1 && cfg.dim != 2) {
            errs.add("grid.dim", "must be 1 or 2");
            cfg.dim = 1;
        }
        std::vector<double> nvals = get_array(gj, "n", "grid", errs);
        std::vector<double> lvals = get_array(gj, "L", "grid", errs);
        if (!nvals.empty()) {
            if (static_cast<int>(nvals.size()) != cfg.dim)
                errs.add("grid.n", "needs one entry per dimension");
            for (std::size_t a = 0; a < nvals.size() && a < 2; ++a) {
                if (nvals[a] != std::floor(nvals[a]) || nvals[a] < 4)
                    errs.add("grid.n", "cells per axis must be integers >= 4");
                else
                    cfg.n[a] = static_cast<int>(nvals[a]);
            }
        }
        if (!lvals.empty()) {
            if (static_cast<int>(lvals.size()) != cfg.dim)
                errs.add("grid.L", "needs one entry per dimension");
            for (std::size_t a = 0; a < lvals.size() && a < 2; ++a) {
                if (!(lvals[a] > 0.0))
                    errs.add("grid.L", "domain lengths must be positive");
                else
                    cfg.length[a] = lvals[a];
            }
        }
    }

    if (doc.contains("time")) {
        const json& t = doc["time"];
        reject_unknown(
            t, {"dt", "t_end", "cfl_safety", "picard_tol", "picard_max", "theta_floor"},
            "time", errs);
        cfg.time.dt = get_number(t, "dt", cfg.time.dt, "time", errs);
        cfg.time.t_end = get_number(t, "t_end", cfg.time.t_end, "time", errs);
        cfg.time.cfl_safety = get_number(t, "cfl_safety", cfg.time.cfl_safety, "time", errs);
        cfg.time.picard_tol = get_number(t, "picard_tol", cfg.time.picard_tol, "time", errs);
        cfg.time.picard_max = get_int(t, "picard_max", cfg.time.picard_max, "time", errs);
        cfg.time.theta_floor =
            get_number(t, "theta_floor", cfg.time.theta_floor, "time", errs);
        if (!(cfg.time.t_end > 0.0)) errs.add("time.t_end", "must be positive");
        if (!(cfg.time.cfl_safety > 0.0 && cfg.time.cfl_safety <= 1.0))
            errs.add("time.cfl_safety", "must lie in (0, 1]");
        if (!(cfg.time.picard_tol > 0.0)) errs.add("time.picard_tol", "must be positive");
        if (cfg.time.picard_max < 1) errs.add("time.picard_max", "must be >= 1");
        if (!(cfg.time.theta_floor > 0.0)) errs.add("time.theta_floor", "must be positive");
    }

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        reject_unknown(s, {"solver_tol", "max_iter"}, "solver", errs);
        cfg.time.solver_tol = get_number(s, "solver_tol", cfg.time.solver_tol, "solver", errs);
        cfg.time.solver_max_iter =
            get_int(s, "max_iter", cfg.time.solver_max_iter, "solver", errs);
        if (!(cfg.time.solver_tol > 0.0 && cfg.time.solver_tol <= 1e-6))
            errs.add("solver.solver_tol", "must lie in (0, 1e-6]");
        if (cfg.time.solver_max_iter < 1) errs.add("solver.max_iter", "must be >= 1");
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        reject_unknown(o, {"snapshot_cadence", "dir"}, "output", errs);
        cfg.snapshot_cadence =
            get_int(o, "snapshot_cadence", cfg.snapshot_cadence, "output", errs);
        if (cfg.snapshot_cadence < 0) errs.add("output.snapshot_cadence", "must be >= 0");
        if (o.contains("dir")) {
            if (!o["dir"].is_string())
                errs.add("output.dir", "expected a string");
            else
                cfg.output_dir = o["dir"].get<std::string>();
        }
    }

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            errs.add("seed", "expected a nonnegative integer");
        else
            cfg.seed = doc["seed"].get<std::uint64_t>();
    }

    // initial data: preset or inline Fourier coefficients
    cfg.rho0 = preset_constant(1.0);
    cfg.theta0 = preset_constant(1.0);
    bool have_initial = false;
    if (doc.contains("initial")) {
        const json& ini = doc["initial"];
        reject_unknown(ini, {"preset", "amplitude", "rho", "theta"}, "initial", errs);
        if (ini.contains("preset")) {
            if (ini.contains("rho") || ini.contains("theta"))
                errs.add("initial", "give either a preset or inline fields, not both");
            const std::string preset =
                ini["preset"].is_string() ? ini["preset"].get<std::string>() : "";
            if (preset == "equilibrium") {
                have_initial = true;
            } else if (preset == "default") {
                cfg.rho0.sin_x = {0.3};
                cfg.theta0.cos_x = {0.2};
                have_initial = true;
            } else if (preset == "cold-spot") {
                const double a = get_number(ini, "amplitude", 0.9, "initial", errs);
                if (!(a >= 0.0 && a < 1.0))
                    errs.add("initial.amplitude", "must lie in [0, 1)");
                // (1-a) + a*(1-cos(2 pi x / L))/2
                cfg.theta0.offset = 1.0 - 0.5 * a;
                cfg.theta0.cos_x = {-0.5 * a};
                have_initial = true;
            } else {
                errs.add("initial.preset",
                         "unknown preset '" + preset +
                             "' (equilibrium | default | cold-spot)");
            }
        } else {
            if (ini.contains("rho")) cfg.rho0 = parse_fourier(ini["rho"], "initial.rho", errs);
            if (ini.contains("theta"))
                cfg.theta0 = parse_fourier(ini["theta"], "initial.theta", errs);
            have_initial = ini.contains("rho") || ini.contains("theta");
        }
        if (ini.contains("amplitude") && (!ini.contains("preset") ||
                                          ini["preset"] != json("cold-spot")))
            errs.add("initial.amplitude", "only meaningful with the cold-spot preset");
    }
    (void)have_initial;

    if (cfg.dim == 1 &&
        (!cfg.rho0.sin_y.empty() || !cfg.rho0.cos_y.empty() || !cfg.theta0.sin_y.empty() ||
         !cfg.theta0.cos_y.empty()))
        errs.add("initial", "y-coefficients require grid.dim = 2");

    // positivity of the initial data, sampled at 8x resolution
    if (errs.errors.empty()) {
        auto check_positive = [&](const FourierField& f, const char* name) {
            experiments::FieldFn eval = field_evaluator(f, cfg);
            const int nx = 8 * cfg.n[0];
            const int ny = cfg.dim == 2 ? 8 * cfg.n[1] : 1;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const double x = (i + 0.5) * cfg.length[0] / nx;
                    const double y = cfg.dim == 2 ? (j + 0.5) * cfg.length[1] / ny : 0.0;
                    if (!(eval(x, y) > 0.0)) {
                        std::ostringstream os;
                        os << "initial " << name << " not positive near x=" << x;
                        if (cfg.dim == 2) os << ", y=" << y;
                        errs.add("initial", os.str());
                        return;
                    }
                }
        };
        check_positive(cfg.rho0, "rho");
        check_positive(cfg.theta0, "theta");
    }

    if (!errs.errors.empty()) throw ConfigError(std::move(errs.errors));
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

experiments::FieldFn field_evaluator(const FourierField& f, const RunConfig& cfg) {
    const double Lx = cfg.length[0];
    const double Ly = cfg.length[1];
    FourierField ff = f;
    return [ff, Lx, Ly](double x, double y) {
        double v = ff.offset;
        for (std::size_t k = 0; k < ff.sin_x.size(); ++k)
            v += ff.sin_x[k] * std::sin(2 * kPi * (k + 1) * x / Lx);
        for (std::size_t k = 0; k < ff.cos_x.size(); ++k)
            v += ff.cos_x[k] * std::cos(2 * kPi * (k + 1) * x / Lx);
        for (std::size_t k = 0; k < ff.sin_y.size(); ++k)
            v += ff.sin_y[k] * std::sin(2 * kPi * (k + 1) * y / Ly);
        for (std::size_t k = 0; k < ff.cos_y.size(); ++k)
            v += ff.cos_y[k] * std::cos(2 * kPi * (k + 1) * y / Ly);
        return v;
    };
}

ScalarField build_field(const FourierField& f, const RunConfig& cfg) {
    return experiments::sample_field(field_evaluator(f, cfg), cfg.grid());
}

experiments::Scenario to_scenario(const RunConfig& cfg) {
    experiments::Scenario s;
    s.params = cfg.params;
    s.grid = cfg.grid();
    s.time = cfg.time;
    s.rho0 = field_evaluator(cfg.rho0, cfg);
    s.theta0 = field_evaluator(cfg.theta0, cfg);
    return s;
}

} // namespace config
} // namespace bfl
