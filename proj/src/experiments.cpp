#include "bfl/experiments.hpp"

#include "bfl/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bfl {
namespace experiments {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kNan = std::numeric_limits<double>::quiet_NaN();

} // namespace

Scenario default_scenario() {
    Scenario s;
    s.params.k1 = 1.5;
    s.params.k2 = 1.0;
    s.params.mu = 1.0;
    s.params.nu = 1.0;
    s.params.kappa = 1.0;
    s.params.eps = 0.0;
    s.params.delta = 0.0;
    s.grid = Grid(128, 2 * kPi);
    s.time.t_end = 1.0;
    s.time.cfl_safety = 0.5;
    s.rho0 = [](double x, double) { return 1.0 + 0.3 * std::sin(x); };
    s.theta0 = [](double x, double) { return 1.0 + 0.2 * std::cos(x); };
    return s;
}

Scenario equilibrium_scenario() {
    Scenario s = default_scenario();
    s.rho0 = [](double, double) { return 1.0; };
    s.theta0 = [](double, double) { return 1.0; };
    return s;
}

Scenario cold_spot_scenario(double amplitude, int sharpness) {
    if (!(amplitude >= 0.0 && amplitude < 1.0))
        throw std::invalid_argument("cold_spot_scenario: amplitude must lie in [0,1)");
    if (sharpness < 1) throw std::invalid_argument("cold_spot_scenario: sharpness >= 1");
    Scenario s = default_scenario();
    const double L = s.grid.length[0];
    s.rho0 = [](double, double) { return 1.0; };
    s.theta0 = [amplitude, sharpness, L](double x, double) {
        const double crest = 0.5 * (1.0 - std::cos(2 * kPi * x / L));
        return (1.0 - amplitude) + amplitude * std::pow(crest, sharpness);
    };
    return s;
}

ScalarField sample_field(const FieldFn& f, const Grid& g) {
    ScalarField out(g);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i)
            out[g.index(i, j)] = f(g.center(0, i), g.dim == 2 ? g.center(1, j) : 0.0);
    return out;
}

ScalarField restrict_field(const ScalarField& fine, const Grid& coarse) {
    const Grid& gf = fine.grid;
    if (gf.dim != coarse.dim)
        throw std::invalid_argument("restrict_field: dimension mismatch");
    std::array<int, 2> factor = {1, 1};
    for (int a = 0; a < gf.dim; ++a) {
        if (gf.n[a] % coarse.n[a] != 0)
            throw std::invalid_argument("restrict_field: resolutions do not nest");
        factor[a] = gf.n[a] / coarse.n[a];
    }
    ScalarField out(coarse, 0.0);
    for (int j = 0; j < gf.n[1]; ++j)
        for (int i = 0; i < gf.n[0]; ++i)
            out[coarse.index(i / factor[0], j / factor[1])] += fine[gf.index(i, j)];
    const double count = static_cast<double>(factor[0]) * factor[1];
    for (auto& v : out.values) v /= count;
    return out;
}

MemberRun run_member(const Scenario& scenario) {
    MemberRun out;
    ScalarField rho0 = sample_field(scenario.rho0, scenario.grid);
    ScalarField theta0 = sample_field(scenario.theta0, scenario.grid);

    evolution::State init = evolution::make_initial_state(
        rho0, theta0, scenario.params, scenario.time.solver_tol,
        scenario.time.solver_max_iter);

    diagnostics::Accumulator acc(scenario.params);
    double mass0 = 0.0;
    double prev_entropy = 0.0;
    out.min_sigma = std::numeric_limits<double>::infinity();
    out.min_entropy_slack = std::numeric_limits<double>::infinity();
    out.min_theta_over_run = std::numeric_limits<double>::infinity();

    evolution::State last = init;
    evolution::State prev = init;
    evolution::RunSinks sinks;
    sinks.on_step = [&](int step, const evolution::State& s,
                        const evolution::StepStats& stats) {
        diagnostics::DiagnosticsRecord r;
        if (step == 0) {
            r = acc.on_start(s);
            mass0 = r.mass;
            prev_entropy = r.total_entropy;
        } else {
            r = acc.on_step(prev, s, stats, s.t - prev.t);
            out.max_mass_drift =
                std::max(out.max_mass_drift, std::abs(r.mass - mass0) / std::abs(mass0));
            out.max_energy_identity =
                std::max(out.max_energy_identity, r.brinkman_energy_residual);
            out.min_sigma = std::min(out.min_sigma, r.min_sigma);
            out.min_entropy_slack =
                std::min(out.min_entropy_slack, r.total_entropy - prev_entropy);
            prev_entropy = r.total_entropy;
        }
        out.min_theta_over_run = std::min(out.min_theta_over_run, r.min_theta);
        out.records.push_back(r);
        prev = s;
        last = s;
    };

    out.summary = evolution::run(init, scenario.time, scenario.params, sinks);
    out.final_state = last;
    return out;
}

SweepAxis axis_from_string(const std::string& name) {
    if (name == "mesh") return SweepAxis::Mesh;
    if (name == "eps") return SweepAxis::Eps;
    if (name == "delta") return SweepAxis::Delta;
    if (name == "dt") return SweepAxis::Dt;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Mesh: return "mesh";
        case SweepAxis::Eps: return "eps";
        case SweepAxis::Delta: return "delta";
        case SweepAxis::Dt: return "dt";
    }
    return "unknown";
}

namespace {

Scenario member_scenario(const SweepSpec& spec, double value) {
    Scenario s = spec.base;
    switch (spec.axis) {
        case SweepAxis::Mesh: {
            const int n = static_cast<int>(value);
            s.grid = s.grid.dim == 1 ? Grid(n, s.grid.length[0])
                                     : Grid(n, n, s.grid.length[0], s.grid.length[1]);
            break;
        }
        case SweepAxis::Eps: s.params.eps = value; break;
        case SweepAxis::Delta: s.params.delta = value; break;
        case SweepAxis::Dt: s.time.dt = value; break;
    }
    return s;
}

double field_distance(const ScalarField& coarse, const ScalarField& reference,
                      SweepNorm norm) {
    ScalarField ref_on_coarse = coarse.grid == reference.grid
                                    ? reference
                                    : restrict_field(reference, coarse.grid);
    ScalarField diff(coarse.grid);
    for (int i = 0; i < diff.size(); ++i) diff[i] = coarse[i] - ref_on_coarse[i];
    if (norm == SweepNorm::Linf) return grid_ops::max_abs(diff);
    return grid_ops::l2_norm(diff);
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, int threads) {
    if (threads < 1) throw std::invalid_argument("run_sweep: threads must be >= 1");
    if (spec.values.size() < 3)
        throw std::invalid_argument("run_sweep: need at least 3 axis values");
    for (std::size_t i = 0; i + 1 < spec.values.size(); ++i)
        if (!(spec.values[i] > spec.values[i + 1]))
            throw std::invalid_argument("run_sweep: values must be strictly decreasing");
    if (spec.axis == SweepAxis::Mesh) {
        for (double v : spec.values) {
            const int n = static_cast<int>(v);
            if (n != v || n < 4 || (n & (n - 1)) != 0)
                throw std::invalid_argument("run_sweep: mesh values must be powers of two");
        }
    }

    // run members coarsest-to-finest so the reference sits last
    std::vector<double> ordered = spec.values;
    if (spec.axis == SweepAxis::Mesh)
        std::reverse(ordered.begin(), ordered.end()); // ascending n = coarse first

    std::vector<MemberRun> runs;
    runs.reserve(ordered.size());
    if (threads > 1) {
        std::vector<std::future<MemberRun>> futures;
        futures.reserve(ordered.size());
        for (double v : ordered)
            futures.push_back(std::async(std::launch::async, [&spec, v] {
                return run_member(member_scenario(spec, v));
            }));
        for (auto& f : futures) runs.push_back(f.get());
    } else {
        for (double v : ordered) runs.push_back(run_member(member_scenario(spec, v)));
    }

    SweepResult result;
    result.axis = spec.axis;
    result.invariants_ok = true;

    const MemberRun& ref = runs.back();
    const bool ref_ok = ref.summary.cause == evolution::Termination::Completed;

    for (std::size_t i = 0; i < runs.size(); ++i) {
        const MemberRun& m = runs[i];
        SweepRow row;
        row.value = ordered[i];
        row.completed = m.summary.cause == evolution::Termination::Completed;
        row.status = evolution::to_string(m.summary.cause);
        row.mass_drift = m.max_mass_drift;
        row.max_energy_identity = m.max_energy_identity;
        row.min_entropy_slack = m.min_entropy_slack;
        row.min_sigma = m.min_sigma;
        if (!row.completed) result.invariants_ok = false;

        if (row.completed && ref_ok) {
            if (i + 1 == runs.size()) {
                row.dist_rho = row.dist_theta = row.dist_u = row.dist = 0.0;
            } else {
                row.dist_rho = field_distance(m.final_state.rho, ref.final_state.rho,
                                              spec.norm);
                row.dist_theta = field_distance(m.final_state.theta, ref.final_state.theta,
                                                spec.norm);
                double du = 0.0;
                for (int c = 0; c < m.final_state.u.grid.dim; ++c) {
                    ScalarField uc(m.final_state.u.grid);
                    uc.values = m.final_state.u[c];
                    ScalarField ur(ref.final_state.u.grid);
                    ur.values = ref.final_state.u[c];
                    const double d = field_distance(uc, ur, spec.norm);
                    du += d * d;
                }
                row.dist_u = std::sqrt(du);
                row.dist = std::sqrt(row.dist_rho * row.dist_rho +
                                     row.dist_theta * row.dist_theta +
                                     row.dist_u * row.dist_u);
            }
        } else {
            row.dist_rho = row.dist_theta = row.dist_u = row.dist = kNan;
        }
        row.observed_order = kNan;
        result.rows.push_back(row);
    }

    // observed order between successive non-reference rows
    for (std::size_t i = 0; i + 2 < result.rows.size(); ++i) {
        const SweepRow& a = result.rows[i];
        const SweepRow& b = result.rows[i + 1];
        if (a.completed && b.completed && a.dist > 0.0 && b.dist > 0.0) {
            double ratio_axis =
                spec.axis == SweepAxis::Mesh
                    ? result.rows[i + 1].value / result.rows[i].value // h ratio inverse
                    : result.rows[i].value / result.rows[i + 1].value;
            result.rows[i + 1].observed_order =
                std::log(a.dist / b.dist) / std::log(ratio_axis);
        }
    }

    result.distances_strictly_decreasing = true;
    for (std::size_t i = 0; i + 2 < result.rows.size(); ++i) {
        const SweepRow& a = result.rows[i];
        const SweepRow& b = result.rows[i + 1];
        if (!(a.completed && b.completed) || !(a.dist > b.dist))
            result.distances_strictly_decreasing = false;
    }

    return result;
}

MmsResult run_mms(const std::vector<int>& resolutions, bool diffusion_dominated,
                  double t_end, double dt_scale) {
    if (!(dt_scale > 0.0 && dt_scale <= 1.0))
        throw std::invalid_argument("run_mms: dt_scale must lie in (0, 1]");
    if (resolutions.empty())
        throw std::invalid_argument("run_mms: need at least one resolution");

    const double L = 2 * kPi;
    const double r0 = 1.5, r1 = 0.4;
    const double t0 = 1.2, t1 = 0.3;
    const double A = diffusion_dominated ? 0.05 : 0.8;

    ModelParams p;
    p.k1 = 1.0;
    p.k2 = 1.0;
    p.mu = 1.0;
    p.nu = 1.0;
    p.kappa = diffusion_dominated ? 1.0 : 0.05;
    p.eps = 0.0;
    p.delta = 0.0;

    const double c = 2 * kPi / L;
    const double q = kPi / L;
    auto rho = [&](double x) { return r0 + r1 * std::cos(c * x); };
    auto drho = [&](double x) { return -r1 * c * std::sin(c * x); };
    auto d2rho = [&](double x) { return -r1 * c * c * std::cos(c * x); };
    auto th = [&](double x) { return t0 + t1 * std::cos(c * x); };
    auto dth = [&](double x) { return -t1 * c * std::sin(c * x); };
    auto d2th = [&](double x) { return -t1 * c * c * std::cos(c * x); };
    auto uu = [&](double x) { return A * std::sin(q * x); };
    auto du = [&](double x) { return A * q * std::cos(q * x); };
    auto d2u = [&](double x) { return -A * q * q * std::sin(q * x); };

    MmsResult result;
    result.all_completed = true;

    for (int n : resolutions) {
        Grid g(n, L);
        evolution::StepForcing forcing;
        forcing.rho = ScalarField(g);
        forcing.energy = ScalarField(g);
        forcing.momentum = VectorField(g);
        ScalarField rho_star(g), theta_star(g);
        VectorField u_star(g);
        for (int i = 0; i < n; ++i) {
            const double x = g.center(0, i);
            rho_star[i] = rho(x);
            theta_star[i] = th(x);
            u_star[0][i] = uu(x);
            (*forcing.rho)[i] = drho(x) * uu(x) + rho(x) * du(x) - p.eps * d2rho(x);
            (*forcing.momentum)[0][i] =
                p.nu * rho(x) * uu(x) - p.mu * d2u(x) +
                p.k2 * (drho(x) * th(x) + rho(x) * dth(x));
            const double e_adv = p.k1 * (drho(x) * th(x) * uu(x) + rho(x) * dth(x) * uu(x) +
                                         rho(x) * th(x) * du(x));
            (*forcing.energy)[i] = e_adv - p.kappa * d2th(x) - p.mu * du(x) * du(x) -
                                   p.nu * rho(x) * uu(x) * uu(x) +
                                   p.k2 * rho(x) * th(x) * du(x);
        }

        evolution::TimeStepConfig cfg;
        cfg.t_end = t_end;
        cfg.cfl_safety = 0.4;
        // the velocity cap also keeps dt below the quasi-static coupling's
        // stable range in the diffusion-dominated configuration
        cfg.dt = dt_scale * 0.4 * g.h(0) / std::max(2.0 * A, 0.6);

        evolution::State init = evolution::make_initial_state(rho_star, theta_star, p,
                                                              cfg.solver_tol,
                                                              cfg.solver_max_iter, &forcing);
        evolution::RunSinks sinks;
        evolution::State last = init;
        sinks.on_step = [&](int, const evolution::State& s, const evolution::StepStats&) {
            last = s;
        };
        evolution::RunSummary sum = evolution::run(init, cfg, p, sinks, &forcing);

        MmsRow row;
        row.n = n;
        row.completed = sum.cause == evolution::Termination::Completed;
        if (!row.completed) result.all_completed = false;
        if (row.completed) {
            ScalarField dr(g), dthf(g), duf(g);
            for (int i = 0; i < n; ++i) {
                dr[i] = last.rho[i] - rho_star[i];
                dthf[i] = last.theta[i] - theta_star[i];
                duf[i] = last.u[0][i] - u_star[0][i];
            }
            row.err_rho = grid_ops::l2_norm(dr);
            row.err_theta = grid_ops::l2_norm(dthf);
            row.err_u = grid_ops::l2_norm(duf);
        }
        result.rows.push_back(row);
    }

    for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
        MmsRow& a = result.rows[i];
        MmsRow& b = result.rows[i + 1];
        const double ratio = static_cast<double>(b.n) / a.n;
        auto order = [&](double ea, double eb) {
            return (ea > 0 && eb > 0) ? std::log(ea / eb) / std::log(ratio) : kNan;
        };
        b.order_rho = order(a.err_rho, b.err_rho);
        b.order_theta = order(a.err_theta, b.err_theta);
        b.order_u = order(a.err_u, b.err_u);
    }
    if (!result.rows.empty()) {
        result.rows.front().order_rho = kNan;
        result.rows.front().order_theta = kNan;
        result.rows.front().order_u = kNan;
    }
    return result;
}

std::vector<ExistenceRow> local_existence_probe(const std::vector<double>& amplitudes,
                                                double delta, double t_end) {
    std::vector<ExistenceRow> rows;
    for (double a : amplitudes) {
        // hot-crest family on a unit background: the local gas stiffness
        // k2*theta grows with the amplitude, so the fixed step size crosses
        // the stability edge once the crest is tall enough
        Scenario s = default_scenario();
        const double L = s.grid.length[0];
        s.rho0 = [](double, double) { return 1.0; };
        s.theta0 = [a, L](double x, double) {
            const double crest = 0.5 * (1.0 - std::cos(2 * kPi * x / L));
            return 1.0 + a * std::pow(crest, 8);
        };
        s.params.k1 = 1.0;
        s.params.k2 = 6.0;
        s.params.mu = 0.02;
        s.params.nu = 0.1;
        s.params.kappa = 1e-3;
        s.params.delta = delta;
        s.time.cfl_safety = 1.0;
        s.time.t_end = t_end;
        s.time.dt = 3e-4;

        MemberRun m = run_member(s);
        ExistenceRow row;
        row.amplitude = a;
        row.cause = evolution::to_string(m.summary.cause);
        row.t_reached = m.summary.t_final;
        row.min_theta = m.min_theta_over_run;
        rows.push_back(row);
    }
    return rows;
}

} // namespace experiments
} // namespace bfl
