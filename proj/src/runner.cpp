#include "bfl/runner.hpp"

#include "bfl/constitutive.hpp"
#include "bfl/csv.hpp"
#include "bfl/diagnostics.hpp"
#include "bfl/envara.hpp"
#include "bfl/grid_ops.hpp"

#include <cmath>
#include <filesystem>
#include <future>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace bfl {
namespace runner {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kDiagnosticsColumns = {
    "step", "t", "mass", "internal_energy", "total_entropy", "cum_entropy_production",
    "min_rho", "max_rho", "min_theta", "max_theta", "min_sigma",
    "brinkman_energy_residual", "brinkman_rel_residual", "energy_balance_residual",
    "energy_bookkeeping_residual", "entropy_eq_residual", "dissipation_slack",
    "superlevel_fraction", "picard_iters", "picard_warning", "cfl_number",
    "cum_delta_heat", "cum_delta_cool", "cum_delta_d3", "cum_delta_d4", "cum_production",
    "cum_eps_grad_rho", "cum_eps_delta_chain", "cum_eps_delta_power", "cum_src_eps_delta",
    "cum_eps_cross", "eps_form_gap"};

std::vector<std::string> diagnostics_row(const diagnostics::DiagnosticsRecord& r) {
    using csv::format;
    return {format(r.step),
            format(r.t),
            format(r.mass),
            format(r.internal_energy),
            format(r.total_entropy),
            format(r.cum_entropy_production),
            format(r.min_rho),
            format(r.max_rho),
            format(r.min_theta),
            format(r.max_theta),
            format(r.min_sigma),
            format(r.brinkman_energy_residual),
            format(r.brinkman_rel_residual),
            format(r.energy_balance_residual),
            format(r.energy_bookkeeping_residual),
            format(r.entropy_eq_residual),
            format(r.dissipation_slack),
            format(r.superlevel_fraction),
            format(r.picard_iters),
            format(r.picard_warning),
            format(r.cfl_number),
            format(r.cum_delta_heat),
            format(r.cum_delta_cool),
            format(r.cum_delta_d3),
            format(r.cum_delta_d4),
            format(r.cum_production),
            format(r.cum_eps_grad_rho),
            format(r.cum_eps_delta_chain),
            format(r.cum_eps_delta_power),
            format(r.cum_src_eps_delta),
            format(r.cum_eps_cross),
            format(r.eps_form_gap)};
}

void write_snapshot(const std::string& path, const evolution::State& s) {
    csv::Writer w(path);
    const Grid& g = s.rho.grid;
    if (g.dim == 1) {
        w.header({"x", "rho", "theta", "u_x"});
        for (int i = 0; i < g.n[0]; ++i)
            w.row_strings({csv::format(g.center(0, i)), csv::format(s.rho[i]),
                           csv::format(s.theta[i]), csv::format(s.u[0][i])});
    } else {
        w.header({"x", "y", "rho", "theta", "u_x", "u_y"});
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const int idx = g.index(i, j);
                w.row_strings({csv::format(g.center(0, i)), csv::format(g.center(1, j)),
                               csv::format(s.rho[idx]), csv::format(s.theta[idx]),
                               csv::format(s.u[0][idx]), csv::format(s.u[1][idx])});
            }
    }
}

int exit_code_for(evolution::Termination cause) {
    switch (cause) {
        case evolution::Termination::Completed: return kExitOk;
        case evolution::Termination::PositivityAbort: return kExitPositivityAbort;
        case evolution::Termination::SolverFailure:
        case evolution::Termination::CflViolation: return kExitSolverFailure;
    }
    return kExitCheckFailure;
}

} // namespace

int simulate(const config::RunConfig& cfg, const std::string& out_dir) {
    try {
        fs::create_directories(out_dir);

        ScalarField rho0 = config::build_field(cfg.rho0, cfg);
        ScalarField theta0 = config::build_field(cfg.theta0, cfg);

        evolution::State init;
        try {
            init = evolution::make_initial_state(rho0, theta0, cfg.params,
                                                 cfg.time.solver_tol,
                                                 cfg.time.solver_max_iter);
        } catch (const evolution::PositivityLoss& e) {
            std::cerr << "simulate: " << e.what() << "\n";
            return kExitPositivityAbort;
        }

        csv::Writer diag(out_dir + "/diagnostics.csv");
        diag.header(kDiagnosticsColumns);

        diagnostics::Accumulator acc(cfg.params);
        diagnostics::DiagnosticsRecord final_record;
        double max_energy_identity = 0.0;
        int abort_step = -1;

        evolution::State prev = init;
        evolution::RunSinks sinks;
        int last_snap_step = -1;
        sinks.on_step = [&](int step, const evolution::State& s,
                            const evolution::StepStats& stats) {
            diagnostics::DiagnosticsRecord r;
            if (step == 0)
                r = acc.on_start(s);
            else
                r = acc.on_step(prev, s, stats, s.t - prev.t);
            diag.row_strings(diagnostics_row(r));
            max_energy_identity = std::max(max_energy_identity, r.brinkman_energy_residual);
            final_record = r;
            prev = s;
            if (cfg.snapshot_cadence > 0 && step % cfg.snapshot_cadence == 0) {
                write_snapshot(out_dir + "/snap_" + std::to_string(step) + ".csv", s);
                last_snap_step = step;
            }
        };

        evolution::RunSummary sum = evolution::run(init, cfg.time, cfg.params, sinks);
        if (sum.cause != evolution::Termination::Completed) abort_step = sum.steps + 1;

        if (last_snap_step != sum.steps)
            write_snapshot(out_dir + "/snap_" + std::to_string(sum.steps) + ".csv", prev);

        const int code = exit_code_for(sum.cause);
        {
            csv::Writer w(out_dir + "/summary.csv");
            w.header({"format_version", "termination", "exit_code", "steps", "t_final", "dt",
                      "seed", "abort_step", "detail", "mass", "internal_energy",
                      "total_entropy", "min_rho", "min_theta", "max_energy_identity",
                      "theta_lower"});
            w.row_strings({csv::format(1), evolution::to_string(sum.cause),
                           csv::format(code), csv::format(sum.steps),
                           csv::format(sum.t_final), csv::format(sum.dt),
                           csv::format(cfg.seed), csv::format(abort_step), sum.detail,
                           csv::format(final_record.mass),
                           csv::format(final_record.internal_energy),
                           csv::format(final_record.total_entropy),
                           csv::format(final_record.min_rho),
                           csv::format(final_record.min_theta),
                           csv::format(max_energy_identity),
                           csv::format(acc.theta_lower())});
        }
        return code;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "simulate: I/O error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "simulate: I/O error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const SolverFailure& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitSolverFailure;
    }
}

// ---------------------------------------------------------------------------
// derive-check
// ---------------------------------------------------------------------------

namespace {

struct CheckRow {
    std::string model;
    std::string identity;
    double residual;
    double threshold;
    bool pass;
};

void print_table(std::ostream& out, const std::vector<CheckRow>& rows) {
    out << std::left << std::setw(26) << "model" << std::setw(40) << "identity"
        << std::setw(14) << "max_residual" << std::setw(14) << "threshold"
        << "status\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(26) << r.model << std::setw(40) << r.identity
            << std::setw(14) << std::scientific << std::setprecision(3) << r.residual
            << std::setw(14) << r.threshold << (r.pass ? "pass" : "FAIL") << "\n";
    }
    out.unsetf(std::ios::scientific);
}

} // namespace

int derive_check(std::ostream& out, bool corrupt, std::uint64_t seed) {
    using namespace envara;
    std::vector<CheckRow> rows;
    auto check = [&](const std::string& model, const std::string& identity, double residual,
                     double threshold) {
        rows.push_back({model, identity, residual, threshold, residual <= threshold});
    };

    ModelParams ideal;
    ideal.k1 = 1.5;
    ideal.k2 = 1.0;
    ideal.enforce_ideal_ratio = true;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> span(0.05, 20.0);

    // closed-form identities on random points
    {
        double worst_e = 0.0, worst_p = 0.0, worst_ratio = 0.0, worst_round = 0.0;
        for (int i = 0; i < 10000; ++i) {
            LocalThermoPoint pt{span(rng), span(rng)};
            const double psi = constitutive::free_energy(pt, ideal);
            const double s = constitutive::entropy(pt, ideal);
            const double e = constitutive::internal_energy(pt, ideal);
            const double pr = constitutive::pressure(pt, ideal);
            const double psi_r = constitutive::free_energy_rho(pt, ideal);
            worst_e = std::max(worst_e, std::abs(e - (psi + s * pt.theta)) / std::abs(e));
            worst_p = std::max(worst_p,
                               std::abs(pr - (pt.rho * psi_r - psi)) / std::abs(pr));
            worst_ratio = std::max(worst_ratio, std::abs(e - 1.5 * pr) / std::abs(e));
            const double theta_back =
                constitutive::temperature_from_entropy(pt.rho, s, ideal);
            worst_round =
                std::max(worst_round, std::abs(theta_back - pt.theta) / pt.theta);
        }
        check("ideal-gas", "e = psi + s*theta", worst_e, 1e-12);
        check("ideal-gas", "p = rho*psi_rho - psi", worst_p, 1e-12);
        check("ideal-gas", "e = (3/2) p", worst_ratio, 1e-12);
        check("ideal-gas", "theta(rho, s(rho,theta)) = theta", worst_round, 1e-10);
    }

    // derivation engine against the closed forms (analytic and fd routes)
    {
        FreeEnergyModel model = ideal_gas_model(ideal);
        if (corrupt) {
            // negative control: a pressure-law bug the suite must catch
            auto psi = model.psi;
            model.psi = [psi](double r, double t) { return psi(r, t) + 0.05 * r * t * t; };
            model.name = "ideal-gas(corrupted)";
        }
        FreeEnergyModel fd_model = model;
        fd_model.psi_rho.reset();
        fd_model.psi_theta.reset();

        DerivedLaws analytic = derive_laws(model, 1e-4);
        DerivedLaws fd = derive_laws(fd_model, 1e-4);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const double rho = std::pow(10.0, -1.0 + 2.0 * i / 9.0);
                const double theta = std::pow(10.0, -1.0 + 2.0 * j / 9.0);
                const LocalThermoPoint pt{rho, theta};
                const double scale = 1.0 + std::abs(constitutive::entropy(pt, ideal));
                worst = std::max(worst, std::abs(fd.s(rho, theta) -
                                                 constitutive::entropy(pt, ideal)) /
                                            scale);
                worst = std::max(
                    worst, std::abs(fd.e(rho, theta) -
                                    constitutive::internal_energy(pt, ideal)) /
                               (1.0 + constitutive::internal_energy(pt, ideal)));
                worst = std::max(worst,
                                 std::abs(fd.p(rho, theta) -
                                          constitutive::pressure(pt, ideal)) /
                                     (1.0 + constitutive::pressure(pt, ideal)));
            }
        check(model.name, "fd derivation matches closed forms", worst, 1e-7);

        // Gibbs relation in specific variables, with h-refinement ratio
        const GibbsResidual g1 = gibbs_residual(analytic, 1.3, 0.7, 1e-2);
        const GibbsResidual g2 = gibbs_residual(analytic, 1.3, 0.7, 5e-3);
        const double gibbs_worst = std::max(g2.r_theta, g2.r_rho);
        check(model.name, "Gibbs relation residual (h=5e-3)", gibbs_worst, 1e-4);
        const double ratio_t = g1.r_theta / std::max(g2.r_theta, 1e-300);
        const double ratio_r = g1.r_rho / std::max(g2.r_rho, 1e-300);
        // quadratic decay shows up as a ratio of ~4 per halving
        const bool decays = (ratio_t >= 3.5 || g2.r_theta < 1e-11) &&
                            (ratio_r >= 3.5 || g2.r_rho < 1e-11);
        rows.push_back({model.name, "Gibbs residual O(h^2) decay",
                        std::min(ratio_t, ratio_r), 0.0, decays});

        // pressure-gradient identity along sinusoidal profiles
        auto profiles = [&](int n) {
            std::vector<double> r(n), t(n);
            for (int i = 0; i < n; ++i) {
                const double x = 2 * 3.14159265358979323846 * i / (n - 1);
                r[i] = 1.0 + 0.3 * std::sin(x);
                t[i] = 1.0 + 0.2 * std::cos(x);
            }
            return std::make_pair(r, t);
        };
        auto [r64, t64] = profiles(65);
        auto [r128, t128] = profiles(129);
        const double dx64 = 2 * 3.14159265358979323846 / 64;
        const double l064 = lemma0_residual(analytic, r64, t64, dx64);
        const double l0128 = lemma0_residual(analytic, r128, t128, dx64 / 2);
        rows.push_back({model.name, "pressure-gradient identity O(h^2) decay",
                        l064 / std::max(l0128, 1e-300), 0.0,
                        l064 / std::max(l0128, 1e-300) >= 3.5 || l0128 < 1e-11});

        // (rho,s) identities through numeric inversion
        const LemmaCheck lc = lemma12_check(analytic, 1.0, ideal.k1, 1e-4);
        check(model.name, "e1_s = theta and e1_rho = psi_rho", std::max(lc.r1, lc.r2),
              1e-6);
    }

    // synthetic models
    {
        FreeEnergyModel zero;
        zero.name = "psi = 0";
        zero.psi = [](double, double) { return 0.0; };
        DerivedLaws lz = derive_laws(zero, 1e-4);
        double worst = 0.0;
        for (double rho : {0.3, 1.0, 4.0})
            for (double theta : {0.5, 1.0, 2.0}) {
                worst = std::max(worst, std::abs(lz.s(rho, theta)));
                worst = std::max(worst, std::abs(lz.e(rho, theta)));
                worst = std::max(worst, std::abs(lz.p(rho, theta)));
            }
        check(zero.name, "s = e = p = 0", worst, 1e-10);

        FreeEnergyModel linear;
        linear.name = "psi = rho*theta";
        linear.psi = [](double r, double t) { return r * t; };
        DerivedLaws ll = derive_laws(linear, 1e-4);
        double worstl = 0.0;
        for (double rho : {0.3, 1.0, 4.0})
            for (double theta : {0.5, 1.0, 2.0}) {
                worstl = std::max(worstl, std::abs(ll.s(rho, theta) + rho));
                worstl = std::max(worstl, std::abs(ll.e(rho, theta)));
                worstl = std::max(worstl, std::abs(ll.p(rho, theta)));
            }
        check(linear.name, "s = -rho, e = 0, p = 0", worstl, 1e-8);

        FreeEnergyModel quad;
        quad.name = "psi = ideal + rho^2";
        quad.psi = [ideal](double r, double t) {
            return constitutive::free_energy({r, t}, ideal) + r * r;
        };
        DerivedLaws lq = derive_laws(quad, 1e-4);
        const GibbsResidual q1 = gibbs_residual(lq, 1.1, 0.9, 1e-2);
        const GibbsResidual q2 = gibbs_residual(lq, 1.1, 0.9, 5e-3);
        const double rt = q1.r_theta / std::max(q2.r_theta, 1e-300);
        const double rr = q1.r_rho / std::max(q2.r_rho, 1e-300);
        rows.push_back({quad.name, "Gibbs holds for any psi (O(h^2))", std::min(rt, rr),
                        0.0,
                        (rt >= 3.5 || q2.r_theta < 1e-11) && (rr >= 3.5 || q2.r_rho < 1e-11)});
    }

    print_table(out, rows);
    bool all = true;
    for (const auto& r : rows) all = all && r.pass;
    out << (all ? "derive-check: all identities hold\n"
                : "derive-check: FAILURES detected\n");
    return all ? kExitOk : kExitCheckFailure;
}

// ---------------------------------------------------------------------------
// sweep / mms
// ---------------------------------------------------------------------------

int sweep(const config::RunConfig& base, const std::string& axis,
          const std::vector<double>& values, const std::string& out_dir,
          const std::string& stamp, int threads) {
    experiments::SweepSpec spec;
    try {
        spec.axis = experiments::axis_from_string(axis);
    } catch (const std::invalid_argument& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitUsage;
    }
    if (values.size() < 3) {
        std::cerr << "sweep: need at least 3 axis values\n";
        return kExitUsage;
    }
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        if (!(values[i] > values[i + 1])) {
            std::cerr << "sweep: axis values must be strictly descending\n";
            return kExitUsage;
        }
    spec.values = values;
    spec.base = config::to_scenario(base);

    experiments::SweepResult result;
    try {
        result = experiments::run_sweep(spec, threads);
    } catch (const std::invalid_argument& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        csv::Writer w(out_dir + "/" + axis + "_" + stamp + ".csv");
        w.header({"value", "status", "dist_rho", "dist_theta", "dist_u", "dist",
                  "observed_order", "mass_drift", "max_energy_identity",
                  "min_entropy_slack", "min_sigma"});
        for (const auto& r : result.rows)
            w.row_strings({csv::format(r.value), r.status, csv::format(r.dist_rho),
                           csv::format(r.dist_theta), csv::format(r.dist_u),
                           csv::format(r.dist), csv::format(r.observed_order),
                           csv::format(r.mass_drift), csv::format(r.max_energy_identity),
                           csv::format(r.min_entropy_slack), csv::format(r.min_sigma)});

        csv::Writer s(out_dir + "/sweep_summary_" + stamp + ".csv");
        s.header({"format_version", "axis", "members", "invariants_ok",
                  "distances_strictly_decreasing"});
        s.row_strings({csv::format(1), axis, csv::format(static_cast<int>(result.rows.size())),
                       csv::format(result.invariants_ok),
                       csv::format(result.distances_strictly_decreasing)});
    } catch (const std::ios_base::failure& e) {
        std::cerr << "sweep: I/O error: " << e.what() << "\n";
        return kExitIoError;
    }

    // member invariants gate the exit code
    bool ok = result.invariants_ok;
    const bool inviscid = base.params.eps == 0.0 && base.params.delta == 0.0;
    for (const auto& r : result.rows) {
        if (!r.completed) ok = false;
        if (r.mass_drift > 1e-12) ok = false;
        if (r.max_energy_identity > std::max(10 * base.time.solver_tol, 1e-10)) ok = false;
        if (!(r.min_sigma >= 0.0)) ok = false;
        if (inviscid && spec.axis != experiments::SweepAxis::Delta &&
            spec.axis != experiments::SweepAxis::Eps && r.min_entropy_slack < -1e-8)
            ok = false;
    }
    return ok ? kExitOk : kExitCheckFailure;
}

int mms(const std::vector<int>& resolutions, bool diffusion_dominated,
        const std::string& out_dir, const std::string& stamp) {
    if (resolutions.size() < 2) {
        std::cerr << "mms: need at least 2 resolutions\n";
        return kExitUsage;
    }
    for (std::size_t i = 0; i + 1 < resolutions.size(); ++i)
        if (!(resolutions[i] < resolutions[i + 1])) {
            std::cerr << "mms: resolutions must be strictly increasing\n";
            return kExitUsage;
        }

    experiments::MmsResult result = experiments::run_mms(resolutions, diffusion_dominated);
    try {
        std::filesystem::create_directories(out_dir);
        csv::Writer w(out_dir + "/mms_" + stamp + ".csv");
        w.header({"n", "err_rho", "err_theta", "err_u", "order_rho", "order_theta",
                  "order_u", "completed"});
        for (const auto& r : result.rows)
            w.row_strings({csv::format(r.n), csv::format(r.err_rho),
                           csv::format(r.err_theta), csv::format(r.err_u),
                           csv::format(r.order_rho), csv::format(r.order_theta),
                           csv::format(r.order_u), csv::format(r.completed)});
    } catch (const std::ios_base::failure& e) {
        std::cerr << "mms: I/O error: " << e.what() << "\n";
        return kExitIoError;
    }
    return result.all_completed ? kExitOk : kExitCheckFailure;
}

} // namespace runner
} // namespace bfl
