#include "bfl/evolution.hpp"

#include "bfl/grid_ops.hpp"
#include "pcg.hpp"

#include <cmath>
#include <sstream>

namespace bfl {
namespace evolution {

namespace {

using namespace grid_ops;

// 1/diag of (I - dt*eps*Lap_neumann); the Neumann stencil has 1/h^2 on
// wall-adjacent cells and 2/h^2 inside, per axis.
std::vector<double> inv_diag_neumann(const Grid& g, double scale_dt,
                                     const ScalarField* mass_diag, double mass_coef) {
    std::vector<double> out(static_cast<std::size_t>(g.cells()));
    for (int j = 0; j < g.n[1]; ++j) {
        for (int i = 0; i < g.n[0]; ++i) {
            double lap = 0.0;
            const double hx = g.h(0);
            lap += ((i == 0 || i == g.n[0] - 1) ? 1.0 : 2.0) / (hx * hx);
            if (g.dim == 2) {
                const double hy = g.h(1);
                lap += ((j == 0 || j == g.n[1] - 1) ? 1.0 : 2.0) / (hy * hy);
            }
            const int idx = g.index(i, j);
            const double mass = mass_diag ? mass_coef * (*mass_diag)[idx] : 1.0;
            out[static_cast<std::size_t>(idx)] = 1.0 / (mass + scale_dt * lap);
        }
    }
    return out;
}

double max_cfl_number(const VectorField& u, double dt) {
    double worst = 0.0;
    for (int a = 0; a < u.grid.dim; ++a) {
        double umax = 0.0;
        for (double v : u[a]) umax = std::max(umax, std::abs(v));
        worst = std::max(worst, dt * umax / u.grid.h(a));
    }
    return worst;
}

// Newton-with-bisection for the per-cell barrier equation
//   k1*rho*theta - dt*delta*(theta^-2 - theta^5) = e_target.
// g is strictly increasing with g(0+) = -inf, g(inf) = +inf, so the
// positive root exists for any e_target.
double solve_barrier_cell(double k1_rho, double e_target, double dt_delta, double guess) {
    auto g = [&](double th) {
        return k1_rho * th - dt_delta * (1.0 / (th * th) - th * th * th * th * th) - e_target;
    };
    double lo = 1e-14;
    double hi = std::max(guess, 1.0);
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    for (int i = 0; i < 2000 && g(lo) > 0.0; ++i) lo *= 0.5; // barrier forces g < 0 near zero

    double th = std::min(std::max(guess, lo), hi);
    for (int it = 0; it < 100; ++it) {
        const double val = g(th);
        const double scale = std::abs(k1_rho * th) + std::abs(e_target) + 1.0;
        if (std::abs(val) <= 1e-15 * scale) return th;
        if (val > 0.0)
            hi = th;
        else
            lo = th;
        const double slope =
            k1_rho + dt_delta * (2.0 / (th * th * th) + 5.0 * th * th * th * th);
        double next = th - val / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * th) return 0.5 * (lo + hi);
        th = next;
    }
    return th;
}

} // namespace

ScalarField step_density(const ScalarField& rho, const VectorField& u,
                         const TimeStepConfig& cfg, const ModelParams& p,
                         const ScalarField* forcing) {
    const Grid& g = rho.grid;
    ScalarField adv = advect_upwind(rho, u);
    ScalarField rhs(g);
    for (int i = 0; i < rho.size(); ++i) {
        rhs[i] = rho[i] - cfg.dt * adv[i];
        if (forcing) rhs[i] += cfg.dt * (*forcing)[i];
    }

    ScalarField out = rhs;
    if (p.eps > 0.0) {
        const double k = cfg.dt * p.eps;
        auto apply = [&](const std::vector<double>& v, std::vector<double>& av) {
            ScalarField tmp(g);
            tmp.values = v;
            ScalarField lap = laplacian_neumann(tmp);
            av.resize(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) av[i] = v[i] - k * lap.values[i];
        };
        const std::vector<double> inv_diag = inv_diag_neumann(g, k, nullptr, 1.0);
        std::vector<double> x = rhs.values; // good guess: dt*eps is small
        detail::pcg(apply, rhs.values, inv_diag, x, cfg.solver_tol, cfg.solver_max_iter,
                    "density diffusion");
        // conservative application: the Laplacian of the iterate telescopes
        // exactly, so mass is independent of the CG tolerance
        ScalarField iterate(g);
        iterate.values = x;
        ScalarField lap = laplacian_neumann(iterate);
        for (int i = 0; i < out.size(); ++i) out[i] = rhs[i] + k * lap[i];
    }

    for (int i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0) || !std::isfinite(out[i])) {
            std::ostringstream os;
            os << "density positivity lost at cell " << i << " (rho=" << out[i] << ")";
            throw PositivityLoss("rho", i, out[i], os.str());
        }
    }
    return out;
}

ScalarField step_energy(const ScalarField& rho_old, const ScalarField& theta_old,
                        const ScalarField& rho_coef, const ScalarField& theta_coef,
                        const VectorField& u, const ScalarField& rho_new,
                        const TimeStepConfig& cfg, const ModelParams& p, StepStats& stats,
                        const ScalarField* forcing) {
    const Grid& g = rho_old.grid;
    const double vol = g.cell_volume();

    ScalarField e_old(g);
    for (int i = 0; i < e_old.size(); ++i) e_old[i] = p.k1 * rho_old[i] * theta_old[i];

    ScalarField adv = advect_upwind(e_old, u);
    ScalarField grad_u_sq = dirichlet_grad_sq_density(u);
    ScalarField div_u = divergence(u);

    // artificial-viscosity heating of the regularized scheme
    ScalarField grad_rho_sq;
    if (p.eps > 0.0 && p.delta > 0.0) grad_rho_sq = neumann_grad_sq_density(rho_coef);

    ScalarField e_adv(g);
    for (int i = 0; i < e_adv.size(); ++i) {
        double u_sq = 0.0;
        for (int c = 0; c < g.dim; ++c) u_sq += u[c][i] * u[c][i];
        double src = p.mu * grad_u_sq[i] + p.nu * rho_coef[i] * u_sq -
                     p.k2 * rho_coef[i] * theta_coef[i] * div_u[i];
        if (p.eps > 0.0 && p.delta > 0.0) {
            const double heat = p.eps * p.delta *
                                (std::pow(rho_coef[i], p.gamma_exp) + 2.0) * grad_rho_sq[i];
            src += heat;
            stats.src_eps_delta += cfg.dt * heat * vol;
        }
        if (forcing) src += (*forcing)[i];
        e_adv[i] = e_old[i] - cfg.dt * adv[i] + cfg.dt * src;
    }

    // implicit heat conduction on theta: (k1*diag(rho_new) - dt*kappa*Lap) theta = e
    const double k = cfg.dt * p.kappa;
    auto apply = [&](const std::vector<double>& v, std::vector<double>& av) {
        ScalarField tmp(g);
        tmp.values = v;
        ScalarField lap = laplacian_neumann(tmp);
        av.resize(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            av[i] = p.k1 * rho_new[static_cast<int>(i)] * v[i] - k * lap.values[i];
    };
    const std::vector<double> inv_diag = inv_diag_neumann(g, k, &rho_new, p.k1);
    std::vector<double> x = theta_coef.values; // warm start from the iterate
    detail::pcg(apply, e_adv.values, inv_diag, x, cfg.solver_tol, cfg.solver_max_iter,
                "energy diffusion");
    ScalarField theta_star(g);
    theta_star.values = x;
    ScalarField lap = laplacian_neumann(theta_star);
    ScalarField e_diff(g);
    for (int i = 0; i < e_diff.size(); ++i) e_diff[i] = e_adv[i] + k * lap[i];

    // stiff barrier pair, solved per cell at frozen transport/diffusion
    ScalarField theta_new(g);
    if (p.delta > 0.0) {
        const double dt_delta = cfg.dt * p.delta;
        for (int i = 0; i < theta_new.size(); ++i) {
            const double th = solve_barrier_cell(p.k1 * rho_new[i], e_diff[i], dt_delta,
                                                 std::max(theta_star[i], 1e-10));
            theta_new[i] = th;
            const double th2 = th * th;
            const double th4 = th2 * th2;
            stats.src_delta_heat += dt_delta / th2 * vol;
            stats.src_delta_cool += dt_delta * th4 * th * vol;
            stats.src_delta_d3 += dt_delta / (th2 * th) * vol;
            stats.src_delta_d4 += dt_delta * th4 * vol;
        }
    } else {
        for (int i = 0; i < theta_new.size(); ++i)
            theta_new[i] = e_diff[i] / (p.k1 * rho_new[i]);
    }

    for (int i = 0; i < theta_new.size(); ++i) {
        if (!(theta_new[i] > cfg.theta_floor) || !std::isfinite(theta_new[i])) {
            std::ostringstream os;
            os << "temperature positivity lost at cell " << i << " (theta=" << theta_new[i]
               << ", floor=" << cfg.theta_floor << ")";
            throw PositivityLoss("theta", i, theta_new[i], os.str());
        }
    }
    return theta_new;
}

State step_coupled(const State& state, const TimeStepConfig& cfg, const ModelParams& p,
                   StepStats& stats, const StepForcing* forcing) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("step_coupled: dt must be positive");
    stats = StepStats{};

    // advective CFL precondition on the incoming velocity, before any update
    stats.cfl_number = max_cfl_number(state.u, cfg.dt);
    if (stats.cfl_number > cfg.cfl_safety) {
        std::ostringstream os;
        os << "advective CFL violated: dt*max|u|/h = " << stats.cfl_number
           << " exceeds cfl_safety = " << cfg.cfl_safety;
        throw CflViolation(os.str());
    }

    const ScalarField* f_rho = (forcing && forcing->rho) ? &*forcing->rho : nullptr;
    const ScalarField* f_energy = (forcing && forcing->energy) ? &*forcing->energy : nullptr;
    const VectorField* f_mom = (forcing && forcing->momentum) ? &*forcing->momentum : nullptr;

    // previous iterate, seeded with the incoming state
    ScalarField rho_prev = state.rho;
    ScalarField theta_prev = state.theta;
    VectorField u_prev = state.u;

    ScalarField rho_new = state.rho;
    ScalarField theta_new = state.theta;
    VectorField u_new = state.u;

    bool converged = false;
    int iters = 0;
    while (iters < cfg.picard_max) {
        ++iters;

        brinkman::BrinkmanSystem sys;
        sys.rho = rho_prev;
        sys.theta = theta_prev;
        sys.params = p;
        sys.solver_tol = cfg.solver_tol;
        sys.max_iter = cfg.solver_max_iter;

        brinkman::BrinkmanSolution sol = brinkman::solve_brinkman(sys, f_mom, &u_prev);
        u_new = sol.u;
        if (!grid_ops::all_finite(u_new))
            throw SolverFailure("step_coupled: velocity solve produced non-finite values",
                                sol.rel_residual);
        stats.brinkman_rel_residual = sol.rel_residual;
        stats.brinkman_energy_residual = brinkman::energy_identity_residual(u_new, sys, f_mom);

        rho_new = step_density(state.rho, u_new, cfg, p, f_rho);

        StepStats trial = stats; // delta sources of this iterate only
        trial.src_delta_heat = trial.src_delta_cool = 0.0;
        trial.src_delta_d3 = trial.src_delta_d4 = 0.0;
        trial.src_eps_delta = 0.0;
        theta_new = step_energy(state.rho, state.theta, rho_prev, theta_prev, u_new, rho_new,
                                cfg, p, trial, f_energy);
        stats = trial;

        double change = 0.0;
        {
            ScalarField dr(rho_new.grid);
            ScalarField dt_(rho_new.grid);
            for (int i = 0; i < dr.size(); ++i) {
                dr[i] = rho_new[i] - rho_prev[i];
                dt_[i] = theta_new[i] - theta_prev[i];
            }
            VectorField du(u_new.grid);
            for (int c = 0; c < u_new.grid.dim; ++c)
                for (std::size_t i = 0; i < du[c].size(); ++i)
                    du[c][i] = u_new[c][i] - u_prev[c][i];
            change = l2_norm(dr) + l2_norm(dt_) + l2_norm(du);
        }

        rho_prev = rho_new;
        theta_prev = theta_new;
        u_prev = u_new;

        if (change <= cfg.picard_tol) {
            converged = true;
            break;
        }
    }

    stats.picard_iters = iters;
    stats.picard_converged = converged;

    State next;
    next.rho = std::move(rho_new);
    next.theta = std::move(theta_new);
    next.u = std::move(u_new);
    next.t = state.t + cfg.dt;
    return next;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::PositivityAbort: return "positivity-abort";
        case Termination::SolverFailure: return "solver-failure";
        case Termination::CflViolation: return "cfl-violation";
    }
    return "unknown";
}

State make_initial_state(const ScalarField& rho0, const ScalarField& theta0,
                         const ModelParams& p, double solver_tol, int max_iter,
                         const StepForcing* forcing) {
    p.validate();
    if (!(rho0.grid == theta0.grid))
        throw std::invalid_argument("make_initial_state: grid mismatch");
    for (int i = 0; i < rho0.size(); ++i) {
        if (!(rho0[i] > 0.0))
            throw PositivityLoss("rho", i, rho0[i], "initial density not positive");
        if (!(theta0[i] > 0.0))
            throw PositivityLoss("theta", i, theta0[i], "initial temperature not positive");
    }
    brinkman::BrinkmanSystem sys;
    sys.rho = rho0;
    sys.theta = theta0;
    sys.params = p;
    sys.solver_tol = solver_tol;
    sys.max_iter = max_iter;
    const VectorField* f_mom = (forcing && forcing->momentum) ? &*forcing->momentum : nullptr;

    State s;
    s.rho = rho0;
    s.theta = theta0;
    s.u = brinkman::solve_brinkman(sys, f_mom).u;
    s.t = 0.0;
    return s;
}

RunSummary run(const State& initial, const TimeStepConfig& cfg_in, const ModelParams& p,
               const RunSinks& sinks, const StepForcing* forcing) {
    TimeStepConfig cfg = cfg_in;
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("run: t_end must be positive");

    if (!(cfg.dt > 0.0)) {
        const double u0 = grid_ops::max_abs(initial.u);
        double hmin = initial.rho.grid.h(0);
        if (initial.rho.grid.dim == 2) hmin = std::min(hmin, initial.rho.grid.h(1));
        cfg.dt = cfg.cfl_safety * hmin / std::max(4.0 * u0, 0.1);
    }
    // land on t_end exactly with uniform steps
    int steps = std::max(1, static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
    cfg.dt = cfg.t_end / steps;

    RunSummary summary;
    summary.dt = cfg.dt;

    State state = initial;
    if (sinks.on_step) sinks.on_step(0, state, StepStats{});

    for (int k = 1; k <= steps; ++k) {
        StepStats stats;
        try {
            state = step_coupled(state, cfg, p, stats, forcing);
        } catch (const PositivityLoss& e) {
            summary.cause = Termination::PositivityAbort;
            summary.detail = e.what();
            break;
        } catch (const CflViolation& e) {
            summary.cause = Termination::CflViolation;
            summary.detail = e.what();
            break;
        } catch (const SolverFailure& e) {
            summary.cause = Termination::SolverFailure;
            summary.detail = e.what();
            break;
        }
        summary.steps = k;
        summary.t_final = state.t;
        if (sinks.on_step) sinks.on_step(k, state, stats);
    }
    return summary;
}

} // namespace evolution
} // namespace bfl
