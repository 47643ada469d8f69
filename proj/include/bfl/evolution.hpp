#pragma once

#include "bfl/brinkman.hpp"
#include "bfl/grid.hpp"
#include "bfl/params.hpp"

#include <functional>
#include <optional>
#include <string>

namespace bfl {
namespace evolution {

/// Simulation state. rho and theta stay strictly positive (violations
/// abort the run, they are never clamped); u is the quasi-static velocity
/// of the most recent Brinkman solve.
struct State {
    ScalarField rho;
    ScalarField theta;
    VectorField u;
    double t = 0.0;
};

struct TimeStepConfig {
    double dt = 0.0; // <= 0 requests the automatic CFL-based choice in run()
    double t_end = 1.0;
    double cfl_safety = 0.5;
    double picard_tol = 1e-10;
    int picard_max = 25;
    double theta_floor = 1e-10;
    double solver_tol = 1e-12;
    int solver_max_iter = 20000;
};

/// Optional steady forcing injected into each equation (manufactured
/// solutions); absent members mean zero forcing.
struct StepForcing {
    std::optional<ScalarField> rho;
    std::optional<ScalarField> energy;
    std::optional<VectorField> momentum;
};

/// Positivity loss in rho or theta; the step aborts rather than clamps.
struct PositivityLoss : std::runtime_error {
    std::string field;
    int cell;
    double value;
    PositivityLoss(const std::string& f, int c, double v, const std::string& msg)
        : std::runtime_error(msg), field(f), cell(c), value(v) {}
};

/// Fixed dt exceeded the advective CFL bound for the current velocity.
struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-step bookkeeping consumed by the diagnostics recorder.
struct StepStats {
    int picard_iters = 0;
    bool picard_converged = true;
    double brinkman_rel_residual = 0.0;
    double brinkman_energy_residual = 0.0;
    double cfl_number = 0.0;
    // delta-source integrals of this step (space integral x dt), evaluated
    // at the implicitly solved temperature so the energy balance telescopes
    double src_delta_heat = 0.0; // ∫ delta/theta^2
    double src_delta_cool = 0.0; // ∫ delta*theta^5
    double src_delta_d3 = 0.0;   // ∫ delta/theta^3
    double src_delta_d4 = 0.0;   // ∫ delta*theta^4
    double src_eps_delta = 0.0;  // ∫ eps*delta*(rho^Γ+2)|∇rho|^2 as injected
};

/// Density transport: explicit upwind advection, backward-Euler artificial
/// viscosity applied in conservative form. Mass is preserved to roundoff.
ScalarField step_density(const ScalarField& rho, const VectorField& u,
                         const TimeStepConfig& cfg, const ModelParams& p,
                         const ScalarField* forcing = nullptr);

/// Internal-energy update of the conserved density e = k1*rho*theta:
/// explicit upwind transport of e, implicit heat conduction, explicit
/// dissipation/work sources paired with the Brinkman solve of the same
/// coefficient fields, and a per-cell implicit solve of the stiff barrier
/// pair delta/theta^2 - delta*theta^5. Returns the new temperature.
ScalarField step_energy(const ScalarField& rho_old, const ScalarField& theta_old,
                        const ScalarField& rho_coef, const ScalarField& theta_coef,
                        const VectorField& u, const ScalarField& rho_new,
                        const TimeStepConfig& cfg, const ModelParams& p, StepStats& stats,
                        const ScalarField* forcing = nullptr);

/// One coupled time step: Picard iteration alternating the Brinkman solve
/// with the density and energy updates until the iterate change drops
/// below picard_tol (or picard_max is reached, which only raises a warning
/// flag). Requires cfg.dt > 0 and the advective CFL condition.
State step_coupled(const State& state, const TimeStepConfig& cfg, const ModelParams& p,
                   StepStats& stats, const StepForcing* forcing = nullptr);

enum class Termination { Completed, PositivityAbort, SolverFailure, CflViolation };

std::string to_string(Termination t);

struct RunSinks {
    // called once per accepted step (and once for the initial state with
    // step = 0) after the diagnostics recorder has seen it
    std::function<void(int step, const State&, const StepStats&)> on_step;
};

struct RunSummary {
    Termination cause = Termination::Completed;
    int steps = 0;
    double t_final = 0.0;
    double dt = 0.0;
    std::string detail;
};

/// Advance the initial state to cfg.t_end (dt <= 0 picks
/// cfl_safety*h/max(4*|u0|, 0.1) from the initial Brinkman solve and the
/// step count is rounded so the horizon is hit exactly). Positivity and
/// solver failures terminate the run and are reported in the summary, not
/// rethrown.
RunSummary run(const State& initial, const TimeStepConfig& cfg, const ModelParams& p,
               const RunSinks& sinks, const StepForcing* forcing = nullptr);

/// Build a consistent initial state: validates positivity and attaches the
/// Brinkman velocity of the initial fields.
State make_initial_state(const ScalarField& rho0, const ScalarField& theta0,
                         const ModelParams& p, double solver_tol = 1e-12,
                         int max_iter = 20000, const StepForcing* forcing = nullptr);

} // namespace evolution
} // namespace bfl
