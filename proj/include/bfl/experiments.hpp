#pragma once

#include "bfl/diagnostics.hpp"
#include "bfl/evolution.hpp"
#include "bfl/grid.hpp"
#include "bfl/params.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bfl {
namespace experiments {

/// Analytic initial data so every member of a sweep can sample the same
/// fields at its own resolution.
using FieldFn = std::function<double(double x, double y)>;

struct Scenario {
    ModelParams params;
    Grid grid;
    evolution::TimeStepConfig time;
    FieldFn rho0;
    FieldFn theta0;
};

/// Smooth positive mean-one data on [0, 2*pi]: rho = 1 + 0.3 sin x,
/// theta = 1 + 0.2 cos x, n = 128, cfl_safety = 0.5.
Scenario default_scenario();

/// Constant state rho = theta = 1 (exact fixed point at any resolution).
Scenario equilibrium_scenario();

/// Uniform density with a temperature trough of depth `amplitude` in (0,1):
/// theta dips to 1 - amplitude at the domain edge wave crest. Larger
/// `sharpness` powers narrow the warm region, steepening the profile (the
/// wave crest shape is (1-cos)^m / 2^m).
Scenario cold_spot_scenario(double amplitude, int sharpness = 1);

ScalarField sample_field(const FieldFn& f, const Grid& g);

/// Restrict a fine cell-centered field to a coarser grid whose resolution
/// divides it, by block averaging.
ScalarField restrict_field(const ScalarField& fine, const Grid& coarse);

/// Outcome of one member run: the final state plus the invariant summary
/// the sweeps assert on.
struct MemberRun {
    evolution::RunSummary summary;
    evolution::State final_state;
    double max_mass_drift = 0.0;          // relative
    double max_energy_identity = 0.0;     // Brinkman residual
    double min_sigma = 0.0;               // pointwise production minimum
    double min_entropy_slack = 0.0;       // min over steps of S(t_k+1)-S(t_k)
    double min_theta_over_run = 0.0;
    std::vector<diagnostics::DiagnosticsRecord> records;
};

MemberRun run_member(const Scenario& scenario);

enum class SweepAxis { Mesh, Eps, Delta, Dt };
enum class SweepNorm { L2, Linf };

SweepAxis axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Mesh;
    std::vector<double> values; // strictly decreasing (mesh: powers of two)
    Scenario base;
    SweepNorm norm = SweepNorm::L2;
};

struct SweepRow {
    double value = 0.0;
    bool completed = false;
    std::string status;
    double dist_rho = 0.0, dist_theta = 0.0, dist_u = 0.0, dist = 0.0;
    double observed_order = 0.0; // NaN where undefined
    double mass_drift = 0.0;
    double max_energy_identity = 0.0;
    double min_entropy_slack = 0.0;
    double min_sigma = 0.0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::Mesh;
    std::vector<SweepRow> rows; // coarsest first; reference member last
    bool invariants_ok = false;
    bool distances_strictly_decreasing = false;
};

/// Runs the scenario across the axis values and measures distances of
/// (rho,theta,u) at t_end against the most-resolved member. Members are
/// independent; threads > 1 runs them concurrently with a deterministic,
/// value-sorted aggregation.
SweepResult run_sweep(const SweepSpec& spec, int threads = 1);

struct MmsRow {
    int n = 0;
    double err_rho = 0.0, err_theta = 0.0, err_u = 0.0;
    double order_rho = 0.0, order_theta = 0.0, order_u = 0.0;
    bool completed = false;
};

struct MmsResult {
    std::vector<MmsRow> rows;
    bool all_completed = false;
};

/// Manufactured-solution verification: injects analytic forcing so a fixed
/// smooth positive state solves all three equations, then reports L2
/// errors and observed orders across the resolution list. The advection
/// scenario stresses the upwind transport; the diffusive one the heat flux.
/// dt_scale shrinks the member time steps (time-error isolation).
MmsResult run_mms(const std::vector<int>& resolutions, bool diffusion_dominated = false,
                  double t_end = 0.5, double dt_scale = 1.0);

struct ExistenceRow {
    double amplitude = 0.0;
    std::string cause;
    double t_reached = 0.0;
    double min_theta = 0.0;
};

/// Runs a hot-crest initial family at each perturbation amplitude and
/// reports the empirical existence horizon (completion or abort time).
std::vector<ExistenceRow> local_existence_probe(const std::vector<double>& amplitudes,
                                                double delta, double t_end = 0.5);

} // namespace experiments
} // namespace bfl
