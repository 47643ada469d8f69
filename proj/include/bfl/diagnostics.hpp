#pragma once

#include "bfl/evolution.hpp"
#include "bfl/grid.hpp"
#include "bfl/params.hpp"

#include <vector>

namespace bfl {
namespace diagnostics {

/// Per-step snapshot of every monitored balance, bound and residual.
struct DiagnosticsRecord {
    int step = 0;
    double t = 0.0;

    double mass = 0.0;            // M(t) = ∫rho
    double internal_energy = 0.0; // E(t) = ∫ k1*rho*theta
    double total_entropy = 0.0;   // S(t) = ∫ s(rho,theta)

    double min_rho = 0.0, max_rho = 0.0;
    double min_theta = 0.0, max_theta = 0.0;

    double min_sigma = 0.0;              // pointwise entropy-production minimum, this step
    double cum_entropy_production = 0.0; // ∫∫ sigma (second-law form)

    double brinkman_energy_residual = 0.0;
    double brinkman_rel_residual = 0.0;

    // |E(t) - E(0) - ∫∫(delta/theta^2 - delta*theta^5)|
    double energy_balance_residual = 0.0;
    // same with every non-conservative source included (solver-tolerance level)
    double energy_bookkeeping_residual = 0.0;

    double entropy_eq_residual = 0.0; // L1 residual of the regularized entropy equation
    double dissipation_slack = 0.0;   // running dissipation-balance slack at theta_bar
    double superlevel_fraction = 0.0; // |{theta > theta_lower}| / |Omega|

    int picard_iters = 0;
    bool picard_warning = false;
    double cfl_number = 0.0;

    // cumulative integrals feeding the dissipation balance
    double cum_delta_heat = 0.0;      // ∫∫ delta/theta^2      (implicit values)
    double cum_delta_cool = 0.0;      // ∫∫ delta*theta^5
    double cum_delta_d3 = 0.0;        // ∫∫ delta/theta^3
    double cum_delta_d4 = 0.0;        // ∫∫ delta*theta^4
    double cum_production = 0.0;      // ∫∫ (1/theta)(mu|∇u|^2+nu rho|u|^2+(kappa/theta+delta theta^{Γ-1})|∇theta|^2)
    double cum_eps_grad_rho = 0.0;    // ∫∫ eps|∇rho|^2/rho
    double cum_eps_delta_chain = 0.0;   // ∫∫ eps*delta*(Γ rho^{Γ-2}+2)|∇rho|^2
    double cum_eps_delta_power = 0.0;    // ∫∫ eps*delta*(rho^Γ+2)|∇rho|^2 (the evolved source form)
    double cum_src_eps_delta = 0.0;   // same source as actually injected by the steps
    double cum_eps_cross = 0.0;       // ∫∫ eps * ∇rho.∇theta / theta
    double eps_form_gap = 0.0;        // cum_eps_delta_power - cum_eps_delta_chain
};

/// Entropy density field s(rho,theta) cellwise.
ScalarField entropy_field(const ScalarField& rho, const ScalarField& theta,
                          const ModelParams& p);

/// Fraction of the domain where theta exceeds theta_lower.
double superlevel_measure(const ScalarField& theta, double theta_lower);

/// Streaming recorder: feed it the trajectory step by step and it emits a
/// DiagnosticsRecord per state while maintaining the cumulative balances.
class Accumulator {
public:
    Accumulator(const ModelParams& p, double theta_bar = 1.0);

    DiagnosticsRecord on_start(const evolution::State& initial);
    DiagnosticsRecord on_step(const evolution::State& prev, const evolution::State& next,
                              const evolution::StepStats& stats, double dt);

    double theta_lower() const { return theta_lower_; }
    double theta_bar() const { return theta_bar_; }

private:
    DiagnosticsRecord instantaneous(const evolution::State& s) const;

    ModelParams params_;
    double theta_bar_;
    double theta_lower_ = 0.0;
    bool started_ = false;
    int step_ = 0;
    double e0_ = 0.0, s0_ = 0.0;
    DiagnosticsRecord last_;
};

/// Dissipation-balance slack at a given reference temperature: min over
/// records of RHS - LHS of the integrated H-balance. Nonnegative output
/// certifies the inequality direction on the whole trajectory.
double dissipation_balance_slack(const std::vector<DiagnosticsRecord>& records,
                                 double theta_bar, const ModelParams& p);

/// Space--time weak-formulation residuals over a family of tensor-product
/// Legendre test functions (degree < family_size per axis) with a linear
/// temporal cutoff vanishing at the final time. Requires the history to
/// contain every step at uniform dt.
struct WeakFormResult {
    double continuity = 0.0;
    double brinkman = 0.0;
    double energy = 0.0;
    double entropy_balance = 0.0;  // magnitude of the signed entropy defect
    double entropy_violation = 0.0; // positive part only (one-sided law)
};
WeakFormResult weak_form_residual(const std::vector<evolution::State>& states,
                                  const ModelParams& p, int family_size = 4);

/// Specht ratio S(h) = h^{1/(h-1)} / (e log h^{1/(h-1)}), extended by
/// continuity with S(1) = 1; satisfies S(h) = S(1/h).
double specht_ratio(double h);

/// Reverse Young inequality S(a/b) a^{1-nu} b^nu >= (1-nu)a + nu*b,
/// checked within 1e-12 relative slack.
bool reverse_young_check(double a, double b, double nu);

/// Inverse Jensen inequality: mean(f^p) <= alpha*mean(f)^p + beta for
/// f in [m,M], with beta = a(1-1/p)x0 + b from the chord coefficients and
/// alpha the smallest value feasible on the extremal two-point
/// distributions (which is where the chord bound is attained).
struct InverseJensenBound {
    double lhs = 0.0;
    double rhs = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};
InverseJensenBound inverse_jensen_bound(const std::vector<double>& samples,
                                        const std::vector<double>& weights, double p_exp,
                                        double m, double M, double x0);

} // namespace diagnostics
} // namespace bfl
