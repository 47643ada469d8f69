#include "bfl/diagnostics.hpp"

#include "bfl/constitutive.hpp"
#include "bfl/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bfl {
namespace diagnostics {

namespace {

using namespace grid_ops;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Flux-form divergence of grad(theta)/theta with zero wall flux; pairs with
// the conduction part of the regularized entropy equation.
ScalarField log_heat_flux_div(const ScalarField& theta) {
    const Grid& g = theta.grid;
    ScalarField out(g, 0.0);
    for (int a = 0; a < g.dim; ++a) {
        const double invh = 1.0 / g.h(a);
        if (a == 0) {
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 1; k < g.n[0]; ++k) {
                    const int il = g.index(k - 1, j), ir = g.index(k, j);
                    const double flux =
                        (theta[ir] - theta[il]) * invh / (0.5 * (theta[il] + theta[ir]));
                    out[il] += flux * invh;
                    out[ir] -= flux * invh;
                }
        } else {
            for (int i = 0; i < g.n[0]; ++i)
                for (int k = 1; k < g.n[1]; ++k) {
                    const int il = g.index(i, k - 1), ir = g.index(i, k);
                    const double flux =
                        (theta[ir] - theta[il]) * invh / (0.5 * (theta[il] + theta[ir]));
                    out[il] += flux * invh;
                    out[ir] -= flux * invh;
                }
        }
    }
    return out;
}

} // namespace

ScalarField entropy_field(const ScalarField& rho, const ScalarField& theta,
                          const ModelParams& p) {
    ScalarField s(rho.grid);
    for (int i = 0; i < s.size(); ++i)
        s[i] = constitutive::entropy({rho[i], theta[i]}, p);
    return s;
}

double superlevel_measure(const ScalarField& theta, double theta_lower) {
    if (!(theta_lower > 0.0))
        throw std::invalid_argument("superlevel_measure: theta_lower must be positive");
    int count = 0;
    for (double v : theta.values)
        if (v > theta_lower) ++count;
    return static_cast<double>(count) / theta.size();
}

Accumulator::Accumulator(const ModelParams& p, double theta_bar)
    : params_(p), theta_bar_(theta_bar) {}

DiagnosticsRecord Accumulator::instantaneous(const evolution::State& s) const {
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass = integrate(s.rho);
    ScalarField e(s.rho.grid);
    for (int i = 0; i < e.size(); ++i) e[i] = params_.k1 * s.rho[i] * s.theta[i];
    r.internal_energy = integrate(e);
    r.total_entropy = integrate(entropy_field(s.rho, s.theta, params_));
    r.min_rho = min_value(s.rho);
    r.max_rho = max_value(s.rho);
    r.min_theta = min_value(s.theta);
    r.max_theta = max_value(s.theta);
    r.superlevel_fraction = superlevel_measure(s.theta, theta_lower_);
    return r;
}

DiagnosticsRecord Accumulator::on_start(const evolution::State& initial) {
    theta_lower_ = 0.5 * median(initial.theta.values);
    if (!(theta_lower_ > 0.0)) theta_lower_ = 1e-300;
    DiagnosticsRecord r = instantaneous(initial);
    r.step = 0;
    e0_ = r.internal_energy;
    s0_ = r.total_entropy;
    started_ = true;
    step_ = 0;
    last_ = r;
    return r;
}

DiagnosticsRecord Accumulator::on_step(const evolution::State& prev,
                                       const evolution::State& next,
                                       const evolution::StepStats& stats, double dt) {
    if (!started_) throw std::logic_error("Accumulator: on_step before on_start");
    const Grid& g = prev.rho.grid;
    const double vol = g.cell_volume();

    DiagnosticsRecord r = instantaneous(next);
    r.step = ++step_;
    r.picard_iters = stats.picard_iters;
    r.picard_warning = !stats.picard_converged;
    r.brinkman_energy_residual = stats.brinkman_energy_residual;
    r.brinkman_rel_residual = stats.brinkman_rel_residual;
    r.cfl_number = stats.cfl_number;

    // rectangle-rule production integrals at the pre-step state with the
    // velocity that actually advanced it
    ScalarField grad_u_sq = dirichlet_grad_sq_density(next.u);
    ScalarField grad_th_sq = neumann_grad_sq_density(prev.theta);
    ScalarField grad_rho_sq = neumann_grad_sq_density(prev.rho);
    VectorField grad_rho = gradient(prev.rho);
    VectorField grad_th = gradient(prev.theta);

    double min_sigma = std::numeric_limits<double>::infinity();
    double sum_sigma = 0.0, sum_prod = 0.0, sum_g2 = 0.0, sum_g1_chain = 0.0, sum_g1_power = 0.0,
           sum_cross = 0.0;
    for (int i = 0; i < prev.rho.size(); ++i) {
        const double th = prev.theta[i];
        const double rho = prev.rho[i];
        double u_sq = 0.0, cross = 0.0;
        for (int c = 0; c < g.dim; ++c) {
            u_sq += next.u[c][i] * next.u[c][i];
            cross += grad_rho[c][i] * grad_th[c][i];
        }
        const double sigma = constitutive::entropy_production_density(
            th, grad_u_sq[i], u_sq, rho, grad_th_sq[i], params_);
        min_sigma = std::min(min_sigma, sigma);
        sum_sigma += sigma;
        sum_prod += sigma + params_.delta * std::pow(th, params_.gamma_exp - 2.0) *
                                grad_th_sq[i];
        sum_g2 += params_.eps * grad_rho_sq[i] / rho;
        sum_g1_chain += params_.eps * params_.delta *
                      (params_.gamma_exp * std::pow(rho, params_.gamma_exp - 2.0) + 2.0) *
                      grad_rho_sq[i];
        sum_g1_power += params_.eps * params_.delta *
                     (std::pow(rho, params_.gamma_exp) + 2.0) * grad_rho_sq[i];
        sum_cross += params_.eps * cross / th;
    }
    r.min_sigma = min_sigma;
    r.cum_entropy_production = last_.cum_entropy_production + dt * vol * sum_sigma;
    r.cum_production = last_.cum_production + dt * vol * sum_prod;
    r.cum_eps_grad_rho = last_.cum_eps_grad_rho + dt * vol * sum_g2;
    r.cum_eps_delta_chain = last_.cum_eps_delta_chain + dt * vol * sum_g1_chain;
    r.cum_eps_delta_power = last_.cum_eps_delta_power + dt * vol * sum_g1_power;
    r.cum_eps_cross = last_.cum_eps_cross + dt * vol * sum_cross;
    r.eps_form_gap = r.cum_eps_delta_power - r.cum_eps_delta_chain;

    r.cum_delta_heat = last_.cum_delta_heat + stats.src_delta_heat;
    r.cum_delta_cool = last_.cum_delta_cool + stats.src_delta_cool;
    r.cum_delta_d3 = last_.cum_delta_d3 + stats.src_delta_d3;
    r.cum_delta_d4 = last_.cum_delta_d4 + stats.src_delta_d4;
    r.cum_src_eps_delta = last_.cum_src_eps_delta + stats.src_eps_delta;

    r.energy_balance_residual =
        std::abs(r.internal_energy - e0_ - (r.cum_delta_heat - r.cum_delta_cool));
    r.energy_bookkeeping_residual =
        std::abs(r.internal_energy - e0_ -
                 (r.cum_delta_heat - r.cum_delta_cool + r.cum_src_eps_delta));

    // dissipation balance at theta_bar (H = e - theta_bar*s)
    {
        const double lhs = (r.internal_energy - theta_bar_ * r.total_entropy) +
                           theta_bar_ * (r.cum_production + r.cum_delta_d3 +
                                         r.cum_eps_delta_chain + r.cum_eps_grad_rho) +
                           r.cum_delta_cool;
        const double rhs = (e0_ - theta_bar_ * s0_) + r.cum_delta_heat +
                           theta_bar_ * r.cum_delta_d4 + theta_bar_ * r.cum_eps_cross;
        r.dissipation_slack = rhs - lhs;
    }

    // L1 residual of the regularized entropy equation
    {
        ScalarField s_prev = entropy_field(prev.rho, prev.theta, params_);
        ScalarField s_next = entropy_field(next.rho, next.theta, params_);
        ScalarField s_adv = advect_upwind(s_prev, next.u);
        ScalarField cond = log_heat_flux_div(prev.theta);
        ScalarField lap_rho = laplacian_neumann(prev.rho);
        double l1 = 0.0;
        for (int i = 0; i < s_prev.size(); ++i) {
            const double th = prev.theta[i];
            const double rho = prev.rho[i];
            double u_sq = 0.0;
            for (int c = 0; c < g.dim; ++c) u_sq += next.u[c][i] * next.u[c][i];
            double sigma_reg =
                constitutive::entropy_production_density(th, grad_u_sq[i], u_sq, rho,
                                                         grad_th_sq[i], params_) +
                params_.delta * std::pow(th, params_.gamma_exp - 2.0) * grad_th_sq[i];
            if (params_.delta > 0.0) {
                const double th2 = th * th;
                sigma_reg += params_.delta / (th2 * th) - params_.delta * th2 * th2;
            }
            sigma_reg += params_.eps * params_.delta *
                        (params_.gamma_exp * std::pow(rho, params_.gamma_exp - 2.0) + 2.0) *
                        grad_rho_sq[i];
            sigma_reg +=
                params_.eps * lap_rho[i] * (std::log(th) - std::log(rho) - 1.0);
            const double residual = (s_next[i] - s_prev[i]) / dt + s_adv[i] -
                                    params_.kappa * cond[i] - sigma_reg;
            l1 += std::abs(residual);
        }
        r.entropy_eq_residual = l1 * vol;
    }

    last_ = r;
    return r;
}

double dissipation_balance_slack(const std::vector<DiagnosticsRecord>& records,
                                 double theta_bar, const ModelParams&) {
    if (records.size() < 2)
        throw std::invalid_argument("dissipation_balance_slack: need at least 2 records");
    const double e0 = records.front().internal_energy;
    const double s0 = records.front().total_entropy;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < records.size(); ++k) {
        const DiagnosticsRecord& r = records[k];
        const double lhs = (r.internal_energy - theta_bar * r.total_entropy) +
                           theta_bar * (r.cum_production + r.cum_delta_d3 +
                                        r.cum_eps_delta_chain + r.cum_eps_grad_rho) +
                           r.cum_delta_cool;
        const double rhs = (e0 - theta_bar * s0) + r.cum_delta_heat +
                           theta_bar * r.cum_delta_d4 + theta_bar * r.cum_eps_cross;
        worst = std::min(worst, rhs - lhs);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// weak-form residuals
// ---------------------------------------------------------------------------

namespace {

// Legendre polynomial and its antiderivative on [-1,1].
double legendre(int n, double x) {
    switch (n) {
        case 0: return 1.0;
        case 1: return x;
        case 2: return 0.5 * (3 * x * x - 1);
        case 3: return 0.5 * (5 * x * x * x - 3 * x);
        case 4: return 0.125 * (35 * x * x * x * x - 30 * x * x + 3);
        default: throw std::invalid_argument("legendre: degree not supported");
    }
}

double legendre_antiderivative(int n, double x) {
    if (n == 0) return x;
    return (legendre(n + 1, x) - legendre(n - 1, x)) / (2 * n + 1);
}

// Exact cell averages of w(x) = Pn(2x/L - 1) and of w'(x), per axis.
struct AxisAverages {
    std::vector<double> w;  // n cells
    std::vector<double> dw; // n cells
};

AxisAverages axis_averages(int degree, int ncells, double length, double shift) {
    AxisAverages out;
    out.w.resize(ncells);
    out.dw.resize(ncells);
    const double h = length / ncells;
    for (int i = 0; i < ncells; ++i) {
        const double xl = i * h, xr = (i + 1) * h;
        const double xil = 2 * xl / length - 1, xir = 2 * xr / length - 1;
        const double anti =
            (legendre_antiderivative(degree, xir) - legendre_antiderivative(degree, xil)) *
            (length / 2);
        out.w[i] = anti / h + shift;
        out.dw[i] = (legendre(degree, xir) - legendre(degree, xil)) / h;
    }
    return out;
}

} // namespace

WeakFormResult weak_form_residual(const std::vector<evolution::State>& states,
                                  const ModelParams& p, int family_size) {
    if (states.size() < 2)
        throw std::invalid_argument("weak_form_residual: need at least two snapshots");
    if (family_size < 1 || family_size > 4)
        throw std::invalid_argument("weak_form_residual: family_size must be in [1,4]");
    const std::size_t K = states.size() - 1;
    const double dt = states[1].t - states[0].t;
    for (std::size_t k = 0; k + 1 < states.size(); ++k)
        if (std::abs(states[k + 1].t - states[k].t - dt) > 1e-9 * std::max(dt, 1e-12))
            throw std::invalid_argument(
                "weak_form_residual: history must contain every step at uniform dt");

    const Grid& g = states[0].rho.grid;
    const double T = states.back().t;
    const double vol = g.cell_volume();
    auto tau = [T](double t) { return 1.0 - t / T; };

    // spatial family: cell averages of tensor Legendre members (plain and
    // nonnegative-shifted variants) and of bubble-weighted members for the
    // no-slip vector tests
    struct Member {
        std::vector<double> w, dwx, dwy;
    };
    std::vector<Member> scalar_members, nonneg_members;
    const int degy_max = g.dim == 2 ? family_size : 1;
    for (int a = 0; a < family_size; ++a) {
        for (int b = 0; b < degy_max; ++b) {
            AxisAverages ax = axis_averages(a, g.n[0], g.length[0], 0.0);
            AxisAverages ax1 = axis_averages(a, g.n[0], g.length[0], 1.0);
            Member m, mn;
            m.w.resize(g.cells());
            m.dwx.resize(g.cells());
            m.dwy.assign(g.cells(), 0.0);
            mn = m;
            if (g.dim == 1) {
                for (int i = 0; i < g.n[0]; ++i) {
                    m.w[i] = ax.w[i];
                    m.dwx[i] = ax.dw[i];
                    mn.w[i] = ax1.w[i];
                    mn.dwx[i] = ax1.dw[i];
                }
            } else {
                AxisAverages ay = axis_averages(b, g.n[1], g.length[1], 0.0);
                AxisAverages ay1 = axis_averages(b, g.n[1], g.length[1], 1.0);
                for (int j = 0; j < g.n[1]; ++j)
                    for (int i = 0; i < g.n[0]; ++i) {
                        const int idx = g.index(i, j);
                        m.w[idx] = ax.w[i] * ay.w[j];
                        m.dwx[idx] = ax.dw[i] * ay.w[j];
                        m.dwy[idx] = ax.w[i] * ay.dw[j];
                        mn.w[idx] = ax1.w[i] * ay1.w[j];
                        mn.dwx[idx] = ax1.dw[i] * ay1.w[j];
                        mn.dwy[idx] = ax1.w[i] * ay1.dw[j];
                    }
            }
            scalar_members.push_back(std::move(m));
            nonneg_members.push_back(std::move(mn));
        }
    }

    WeakFormResult out;

    // continuity: ∫∫ rho (dphi/dt + u.grad phi) + ∫ rho0 phi(0) = 0
    for (const Member& m : scalar_members) {
        double R = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const evolution::State& s = states[k];
            const double dtau = tau(states[k + 1].t) - tau(s.t);
            const double slab = dt * 0.5 * (tau(s.t) + tau(states[k + 1].t));
            double mass_term = 0.0, transport = 0.0;
            for (int i = 0; i < s.rho.size(); ++i) {
                mass_term += s.rho[i] * m.w[i];
                double ug = states[k + 1].u[0][i] * m.dwx[i];
                if (g.dim == 2) ug += states[k + 1].u[1][i] * m.dwy[i];
                transport += s.rho[i] * ug;
            }
            R += vol * (mass_term * dtau + slab * transport);
        }
        double init = 0.0;
        for (int i = 0; i < states[0].rho.size(); ++i) init += states[0].rho[i] * m.w[i];
        R += vol * init * tau(0.0);
        out.continuity = std::max(out.continuity, std::abs(R));
    }

    // Brinkman weak form against no-slip bubble test fields, evaluated with
    // the discrete operators (the grid is the Galerkin space)
    {
        for (int a = 0; a < family_size; ++a) {
            for (int b = 0; b < degy_max; ++b) {
                for (int c = 0; c < g.dim; ++c) {
                    VectorField v(g);
                    for (int j = 0; j < g.n[1]; ++j)
                        for (int i = 0; i < g.n[0]; ++i) {
                            const double x = g.center(0, i);
                            double val = 4.0 * x * (g.length[0] - x) /
                                         (g.length[0] * g.length[0]) *
                                         legendre(a, 2 * x / g.length[0] - 1);
                            if (g.dim == 2) {
                                const double y = g.center(1, j);
                                val *= 4.0 * y * (g.length[1] - y) /
                                       (g.length[1] * g.length[1]) *
                                       legendre(b, 2 * y / g.length[1] - 1);
                            }
                            v[c][g.index(i, j)] = val;
                        }
                    ScalarField div_v = grid_ops::divergence(v);
                    VectorField lap_v = grid_ops::laplacian_dirichlet(v);
                    for (std::size_t k = 0; k < states.size(); ++k) {
                        const evolution::State& s = states[k];
                        double work = 0.0, visc = 0.0, drag = 0.0;
                        for (int i = 0; i < s.rho.size(); ++i) {
                            work += s.rho[i] * s.theta[i] * div_v[i];
                            for (int cc = 0; cc < g.dim; ++cc) {
                                visc += -s.u[cc][i] * lap_v[cc][i];
                                drag += s.rho[i] * s.u[cc][i] * v[cc][i];
                            }
                        }
                        const double R =
                            vol * (p.k2 * work - p.mu * visc - p.nu * drag);
                        out.brinkman = std::max(out.brinkman, std::abs(R));
                    }
                }
            }
        }
    }

    // internal-energy balance with time-only cutoffs psi_j = (1 - t/T)^j
    for (int j = 1; j <= std::max(1, family_size - 1); ++j) {
        auto psi = [&](double t) { return std::pow(1.0 - t / T, j); };
        double R = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double E = 0.0;
            for (int i = 0; i < states[k].rho.size(); ++i)
                E += p.k1 * states[k].rho[i] * states[k].theta[i];
            E *= vol;
            R += E * (psi(states[k + 1].t) - psi(states[k].t));
        }
        double E0 = 0.0;
        for (int i = 0; i < states[0].rho.size(); ++i)
            E0 += p.k1 * states[0].rho[i] * states[0].theta[i];
        E0 *= vol;
        R += E0 * psi(0.0);
        out.energy = std::max(out.energy, std::abs(R));
    }

    // entropy inequality against nonnegative test functions, right-endpoint
    // time quadrature so the defect sign reflects the scheme, not the rule
    for (const Member& m : nonneg_members) {
        double defect = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const evolution::State& s = states[k];
            const evolution::State& sn = states[k + 1];
            ScalarField sprev = entropy_field(s.rho, s.theta, p);
            ScalarField snext = entropy_field(sn.rho, sn.theta, p);
            ScalarField grad_u_sq = dirichlet_grad_sq_density(sn.u);
            ScalarField grad_th_sq = neumann_grad_sq_density(s.theta);
            VectorField grad_th = gradient(s.theta);
            double acc = 0.0;
            for (int i = 0; i < s.rho.size(); ++i) {
                double u_sq = 0.0, trans = 0.0, flux = 0.0;
                for (int c = 0; c < g.dim; ++c) {
                    u_sq += sn.u[c][i] * sn.u[c][i];
                    const double dw = c == 0 ? m.dwx[i] : m.dwy[i];
                    trans += sprev[i] * sn.u[c][i] * dw;
                    flux += p.kappa * grad_th[c][i] / s.theta[i] * dw;
                }
                const double sigma = constitutive::entropy_production_density(
                    s.theta[i], grad_u_sq[i], u_sq, s.rho[i], grad_th_sq[i], p);
                acc += dt * (sigma * m.w[i] + trans - flux) -
                       (snext[i] - sprev[i]) * m.w[i];
            }
            defect += tau(sn.t) * vol * acc;
        }
        out.entropy_balance = std::max(out.entropy_balance, std::abs(defect));
        out.entropy_violation = std::max(out.entropy_violation, defect);
    }
    out.entropy_violation = std::max(0.0, out.entropy_violation);

    return out;
}

// ---------------------------------------------------------------------------
// appendix inequality utilities
// ---------------------------------------------------------------------------

double specht_ratio(double h) {
    if (!(h > 0.0)) throw std::domain_error("specht_ratio: h must be positive");
    const double x = h - 1.0;
    if (std::abs(x) < 1e-12) return 1.0 + x * x / 8.0; // series through the removable point
    const double gexp = std::log1p(x) / x; // log(h)/(h-1)
    // S = h^{1/(h-1)} / (e * log h^{1/(h-1)}) = exp(g - 1)/g
    return std::exp(gexp - 1.0) / gexp;
}

bool reverse_young_check(double a, double b, double nu) {
    if (!(a > 0.0 && b > 0.0)) throw std::domain_error("reverse_young_check: a,b must be > 0");
    if (!(nu >= 0.0 && nu <= 1.0))
        throw std::domain_error("reverse_young_check: nu must lie in [0,1]");
    const double lhs =
        std::exp(std::log(specht_ratio(a / b)) + (1.0 - nu) * std::log(a) + nu * std::log(b));
    const double rhs = (1.0 - nu) * a + nu * b;
    return lhs >= rhs - 1e-12 * (std::abs(lhs) + std::abs(rhs));
}

InverseJensenBound inverse_jensen_bound(const std::vector<double>& samples,
                                        const std::vector<double>& weights, double p_exp,
                                        double m, double M, double x0) {
    if (samples.size() != weights.size() || samples.empty())
        throw std::invalid_argument("inverse_jensen_bound: samples/weights mismatch");
    if (!(p_exp >= 1.0)) throw std::invalid_argument("inverse_jensen_bound: need p >= 1");
    if (!(0.0 < m && m < M)) throw std::invalid_argument("inverse_jensen_bound: need 0<m<M");
    if (!(m < x0 && x0 < M))
        throw std::invalid_argument("inverse_jensen_bound: need m < x0 < M");
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("inverse_jensen_bound: weights must sum to 1");
    for (double s : samples)
        if (s < m - 1e-12 || s > M + 1e-12)
            throw std::domain_error("inverse_jensen_bound: sample outside [m,M]");

    const double a = (std::pow(M, p_exp) - std::pow(m, p_exp)) / (M - m);
    const double b =
        (M * std::pow(m, p_exp) - m * std::pow(M, p_exp)) / (M - m);
    const double beta = a * (1.0 - 1.0 / p_exp) * x0 + b;

    // smallest alpha covering the extremal two-point laws: their means sweep
    // [m,M] and attain mean(f^p) = a*mean + b exactly
    double alpha = 0.0;
    const int grid = 2000;
    for (int i = 0; i <= grid; ++i) {
        const double t = m + (M - m) * i / grid;
        alpha = std::max(alpha, (a * t + b - beta) / std::pow(t, p_exp));
    }
    alpha = std::max(alpha, (a * x0 + b - beta) / std::pow(x0, p_exp));

    InverseJensenBound out;
    out.alpha = alpha;
    out.beta = beta;
    double mean = 0.0, mean_p = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        mean += weights[i] * samples[i];
        mean_p += weights[i] * std::pow(samples[i], p_exp);
    }
    out.lhs = mean_p;
    out.rhs = alpha * std::pow(mean, p_exp) + beta;
    return out;
}

} // namespace diagnostics
} // namespace bfl
