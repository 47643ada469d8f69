#include "bfl/envara.hpp"

#include "bfl/constitutive.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bfl {
namespace envara {

namespace {

// 4th-order central first derivative with relative step.
double d1(const ThermoFn& f, double x, double y, double h_rel, bool wrt_rho) {
    const double base = wrt_rho ? x : y;
    const double h = h_rel * std::max(std::abs(base), 1.0);
    auto at = [&](double t) { return wrt_rho ? f(t, y) : f(x, t); };
    return (-at(base + 2 * h) + 8 * at(base + h) - 8 * at(base - h) + at(base - 2 * h)) /
           (12 * h);
}

// 4th-order central second derivative with relative step.
double d2(const ThermoFn& f, double x, double y, double h_rel, bool wrt_rho) {
    const double base = wrt_rho ? x : y;
    const double h = h_rel * std::max(std::abs(base), 1.0);
    auto at = [&](double t) { return wrt_rho ? f(t, y) : f(x, t); };
    return (-at(base + 2 * h) + 16 * at(base + h) - 30 * at(base) + 16 * at(base - h) -
            at(base - 2 * h)) /
           (12 * h * h);
}

// Plain 2nd-order central difference of a 1D callable.
double central(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

} // namespace

FreeEnergyModel ideal_gas_model(const ModelParams& p) {
    FreeEnergyModel m;
    m.name = "ideal-gas";
    m.psi = [p](double rho, double theta) {
        return constitutive::free_energy({rho, theta}, p);
    };
    m.psi_rho = [p](double rho, double theta) {
        return constitutive::free_energy_rho({rho, theta}, p);
    };
    m.psi_theta = [p](double rho, double theta) {
        return constitutive::free_energy_theta({rho, theta}, p);
    };
    return m;
}

DerivedLaws derive_laws(const FreeEnergyModel& model, double h) {
    if (!(h >= 1e-8 && h <= 1e-2))
        throw std::invalid_argument("derive_laws: fd step must lie in [1e-8, 1e-2]");
    if (!model.psi) throw std::invalid_argument("derive_laws: model has no psi");

    const bool analytic = model.psi_rho.has_value() && model.psi_theta.has_value();
    const ThermoFn psi = model.psi;

    ThermoFn psi_t = analytic ? *model.psi_theta : ThermoFn([psi, h](double r, double t) {
        return d1(psi, r, t, h, false);
    });
    ThermoFn psi_r = analytic ? *model.psi_rho : ThermoFn([psi, h](double r, double t) {
        return d1(psi, r, t, h, true);
    });

    // Invertibility probe on a 10x10 log grid in [0.1,10]^2.
    double min_s_theta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double rho = std::pow(10.0, -1.0 + 2.0 * i / 9.0);
            const double theta = std::pow(10.0, -1.0 + 2.0 * j / 9.0);
            min_s_theta = std::min(min_s_theta, -d2(psi, rho, theta, h, false));
        }
    }

    DerivedLaws laws;
    laws.analytic = analytic;
    laws.fd_step = h;
    laws.min_s_theta = min_s_theta;
    laws.invertible = min_s_theta > 0.0;
    laws.psi_rho = psi_r;
    laws.s = [psi_t](double r, double t) { return -psi_t(r, t); };
    laws.e = [psi, psi_t](double r, double t) { return psi(r, t) - t * psi_t(r, t); };
    laws.p = [psi, psi_r](double r, double t) { return r * psi_r(r, t) - psi(r, t); };
    return laws;
}

double lemma0_residual(const DerivedLaws& laws, const std::vector<double>& rho_profile,
                       const std::vector<double>& theta_profile, double dx) {
    if (rho_profile.size() != theta_profile.size() || rho_profile.size() < 5)
        throw std::invalid_argument("lemma0_residual: need >= 5 matching samples");
    if (!(dx > 0.0)) throw std::invalid_argument("lemma0_residual: dx must be positive");
    const std::size_t n = rho_profile.size();
    for (std::size_t i = 0; i < n; ++i)
        if (!(rho_profile[i] > 0.0 && theta_profile[i] > 0.0))
            throw std::domain_error("lemma0_residual: profiles must be strictly positive");

    std::vector<double> p_x(n), psir_x(n);
    for (std::size_t i = 0; i < n; ++i) {
        p_x[i] = laws.p(rho_profile[i], theta_profile[i]);
        psir_x[i] = laws.psi_rho(rho_profile[i], theta_profile[i]);
    }
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dp = (p_x[i + 1] - p_x[i - 1]) / (2 * dx);
        const double dpsir = (psir_x[i + 1] - psir_x[i - 1]) / (2 * dx);
        const double dtheta = (theta_profile[i + 1] - theta_profile[i - 1]) / (2 * dx);
        const double s = laws.s(rho_profile[i], theta_profile[i]);
        worst = std::max(worst, std::abs(dp - rho_profile[i] * dpsir - s * dtheta));
    }
    return worst;
}

GibbsResidual gibbs_residual(const DerivedLaws& laws, double rho, double theta, double h) {
    if (!(rho > 0.0 && theta > 0.0))
        throw std::domain_error("gibbs_residual: point outside the positive quadrant");
    auto s_spec = [&](double r, double t) { return laws.s(r, t) / r; };
    auto e_spec = [&](double r, double t) { return laws.e(r, t) / r; };

    const double ds_dt = central([&](double t) { return s_spec(rho, t); }, theta, h);
    const double de_dt = central([&](double t) { return e_spec(rho, t); }, theta, h);
    const double ds_dr = central([&](double r) { return s_spec(r, theta); }, rho, h);
    const double de_dr = central([&](double r) { return e_spec(r, theta); }, rho, h);
    const double press = laws.p(rho, theta);

    GibbsResidual out;
    out.r_theta = std::abs(theta * ds_dt - de_dt);
    out.r_rho = std::abs(theta * ds_dr - de_dr + press / (rho * rho));
    return out;
}

double invert_entropy(const DerivedLaws& laws, double rho, double s_value, double theta_min,
                      double theta_max) {
    if (!laws.invertible)
        throw std::domain_error("invert_entropy: model entropy is not invertible in theta");
    auto s_at = [&](double t) { return laws.s(rho, t); };
    double lo = theta_min, hi = theta_max;
    const double slo = s_at(lo), shi = s_at(hi);
    if (!(s_value >= slo && s_value <= shi)) {
        std::ostringstream os;
        os << "invert_entropy: s=" << s_value << " outside the range [" << slo << ", " << shi
           << "] of s(rho=" << rho << ", .) on [" << theta_min << ", " << theta_max << "]";
        throw std::domain_error(os.str());
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (s_at(mid) < s_value)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

LemmaCheck lemma12_check(const DerivedLaws& laws, double rho, double s_value, double h,
                         double theta_min, double theta_max) {
    auto theta_of = [&](double r, double s) {
        return invert_entropy(laws, r, s, theta_min, theta_max);
    };
    auto e1 = [&](double r, double s) { return laws.e(r, theta_of(r, s)); };

    const double theta_here = theta_of(rho, s_value);
    const double de1_ds = central([&](double s) { return e1(rho, s); }, s_value, h);
    const double de1_dr = central([&](double r) { return e1(r, s_value); }, rho, h);

    LemmaCheck out;
    out.r1 = std::abs(de1_ds - theta_here);
    out.r2 = std::abs(de1_dr - laws.psi_rho(rho, theta_here));
    return out;
}

} // namespace envara
} // namespace bfl
