#pragma once

#include "bfl/params.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bfl {
namespace envara {

using ThermoFn = std::function<double(double rho, double theta)>;

/// A free-energy density psi(rho,theta) supplied as an evaluatable,
/// optionally with analytic partials. This is the seed of the whole
/// derivation: entropy, internal energy and pressure are produced from
/// psi alone, mirroring the variational construction of the model.
struct FreeEnergyModel {
    ThermoFn psi;
    std::optional<ThermoFn> psi_rho;   // analytic d(psi)/d(rho), if known
    std::optional<ThermoFn> psi_theta; // analytic d(psi)/d(theta), if known
    std::string name = "unnamed";
};

/// Ideal-gas instance wired to the closed forms.
FreeEnergyModel ideal_gas_model(const ModelParams& p);

/// Thermodynamic laws derived from a free energy:
///   s = -psi_theta,  e = psi - theta*psi_theta,  p = rho*psi_rho - psi.
/// Partials come from the model when supplied, otherwise from 4th-order
/// central differences with relative step fd_step. `invertible` records
/// whether s_theta = -psi_thetatheta stayed positive on the probe grid
/// (entropy inversion in theta is only offered in that case).
struct DerivedLaws {
    ThermoFn s;
    ThermoFn e;
    ThermoFn p;
    ThermoFn psi_rho;
    bool analytic = false;
    bool invertible = false;
    double min_s_theta = 0.0;
    double fd_step = 1e-4;
};

DerivedLaws derive_laws(const FreeEnergyModel& model, double h = 1e-4);

/// Max interior residual of the pressure-gradient identity
/// d/dx p = rho d/dx(psi_rho) + s d/dx(theta) along sampled 1D profiles
/// (uniform spacing dx, x-derivatives by central differences).
double lemma0_residual(const DerivedLaws& laws, const std::vector<double>& rho_profile,
                       const std::vector<double>& theta_profile, double dx);

/// Residuals of the Gibbs relation in specific (per-mass) variables at one point:
///   r_theta = |theta d/dtheta(s/rho) - d/dtheta(e/rho)|
///   r_rho   = |theta d/drho(s/rho) - d/drho(e/rho) + p/rho^2|
/// with central differences of step h.
struct GibbsResidual {
    double r_theta;
    double r_rho;
};
GibbsResidual gibbs_residual(const DerivedLaws& laws, double rho, double theta, double h);

/// Invert s(rho,.) = s_value by monotone bisection on [theta_min, theta_max].
/// Throws std::domain_error if s_value is outside the attained range.
double invert_entropy(const DerivedLaws& laws, double rho, double s_value,
                      double theta_min = 1e-6, double theta_max = 1e6);

/// Residuals of the (rho,s)-variable identities
///   r1 = |d/ds e1(rho,s) - theta(rho,s)|
///   r2 = |d/drho e1(rho,s) - psi_rho(rho,theta(rho,s))|
/// where e1(rho,s) = e(rho,theta(rho,s)) and theta(rho,s) comes from
/// invert_entropy.
struct LemmaCheck {
    double r1;
    double r2;
};
LemmaCheck lemma12_check(const DerivedLaws& laws, double rho, double s_value, double h,
                         double theta_min = 1e-6, double theta_max = 1e6);

} // namespace envara
} // namespace bfl
