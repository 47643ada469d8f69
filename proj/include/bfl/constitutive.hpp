#pragma once

#include "bfl/params.hpp"

namespace bfl {

/// A point of the open thermodynamic quadrant rho > 0, theta > 0.
/// All closed-form constitutive functions are defined only here;
/// evaluation outside the quadrant is a hard domain error, never a clamp.
struct LocalThermoPoint {
    double rho;
    double theta;
};

namespace constitutive {

/// Helmholtz free energy psi(rho,theta) = k2*theta*rho*log(rho) - k1*rho*theta*log(theta).
double free_energy(const LocalThermoPoint& pt, const ModelParams& p);

/// Entropy s = -d(psi)/d(theta) = -rho*(k2*log(rho) - k1*(log(theta)+1)).
double entropy(const LocalThermoPoint& pt, const ModelParams& p);

/// Internal energy e = psi + s*theta = k1*rho*theta (Legendre transform of psi in theta).
double internal_energy(const LocalThermoPoint& pt, const ModelParams& p);

/// Pressure p = rho*psi_rho - psi = k2*rho*theta.
double pressure(const LocalThermoPoint& pt, const ModelParams& p);

/// Analytic partial d(psi)/d(rho) = k2*theta*(log(rho)+1) - k1*theta*log(theta).
double free_energy_rho(const LocalThermoPoint& pt, const ModelParams& p);

/// Analytic partial d(psi)/d(theta) = k2*rho*log(rho) - k1*rho*(log(theta)+1).
double free_energy_theta(const LocalThermoPoint& pt, const ModelParams& p);

/// Explicit inversion of the entropy in theta:
/// theta(rho,s) = e^{-1} * rho^{k2/k1} * exp(s/(k1*rho)).
/// Throws std::overflow_error when the exponent leaves the representable range.
double temperature_from_entropy(double rho, double s, const ModelParams& p);

/// Internal energy in (rho,s) variables:
/// e1(rho,s) = (k1/e) * rho^{1+k2/k1} * exp(s/(k1*rho)).
double internal_energy_from_entropy(double rho, double s, const ModelParams& p);

/// Entropy production density (second-law source):
/// (1/theta) * (mu*|grad u|^2 + nu*rho*|u|^2 + kappa*|grad theta|^2/theta).
/// Nonnegative for every valid input.
double entropy_production_density(double theta, double grad_u_sq, double u_sq, double rho,
                                  double grad_theta_sq, const ModelParams& p);

/// Relative Helmholtz-type functional H_{delta,theta_bar} = e - theta_bar*s
/// used by the dissipation-balance monitor.
double helmholtz_functional_H(const LocalThermoPoint& pt, double theta_bar,
                              const ModelParams& p);

} // namespace constitutive
} // namespace bfl
