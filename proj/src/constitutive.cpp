#include "bfl/constitutive.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bfl {
namespace constitutive {

namespace {

void check_point(const LocalThermoPoint& pt, const char* who) {
    if (!(pt.rho > 0.0) || !(pt.theta > 0.0) || !std::isfinite(pt.rho) ||
        !std::isfinite(pt.theta)) {
        std::ostringstream os;
        os << who << ": state outside the positive quadrant (rho=" << pt.rho
           << ", theta=" << pt.theta << ")";
        throw std::domain_error(os.str());
    }
}

void check_rho(double rho, const char* who) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        std::ostringstream os;
        os << who << ": rho must be positive, got " << rho;
        throw std::domain_error(os.str());
    }
}

} // namespace

double free_energy(const LocalThermoPoint& pt, const ModelParams& p) {
    check_point(pt, "free_energy");
    return p.k2 * pt.theta * pt.rho * std::log(pt.rho) -
           p.k1 * pt.rho * pt.theta * std::log(pt.theta);
}

double entropy(const LocalThermoPoint& pt, const ModelParams& p) {
    check_point(pt, "entropy");
    return -pt.rho * (p.k2 * std::log(pt.rho) - p.k1 * (std::log(pt.theta) + 1.0));
}

double internal_energy(const LocalThermoPoint& pt, const ModelParams& p) {
    check_point(pt, "internal_energy");
    return p.k1 * pt.rho * pt.theta;
}

double pressure(const LocalThermoPoint& pt, const ModelParams& p) {
    check_point(pt, "pressure");
    return p.k2 * pt.rho * pt.theta;
}

double free_energy_rho(const LocalThermoPoint& pt, const ModelParams& p) {
    check_point(pt, "free_energy_rho");
    return p.k2 * pt.theta * (std::log(pt.rho) + 1.0) - p.k1 * pt.theta * std::log(pt.theta);
}

double free_energy_theta(const LocalThermoPoint& pt, const ModelParams& p) {
    check_point(pt, "free_energy_theta");
    return p.k2 * pt.rho * std::log(pt.rho) - p.k1 * pt.rho * (std::log(pt.theta) + 1.0);
}

double temperature_from_entropy(double rho, double s, const ModelParams& p) {
    check_rho(rho, "temperature_from_entropy");
    // theta = exp(-1 + (k2/k1) log rho + s/(k1 rho)); evaluate in log space
    // so the overflow test sees the combined exponent.
    const double expo = -1.0 + (p.k2 / p.k1) * std::log(rho) + s / (p.k1 * rho);
    if (expo > 700.0) {
        std::ostringstream os;
        os << "temperature_from_entropy: exponent " << expo
           << " exceeds the representable range (rho=" << rho << ", s=" << s << ")";
        throw std::overflow_error(os.str());
    }
    return std::exp(expo);
}

double internal_energy_from_entropy(double rho, double s, const ModelParams& p) {
    check_rho(rho, "internal_energy_from_entropy");
    return p.k1 * rho * temperature_from_entropy(rho, s, p);
}

double entropy_production_density(double theta, double grad_u_sq, double u_sq, double rho,
                                  double grad_theta_sq, const ModelParams& p) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::domain_error("entropy_production_density: theta must be positive");
    if (grad_u_sq < 0.0 || u_sq < 0.0 || grad_theta_sq < 0.0 || !(rho > 0.0))
        throw std::domain_error("entropy_production_density: invalid magnitudes");
    return (p.mu * grad_u_sq + p.nu * rho * u_sq + p.kappa * grad_theta_sq / theta) / theta;
}

double helmholtz_functional_H(const LocalThermoPoint& pt, double theta_bar,
                              const ModelParams& p) {
    check_point(pt, "helmholtz_functional_H");
    if (!(theta_bar > 0.0))
        throw std::domain_error("helmholtz_functional_H: theta_bar must be positive");
    return internal_energy(pt, p) - theta_bar * entropy(pt, p);
}

} // namespace constitutive
} // namespace bfl
