#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bfl {

/// Physical constants and regularization knobs of the model.
///
/// k1 is the heat-capacity coefficient, k2 the gas coefficient; the
/// kinetic-theory ratio k1 = (3/2) k2 can be pinned with
/// enforce_ideal_ratio. mu/nu interpolate between Stokes and Darcy
/// dissipation, kappa is the heat conductivity. eps and delta are the
/// artificial-viscosity and temperature-barrier regularizations of the
/// approximation scheme; gamma_exp is the density exponent used by the
/// regularized entropy monitors (must exceed 6).
struct ModelParams {
    double k1 = 1.5;
    double k2 = 1.0;
    double mu = 1.0;
    double nu = 1.0;
    double kappa = 1.0;
    double eps = 0.0;
    double delta = 0.0;
    double gamma_exp = 8.0;
    bool enforce_ideal_ratio = false;

    /// Collect all violated parameter constraints (empty == valid).
    std::vector<std::string> validation_errors() const;

    /// Throw std::invalid_argument listing every violated constraint.
    void validate() const;
};

} // namespace bfl
