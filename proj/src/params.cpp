#include "bfl/params.hpp"

#include <cmath>
#include <sstream>

namespace bfl {

std::vector<std::string> ModelParams::validation_errors() const {
    std::vector<std::string> errs;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };
    require(std::isfinite(k1) && k1 > 0.0, "k1 must be > 0 (heat capacity coefficient)");
    require(std::isfinite(k2) && k2 > 0.0, "k2 must be > 0 (gas coefficient)");
    require(std::isfinite(mu) && mu > 0.0,
            "mu must be > 0: without the velocity Laplacian the gradient bounds are lost "
            "(pure Darcy dissipation is outside the model)");
    require(std::isfinite(nu) && nu >= 0.0, "nu must be >= 0 (Darcy drag)");
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be > 0 (heat conductivity)");
    require(std::isfinite(eps) && eps >= 0.0, "eps must be >= 0 (artificial viscosity)");
    require(std::isfinite(delta) && delta >= 0.0, "delta must be >= 0 (temperature barrier)");
    require(std::isfinite(gamma_exp) && gamma_exp > 6.0,
            "gamma_exp must be > 6 (required by the vanishing-viscosity estimates)");
    if (enforce_ideal_ratio && std::abs(k1 - 1.5 * k2) > 1e-14 * (std::abs(k1) + std::abs(k2))) {
        std::ostringstream os;
        os << "enforce_ideal_ratio requires k1 = 1.5*k2 exactly, got k1=" << k1
           << " k2=" << k2;
        errs.push_back(os.str());
    }
    return errs;
}

void ModelParams::validate() const {
    auto errs = validation_errors();
    if (errs.empty()) return;
    std::string all;
    for (const auto& e : errs) {
        if (!all.empty()) all += "; ";
        all += e;
    }
    throw std::invalid_argument("invalid model parameters: " + all);
}

} // namespace bfl
