#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bfl/constitutive.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace bfl;
using namespace bfl::constitutive;

namespace {

ModelParams ideal_params() {
    ModelParams p;
    p.k1 = 1.5;
    p.k2 = 1.0;
    p.enforce_ideal_ratio = true;
    return p;
}

ModelParams unit_params() {
    ModelParams p;
    p.k1 = 1.0;
    p.k2 = 1.0;
    return p;
}

constexpr double kE = 2.718281828459045;

} // namespace

TEST_CASE("free energy closed form") {
    ModelParams p = ideal_params();
    CHECK(free_energy({1.0, 1.0}, p) == doctest::Approx(0.0).epsilon(1e-14));

    ModelParams k2only = unit_params();
    CHECK(free_energy({kE, 1.0}, k2only) == doctest::Approx(kE).epsilon(1e-14));

    CHECK(free_energy({1.0, kE}, p) == doctest::Approx(-1.5 * kE).epsilon(1e-14));
}

TEST_CASE("free energy domain errors") {
    ModelParams p = ideal_params();
    CHECK_THROWS_AS(free_energy({0.0, 1.0}, p), std::domain_error);
    CHECK_THROWS_AS(free_energy({1.0, -2.0}, p), std::domain_error);
    CHECK_THROWS_AS(entropy({-1.0, 1.0}, p), std::domain_error);
    CHECK_THROWS_AS(pressure({1.0, 0.0}, p), std::domain_error);
    CHECK_THROWS_AS(entropy_production_density(0.0, 1, 1, 1, 1, p), std::domain_error);
}

TEST_CASE("entropy values and finite-difference cross-check") {
    ModelParams p = ideal_params();
    CHECK(entropy({1.0, 1.0}, p) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(entropy({kE, 1.0}, p) == doctest::Approx(0.5 * kE).epsilon(1e-14));

    // s must equal -d(psi)/d(theta): central-difference oracle
    const double rho = 1.3, theta = 0.7, h = 1e-5;
    const double fd = -(free_energy({rho, theta + h}, p) - free_energy({rho, theta - h}, p)) /
                      (2 * h);
    CHECK(std::abs(entropy({rho, theta}, p) - fd) < 50 * h * h);
}

TEST_CASE("internal energy and Legendre identity") {
    ModelParams p = ideal_params();
    CHECK(internal_energy({1.0, 1.0}, p) == doctest::Approx(1.5));
    CHECK(internal_energy({2.0, 3.0}, p) == doctest::Approx(9.0));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> span(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
        const LocalThermoPoint pt{span(rng), span(rng)};
        const double e = internal_energy(pt, p);
        const double via_psi = free_energy(pt, p) + entropy(pt, p) * pt.theta;
        CHECK(std::abs(e - via_psi) <= 1e-12 * std::abs(e));
    }
}

TEST_CASE("pressure law and ideal ratio") {
    ModelParams p = ideal_params();
    CHECK(pressure({1.0, 1.0}, p) == doctest::Approx(1.0));
    CHECK(pressure({2.0, 3.0}, p) == doctest::Approx(6.0));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> span(0.05, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const LocalThermoPoint pt{span(rng), span(rng)};
        CHECK(internal_energy(pt, p) ==
              doctest::Approx(1.5 * pressure(pt, p)).epsilon(1e-13));
    }
}

TEST_CASE("temperature from entropy") {
    ModelParams p = ideal_params();
    CHECK(temperature_from_entropy(1.0, p.k1, p) == doctest::Approx(1.0).epsilon(1e-14));

    // roundtrip at (2,5)
    const double s = entropy({2.0, 5.0}, p);
    CHECK(temperature_from_entropy(2.0, s, p) == doctest::Approx(5.0).epsilon(1e-12));

    // direct high-precision evaluation at rho=2, s=0, k1=k2=1
    ModelParams q = unit_params();
    CHECK(temperature_from_entropy(2.0, 0.0, q) ==
          doctest::Approx(0.7357588823428847).epsilon(1e-12));

    CHECK_THROWS_AS(temperature_from_entropy(1e-3, 1e6, q), std::overflow_error);
    CHECK_THROWS_AS(temperature_from_entropy(0.0, 1.0, q), std::domain_error);
}

TEST_CASE("internal energy from entropy and its partials") {
    ModelParams p = ideal_params();
    CHECK(internal_energy_from_entropy(1.0, p.k1, p) == doctest::Approx(1.5).epsilon(1e-13));

    // de1/ds = theta (Legendre dual variable)
    const double rho = 1.2, s = 0.4, h = 1e-5;
    const double de_ds = (internal_energy_from_entropy(rho, s + h, p) -
                          internal_energy_from_entropy(rho, s - h, p)) /
                         (2 * h);
    CHECK(std::abs(de_ds - temperature_from_entropy(rho, s, p)) < 100 * h * h);

    // de1/drho = psi_rho at the matched temperature
    const double de_dr = (internal_energy_from_entropy(rho + h, s, p) -
                          internal_energy_from_entropy(rho - h, s, p)) /
                         (2 * h);
    const double theta = temperature_from_entropy(rho, s, p);
    CHECK(std::abs(de_dr - free_energy_rho({rho, theta}, p)) < 1000 * h * h);
}

TEST_CASE("entropy production density") {
    ModelParams p = ideal_params();
    CHECK(entropy_production_density(1.0, 0, 0, 1.0, 0, p) == 0.0);

    ModelParams mu_only = unit_params();
    mu_only.nu = 0.0;
    mu_only.kappa = 1.0;
    // kappa contributes only through grad theta, zero here
    CHECK(entropy_production_density(2.0, 4.0, 0.0, 1.0, 0.0, mu_only) ==
          doctest::Approx(2.0));

    ModelParams nu_only = unit_params();
    nu_only.nu = 1.0; // |grad u|^2 = 0 removes the mu term
    CHECK(entropy_production_density(1.0, 0.0, 3.0, 2.0, 0.0, nu_only) ==
          doctest::Approx(6.0));

    // second law: nonnegative on random valid inputs
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0.0, 50.0);
    std::uniform_real_distribution<double> q(0.05, 20.0);
    for (int i = 0; i < 2000; ++i)
        CHECK(entropy_production_density(q(rng), pos(rng), pos(rng), q(rng), pos(rng), p) >=
              0.0);
}

TEST_CASE("relative Helmholtz functional") {
    ModelParams q = unit_params();
    CHECK(helmholtz_functional_H({1.0, 1.0}, 1.0, q) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(helmholtz_functional_H({1.0, kE}, 1.0, q) ==
          doctest::Approx(kE - 2.0).epsilon(1e-14));

    // theta -> H(rho=1, theta; theta_bar=1) is minimized at theta = 1
    const double argmin = oracles::golden_section_min(
        [&](double th) { return helmholtz_functional_H({1.0, th}, 1.0, q); }, 0.1, 5.0);
    CHECK(argmin == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("property sweep: algebraic identities at 1e4 points") {
    ModelParams p = ideal_params();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> span(0.05, 20.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const LocalThermoPoint pt{span(rng), span(rng)};
        const double psi = free_energy(pt, p);
        const double s = entropy(pt, p);
        const double e = internal_energy(pt, p);
        const double pr = pressure(pt, p);
        worst = std::max(worst, std::abs(e - (psi + s * pt.theta)) / std::abs(e));
        worst = std::max(worst,
                         std::abs(pr - (pt.rho * free_energy_rho(pt, p) - psi)) / pr);
        worst = std::max(worst, std::abs(e - 1.5 * pr) / e);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("property sweep: entropy monotone in theta, roundtrips") {
    ModelParams p = ideal_params();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> span(0.05, 20.0);
    for (int i = 0; i < 2000; ++i) {
        const double rho = span(rng);
        double t1 = span(rng), t2 = span(rng);
        if (t1 > t2) std::swap(t1, t2);
        if (t2 - t1 < 1e-9) continue;
        CHECK(entropy({rho, t2}, p) > entropy({rho, t1}, p));

        const double s = entropy({rho, t1}, p);
        CHECK(temperature_from_entropy(rho, s, p) ==
              doctest::Approx(t1).epsilon(1e-10));
        const double s2 = entropy({rho, temperature_from_entropy(rho, s, p)}, p);
        CHECK(s2 == doctest::Approx(s).epsilon(1e-10));
    }
}

TEST_CASE("specific-variable Gibbs relation under central differences") {
    ModelParams p = ideal_params();
    auto e_spec = [&](double r, double t) { return internal_energy({r, t}, p) / r; };
    auto s_spec = [&](double r, double t) { return entropy({r, t}, p) / r; };
    for (double rho : {0.4, 1.0, 3.0}) {
        for (double theta : {0.5, 1.0, 2.5}) {
            const double h = 1e-5;
            const double ds_dt = (s_spec(rho, theta + h) - s_spec(rho, theta - h)) / (2 * h);
            const double de_dt = (e_spec(rho, theta + h) - e_spec(rho, theta - h)) / (2 * h);
            CHECK(std::abs(theta * ds_dt - de_dt) < 1e-7);

            const double ds_dr = (s_spec(rho + h, theta) - s_spec(rho - h, theta)) / (2 * h);
            const double de_dr = (e_spec(rho + h, theta) - e_spec(rho - h, theta)) / (2 * h);
            const double press = pressure({rho, theta}, p);
            CHECK(std::abs(theta * ds_dr - (de_dr - press / (rho * rho))) < 1e-7);
        }
    }
}

TEST_CASE("parameter validation") {
    ModelParams p;
    p.mu = 0.0;
    auto errs = p.validation_errors();
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("mu") != std::string::npos);

    p = ModelParams{};
    p.gamma_exp = 4.0;
    errs = p.validation_errors();
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("gamma_exp") != std::string::npos);

    p = ModelParams{};
    p.k1 = 1.0;
    p.k2 = 1.0;
    p.enforce_ideal_ratio = true;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
