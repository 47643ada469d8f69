#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bfl/grid_ops.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace bfl;
using namespace bfl::grid_ops;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScalarField sample(const Grid& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i)
            out[g.index(i, j)] = f(g.center(0, i), g.dim == 2 ? g.center(1, j) : 0.0);
    return out;
}

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScalarField out(g);
    for (auto& v : out.values) v = d(rng);
    return out;
}

VectorField random_vector(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    VectorField out(g);
    for (int c = 0; c < g.dim; ++c)
        for (auto& v : out[c]) v = d(rng);
    return out;
}

} // namespace

TEST_CASE("gradient basics") {
    Grid g(64, 1.0);
    CHECK(max_abs(gradient(sample(g, [](double, double) { return 3.7; }))) < 1e-14);

    // linear field: exact in the interior
    VectorField gx = gradient(sample(g, [](double x, double) { return x; }));
    for (int i = 1; i + 1 < g.n[0]; ++i) CHECK(gx[0][i] == doctest::Approx(1.0).epsilon(1e-12));

    // smooth field: O(h^2) interior convergence
    auto interior_err = [](int n) {
        Grid gg(n, 2 * kPi);
        VectorField gr = gradient(sample(gg, [](double x, double) { return std::sin(x); }));
        double worst = 0.0;
        for (int i = 1; i + 1 < n; ++i)
            worst = std::max(worst, std::abs(gr[0][i] - std::cos(gg.center(0, i))));
        return worst;
    };
    const double e64 = interior_err(64);
    const double e128 = interior_err(128);
    CHECK(e64 / e128 > 3.5);
}

TEST_CASE("divergence is the exact negative adjoint of gradient") {
    std::mt19937_64 rng(5);
    for (int dim = 1; dim <= 2; ++dim) {
        Grid g = dim == 1 ? Grid(32, 1.7) : Grid(16, 12, 1.7, 0.9);
        for (int trial = 0; trial < 20; ++trial) {
            ScalarField f = random_field(g, rng);
            VectorField v = random_vector(g, rng);
            const double lhs = inner(gradient(f), v);
            const double rhs = -inner(f, divergence(v));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1.0));
        }
        // divergence telescopes to zero total
        VectorField v = random_vector(g, rng);
        CHECK(std::abs(integrate(divergence(v))) < 1e-13 * g.cells());
    }
}

TEST_CASE("divergence consistency") {
    Grid g(64, 2 * kPi);
    VectorField v(g);
    for (int i = 0; i < g.n[0]; ++i) v[0][i] = std::sin(g.center(0, i));
    ScalarField dv = divergence(v);
    auto err = [&](int n) {
        Grid gg(n, 2 * kPi);
        VectorField vv(gg);
        for (int i = 0; i < n; ++i) vv[0][i] = std::sin(gg.center(0, i));
        ScalarField d = divergence(vv);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(d[i] - std::cos(gg.center(0, i))));
        return worst;
    };
    CHECK(err(64) / err(128) > 3.5);

    // constant vector field: zero interior divergence
    VectorField c(g);
    for (int i = 0; i < g.n[0]; ++i) c[0][i] = 2.5;
    ScalarField dc = divergence(c);
    for (int i = 1; i + 1 < g.n[0]; ++i) CHECK(std::abs(dc[i]) < 1e-14);
}

TEST_CASE("Neumann Laplacian conserves and converges") {
    std::mt19937_64 rng(9);
    Grid g(64, 1.0);
    CHECK(max_abs(laplacian_neumann(sample(g, [](double, double) { return 1.3; }))) < 1e-12);

    ScalarField f = random_field(g, rng);
    CHECK(std::abs(integrate(laplacian_neumann(f))) < 1e-12 * l2_norm(f) * g.cells());

    Grid g2(12, 20, 1.0, 3.0);
    ScalarField f2 = random_field(g2, rng);
    CHECK(std::abs(integrate(laplacian_neumann(f2))) < 1e-11 * l2_norm(f2) * g2.cells());
    VectorField u2 = random_vector(g2, rng);
    CHECK(std::abs(integrate(advect_upwind(f2, u2))) < 1e-12 * g2.cells());

    auto err = [](int n) {
        Grid gg(n, 1.0);
        ScalarField f(gg);
        for (int i = 0; i < n; ++i) f[i] = std::cos(kPi * gg.center(0, i));
        ScalarField lap = laplacian_neumann(f);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst,
                             std::abs(lap[i] + kPi * kPi * std::cos(kPi * gg.center(0, i))));
        return worst;
    };
    CHECK(err(64) / err(128) > 3.5);
}

TEST_CASE("Dirichlet Laplacian symmetry and eigenfunction") {
    std::mt19937_64 rng(13);
    for (int dim = 1; dim <= 2; ++dim) {
        Grid g = dim == 1 ? Grid(32, 1.0) : Grid(12, 10, 1.0, 2.0);
        VectorField z(g);
        CHECK(max_abs(laplacian_dirichlet(z)) == 0.0);
        for (int trial = 0; trial < 10; ++trial) {
            VectorField v = random_vector(g, rng);
            VectorField w = random_vector(g, rng);
            const double a = inner(laplacian_dirichlet(v), w);
            const double b = inner(v, laplacian_dirichlet(w));
            CHECK(std::abs(a - b) <= 1e-11 * (std::abs(a) + 1.0));
        }
    }

    // sin(pi x / L) is odd across both walls, so the mirror stencil is exact
    auto err = [](int n) {
        Grid gg(n, 1.0);
        VectorField v(gg);
        for (int i = 0; i < n; ++i) v[0][i] = std::sin(kPi * gg.center(0, i));
        VectorField lap = laplacian_dirichlet(v);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(lap[0][i] + kPi * kPi * v[0][i]));
        return worst;
    };
    CHECK(err(64) / err(128) > 3.5);
}

TEST_CASE("Dirichlet grad-square density matches the quadratic form exactly") {
    std::mt19937_64 rng(17);
    for (int dim = 1; dim <= 2; ++dim) {
        Grid g = dim == 1 ? Grid(16, 1.3) : Grid(8, 12, 1.3, 0.7);
        for (int trial = 0; trial < 10; ++trial) {
            VectorField v = random_vector(g, rng);
            const double form = -inner(v, laplacian_dirichlet(v));
            const double density = integrate(dirichlet_grad_sq_density(v));
            CHECK(form == doctest::Approx(density).epsilon(1e-12));
            CHECK(form >= 0.0);
        }
    }
}

TEST_CASE("upwind advection conserves and matches the hand oracle") {
    // u = 0 leaves nothing to transport
    Grid g(64, 2 * kPi);
    std::mt19937_64 rng(21);
    ScalarField f = random_field(g, rng);
    VectorField zero(g);
    CHECK(max_abs(advect_upwind(f, zero)) == 0.0);

    // total flux telescopes to zero with no-slip walls
    VectorField u = random_vector(g, rng);
    CHECK(std::abs(integrate(advect_upwind(f, u))) <
          1e-12 * (max_abs(f) + 1) * (max_abs(u) + 1) * g.cells());

    // 4-cell hand oracle (also checked against the brute-force flux helper)
    Grid g4(4, 4.0); // h = 1
    ScalarField f4(g4);
    VectorField u4(g4);
    f4.values = {1.0, 2.0, 3.0, 4.0};
    u4[0] = {0.0, 1.0, 0.0, 0.0};
    ScalarField adv = advect_upwind(f4, u4);
    // faces: wall, .5 -> flux .5*1, .5 -> flux .5*2, 0, wall
    CHECK(adv[0] == doctest::Approx(0.5));
    CHECK(adv[1] == doctest::Approx(0.5));
    CHECK(adv[2] == doctest::Approx(-1.0));
    CHECK(adv[3] == doctest::Approx(0.0));
    auto brute = oracles::upwind_divergence_1d(f4.values, u4[0], 1.0);
    for (int i = 0; i < 4; ++i) CHECK(adv[i] == doctest::Approx(brute[i]).epsilon(1e-14));
}

TEST_CASE("integrate is the midpoint rule") {
    Grid g2(8, 6, 2.0, 3.0);
    CHECK(integrate(sample(g2, [](double, double) { return 1.0; })) == doctest::Approx(6.0));
    CHECK(integrate(ScalarField(g2, 0.0)) == 0.0);

    Grid g(128, 1.0);
    // midpoint rule is exact for linears
    CHECK(integrate(sample(g, [](double x, double) { return x; })) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("polynomial exactness of the second-order operators") {
    Grid g(32, 3.0);
    // quadratic: Laplacian is exact in the interior
    ScalarField q = sample(g, [](double x, double) { return x * x; });
    ScalarField lap = laplacian_neumann(q);
    for (int i = 1; i + 1 < g.n[0]; ++i) CHECK(lap[i] == doctest::Approx(2.0).epsilon(1e-10));

    VectorField vq(g);
    for (int i = 0; i < g.n[0]; ++i) vq[0][i] = g.center(0, i) * g.center(0, i);
    VectorField lapd = laplacian_dirichlet(vq);
    for (int i = 1; i + 1 < g.n[0]; ++i)
        CHECK(lapd[0][i] == doctest::Approx(2.0).epsilon(1e-10));
}
