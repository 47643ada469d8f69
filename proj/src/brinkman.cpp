#include "bfl/brinkman.hpp"

#include "pcg.hpp"

#include <cmath>

namespace bfl {
namespace brinkman {

namespace {

using grid_ops::dirichlet_grad_sq_density;
using grid_ops::divergence;
using grid_ops::gradient;
using grid_ops::inner;
using grid_ops::integrate;
using grid_ops::laplacian_dirichlet;

void check_system(const BrinkmanSystem& sys) {
    sys.params.validate();
    if (!(sys.solver_tol > 0.0 && sys.solver_tol <= 1e-6))
        throw std::invalid_argument("BrinkmanSystem: solver_tol must lie in (0, 1e-6]");
    if (sys.max_iter < 1) throw std::invalid_argument("BrinkmanSystem: max_iter must be >= 1");
    if (!(sys.rho.grid == sys.theta.grid))
        throw std::invalid_argument("BrinkmanSystem: rho/theta grid mismatch");
    for (double r : sys.rho.values)
        if (!(r > 0.0)) throw std::domain_error("BrinkmanSystem: rho must be positive cellwise");
}

// 1/diag(A) for one velocity component of A = nu*diag(rho) - mu*Lap_dirichlet.
// The mirror stencil puts 3/h^2 on wall-adjacent cells, 2/h^2 inside.
std::vector<double> inverse_diagonal(const BrinkmanSystem& sys) {
    const Grid& g = sys.rho.grid;
    std::vector<double> diag(static_cast<std::size_t>(g.cells()),
                             0.0);
    for (int j = 0; j < g.n[1]; ++j) {
        for (int i = 0; i < g.n[0]; ++i) {
            double lap = 0.0;
            const double hx = g.h(0);
            lap += ((i == 0 || i == g.n[0] - 1) ? 3.0 : 2.0) / (hx * hx);
            if (g.dim == 2) {
                const double hy = g.h(1);
                lap += ((j == 0 || j == g.n[1] - 1) ? 3.0 : 2.0) / (hy * hy);
            }
            const int idx = g.index(i, j);
            diag[static_cast<std::size_t>(idx)] =
                1.0 / (sys.params.nu * sys.rho[idx] + sys.params.mu * lap);
        }
    }
    return diag;
}

} // namespace

VectorField apply_operator(const BrinkmanSystem& sys, const VectorField& u) {
    VectorField lap = laplacian_dirichlet(u);
    VectorField out(u.grid);
    for (int c = 0; c < u.grid.dim; ++c)
        for (std::size_t i = 0; i < u[c].size(); ++i)
            out[c][i] = sys.params.nu * sys.rho[static_cast<int>(i)] * u[c][i] -
                        sys.params.mu * lap[c][i];
    return out;
}

VectorField right_hand_side(const BrinkmanSystem& sys, const VectorField* extra_forcing) {
    ScalarField p_like(sys.rho.grid);
    for (int i = 0; i < sys.rho.size(); ++i) p_like[i] = sys.rho[i] * sys.theta[i];
    VectorField grad_p = gradient(p_like);
    VectorField rhs(sys.rho.grid);
    for (int c = 0; c < rhs.grid.dim; ++c)
        for (std::size_t i = 0; i < rhs[c].size(); ++i) {
            rhs[c][i] = -sys.params.k2 * grad_p[c][i];
            if (extra_forcing) rhs[c][i] += (*extra_forcing)[c][i];
        }
    return rhs;
}

BrinkmanSolution solve_spd(const BrinkmanSystem& sys, const VectorField& rhs,
                           const VectorField* initial_guess) {
    check_system(sys);
    const Grid& g = sys.rho.grid;
    const std::size_t ncell = static_cast<std::size_t>(g.cells());
    const std::size_t total = ncell * static_cast<std::size_t>(g.dim);

    std::vector<double> b(total), x;
    for (int c = 0; c < g.dim; ++c)
        for (std::size_t i = 0; i < ncell; ++i) b[c * ncell + i] = rhs[c][i];
    if (initial_guess) {
        x.resize(total);
        for (int c = 0; c < g.dim; ++c)
            for (std::size_t i = 0; i < ncell; ++i) x[c * ncell + i] = (*initial_guess)[c][i];
    }

    const std::vector<double> inv_diag_comp = inverse_diagonal(sys);
    std::vector<double> inv_diag(total);
    for (int c = 0; c < g.dim; ++c)
        for (std::size_t i = 0; i < ncell; ++i) inv_diag[c * ncell + i] = inv_diag_comp[i];

    VectorField scratch_in(g), scratch_out(g);
    auto apply = [&](const std::vector<double>& v, std::vector<double>& av) {
        for (int c = 0; c < g.dim; ++c)
            for (std::size_t i = 0; i < ncell; ++i) scratch_in[c][i] = v[c * ncell + i];
        scratch_out = apply_operator(sys, scratch_in);
        av.resize(total);
        for (int c = 0; c < g.dim; ++c)
            for (std::size_t i = 0; i < ncell; ++i) av[c * ncell + i] = scratch_out[c][i];
    };

    detail::PcgResult res =
        detail::pcg(apply, b, inv_diag, x, sys.solver_tol, sys.max_iter, "brinkman");

    BrinkmanSolution sol;
    sol.u = VectorField(g);
    for (int c = 0; c < g.dim; ++c)
        for (std::size_t i = 0; i < ncell; ++i) sol.u[c][i] = x[c * ncell + i];
    sol.iterations = res.iterations;
    sol.rel_residual = res.rel_residual;
    return sol;
}

BrinkmanSolution solve_brinkman(const BrinkmanSystem& sys, const VectorField* extra_forcing,
                                const VectorField* initial_guess) {
    return solve_spd(sys, right_hand_side(sys, extra_forcing), initial_guess);
}

double energy_identity_residual(const VectorField& u, const BrinkmanSystem& sys,
                                const VectorField* extra_forcing) {
    ScalarField p_like(sys.rho.grid);
    for (int i = 0; i < sys.rho.size(); ++i) p_like[i] = sys.rho[i] * sys.theta[i];

    const double work = sys.params.k2 * inner(p_like, divergence(u));
    const double grad_sq = integrate(dirichlet_grad_sq_density(u));

    double drag = 0.0;
    for (int c = 0; c < u.grid.dim; ++c)
        for (std::size_t i = 0; i < u[c].size(); ++i)
            drag += sys.rho[static_cast<int>(i)] * u[c][i] * u[c][i];
    drag *= sys.params.nu * u.grid.cell_volume();

    double extra = 0.0;
    if (extra_forcing) extra = inner(*extra_forcing, u);

    return std::abs(work + extra - sys.params.mu * grad_sq - drag) /
           (1.0 + sys.params.mu * grad_sq);
}

} // namespace brinkman
} // namespace bfl
