#pragma once

#include "bfl/grid.hpp"
#include "bfl/grid_ops.hpp"
#include "bfl/params.hpp"

#include <stdexcept>

namespace bfl {

/// Conjugate-gradient failure after max_iter sweeps; carries the last
/// relative residual.
struct SolverFailure : std::runtime_error {
    double last_residual;
    SolverFailure(const std::string& msg, double r)
        : std::runtime_error(msg), last_residual(r) {}
};

/// Negative curvature detected: the assembled operator is not SPD, which
/// signals a discretization bug rather than a tolerance problem.
struct NotSymmetricPositiveDefinite : std::logic_error {
    using std::logic_error::logic_error;
};

namespace brinkman {

/// Quasi-static momentum balance mu*Lap(u) - nu*rho*u = k2*grad(rho*theta)
/// with no-slip walls, assembled as the SPD system
///   (nu*diag(rho) - mu*Lap_dirichlet) u = -k2*grad(rho*theta)
/// and solved componentwise by Jacobi-preconditioned conjugate gradients.
struct BrinkmanSystem {
    ScalarField rho;
    ScalarField theta;
    ModelParams params;
    double solver_tol = 1e-12;
    int max_iter = 20000;
};

struct BrinkmanSolution {
    VectorField u;
    int iterations = 0;
    double rel_residual = 0.0;
};

/// Apply the Brinkman operator A = nu*diag(rho) - mu*Lap_dirichlet.
VectorField apply_operator(const BrinkmanSystem& sys, const VectorField& u);

/// Pressure-gradient right-hand side -k2*grad(rho*theta), plus the
/// optional extra forcing used by manufactured-solution runs.
VectorField right_hand_side(const BrinkmanSystem& sys,
                            const VectorField* extra_forcing = nullptr);

/// Solve A u = rhs. Zero rhs short-circuits to u = 0; a warm-start guess
/// may be supplied. Throws SolverFailure / NotSymmetricPositiveDefinite.
BrinkmanSolution solve_spd(const BrinkmanSystem& sys, const VectorField& rhs,
                           const VectorField* initial_guess = nullptr);

/// Full solve against the pressure gradient (plus optional forcing).
BrinkmanSolution solve_brinkman(const BrinkmanSystem& sys,
                                const VectorField* extra_forcing = nullptr,
                                const VectorField* initial_guess = nullptr);

/// Residual of the discrete energy identity obtained by testing the
/// momentum balance with u itself:
///   |k2<rho*theta, div u> - mu<grad u, grad u> - nu<rho u, u>| / (1 + mu<grad u, grad u>).
/// Adjoint-consistent operators make this a solver-tolerance quantity.
double energy_identity_residual(const VectorField& u, const BrinkmanSystem& sys,
                                const VectorField* extra_forcing = nullptr);

} // namespace brinkman
} // namespace bfl
