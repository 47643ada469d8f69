#pragma once

#include "bfl/grid.hpp"

namespace bfl {
namespace grid_ops {

/// Cell-centered gradient of a scalar with zero-Neumann (even) ghost
/// extension: exact for linears away from walls, O(h^2) in the interior.
VectorField gradient(const ScalarField& f);

/// Cell-centered divergence of a vector field with no-slip (odd) ghost
/// extension. Constructed as the negative adjoint of `gradient` under the
/// cell-volume inner product: <gradient(f), v> = -<f, divergence(v)> to
/// roundoff for every pair, and sum(divergence(v))*vol == 0 exactly.
ScalarField divergence(const VectorField& v);

/// Five/three-point Laplacian with zero-Neumann walls (reflected ghosts);
/// its flux form makes the cell sum vanish to roundoff.
ScalarField laplacian_neumann(const ScalarField& f);

/// Componentwise Laplacian with no-slip walls (mirror ghosts, the wall
/// lying on the cell face). Symmetric negative definite on the cell
/// inner product.
VectorField laplacian_dirichlet(const VectorField& v);

/// Conservative first-order upwind divergence of the flux f*u, with face
/// velocities averaged from cells and zero flux through the walls.
/// The result sums to zero (times volume) to roundoff.
ScalarField advect_upwind(const ScalarField& f, const VectorField& u);

/// Midpoint-rule integral: sum of values times cell volume.
double integrate(const ScalarField& f);

/// Cell-volume inner products.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);

/// Face-based per-cell density of |grad u|^2 for a no-slip vector field.
/// Summed against cell volume it reproduces -<u, laplacian_dirichlet(u)>
/// exactly (discrete integration by parts), which is what the Brinkman
/// energy identity and the dissipation sources rely on.
ScalarField dirichlet_grad_sq_density(const VectorField& u);

/// Face-based per-cell density of |grad f|^2 for a zero-Neumann scalar
/// (no wall contribution). Nonnegative by construction.
ScalarField neumann_grad_sq_density(const ScalarField& f);

double max_abs(const ScalarField& f);
double max_abs(const VectorField& v);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& v);

/// l2 norm weighted by cell volume, i.e. the discrete L2 norm.
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& v);

} // namespace grid_ops
} // namespace bfl
