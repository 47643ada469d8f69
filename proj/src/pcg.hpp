#pragma once

// Internal Jacobi-preconditioned conjugate gradient over raw coefficient
// vectors. Shared by the Brinkman solve and the implicit diffusion steps.

#include "bfl/brinkman.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace bfl {
namespace detail {

struct PcgResult {
    int iterations = 0;
    double rel_residual = 0.0;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Solves A x = b with A SPD, M = diag(A) Jacobi preconditioning.
/// `apply` maps a coefficient vector to A times it; `inv_diag` holds 1/diag(A).
/// x serves as the initial guess when its size matches b (otherwise the
/// zero vector is used). Throws SolverFailure on stagnation past max_iter
/// and NotSymmetricPositiveDefinite on negative curvature.
template <typename Apply>
PcgResult pcg(const Apply& apply, const std::vector<double>& b,
              const std::vector<double>& inv_diag, std::vector<double>& x, double tol,
              int max_iter, const char* label) {
    const std::size_t n = b.size();

    const double bnorm = std::sqrt(dot(b, b));
    PcgResult out;
    if (bnorm == 0.0) {
        x.assign(n, 0.0); // zero forcing: x = 0 is exact
        return out;
    }

    std::vector<double> r(n), z(n), p(n), Ap(n);
    if (x.size() == n) {
        apply(x, Ap);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    } else {
        x.assign(n, 0.0);
        r = b;
    }
    {
        const double rnorm = std::sqrt(dot(r, r));
        out.rel_residual = rnorm / bnorm;
        if (out.rel_residual <= tol) return out; // guess already good enough
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);

    for (int it = 1; it <= max_iter; ++it) {
        apply(p, Ap);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0))
            throw NotSymmetricPositiveDefinite(
                std::string(label) + ": negative curvature in CG (operator not SPD)");
        const double alpha = rz / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rnorm = std::sqrt(dot(r, r));
        out.iterations = it;
        out.rel_residual = rnorm / bnorm;
        if (out.rel_residual <= tol) return out;

        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw SolverFailure(std::string(label) + ": CG did not converge", out.rel_residual);
}

} // namespace detail
} // namespace bfl
