#include "bfl/grid_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bfl {
namespace grid_ops {

namespace {

// Run fn(start, stride, len) over every 1D line of cells along `axis`.
template <typename Fn>
void for_each_line(const Grid& g, int axis, Fn&& fn) {
    if (axis == 0) {
        for (int j = 0; j < g.n[1]; ++j) fn(g.index(0, j), 1, g.n[0]);
    } else {
        for (int i = 0; i < g.n[0]; ++i) fn(g.index(i, 0), g.n[0], g.n[1]);
    }
}

void check_same_grid(const Grid& a, const Grid& b, const char* who) {
    if (!(a == b)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

} // namespace

VectorField gradient(const ScalarField& f) {
    const Grid& g = f.grid;
    VectorField out(g);
    for (int a = 0; a < g.dim; ++a) {
        const double inv2h = 1.0 / (2.0 * g.h(a));
        for_each_line(g, a, [&](int start, int stride, int len) {
            // even (zero-Neumann) ghost extension at both walls
            out[a][start] = (f[start + stride] - f[start]) * inv2h;
            for (int k = 1; k + 1 < len; ++k) {
                const int i = start + k * stride;
                out[a][i] = (f[i + stride] - f[i - stride]) * inv2h;
            }
            const int last = start + (len - 1) * stride;
            out[a][last] = (f[last] - f[last - stride]) * inv2h;
        });
    }
    return out;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = v.grid;
    ScalarField out(g, 0.0);
    for (int a = 0; a < g.dim; ++a) {
        const double inv2h = 1.0 / (2.0 * g.h(a));
        const auto& va = v[a];
        for_each_line(g, a, [&](int start, int stride, int len) {
            // odd (no-slip) ghost extension at both walls
            out[start] += (va[start + stride] + va[start]) * inv2h;
            for (int k = 1; k + 1 < len; ++k) {
                const int i = start + k * stride;
                out[i] += (va[i + stride] - va[i - stride]) * inv2h;
            }
            const int last = start + (len - 1) * stride;
            out[last] += (-va[last] - va[last - stride]) * inv2h;
        });
    }
    return out;
}

ScalarField laplacian_neumann(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField out(g, 0.0);
    for (int a = 0; a < g.dim; ++a) {
        const double invh2 = 1.0 / (g.h(a) * g.h(a));
        for_each_line(g, a, [&](int start, int stride, int len) {
            out[start] += (f[start + stride] - f[start]) * invh2;
            for (int k = 1; k + 1 < len; ++k) {
                const int i = start + k * stride;
                out[i] += (f[i + stride] - 2.0 * f[i] + f[i - stride]) * invh2;
            }
            const int last = start + (len - 1) * stride;
            out[last] += (f[last - stride] - f[last]) * invh2;
        });
    }
    return out;
}

VectorField laplacian_dirichlet(const VectorField& v) {
    const Grid& g = v.grid;
    VectorField out(g);
    for (int c = 0; c < g.dim; ++c) {
        const auto& vc = v[c];
        auto& oc = out[c];
        for (int a = 0; a < g.dim; ++a) {
            const double invh2 = 1.0 / (g.h(a) * g.h(a));
            for_each_line(g, a, [&](int start, int stride, int len) {
                // mirror ghosts: the wall value vanishes on the cell face
                oc[start] += (vc[start + stride] - 3.0 * vc[start]) * invh2;
                for (int k = 1; k + 1 < len; ++k) {
                    const int i = start + k * stride;
                    oc[i] += (vc[i + stride] - 2.0 * vc[i] + vc[i - stride]) * invh2;
                }
                const int last = start + (len - 1) * stride;
                oc[last] += (vc[last - stride] - 3.0 * vc[last]) * invh2;
            });
        }
    }
    return out;
}

ScalarField advect_upwind(const ScalarField& f, const VectorField& u) {
    check_same_grid(f.grid, u.grid, "advect_upwind");
    const Grid& g = f.grid;
    ScalarField out(g, 0.0);
    std::vector<double> flux;
    for (int a = 0; a < g.dim; ++a) {
        const double invh = 1.0 / g.h(a);
        const auto& ua = u[a];
        for_each_line(g, a, [&](int start, int stride, int len) {
            flux.assign(static_cast<std::size_t>(len) + 1, 0.0); // walls stay 0
            for (int k = 1; k < len; ++k) {
                const int il = start + (k - 1) * stride;
                const int ir = start + k * stride;
                const double uf = 0.5 * (ua[il] + ua[ir]);
                flux[static_cast<std::size_t>(k)] = uf > 0.0 ? uf * f[il] : uf * f[ir];
            }
            for (int k = 0; k < len; ++k) {
                const int i = start + k * stride;
                out[i] += (flux[static_cast<std::size_t>(k) + 1] -
                           flux[static_cast<std::size_t>(k)]) *
                          invh;
            }
        });
    }
    return out;
}

double integrate(const ScalarField& f) {
    double sum = 0.0;
    for (double v : f.values) sum += v;
    return sum * f.grid.cell_volume();
}

double inner(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid, "inner");
    double sum = 0.0;
    for (int i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum * a.grid.cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
    check_same_grid(a.grid, b.grid, "inner");
    double sum = 0.0;
    for (int c = 0; c < a.grid.dim; ++c)
        for (std::size_t i = 0; i < a[c].size(); ++i) sum += a[c][i] * b[c][i];
    return sum * a.grid.cell_volume();
}

ScalarField dirichlet_grad_sq_density(const VectorField& u) {
    const Grid& g = u.grid;
    ScalarField out(g, 0.0);
    for (int c = 0; c < g.dim; ++c) {
        const auto& uc = u[c];
        for (int a = 0; a < g.dim; ++a) {
            const double invh = 1.0 / g.h(a);
            for_each_line(g, a, [&](int start, int stride, int len) {
                // interior faces split evenly between the two cells
                for (int k = 1; k < len; ++k) {
                    const int il = start + (k - 1) * stride;
                    const int ir = start + k * stride;
                    const double gf = (uc[ir] - uc[il]) * invh;
                    out[il] += 0.5 * gf * gf;
                    out[ir] += 0.5 * gf * gf;
                }
                // wall faces: one-sided gradient over half a cell
                const int first = start;
                const int last = start + (len - 1) * stride;
                const double gl = 2.0 * uc[first] * invh;
                const double gr = 2.0 * uc[last] * invh;
                out[first] += 0.5 * gl * gl;
                out[last] += 0.5 * gr * gr;
            });
        }
    }
    return out;
}

ScalarField neumann_grad_sq_density(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField out(g, 0.0);
    for (int a = 0; a < g.dim; ++a) {
        const double invh = 1.0 / g.h(a);
        for_each_line(g, a, [&](int start, int stride, int len) {
            for (int k = 1; k < len; ++k) {
                const int il = start + (k - 1) * stride;
                const int ir = start + k * stride;
                const double gf = (f[ir] - f[il]) * invh;
                out[il] += 0.5 * gf * gf;
                out[ir] += 0.5 * gf * gf;
            }
        });
    }
    return out;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const VectorField& v) {
    double m = 0.0;
    for (int c = 0; c < v.grid.dim; ++c)
        for (double x : v[c]) m = std::max(m, std::abs(x));
    return m;
}

double min_value(const ScalarField& f) {
    double m = std::numeric_limits<double>::infinity();
    for (double v : f.values) m = std::min(m, v);
    return m;
}

double max_value(const ScalarField& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : f.values) m = std::max(m, v);
    return m;
}

bool all_finite(const ScalarField& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const VectorField& v) {
    for (int c = 0; c < v.grid.dim; ++c)
        for (double x : v[c])
            if (!std::isfinite(x)) return false;
    return true;
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }
double l2_norm(const VectorField& v) { return std::sqrt(inner(v, v)); }

} // namespace grid_ops
} // namespace bfl
