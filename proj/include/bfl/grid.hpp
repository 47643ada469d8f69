#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bfl {

/// Uniform cell-centered grid on an axis-aligned interval (dim=1) or
/// rectangle (dim=2). Cell centers sit at (i+1/2)h; domain boundaries
/// coincide with cell faces.
struct Grid {
    int dim = 1;
    std::array<int, 2> n = {0, 1};
    std::array<double, 2> length = {0.0, 0.0};

    Grid() = default;
    Grid(int nx, double Lx) : dim(1), n{nx, 1}, length{Lx, 0.0} { check(); }
    Grid(int nx, int ny, double Lx, double Ly) : dim(2), n{nx, ny}, length{Lx, Ly} {
        check();
    }

    double h(int axis) const { return length[axis] / n[axis]; }
    int cells() const { return n[0] * n[1]; }
    double cell_volume() const { return dim == 1 ? h(0) : h(0) * h(1); }
    double domain_volume() const { return dim == 1 ? length[0] : length[0] * length[1]; }

    /// Center coordinate of cell index i along an axis.
    double center(int axis, int i) const { return (i + 0.5) * h(axis); }

    int index(int i, int j = 0) const { return i + n[0] * j; }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && length == o.length;
    }

private:
    void check() const {
        for (int a = 0; a < dim; ++a) {
            if (n[a] < 4) throw std::invalid_argument("Grid: need at least 4 cells per axis");
            if (!(length[a] > 0.0)) throw std::invalid_argument("Grid: lengths must be positive");
        }
    }
};

/// One real value per cell.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.cells()), fill) {}

    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(values.size()); }
};

/// dim real values per cell, stored one component array at a time.
struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 2> comp;

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g) {
        for (int c = 0; c < g.dim; ++c)
            comp[c].assign(static_cast<std::size_t>(g.cells()), 0.0);
    }

    std::vector<double>& operator[](int c) { return comp[c]; }
    const std::vector<double>& operator[](int c) const { return comp[c]; }
};

} // namespace bfl
