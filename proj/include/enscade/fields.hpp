#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace enscade {

using Point3 = std::array<double, 3>;

inline double norm2(const Point3& p) {
    return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
}

/// Thrown on invalid field/grid arguments (dimension mismatch, non-finite data, ...).
class FieldError : public std::runtime_error {
  public:
    explicit FieldError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on numerical failure during time stepping (CFL violation, blow-up).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Uniform periodic box [-L/2, L/2)^3 sampled with n nodes per axis.
/// Node coordinates are x_i = -L/2 + i*h so that the analysis region around
/// the origin sits in the middle of the index space and never wraps.
struct Grid3 {
    int n = 0;
    double length = 0.0;
    double h = 0.0;

    static Grid3 make(int n_per_axis, double box_length) {
        if (n_per_axis < 8 || n_per_axis % 2 != 0)
            throw FieldError("grid size must be even and >= 8, got " + std::to_string(n_per_axis));
        if (!(box_length > 0.0))
            throw FieldError("box length must be positive");
        Grid3 g;
        g.n = n_per_axis;
        g.length = box_length;
        g.h = box_length / n_per_axis;
        return g;
    }

    std::size_t size() const { return std::size_t(n) * n * n; }

    double coord(int i) const { return -0.5 * length + h * i; }

    int wrap(int i) const {
        int r = i % n;
        return r < 0 ? r + n : r;
    }

    std::size_t index(int ix, int iy, int iz) const {
        return std::size_t(ix) + std::size_t(n) * (std::size_t(iy) + std::size_t(n) * iz);
    }

    Point3 node(int ix, int iy, int iz) const { return {coord(ix), coord(iy), coord(iz)}; }

    bool operator==(const Grid3& o) const { return n == o.n && length == o.length; }
};

/// One real value per node, x-fastest storage.
struct ScalarField {
    Grid3 grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid3& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

    double& operator()(int ix, int iy, int iz) { return v[grid.index(ix, iy, iz)]; }
    double operator()(int ix, int iy, int iz) const { return v[grid.index(ix, iy, iz)]; }
};

struct VectorField3 {
    Grid3 grid;
    std::array<ScalarField, 3> comp;

    VectorField3() = default;
    explicit VectorField3(const Grid3& g) : grid(g), comp{ScalarField(g), ScalarField(g), ScalarField(g)} {}

    ScalarField& operator[](int c) { return comp[c]; }
    const ScalarField& operator[](int c) const { return comp[c]; }
};

void require_finite(const ScalarField& f, const char* what);
void require_finite(const VectorField3& f, const char* what);
void require_same_grid(const Grid3& a, const Grid3& b, const char* what);

/// max_x |v(x)| over nodes
double max_abs(const ScalarField& f);
/// max_x sqrt(sum_c v_c^2)
double max_norm(const VectorField3& f);

}  // namespace enscade
