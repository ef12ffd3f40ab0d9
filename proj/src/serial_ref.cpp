#include "enscade/serial_ref.hpp"

#include <algorithm>
#include <cmath>

namespace enscade::serial_ref {

double naive_sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double naive_dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double integrate(const ScalarField& s) {
    return s.grid.h * s.grid.h * s.grid.h * naive_sum(s.v);
}

double integrate_weighted(const ScalarField& s, const ScalarField& w) {
    return s.grid.h * s.grid.h * s.grid.h * naive_dot(s.v, w.v);
}

ScalarField stretch_contract(const VectorField3& omega,
                             const std::array<VectorField3, 3>& grad_u) {
    ScalarField out(omega.grid);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c)
                s += omega[a].v[i] * grad_u[a][c].v[i] * omega[c].v[i];
        out.v[i] = s;
    }
    return out;
}

double ensemble_average(const ScalarField& f, const CutoffEnsemble& e) {
    const Grid3& g = f.grid;
    const double cell = g.h * g.h * g.h;
    double total = 0.0;
    for (std::size_t m = 0; m < e.members.size(); ++m) {
        const CutoffSamples& s = e.samples[m];
        double acc = 0.0;
        for (int iz = s.lo[2]; iz <= s.hi[2]; ++iz)
            for (int iy = s.lo[1]; iy <= s.hi[1]; ++iy)
                for (int ix = s.lo[0]; ix <= s.hi[0]; ++ix)
                    acc += f.v[g.index(ix, iy, iz)] * s.psi[s.local_index(ix, iy, iz)];
        total += cell * acc;
    }
    return total / (double(e.nominal_n) * e.R * e.R * e.R);
}

double morrey_snapshot(const ScalarField& omega_sq, double q, double region_radius,
                       std::span<const double> radii) {
    const Grid3& g = omega_sq.grid;
    const double cell = g.h * g.h * g.h;
    double sup = 0.0;
    for (int cz = 0; cz < g.n; ++cz)
        for (int cy = 0; cy < g.n; ++cy)
            for (int cx = 0; cx < g.n; ++cx) {
                const Point3 y = g.node(cx, cy, cz);
                if (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] >= region_radius * region_radius)
                    continue;
                for (double R : radii) {
                    double acc = 0.0;
                    for (int iz = 0; iz < g.n; ++iz)
                        for (int iy = 0; iy < g.n; ++iy)
                            for (int ix = 0; ix < g.n; ++ix) {
                                const Point3 x = g.node(ix, iy, iz);
                                if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] >=
                                    region_radius * region_radius)
                                    continue;
                                const double dx = x[0] - y[0], dy = x[1] - y[1],
                                             dz = x[2] - y[2];
                                if (dx * dx + dy * dy + dz * dz >= R * R) continue;
                                acc += omega_sq.v[g.index(ix, iy, iz)];
                            }
                    sup = std::max(sup, cell * acc / std::pow(R, 3.0 * (1.0 - 2.0 / q)));
                }
            }
    return sup;
}

}  // namespace enscade::serial_ref
