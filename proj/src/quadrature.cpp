#include "enscade/quadrature.hpp"

#include "enscade/reduce.hpp"

namespace enscade {

double integrate(const ScalarField& s) {
    const double cell = s.grid.h * s.grid.h * s.grid.h;
    return cell * det_sum(s.v);
}

double integrate_weighted(const ScalarField& s, const ScalarField& w) {
    require_same_grid(s.grid, w.grid, "integrate_weighted");
    const double cell = s.grid.h * s.grid.h * s.grid.h;
    return cell * det_dot(s.v, w.v);
}

}  // namespace enscade
