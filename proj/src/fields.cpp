#include "enscade/fields.hpp"

#include <cmath>

namespace enscade {

void require_finite(const ScalarField& f, const char* what) {
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        if (!std::isfinite(f.v[i]))
            throw FieldError(std::string(what) + ": non-finite value at flat index " +
                             std::to_string(i));
    }
}

void require_finite(const VectorField3& f, const char* what) {
    for (int c = 0; c < 3; ++c) require_finite(f[c], what);
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* what) {
    if (!(a == b))
        throw FieldError(std::string(what) + ": grid mismatch (" + std::to_string(a.n) + " vs " +
                         std::to_string(b.n) + ")");
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (long long i = 0; i < (long long)f.v.size(); ++i) {
        const double a = std::fabs(f.v[i]);
        if (a > m) m = a;
    }
    return m;
}

double max_norm(const VectorField3& f) {
    double m = 0.0;
    const std::size_t count = f.grid.size();
#pragma omp parallel for schedule(static) reduction(max : m)
    for (long long i = 0; i < (long long)count; ++i) {
        const double a = f[0].v[i] * f[0].v[i] + f[1].v[i] * f[1].v[i] + f[2].v[i] * f[2].v[i];
        if (a > m) m = a;
    }
    return std::sqrt(m);
}

}  // namespace enscade
