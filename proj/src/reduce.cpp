#include "enscade/reduce.hpp"

namespace enscade {

double pairwise_combine(std::vector<double>& partials) {
    std::size_t len = partials.size();
    while (len > 1) {
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < half; ++i) partials[i] = partials[2 * i] + partials[2 * i + 1];
        if (len % 2 == 1) {
            partials[half] = partials[len - 1];
            len = half + 1;
        } else {
            len = half;
        }
    }
    return partials.empty() ? 0.0 : partials[0];
}

double det_sum(std::span<const double> v) {
    return det_sum_indexed(v.size(), [&](std::size_t i) { return v[i]; });
}

double det_dot(std::span<const double> a, std::span<const double> b) {
    return det_sum_indexed(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double det_sum_serial(std::span<const double> v) {
    return det_sum_indexed_serial(v.size(), [&](std::size_t i) { return v[i]; });
}

}  // namespace enscade
