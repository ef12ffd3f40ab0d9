#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace enscade {

// Deterministic reductions. The index space is cut into fixed-size blocks,
// each block is summed left to right, and the block sums are combined by a
// pairwise tree in block order. The decomposition does not depend on the
// number of threads, so serial and OpenMP execution produce bit-identical
// results, and repeated runs are reproducible.

inline constexpr std::size_t kReduceBlock = 4096;

/// Pairwise tree over a mutable vector of partial sums (block order).
double pairwise_combine(std::vector<double>& partials);

/// Deterministic blocked sum of term(i) for i in [0, count). Parallel over blocks.
template <class F>
double det_sum_indexed(std::size_t count, F&& term) {
    if (count == 0) return 0.0;
    const std::size_t nblocks = (count + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partials(nblocks);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < (long long)nblocks; ++b) {
        const std::size_t lo = std::size_t(b) * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < count ? lo + kReduceBlock : count;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partials[std::size_t(b)] = s;
    }
    return pairwise_combine(partials);
}

/// Serial variant with the identical block decomposition (bitwise equal to det_sum_indexed).
template <class F>
double det_sum_indexed_serial(std::size_t count, F&& term) {
    if (count == 0) return 0.0;
    const std::size_t nblocks = (count + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partials(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < count ? lo + kReduceBlock : count;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partials[b] = s;
    }
    return pairwise_combine(partials);
}

double det_sum(std::span<const double> v);
double det_dot(std::span<const double> a, std::span<const double> b);
double det_sum_serial(std::span<const double> v);

}  // namespace enscade
