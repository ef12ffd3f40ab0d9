// Serial reference vs OpenMP kernels on representative workloads.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "enscade/diagnostics.hpp"
#include "enscade/quadrature.hpp"
#include "enscade/reduce.hpp"
#include "enscade/serial_ref.hpp"
#include "enscade/solver.hpp"

using namespace enscade;

namespace {

std::vector<double> make_data(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = (double(rng() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
    return v;
}

ScalarField random_field(const Grid3& g, std::uint64_t seed) {
    ScalarField f(g);
    std::mt19937_64 rng(seed);
    for (double& x : f.v) x = (double(rng() >> 11) + 0.5) * 0x1.0p-53;
    return f;
}

struct Setup {
    Grid3 grid = Grid3::make(48, 2.0 * M_PI);
    SpatialCutoff psi0 = SpatialCutoff::make({0, 0, 0}, 0.9, auto_c0(0.75, RampKind::blended),
                                             0.75, RampKind::blended);
    CutoffEnsemble ensemble = build_cover_ensemble(psi0, 0.45, 64, 8, grid);
    ScalarField density = random_field(grid, 7);
    VectorField3 omega;
    Fft fft{grid};
    std::array<VectorField3, 3> grad_u;

    Setup() {
        const VectorField3 u = initial_random_bandlimited(grid, 11, 2, 6, 0.5);
        omega = curl(fft, u);
        for (int a = 0; a < 3; ++a) grad_u[a] = grad3(fft, u[a]);
    }
};

Setup& setup() {
    static Setup s;
    return s;
}

}  // namespace

static void BM_sum_serial(benchmark::State& state) {
    const auto data = make_data(1 << 22, 3);
    for (auto _ : state) benchmark::DoNotOptimize(serial_ref::naive_sum(data));
}
BENCHMARK(BM_sum_serial);

static void BM_sum_blocked_omp(benchmark::State& state) {
    const auto data = make_data(1 << 22, 3);
    for (auto _ : state) benchmark::DoNotOptimize(det_sum(data));
}
BENCHMARK(BM_sum_blocked_omp);

static void BM_integrate_serial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(serial_ref::integrate(setup().density));
}
BENCHMARK(BM_integrate_serial);

static void BM_integrate_omp(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(integrate(setup().density));
}
BENCHMARK(BM_integrate_omp);

static void BM_stretch_serial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(serial_ref::stretch_contract(setup().omega, setup().grad_u));
}
BENCHMARK(BM_stretch_serial);

static void BM_stretch_omp(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(vortex_stretch_spectral(setup().omega, setup().fft));
}
BENCHMARK(BM_stretch_omp);

static void BM_ensemble_average_serial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(serial_ref::ensemble_average(setup().density, setup().ensemble));
}
BENCHMARK(BM_ensemble_average_serial);

static void BM_ensemble_average_omp(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(ensemble_average(setup().density, setup().ensemble));
}
BENCHMARK(BM_ensemble_average_omp);

static void BM_stretch_kernel_probe(benchmark::State& state) {
    const Grid3 g = Grid3::make(24, 2.0 * M_PI);
    Fft fft(g);
    const VectorField3 u = initial_taylor_green(g, 1.0);
    VectorField3 w = curl(fft, u);
    // localize so the free-space kernel applies
    const SpatialCutoff bump =
        SpatialCutoff::make({0, 0, 0}, 0.7, auto_c0(0.75, RampKind::blended), 0.75);
    for (int c = 0; c < 3; ++c)
        for (int iz = 0; iz < g.n; ++iz)
            for (int iy = 0; iy < g.n; ++iy)
                for (int ix = 0; ix < g.n; ++ix)
                    w[c](ix, iy, iz) *= bump.value(g.node(ix, iy, iz));
    for (auto _ : state)
        benchmark::DoNotOptimize(vortex_stretch_kernel(w, {0.2, 0.1, 0.0}, 3.0 * g.h));
}
BENCHMARK(BM_stretch_kernel_probe);

BENCHMARK_MAIN();
