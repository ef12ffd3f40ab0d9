#include "enscade/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "enscade/reduce.hpp"

namespace enscade {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Fft::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }
};

Fft::Fft(const Grid3& g) : grid_(g), two_pi_over_l_(2.0 * M_PI / g.length), plans_(new Plans) {
    const int n = g.n;
    std::vector<double> real_buf(g.size());
    std::vector<std::complex<double>> cplx_buf(std::size_t(n) * n * (n / 2 + 1));
    // Dims are (z, y, x) row-major so the contiguous (last) axis is x.
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->r2c = fftw_plan_dft_r2c_3d(n, n, n, real_buf.data(),
                                       reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->c2r = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                       real_buf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->r2c || !plans_->c2r) throw FieldError("FFTW planning failed");
}

Fft::~Fft() = default;

SpectralScalar Fft::forward(const ScalarField& f) const {
    require_same_grid(f.grid, grid_, "fft forward");
    std::vector<double> in(f.v);
    SpectralScalar out(grid_);
    fftw_execute_dft_r2c(plans_->r2c, in.data(), reinterpret_cast<fftw_complex*>(out.c.data()));
    const double scale = 1.0 / double(grid_.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)out.c.size(); ++i) out.c[i] *= scale;
    return out;
}

ScalarField Fft::inverse(const SpectralScalar& s) const {
    require_same_grid(s.grid, grid_, "fft inverse");
    std::vector<std::complex<double>> in(s.c);
    ScalarField out(grid_);
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()), out.v.data());
    return out;
}

SpectralVector Fft::forward(const VectorField3& f) const {
    SpectralVector out(grid_);
    for (int c = 0; c < 3; ++c) out[c] = forward(f[c]);
    return out;
}

VectorField3 Fft::inverse(const SpectralVector& s) const {
    VectorField3 out(grid_);
    for (int c = 0; c < 3; ++c) out[c] = inverse(s[c]);
    return out;
}

double spectral_dot(const SpectralScalar& a, const SpectralScalar& b) {
    require_same_grid(a.grid, b.grid, "spectral_dot");
    const int n = a.grid.n;
    const int nxh = n / 2 + 1;
    const double volume = a.grid.length * a.grid.length * a.grid.length;
    const std::size_t count = a.c.size();
    const double s = det_sum_indexed(count, [&](std::size_t idx) {
        const int kx = int(idx % nxh);
        const double w = (kx == 0 || kx == n / 2) ? 1.0 : 2.0;
        const std::complex<double> p = a.c[idx] * std::conj(b.c[idx]);
        return w * p.real();
    });
    return volume * s;
}

}  // namespace enscade
