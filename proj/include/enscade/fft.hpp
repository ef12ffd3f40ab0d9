#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "enscade/fields.hpp"

namespace enscade {

/// Half-space (real-to-complex) spectrum of a real scalar field.
/// Coefficients are Fourier-series coefficients c_m = (1/L^3) \int f e^{-i k_m . x} dx,
/// stored with kx fastest in [0, n/2], ky/kz full range. k_m = (2 pi / L) m.
struct SpectralScalar {
    Grid3 grid;
    std::vector<std::complex<double>> c;

    SpectralScalar() = default;
    explicit SpectralScalar(const Grid3& g)
        : grid(g), c(std::size_t(g.n) * g.n * (g.n / 2 + 1)) {}

    std::size_t index(int kx, int iy, int iz) const {
        const std::size_t nxh = std::size_t(grid.n / 2 + 1);
        return std::size_t(kx) + nxh * (std::size_t(iy) + std::size_t(grid.n) * iz);
    }
};

struct SpectralVector {
    Grid3 grid;
    std::array<SpectralScalar, 3> comp;

    SpectralVector() = default;
    explicit SpectralVector(const Grid3& g)
        : grid(g), comp{SpectralScalar(g), SpectralScalar(g), SpectralScalar(g)} {}

    SpectralScalar& operator[](int c) { return comp[c]; }
    const SpectralScalar& operator[](int c) const { return comp[c]; }
};

/// Signed mode index for array position i on an n-grid (0..n/2, then negative).
inline int signed_mode(int i, int n) { return i <= n / 2 ? i : i - n; }

/// FFTW-backed transforms for one grid. Plans are created once (FFTW_ESTIMATE,
/// unaligned) so results are reproducible run to run; execution uses the
/// new-array interface and is safe from multiple threads.
class Fft {
  public:
    explicit Fft(const Grid3& g);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    const Grid3& grid() const { return grid_; }

    SpectralScalar forward(const ScalarField& f) const;
    ScalarField inverse(const SpectralScalar& s) const;
    SpectralVector forward(const VectorField3& f) const;
    VectorField3 inverse(const SpectralVector& s) const;

    /// Wavenumber component for array position i: (2 pi / L) * signed_mode(i).
    double k(int i) const { return two_pi_over_l_ * signed_mode(i, grid_.n); }
    double two_pi_over_l() const { return two_pi_over_l_; }

  private:
    Grid3 grid_;
    double two_pi_over_l_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

/// h^3 sum_x a(x) b(x) evaluated in spectral space (Parseval, half-space weights).
double spectral_dot(const SpectralScalar& a, const SpectralScalar& b);

}  // namespace enscade
