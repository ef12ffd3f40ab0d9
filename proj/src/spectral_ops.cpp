#include "enscade/spectral_ops.hpp"

#include <cmath>

namespace enscade {

namespace {

/// Derivative wavenumber: Nyquist plane zeroed (odd operator).
inline double kd(int index, int n, double two_pi_over_l) {
    const int m = signed_mode(index, n);
    if (2 * std::abs(m) == n) return 0.0;
    return two_pi_over_l * m;
}

/// Laplacian wavenumber component (keeps Nyquist).
inline double kl(int index, int n, double two_pi_over_l) {
    return two_pi_over_l * signed_mode(index, n);
}

template <class F>
void for_each_mode(const Grid3& g, F&& fn) {
    const int n = g.n;
    const int nxh = n / 2 + 1;
#pragma omp parallel for collapse(2) schedule(static)
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy) {
            const std::size_t row = std::size_t(nxh) * (std::size_t(iy) + std::size_t(n) * iz);
            for (int kx = 0; kx < nxh; ++kx) fn(row + kx, kx, iy, iz);
        }
}

}  // namespace

void curl_spectral(const Fft& fft, const SpectralVector& in, SpectralVector& out) {
    const Grid3& g = fft.grid();
    const double tpl = fft.two_pi_over_l();
    const std::complex<double> I(0.0, 1.0);
    for_each_mode(g, [&](std::size_t idx, int kx, int iy, int iz) {
        const double k1 = kd(kx, g.n, tpl);
        const double k2 = kd(iy, g.n, tpl);
        const double k3 = kd(iz, g.n, tpl);
        const auto v1 = in[0].c[idx], v2 = in[1].c[idx], v3 = in[2].c[idx];
        out[0].c[idx] = I * (k2 * v3 - k3 * v2);
        out[1].c[idx] = I * (k3 * v1 - k1 * v3);
        out[2].c[idx] = I * (k1 * v2 - k2 * v1);
    });
}

void velocity_spectral(const Fft& fft, const SpectralVector& omega, SpectralVector& u) {
    const Grid3& g = fft.grid();
    const double tpl = fft.two_pi_over_l();
    const std::complex<double> I(0.0, 1.0);
    for_each_mode(g, [&](std::size_t idx, int kx, int iy, int iz) {
        const double k1 = kd(kx, g.n, tpl);
        const double k2 = kd(iy, g.n, tpl);
        const double k3 = kd(iz, g.n, tpl);
        const double ksq = k1 * k1 + k2 * k2 + k3 * k3;
        if (ksq == 0.0) {
            u[0].c[idx] = u[1].c[idx] = u[2].c[idx] = 0.0;
            return;
        }
        const auto w1 = omega[0].c[idx], w2 = omega[1].c[idx], w3 = omega[2].c[idx];
        u[0].c[idx] = I * (k2 * w3 - k3 * w2) / ksq;
        u[1].c[idx] = I * (k3 * w1 - k1 * w3) / ksq;
        u[2].c[idx] = I * (k1 * w2 - k2 * w1) / ksq;
    });
}

void project_solenoidal(const Fft& fft, SpectralVector& v) {
    const Grid3& g = fft.grid();
    const double tpl = fft.two_pi_over_l();
    for_each_mode(g, [&](std::size_t idx, int kx, int iy, int iz) {
        const double k1 = kd(kx, g.n, tpl);
        const double k2 = kd(iy, g.n, tpl);
        const double k3 = kd(iz, g.n, tpl);
        const double ksq = k1 * k1 + k2 * k2 + k3 * k3;
        if (ksq == 0.0) {
            v[0].c[idx] = v[1].c[idx] = v[2].c[idx] = 0.0;
            return;
        }
        const std::complex<double> kv = k1 * v[0].c[idx] + k2 * v[1].c[idx] + k3 * v[2].c[idx];
        v[0].c[idx] -= k1 * kv / ksq;
        v[1].c[idx] -= k2 * kv / ksq;
        v[2].c[idx] -= k3 * kv / ksq;
    });
}

void apply_dealias_mask(SpectralScalar& s) {
    const int n = s.grid.n;
    const int cut = n / 3;
    const int nxh = n / 2 + 1;
#pragma omp parallel for collapse(2) schedule(static)
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy) {
            const bool kill_yz =
                std::abs(signed_mode(iy, n)) > cut || std::abs(signed_mode(iz, n)) > cut;
            const std::size_t row = std::size_t(nxh) * (std::size_t(iy) + std::size_t(n) * iz);
            for (int kx = 0; kx < nxh; ++kx) {
                if (kill_yz || kx > cut) s.c[row + kx] = 0.0;
            }
        }
}

void apply_dealias_mask(SpectralVector& v) {
    for (int c = 0; c < 3; ++c) apply_dealias_mask(v[c]);
}

void zero_mean(SpectralVector& v) {
    for (int c = 0; c < 3; ++c) v[c].c[0] = 0.0;
}

VectorField3 curl(const Fft& fft, const VectorField3& v) {
    require_finite(v, "curl input");
    SpectralVector s = fft.forward(v);
    SpectralVector out(fft.grid());
    curl_spectral(fft, s, out);
    return fft.inverse(out);
}

VectorField3 gradient(const Fft& fft, const ScalarField& s) { return grad3(fft, s); }

VectorField3 grad3(const Fft& fft, const ScalarField& s) {
    require_finite(s, "gradient input");
    const Grid3& g = fft.grid();
    const double tpl = fft.two_pi_over_l();
    const std::complex<double> I(0.0, 1.0);
    SpectralScalar hat = fft.forward(s);
    VectorField3 out(g);
    for (int c = 0; c < 3; ++c) {
        SpectralScalar d(g);
        for_each_mode(g, [&](std::size_t idx, int kx, int iy, int iz) {
            const int ki = c == 0 ? kx : (c == 1 ? iy : iz);
            d.c[idx] = I * kd(ki, g.n, tpl) * hat.c[idx];
        });
        out[c] = fft.inverse(d);
    }
    return out;
}

ScalarField divergence(const Fft& fft, const VectorField3& v) {
    require_finite(v, "divergence input");
    const Grid3& g = fft.grid();
    const double tpl = fft.two_pi_over_l();
    const std::complex<double> I(0.0, 1.0);
    SpectralVector s = fft.forward(v);
    SpectralScalar d(g);
    for_each_mode(g, [&](std::size_t idx, int kx, int iy, int iz) {
        d.c[idx] = I * (kd(kx, g.n, tpl) * s[0].c[idx] + kd(iy, g.n, tpl) * s[1].c[idx] +
                        kd(iz, g.n, tpl) * s[2].c[idx]);
    });
    return fft.inverse(d);
}

ScalarField laplacian(const Fft& fft, const ScalarField& s) {
    require_finite(s, "laplacian input");
    const Grid3& g = fft.grid();
    const double tpl = fft.two_pi_over_l();
    SpectralScalar hat = fft.forward(s);
    for_each_mode(g, [&](std::size_t idx, int kx, int iy, int iz) {
        const double k1 = kl(kx, g.n, tpl);
        const double k2 = kl(iy, g.n, tpl);
        const double k3 = kl(iz, g.n, tpl);
        hat.c[idx] *= -(k1 * k1 + k2 * k2 + k3 * k3);
    });
    return fft.inverse(hat);
}

VectorField3 laplacian(const Fft& fft, const VectorField3& v) {
    VectorField3 out(fft.grid());
    for (int c = 0; c < 3; ++c) out[c] = laplacian(fft, v[c]);
    return out;
}

VectorField3 velocity_from_vorticity(const Fft& fft, const VectorField3& omega, double mean_tol) {
    require_finite(omega, "velocity_from_vorticity input");
    SpectralVector s = fft.forward(omega);
    for (int c = 0; c < 3; ++c) {
        const double mean = std::abs(s[c].c[0]);
        if (mean > mean_tol)
            throw FieldError("velocity_from_vorticity: component " + std::to_string(c) +
                             " has mean " + std::to_string(mean) + " above tolerance");
    }
    SpectralVector u(fft.grid());
    velocity_spectral(fft, s, u);
    return fft.inverse(u);
}

}  // namespace enscade
