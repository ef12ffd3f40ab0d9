#pragma once

#include "enscade/fft.hpp"
#include "enscade/fields.hpp"

namespace enscade {

// Spectral differential operators on the periodic box. Derivatives are exact
// for the trigonometric interpolant; the Nyquist plane is zeroed in first
// derivatives (odd operator has no consistent sign there). The Laplacian
// keeps all modes.

VectorField3 curl(const Fft& fft, const VectorField3& v);
VectorField3 gradient(const Fft& fft, const ScalarField& s);
ScalarField divergence(const Fft& fft, const VectorField3& v);
ScalarField laplacian(const Fft& fft, const ScalarField& s);
VectorField3 laplacian(const Fft& fft, const VectorField3& v);

/// Biot-Savart inversion on the torus: u = curl (-Laplace)^{-1} omega with the
/// zero-mean gauge. Rejects omega whose component means exceed mean_tol.
VectorField3 velocity_from_vorticity(const Fft& fft, const VectorField3& omega,
                                     double mean_tol = 1e-12);

/// All three partial derivatives of s as a vector field (one forward transform).
VectorField3 grad3(const Fft& fft, const ScalarField& s);

// In-place spectral helpers used by the solver and diagnostics.
void curl_spectral(const Fft& fft, const SpectralVector& in, SpectralVector& out);
void velocity_spectral(const Fft& fft, const SpectralVector& omega, SpectralVector& u);
void project_solenoidal(const Fft& fft, SpectralVector& v);
void apply_dealias_mask(SpectralVector& v);
void apply_dealias_mask(SpectralScalar& s);
void zero_mean(SpectralVector& v);

}  // namespace enscade
