#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "enscade/fft.hpp"
#include "enscade/fields.hpp"
#include "enscade/spectral_ops.hpp"

namespace enscade {

struct SolverConfig {
    double viscosity = 1.0;
    double dt = 1e-3;
    bool dealias = true;
    bool nonlinear = true;  ///< off = Stokes limit (heat semigroup on omega)
};

struct StepStats {
    double time = 0.0;
    double enstrophy = 0.0;     ///< (1/2) integral |omega|^2
    double palinstrophy = 0.0;  ///< integral |grad omega|^2
    double production = 0.0;    ///< integral N(omega) . omega (stretching minus advection)
    double max_velocity = 0.0;
};

/// Time-ordered vorticity snapshots over [0, T] with trapezoid weights for
/// the time integrals used by the diagnostics.
struct Trajectory {
    Grid3 grid;
    SolverConfig config;
    double T = 0.0;
    std::vector<double> times;
    std::vector<VectorField3> snapshots;
    std::vector<StepStats> history;  ///< per-step record

    std::vector<double> quadrature_weights() const;
    const VectorField3& terminal() const;
    bool advective() const { return config.nonlinear; }
    void validate() const;
};

/// Pseudo-spectral integrator of the vorticity equation
///   omega_t = curl(u x omega) + nu * Laplace omega,  u = BiotSavart(omega),
/// stepped by RK4 with the exact integrating factor for the viscous part.
/// The advective term is evaluated pseudo-spectrally and 2/3-dealiased; the
/// state is re-projected solenoidal and kept mean-free after every step.
class VorticitySolver {
  public:
    VorticitySolver(const Grid3& grid, const SolverConfig& config);

    void set_state(const VectorField3& omega);  ///< rejects non-solenoidal/mean inputs
    VectorField3 state() const;
    double time() const { return time_; }

    /// One step. Throws NumericalError on CFL violation or non-finite values.
    void step();

    StepStats current_stats() const;

    const Fft& fft() const { return fft_; }

  private:
    SpectralVector nonlinear_term(const SpectralVector& w, double* max_u) const;

    Grid3 grid_;
    SolverConfig config_;
    Fft fft_;
    SpectralVector state_;
    std::vector<double> decay_half_, decay_full_;  ///< exp(-nu k^2 dt/2), exp(-nu k^2 dt)
    double time_ = 0.0;
    double last_max_u_ = 0.0;
};

/// March omega0 to time T, storing a snapshot every `snapshot_every` steps
/// (plus the initial and terminal states). T = 0 yields the single snapshot omega0.
Trajectory run(const VectorField3& omega0, double T, int snapshot_every,
               const SolverConfig& config);

/// Single step as a pure function.
VectorField3 step_once(const VectorField3& omega, const SolverConfig& config);

// Initial velocity fields (divergence-free, zero-mean). Vorticity via curl().
VectorField3 initial_taylor_green(const Grid3& grid, double amplitude);
VectorField3 initial_abc(const Grid3& grid, double A, double B, double C);
/// Random solenoidal field with modes k_min <= |k| <= k_max (integer mode
/// magnitude) scaled so the kinetic energy (1/2) integral |u|^2 = energy * L^3.
/// Deterministic in the seed.
VectorField3 initial_random_bandlimited(const Grid3& grid, std::uint64_t seed, int k_min,
                                        int k_max, double energy);

}  // namespace enscade
