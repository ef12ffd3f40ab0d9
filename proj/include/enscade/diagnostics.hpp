#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "enscade/cutoffs.hpp"
#include "enscade/ensemble.hpp"
#include "enscade/fields.hpp"
#include "enscade/fft.hpp"
#include "enscade/solver.hpp"

namespace enscade {

/// Time-averaged enstrophy flux density
///   f(x) = -(1/T) int_0^T (u . grad omega) . omega eta dt,
/// computed with spectral derivatives and trapezoid weights over the stored
/// snapshots. A non-advective (Stokes) trajectory has no advection term and
/// yields f identically zero.
ScalarField flux_density(const Trajectory& traj, const TemporalCutoff& eta, const Fft& fft);

/// Localized flux per ensemble member, by both algebraic routes:
///   f-form:    F_i = T * integral f psi_i
///   ibp-form:  F_i = int_0^T int (1/2)|omega|^2 (u . grad psi_i) eta dx dt
/// Their agreement is the integration-by-parts consistency check.
struct LocalizedFlux {
    std::vector<double> f_form;
    std::vector<double> ibp_form;
    double average = 0.0;  ///< ensemble average of f
    double max_disagreement = 0.0;  ///< max_i |f-form - ibp-form| / scale
};

LocalizedFlux localized_flux(const ScalarField& f, const CutoffEnsemble& e,
                             const Trajectory& traj, const TemporalCutoff& eta, const Fft& fft);

/// Flux budget per member (time-integrated, unnormalized):
///   F_i = A_i - B_i - C_i
///   A_i = int (1/2)|omega(T)|^2 psi_i + int_0^T int |grad omega|^2 phi_i
///   B_i = int_0^T int (1/2)|omega|^2 (psi_i eta' + lap psi_i eta)
///   C_i = int_0^T int (omega . grad u) . omega phi_i
/// a_sup uses the running supremum of the localized enstrophy instead of the
/// terminal value. The identity residual uses the terminal form.
struct MemberBudget {
    double flux = 0.0;        ///< F_i (ibp-form)
    double a_terminal = 0.0;  ///< A_i with the terminal enstrophy term
    double a_sup = 0.0;       ///< A_i with sup_t localized enstrophy
    double b_cutoff = 0.0;    ///< B_i
    double c_stretch = 0.0;   ///< C_i (zero for non-advective trajectories)
    double residual = 0.0;    ///< |F - (A - B - C)| / (|A|+|B|+|C|+1e-14)
    double omega_star_ball = 0.0;  ///< ||omega||_{L^2(B(x_i, R) x (0,T))}
    double omega_star_wide = 0.0;  ///< same over B(x_i, 2R + R^(2/3))
};

struct FluxBudget {
    std::vector<MemberBudget> members;
    double max_residual = 0.0;
};

FluxBudget flux_budget(const Trajectory& traj, const CutoffEnsemble& e,
                       const TemporalCutoff& eta, const Fft& fft);

/// Pointwise vortex stretching (omega . grad u) . omega with u recovered
/// spectrally from omega.
ScalarField vortex_stretch_spectral(const VectorField3& omega, const Fft& fft);

/// The same quantity at one probe node by direct principal-value quadrature of
/// the free-space Biot-Savart kernel,
///   (1/4 pi) pv int omega(x) x omega(y) . G(x, y) dy,
///   G_k(x, y) = d^2/dx_i dy_k (1/|x-y|) omega_i(x)
///             = omega_k(x)/r^3 - 3 r_k (r . omega(x))/r^5,   r = x - y.
/// Cells within eps of the probe (cell-intersection rule) are excised
/// symmetrically. Requires omega compactly supported away from the box edge.
double vortex_stretch_kernel(const VectorField3& omega, const Point3& probe, double eps);

/// Scale-R0 mean enstrophy, modified mean palinstrophy, and the Kraichnan
/// scale sigma0 = sqrt(E0/P0):
///   E0 = (1/T R0^3) int_0^T int (1/2)|omega|^2 (psi0 eta)^(2 rho - 1)
///   P0 = (1/T R0^3) [ int_0^T int |grad omega|^2 psi0 eta + int |omega(T)|^2 psi0 ]
struct ScaleStats {
    double E0 = 0.0;
    double P0 = 0.0;
    std::optional<double> sigma0;  ///< empty when P0 = 0
};

ScaleStats mean_scales(const Trajectory& traj, const SpatialCutoff& psi0,
                       const TemporalCutoff& eta, const Fft& fft);

/// sup over snapshots of the L^1 vorticity norm over the box.
double sup_l1_vorticity(const Trajectory& traj);

struct MorreyParams {
    int center_stride = 4;        ///< node stride of the center subsample (power of two nests)
    int radii_per_octave = 1;     ///< dyadic radii by default
    double min_radius_cells = 2;  ///< smallest radius in units of h
};

struct MorreyResult {
    double value = 0.0;           ///< || omega ||_{L^2_t M^{2,q}_x}
    double region_radius = 0.0;   ///< 2 R0 + R0^(2/3)
    std::size_t centers = 0;
    std::vector<double> radii;
    double q = 0.0;
};

/// Discrete Morrey norm: per snapshot the sup over sampled centers y and the
/// radius ladder R of R^{-3(1-2/q)} int_{B(y,R) cap region} |omega|^2, then the
/// L^2 norm in time. Monotone nondecreasing under enlarging either sample set.
MorreyResult morrey_norm(const Trajectory& traj, double q, double R0, const MorreyParams& p);

struct CoherenceParams {
    std::size_t pair_budget = 2048;  ///< max sampled second points per snapshot
    std::uint64_t seed = 1;
    double c1_reference = 0.0;  ///< violating fraction counts ratios above this (0 = off)
};

struct CoherenceResult {
    double c1 = 0.0;  ///< max |sin angle(xi(x), xi(y))| / sqrt(|x - y|) over sampled pairs
    double violating_fraction = 0.0;
    std::size_t qualifying_points = 0;  ///< nodes with |grad u| > M in B(0, 2 R0)
    std::size_t sampled_points = 0;
    std::size_t pairs = 0;
};

/// Direction-coherence estimate: x ranges over nodes of B(0, 2 R0) where the
/// velocity gradient (Frobenius norm) exceeds M, y over a deterministic
/// subsample of B(0, 2 R0 + R0^(2/3)); points with |omega| < 1e-12 are skipped.
/// The measured c1 is a lower bound on the true supremum.
CoherenceResult coherence_estimate(const Trajectory& traj, double M, double R0,
                                   const CoherenceParams& p, const Fft& fft);

/// Terminal localized enstrophy over its running supremum (snapshots with
/// t > 0). An identically zero trajectory gives 1 by convention.
double modulation_ratio(const Trajectory& traj, const SpatialCutoff& psi0);

}  // namespace enscade
