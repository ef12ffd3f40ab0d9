#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "enscade/fields.hpp"

namespace enscade {

/// Shape of the 1D transition theta: [0,1] -> [1,0].
enum class RampKind {
    cosine,   ///< theta(s) = (1 + cos(pi s)) / 2
    blended,  ///< cosine of the flattened argument s - sin(2 pi s)/(2 pi); C^3 endpoint contact
};

struct Transition {
    double value = 0.0, d1 = 0.0, d2 = 0.0;
};

Transition ramp_transition(double s, RampKind kind);

/// 1D bump: 1 on |x| <= plateau, 0 for |x| >= support, theta((|x|-a)/(s-a))^m between.
class Bump1D {
  public:
    Bump1D() = default;
    Bump1D(double plateau, double support, double power, RampKind kind);
    Transition eval(double x) const;  ///< value and derivatives in x
    double plateau() const { return a_; }
    double support() const { return s_; }

  private:
    double a_ = 0.0, s_ = 0.0, w_ = 0.0, m_ = 0.0;
    RampKind kind_ = RampKind::blended;
};

/// Measured sup of |grad psi| R / psi^rho and |lap psi| R^2 / psi^(2 rho - 1)
/// over the radial profile (scale invariant, so certified once per shape).
struct ProfileCertificate {
    double grad_ratio = 0.0;
    double lap_ratio = 0.0;
    double c0_min = 0.0;  ///< smallest admissible bound constant for this shape
};

ProfileCertificate certify_profile(double rho, RampKind kind);

/// Certified temporal constant (sup of 3 m |theta'| over the shape).
double certify_temporal(double rho, RampKind kind);

/// Default bound constant: 1.25 x the larger of the spatial and temporal
/// certified constants, so constructed cutoffs pass their own checks with
/// margin while a halved budget fails.
double auto_c0(double rho, RampKind kind);

struct CutoffEval {
    double value = 0.0;
    Point3 grad{0.0, 0.0, 0.0};
    double lap = 0.0;
};

/// One partition-of-unity multiplier level: the cutoff is multiplied by
/// prod_axis b(x_a - spacing*cell_a) / S(x_a), S(x) = sum_j b(x - spacing*j).
struct LatticeLevel {
    double spacing = 0.0;       ///< 2 R'
    double plateau_half = 0.0;  ///< R'
    double support_half = 0.0;  ///< per-axis support half-width of the generator
    std::array<long, 3> cell{0, 0, 0};
    double power = 0.0;
    RampKind kind = RampKind::blended;
};

/// Smooth spatial cutoff with certified power-weighted derivative bounds:
/// psi = 1 on B(center, R), supported in B(center, 2R), 0 <= psi <= 1,
/// |grad psi| < (C0/R) psi^rho and |lap psi| < (C0/R^2) psi^(2 rho - 1).
/// Partition refinement appends per-axis multiplier levels; values, gradients,
/// and Laplacians stay closed-form at every depth.
class SpatialCutoff {
  public:
    static SpatialCutoff make(const Point3& center, double radius, double c0, double rho,
                              RampKind kind = RampKind::blended);

    CutoffEval eval(const Point3& x) const;
    double value(const Point3& x) const;
    bool supports(const Point3& x) const;

    double scale() const { return scale_; }
    double c0() const { return c0_; }
    double rho() const { return rho_; }
    double power() const { return power_; }
    RampKind kind() const { return kind_; }
    Point3 center() const;       ///< deepest-level cell center (radial center if unrefined)
    Point3 base_center() const { return base_center_; }
    double base_radius() const { return base_radius_; }
    double support_radius() const;  ///< covering-ball radius of the support around center()
    const std::vector<LatticeLevel>& levels() const { return levels_; }

    /// Per-axis closed interval hull of the support.
    std::array<std::array<double, 2>, 3> support_box() const;

    friend struct RefineAccess;

  private:
    Point3 base_center_{0, 0, 0};
    double base_radius_ = 0.0;  ///< plateau radius R of the radial factor
    double scale_ = 0.0;        ///< scale of the deepest level
    double power_ = 0.0;
    double rho_ = 0.0;
    double c0_ = 0.0;
    RampKind kind_ = RampKind::blended;
    Bump1D radial_;
    std::vector<LatticeLevel> levels_;
};

/// Lattice generator width: wide keeps the per-axis ramp a full R' (support
/// cube [-2R',2R']^3, covering ball sqrt(3)*2R'); strict squeezes the support
/// into the inscribed cube so children fit in balls of radius exactly 2R'.
enum class GeneratorWidth { wide, strict_ball };

struct Refinement {
    std::vector<SpatialCutoff> children;
    std::size_t candidate_count = 0;  ///< lattice cells with support overlap
    double lemma_c0 = 0.0;            ///< bound constant governing the child certificates
};

/// Split a cutoff at scale R into scale-R' pieces psi * h_p that sum exactly
/// back to psi. Children are returned for every lattice cell whose generator
/// support meets the parent support.
Refinement refine(const SpatialCutoff& parent, double child_scale,
                  GeneratorWidth width = GeneratorWidth::wide);

/// Smooth time cutoff: 0 on [0, T/3], 1 on [2T/3, T], |eta'| < (C0/T) eta^rho.
class TemporalCutoff {
  public:
    static TemporalCutoff make(double total_time, double c0, double rho,
                               RampKind kind = RampKind::cosine);
    double value(double t) const;
    double deriv(double t) const;
    double total_time() const { return T_; }
    double c0() const { return c0_; }
    double rho() const { return rho_; }

  private:
    double T_ = 0.0, c0_ = 0.0, rho_ = 0.0, power_ = 0.0;
    RampKind kind_ = RampKind::cosine;
};

struct BoundReport {
    double max_grad_ratio = 0.0;  ///< sup |grad psi| R / (C0_grad psi^rho)
    double max_lap_ratio = 0.0;   ///< sup |lap psi| R^2 / (C0_lap psi^(2 rho - 1))
    bool pass = false;            ///< both ratios strictly below 1
    std::size_t points_checked = 0;
};

/// Check the derivative bounds against explicit budgets on all grid nodes in
/// the support (if a grid is given) plus a dense deterministic sweep:
/// radial 1D sweep for unrefined cutoffs, low-discrepancy points in the
/// support box otherwise. Points where the value underflows past 1e-250 are
/// outside the representable range of the ratio and are skipped.
BoundReport verify_bounds(const SpatialCutoff& psi, double c0_grad, double c0_lap,
                          const Grid3* grid = nullptr, std::size_t sweep_points = 1000000);

/// Same with both budgets equal to the cutoff's own C0.
BoundReport verify_bounds(const SpatialCutoff& psi, const Grid3* grid = nullptr,
                          std::size_t sweep_points = 1000000);

BoundReport verify_bounds(const TemporalCutoff& eta, std::size_t sweep_points = 1000000);
BoundReport verify_bounds(const TemporalCutoff& eta, double c0_budget,
                          std::size_t sweep_points);

/// 1D partition-of-unity diagnostics for one lattice level (used by property checks).
struct PartitionScan {
    double min_sum = 0.0, max_sum = 0.0;          ///< per-axis sum S(x) range
    double max_h_grad_ratio = 0.0;                ///< sup |h'| R' / h^rho over the sweep
};
PartitionScan scan_partition(double child_scale, double power, double rho, RampKind kind,
                             GeneratorWidth width, std::size_t sweep_points = 200000);

}  // namespace enscade
