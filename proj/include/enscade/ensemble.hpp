#pragma once

#include <cstdint>
#include <vector>

#include "enscade/cutoffs.hpp"
#include "enscade/fields.hpp"

namespace enscade {

/// Grid restriction of a cutoff: samples of the value, gradient, Laplacian,
/// and value^(2 rho - 1) over the support bounding box.
struct CutoffSamples {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{-1, -1, -1};  ///< inclusive; empty when hi < lo
    std::vector<double> psi, gx, gy, gz, lap, psi_pow;
    double max_value = 0.0;

    std::size_t count() const;
    std::size_t local_index(int ix, int iy, int iz) const;
};

CutoffSamples sample_cutoff(const SpatialCutoff& fn, const Grid3& grid, double pow_exponent);

/// Weighted box quadrature h^3 sum_box f(x) w(x) with the deterministic reduction.
double box_dot(const ScalarField& f, const CutoffSamples& s, const std::vector<double>& w);

/// Family of scale-R cutoffs dominated by and covering a reference cutoff
/// psi0 at scale R0. The nominal count n is the average divisor; it counts
/// lattice cells including pieces that vanish on the grid, which is what makes
/// averages exactly invariant under partition refinement.
struct CutoffEnsemble {
    double R = 0.0, R0 = 0.0;
    double K1 = 0.0, K2 = 0.0, C0 = 0.0, rho = 0.0;
    long long nominal_n = 0;
    Grid3 grid;
    SpatialCutoff psi0;
    CutoffSamples psi0_samples;
    std::vector<SpatialCutoff> members;
    std::vector<CutoffSamples> samples;
    std::size_t dropped_members = 0;  ///< pieces below the storage threshold

    std::size_t stored_count() const { return members.size(); }
};

/// Cover ensemble at scale R <= R0 built by partition refinement of psi0.
/// Requires K1 >= 64 and K2 >= 8 (the lattice construction's own constants).
CutoffEnsemble build_cover_ensemble(const SpatialCutoff& psi0, double R, double K1, double K2,
                                    const Grid3& grid,
                                    GeneratorWidth width = GeneratorWidth::wide);

/// (1/n) sum_i (1/R^3) integral of f psi_i.
double ensemble_average(const ScalarField& f, const CutoffEnsemble& e);

/// F0 = (1/R0^3) integral of f psi0.
double large_scale_mean(const ScalarField& f, const SpatialCutoff& psi0, const Grid3& grid);

/// (1/n) sum_i (1/R^3) integral of f psi_i^delta, delta > 0.
double modified_average(const ScalarField& f, const CutoffEnsemble& e, double delta);

/// Replace each member by its scale-R' partition pieces; the nominal count is
/// scaled by (R/R')^3 so every average is preserved exactly. Parameters become
/// (64 K1, 8 K2) with the refinement's bound constant.
CutoffEnsemble refine_ensemble(const CutoffEnsemble& e, double child_scale,
                               GeneratorWidth width = GeneratorWidth::wide);

struct EnsembleValidation {
    bool domination_pass = false;   ///< every member <= psi0 (tolerance 1e-12)
    bool cover_pass = false;        ///< sum of members >= psi0 (tolerance 1e-12)
    bool count_pass = false;        ///< (R0/R)^3 <= n <= K1 (R0/R)^3
    bool overlap_pass = false;      ///< support multiplicity <= K2 on B(0, 2 R0)
    double max_member_excess = 0.0;  ///< max over nodes of member - psi0
    double min_cover_surplus = 0.0;  ///< min over nodes of sum_i psi_i - psi0
    double max_cover_surplus = 0.0;
    int max_overlap = 0;
    long long nominal_n = 0;
    bool pass() const { return domination_pass && cover_pass && count_pass && overlap_pass; }
};

EnsembleValidation validate(const CutoffEnsemble& e);

}  // namespace enscade
