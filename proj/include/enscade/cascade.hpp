#pragma once

#include <optional>
#include <string>
#include <vector>

#include "enscade/diagnostics.hpp"

namespace enscade {

struct VerdictParams {
    double K1 = 64.0, K2 = 8.0;
    double C0 = 0.0;  ///< 0 = auto (1.25 x certified constant of the profile)
    double rho = 0.75;
    double beta = 0.5;
    double q = 4.0;                ///< Morrey exponent
    double grad_threshold = 1.0;   ///< M, coherence qualification threshold on |grad u|
    double coherence_c1 = 0.0;     ///< measured-only when 0
    double smallness_c = 0.0;      ///< Morrey smallness constant C (raw-only when 0)
    RampKind ramp = RampKind::blended;
    GeneratorWidth generator = GeneratorWidth::wide;
    MorreyParams morrey{};
    CoherenceParams coherence{};
};

/// One scale of the cascade sweep. `pinned` marks the row at R = sigma0/beta,
/// which carries the tight sandwich constants 1/(4 K1) and K2 + 1/(4 K1);
/// range rows use 1/(256 K1) and 8 K2 + 1/(256 K1).
struct CascadeRow {
    double R = 0.0;
    bool pinned = false;
    long long nominal_n = 0;
    std::size_t stored_members = 0;
    double average_flux = 0.0;  ///< <F>_R
    double sum_a = 0.0, sum_b = 0.0, sum_c = 0.0;  ///< budget sums / (n T R^3)
    double identity_residual = 0.0;
    double ibp_disagreement = 0.0;
    double lower_bound = 0.0, upper_bound = 0.0;  ///< sandwich bounds (x P0)
    bool pass_lower = false, pass_upper = false;
    double omega_star_ball_max = 0.0, omega_star_wide_max = 0.0;
};

struct AssumptionVerdicts {
    // coherence: measured c1; pass only meaningful when a reference c1 is configured
    double coherence_c1 = 0.0;
    double coherence_violating_fraction = 0.0;
    bool coherence_checked = false;
    bool coherence_pass = false;
    // Kraichnan-scale smallness sigma0 < beta R0
    bool kraichnan_defined = false;
    bool kraichnan_pass = false;
    // Morrey smallness sigma0^(1-2/q) ||omega|| < (beta/2)^(1-2/q) / C
    double morrey_raw = 0.0;  ///< sigma0^(1-2/q) ||omega||
    double morrey_threshold = 0.0;
    bool morrey_checked = false;
    bool morrey_pass = false;
    // modulation: terminal localized enstrophy >= half its running sup
    double modulation = 0.0;
    bool modulation_pass = false;
};

struct CascadeReport {
    std::string version;
    int n = 0;
    double L = 0.0, T = 0.0;
    double R0 = 0.0;
    VerdictParams params;
    double E0 = 0.0, P0 = 0.0;
    std::optional<double> sigma0;
    double BT = 0.0;  ///< sup_t L^1 vorticity
    MorreyResult morrey;
    CoherenceResult coherence;
    AssumptionVerdicts assumptions;
    std::vector<CascadeRow> rows;
    bool degenerate = false;  ///< zero trajectory / undefined sigma0
    std::vector<std::string> notes;

    std::string to_json() const;  ///< deterministic bytes for identical inputs
    std::string to_csv() const;   ///< per-scale rows
};

/// Full evaluation pipeline: scale statistics, assumption verdicts, and the
/// dyadic sweep sigma0/beta <= R <= R0 with sandwich pass/fail per row.
CascadeReport cascade_verdict(const Trajectory& traj, const SpatialCutoff& psi0,
                              const VerdictParams& params, const Fft& fft);

}  // namespace enscade
