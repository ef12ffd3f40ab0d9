#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "enscade/cascade.hpp"

namespace enscade {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat key=value run configuration. Defaults are printable via `defaults`;
/// every constraint violation is rejected with a specific message.
struct RunConfig {
    // discretization
    int n = 32;
    double box_length = 6.283185307179586;  // 2 pi
    // analysis geometry
    double r0 = 0.5;
    // dynamics
    double total_time = 0.3;
    double viscosity = 1.0;
    double dt = 1e-3;
    bool dealias = true;
    bool nonlinear = true;
    int snapshot_every = 5;
    // initial data
    std::string ic = "random";  // random | taylor_green | abc | zero
    std::uint64_t seed = 1234;
    int k_min = 2;
    int k_max = 5;
    double energy = 0.5;
    double amplitude = 1.0;
    // cutoffs
    double c0 = 0.0;  // 0 = auto (1.25 x certified profile constant)
    double rho = 0.75;
    std::string ramp = "blended";        // blended | cosine
    std::string generator = "wide";      // wide | strict
    // ensembles
    double k1 = 64.0;
    double k2 = 8.0;
    // verdict parameters
    double beta = 0.5;
    double morrey_q = 4.0;
    double grad_threshold = 1.0;
    double coherence_c1 = 0.0;
    double smallness_c = 0.0;
    int morrey_center_stride = 4;
    int morrey_radii_per_octave = 1;
    std::uint64_t coherence_budget = 2048;
    // I/O
    std::string out_dir = "out";

    void validate() const;  ///< throws ConfigError with a specific message
    VerdictParams verdict_params() const;
    RampKind ramp_kind() const;
    GeneratorWidth generator_width() const;

    static RunConfig defaults() { return RunConfig{}; }
    static RunConfig from_file(const std::filesystem::path& path);
    void apply_override(const std::string& key, const std::string& value);
    std::string to_text() const;  ///< key = value lines, round-trippable
};

}  // namespace enscade
