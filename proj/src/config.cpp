#include "enscade/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "enscade/cutoffs.hpp"

namespace enscade {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

}  // namespace

void RunConfig::validate() const {
    if (n < 8 || n % 2 != 0) throw ConfigError("n must be even and >= 8");
    if (!(box_length > 0.0)) throw ConfigError("box_length must be positive");
    if (!(r0 > 0.0)) throw ConfigError("r0 must be positive");
    if (!(r0 < 1.0)) throw ConfigError("r0 must be < 1");
    const double region = 2.0 * r0 + std::pow(r0, 2.0 / 3.0);
    if (!(region < 0.5 * box_length))
        throw ConfigError("analysis region must fit inside a half-box: need 2*r0 + r0^(2/3) < "
                          "L/2, got " +
                          std::to_string(region) + " vs " + std::to_string(0.5 * box_length));
    if (!(total_time > r0 * r0))
        throw ConfigError("total_time must exceed r0^2 = " + std::to_string(r0 * r0));
    if (!(viscosity > 0.0)) throw ConfigError("viscosity must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
    if (ic != "random" && ic != "taylor_green" && ic != "abc" && ic != "zero")
        throw ConfigError("ic must be one of random|taylor_green|abc|zero, got '" + ic + "'");
    if (ic == "random") {
        if (k_min < 1 || k_max < k_min) throw ConfigError("need 1 <= k_min <= k_max");
        if (k_max > n / 3)
            throw ConfigError("k_max must stay below the dealias cutoff n/3 = " +
                              std::to_string(n / 3));
        if (!(energy > 0.0)) throw ConfigError("energy must be positive");
    }
    if (!(rho >= 0.5 && rho < 1.0)) throw ConfigError("rho must lie in [1/2, 1)");
    if (ramp != "blended" && ramp != "cosine")
        throw ConfigError("ramp must be blended|cosine, got '" + ramp + "'");
    if (generator != "wide" && generator != "strict")
        throw ConfigError("generator must be wide|strict, got '" + generator + "'");
    if (c0 != 0.0) {
        const double c0_min = certify_profile(rho, ramp_kind()).c0_min;
        if (c0 < c0_min)
            throw ConfigError("c0 = " + std::to_string(c0) +
                              " is below the certified profile constant " +
                              std::to_string(c0_min) + " (use 0 for auto)");
    }
    if (k1 < 64.0) throw ConfigError("K1 must be >= 64 (lattice refinement constant)");
    if (k2 < 8.0) throw ConfigError("K2 must be >= 8 (lattice refinement constant)");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
    if (!(morrey_q > 2.0)) throw ConfigError("morrey_q must exceed 2");
    if (!(grad_threshold > 0.0)) throw ConfigError("grad_threshold must be positive");
    if (morrey_center_stride < 1) throw ConfigError("morrey_center_stride must be >= 1");
    if (morrey_radii_per_octave < 1) throw ConfigError("morrey_radii_per_octave must be >= 1");
}

RampKind RunConfig::ramp_kind() const {
    return ramp == "cosine" ? RampKind::cosine : RampKind::blended;
}

GeneratorWidth RunConfig::generator_width() const {
    return generator == "strict" ? GeneratorWidth::strict_ball : GeneratorWidth::wide;
}

VerdictParams RunConfig::verdict_params() const {
    VerdictParams p;
    p.K1 = k1;
    p.K2 = k2;
    p.C0 = c0;
    p.rho = rho;
    p.beta = beta;
    p.q = morrey_q;
    p.grad_threshold = grad_threshold;
    p.coherence_c1 = coherence_c1;
    p.smallness_c = smallness_c;
    p.ramp = ramp_kind();
    p.generator = generator_width();
    p.morrey.center_stride = morrey_center_stride;
    p.morrey.radii_per_octave = morrey_radii_per_octave;
    p.coherence.pair_budget = coherence_budget;
    p.coherence.seed = seed;
    p.coherence.c1_reference = coherence_c1;
    return p;
}

void RunConfig::apply_override(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "n") n = int(parse_int(key, v));
    else if (key == "box_length") box_length = parse_double(key, v);
    else if (key == "r0") r0 = parse_double(key, v);
    else if (key == "total_time") total_time = parse_double(key, v);
    else if (key == "viscosity") viscosity = parse_double(key, v);
    else if (key == "dt") dt = parse_double(key, v);
    else if (key == "dealias") dealias = parse_bool(key, v);
    else if (key == "nonlinear") nonlinear = parse_bool(key, v);
    else if (key == "snapshot_every") snapshot_every = int(parse_int(key, v));
    else if (key == "ic") ic = v;
    else if (key == "seed") seed = std::uint64_t(parse_int(key, v));
    else if (key == "k_min") k_min = int(parse_int(key, v));
    else if (key == "k_max") k_max = int(parse_int(key, v));
    else if (key == "energy") energy = parse_double(key, v);
    else if (key == "amplitude") amplitude = parse_double(key, v);
    else if (key == "c0") c0 = parse_double(key, v);
    else if (key == "rho") rho = parse_double(key, v);
    else if (key == "ramp") ramp = v;
    else if (key == "generator") generator = v;
    else if (key == "k1") k1 = parse_double(key, v);
    else if (key == "k2") k2 = parse_double(key, v);
    else if (key == "beta") beta = parse_double(key, v);
    else if (key == "morrey_q") morrey_q = parse_double(key, v);
    else if (key == "grad_threshold") grad_threshold = parse_double(key, v);
    else if (key == "coherence_c1") coherence_c1 = parse_double(key, v);
    else if (key == "smallness_c") smallness_c = parse_double(key, v);
    else if (key == "morrey_center_stride") morrey_center_stride = int(parse_int(key, v));
    else if (key == "morrey_radii_per_octave") morrey_radii_per_octave = int(parse_int(key, v));
    else if (key == "coherence_budget") coherence_budget = std::uint64_t(parse_int(key, v));
    else if (key == "out_dir") out_dir = v;
    else throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key = value");
        cfg.apply_override(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string RunConfig::to_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "n = " << n << "\n";
    out << "box_length = " << box_length << "\n";
    out << "r0 = " << r0 << "\n";
    out << "total_time = " << total_time << "\n";
    out << "viscosity = " << viscosity << "\n";
    out << "dt = " << dt << "\n";
    out << "dealias = " << (dealias ? "true" : "false") << "\n";
    out << "nonlinear = " << (nonlinear ? "true" : "false") << "\n";
    out << "snapshot_every = " << snapshot_every << "\n";
    out << "ic = " << ic << "\n";
    out << "seed = " << seed << "\n";
    out << "k_min = " << k_min << "\n";
    out << "k_max = " << k_max << "\n";
    out << "energy = " << energy << "\n";
    out << "amplitude = " << amplitude << "\n";
    out << "c0 = " << c0 << "\n";
    out << "rho = " << rho << "\n";
    out << "ramp = " << ramp << "\n";
    out << "generator = " << generator << "\n";
    out << "k1 = " << k1 << "\n";
    out << "k2 = " << k2 << "\n";
    out << "beta = " << beta << "\n";
    out << "morrey_q = " << morrey_q << "\n";
    out << "grad_threshold = " << grad_threshold << "\n";
    out << "coherence_c1 = " << coherence_c1 << "\n";
    out << "smallness_c = " << smallness_c << "\n";
    out << "morrey_center_stride = " << morrey_center_stride << "\n";
    out << "morrey_radii_per_octave = " << morrey_radii_per_octave << "\n";
    out << "coherence_budget = " << coherence_budget << "\n";
    out << "out_dir = " << out_dir << "\n";
    return out.str();
}

}  // namespace enscade
