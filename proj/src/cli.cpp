#include "enscade/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

#include "json.hpp"

#include "enscade/cascade.hpp"
#include "enscade/manifest.hpp"
#include "enscade/quadrature.hpp"
#include "enscade/reduce.hpp"
#include "enscade/serial_ref.hpp"
#include "enscade/snapshot_io.hpp"
#include "enscade/version.hpp"

namespace enscade {

namespace {

using ordered_json = nlohmann::ordered_json;

double resolve_c0(const RunConfig& cfg) {
    return cfg.c0 != 0.0 ? cfg.c0 : auto_c0(cfg.rho, cfg.ramp_kind());
}

VectorField3 initial_vorticity(const RunConfig& cfg, const Grid3& grid, const Fft& fft) {
    if (cfg.ic == "zero") return VectorField3(grid);
    VectorField3 u(grid);
    if (cfg.ic == "random")
        u = initial_random_bandlimited(grid, cfg.seed, cfg.k_min, cfg.k_max, cfg.energy);
    else if (cfg.ic == "taylor_green")
        u = initial_taylor_green(grid, cfg.amplitude);
    else
        u = initial_abc(grid, cfg.amplitude, cfg.amplitude, cfg.amplitude);
    return curl(fft, u);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FieldError("cannot write: " + path.string());
    out << text;
}

/// Smooth random nonnegative density, deterministic in the seed.
ScalarField random_density(const Grid3& grid, std::uint64_t seed, int k_max) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (double(rng() >> 11) + 0.5) * 0x1.0p-53; };
    ScalarField f(grid);
    const double alpha = 2.0 * M_PI / grid.length;
    struct Mode {
        double a, kx, ky, kz, phase;
    };
    std::vector<Mode> modes;
    for (int j = 0; j < 12; ++j) {
        Mode m;
        m.a = uniform();
        m.kx = alpha * double(1 + int(uniform() * k_max));
        m.ky = alpha * double(int(uniform() * (k_max + 1)));
        m.kz = alpha * double(int(uniform() * (k_max + 1)));
        m.phase = 2.0 * M_PI * uniform();
        modes.push_back(m);
    }
    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                const Point3 x = grid.node(ix, iy, iz);
                double v = 0.0;
                for (const Mode& m : modes)
                    v += m.a * std::sin(m.kx * x[0] + m.ky * x[1] + m.kz * x[2] + m.phase);
                f(ix, iy, iz) = v * v + 0.05;
            }
    return f;
}

struct SuiteRecorder {
    ordered_json results = ordered_json::array();
    bool all_pass = true;

    void add(const std::string& suite, const std::string& check, double value, double bound,
             bool pass, std::ostream& log) {
        results.push_back({{"suite", suite},
                           {"check", check},
                           {"value", value},
                           {"bound", bound},
                           {"pass", pass}});
        log << (pass ? "PASS " : "FAIL ") << suite << ": " << check << " (value " << value
            << ", bound " << bound << ")\n";
        if (!pass) all_pass = false;
    }
};

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Grid3 grid = Grid3::make(cfg.n, cfg.box_length);
    Fft fft(grid);
    const VectorField3 omega0 = initial_vorticity(cfg, grid, fft);

    SolverConfig sc;
    sc.viscosity = cfg.viscosity;
    sc.dt = cfg.dt;
    sc.dealias = cfg.dealias;
    sc.nonlinear = cfg.nonlinear;
    log << "simulate: n=" << cfg.n << " T=" << cfg.total_time << " dt=" << cfg.dt
        << " ic=" << cfg.ic << "\n";
    Trajectory traj = run(omega0, cfg.total_time, cfg.snapshot_every, sc);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    RunManifest manifest;
    manifest.version = std::string(kVersion);
    manifest.config = cfg;
    manifest.times = traj.times;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06zu.ensc", k);
        const std::filesystem::path p = dir / name;
        write_snapshot(p, traj.snapshots[k], traj.times[k]);
        manifest.files.push_back(name);
        manifest.checksums.push_back(file_checksum(p));
    }
    {
        std::ostringstream hist;
        hist.precision(17);
        hist << "t,enstrophy,palinstrophy,production,max_velocity\n";
        for (const StepStats& st : traj.history)
            hist << st.time << ',' << st.enstrophy << ',' << st.palinstrophy << ','
                 << st.production << ',' << st.max_velocity << '\n';
        write_text(dir / "history.csv", hist.str());
    }
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.save(dir / "manifest.json");
    log << "simulate: wrote " << traj.snapshots.size() << " snapshots to " << dir.string()
        << " in " << manifest.wall_seconds << " s\n";
    return kExitOk;
}

int cmd_analyze(const RunConfig& cfg, const std::filesystem::path& manifest_path,
                std::ostream& log) {
    cfg.validate();
    Trajectory traj = load_trajectory(manifest_path);
    if (traj.grid.n != cfg.n || std::fabs(traj.grid.length - cfg.box_length) > 1e-12)
        throw ConfigError("config/trajectory mismatch: grid differs from the manifest");
    if (std::fabs(traj.T - cfg.total_time) > 1e-12 * std::max(1.0, traj.T))
        throw ConfigError("config/trajectory mismatch: total_time differs from the manifest");

    const double c0 = resolve_c0(cfg);
    const SpatialCutoff psi0 =
        SpatialCutoff::make({0.0, 0.0, 0.0}, cfg.r0, c0, cfg.rho, cfg.ramp_kind());
    Fft fft(traj.grid);
    log << "analyze: " << manifest_path.string() << " (" << traj.snapshots.size()
        << " snapshots, R0=" << cfg.r0 << ", C0=" << c0 << ")\n";
    const CascadeReport report = cascade_verdict(traj, psi0, cfg.verdict_params(), fft);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", report.to_json());
    write_text(dir / "report.csv", report.to_csv());
    log << "analyze: wrote report.json / report.csv to " << dir.string() << " ("
        << report.rows.size() << " scale rows"
        << (report.degenerate ? ", degenerate" : "") << ")\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    SuiteRecorder rec;
    const double c0 = resolve_c0(cfg);
    const RampKind kind = cfg.ramp_kind();
    const GeneratorWidth width = cfg.generator_width();

    const Grid3 grid = Grid3::make(24, 2.0 * M_PI);
    const double R0 = 0.9;
    const SpatialCutoff psi0 = SpatialCutoff::make({0, 0, 0}, R0, c0, cfg.rho, kind);

    // cutoff certificates
    {
        const BoundReport br = verify_bounds(psi0, &grid, 1000000);
        rec.add("certificates", "spatial gradient ratio", br.max_grad_ratio, 1.0,
                br.max_grad_ratio < 1.0, log);
        rec.add("certificates", "spatial laplacian ratio", br.max_lap_ratio, 1.0,
                br.max_lap_ratio < 1.0, log);
        const TemporalCutoff eta = TemporalCutoff::make(0.1, c0, cfg.rho);
        const BoundReport be = verify_bounds(eta, 1000000);
        rec.add("certificates", "temporal ratio", be.max_grad_ratio, 1.0,
                be.max_grad_ratio < 1.0, log);
        const BoundReport half = verify_bounds(psi0, 0.5 * c0, 0.5 * c0, nullptr, 200000);
        rec.add("certificates", "halved budget fails", half.max_grad_ratio + half.max_lap_ratio,
                1.0, !half.pass, log);
    }

    // partition refinement
    {
        const Refinement r1 = refine(psi0, R0 / 2.0, width);
        rec.add("partition", "child count / bound (ratio 2)", double(r1.children.size()),
                64.0 * 8.0, r1.children.size() <= 512, log);
        const PartitionScan scan =
            scan_partition(R0 / 2.0, psi0.power(), cfg.rho, kind, width, 200000);
        rec.add("partition", "per-axis sum min", scan.min_sum, 1.0, scan.min_sum >= 1.0 - 1e-12,
                log);
        rec.add("partition", "per-axis sum max", scan.max_sum, 2.0, scan.max_sum <= 2.0 + 1e-12,
                log);
        rec.add("partition", "h gradient ratio / 6 C0", scan.max_h_grad_ratio, 6.0 * c0,
                scan.max_h_grad_ratio < 6.0 * c0, log);

        // pointwise reconstruction at grid nodes
        double worst = 0.0;
        for (int iz = 0; iz < grid.n; iz += 3)
            for (int iy = 0; iy < grid.n; iy += 3)
                for (int ix = 0; ix < grid.n; ix += 3) {
                    const Point3 x = grid.node(ix, iy, iz);
                    double sum = 0.0;
                    for (const SpatialCutoff& ch : r1.children) sum += ch.value(x);
                    worst = std::max(worst, std::fabs(sum - psi0.value(x)));
                }
        rec.add("partition", "children resum parent (max abs)", worst, 1e-12, worst <= 1e-12,
                log);

        // child certificates against the refinement factors
        const double cl = r1.lemma_c0;
        double grad_worst = 0.0, lap_worst = 0.0;
        for (std::size_t i = 0; i < r1.children.size(); i += 7) {
            const BoundReport br = verify_bounds(r1.children[i], 7.0 * cl,
                                                 4.0 * cl + 22.0 * cl * cl, nullptr, 20000);
            grad_worst = std::max(grad_worst, br.max_grad_ratio);
            lap_worst = std::max(lap_worst, br.max_lap_ratio);
        }
        rec.add("partition", "child gradient factor", grad_worst, 1.0, grad_worst < 1.0, log);
        rec.add("partition", "child laplacian factor", lap_worst, 1.0, lap_worst < 1.0, log);
    }

    // average sandwich and modified averages
    {
        std::vector<CutoffEnsemble> ensembles;
        ensembles.push_back(build_cover_ensemble(psi0, R0, cfg.k1, cfg.k2, grid, width));
        ensembles.push_back(build_cover_ensemble(psi0, R0 / 2.0, cfg.k1, cfg.k2, grid, width));
        ensembles.push_back(build_cover_ensemble(psi0, R0 / 4.0, cfg.k1, cfg.k2, grid, width));
        int violations = 0;
        double mod_excess = 0.0;
        const double delta = 2.0 * cfg.rho - 1.0;
        for (int trial = 0; trial < 25; ++trial) {
            const ScalarField f = random_density(grid, cfg.seed + trial, 4);
            const double F0 = large_scale_mean(f, psi0, grid);
            for (const CutoffEnsemble& e : ensembles) {
                const double avg = ensemble_average(f, e);
                if (!(avg >= F0 / cfg.k1 && avg <= cfg.k2 * F0)) ++violations;
                const double mod = modified_average(f, e, delta);
                const CutoffSamples s = sample_cutoff(psi0, grid, delta);
                const double rhs = cfg.k2 * box_dot(f, s, s.psi_pow) / (R0 * R0 * R0);
                mod_excess = std::max(mod_excess, mod - rhs);
            }
        }
        rec.add("sandwich", "violations over 75 trials", double(violations), 0.0,
                violations == 0, log);
        rec.add("sandwich", "modified average excess", mod_excess, 0.0, mod_excess <= 0.0, log);
    }

    // refinement preserves averages
    {
        const CutoffEnsemble base =
            build_cover_ensemble(psi0, R0 / 2.0, cfg.k1, cfg.k2, grid, width);
        const CutoffEnsemble fine = refine_ensemble(base, R0 / 4.0, width);
        const CutoffEnsemble direct =
            build_cover_ensemble(psi0, R0 / 4.0, cfg.k1, cfg.k2, grid, width);
        double worst = 0.0, path_worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const ScalarField f = random_density(grid, cfg.seed + 100 + trial, 4);
            const double a = ensemble_average(f, base);
            const double b = ensemble_average(f, fine);
            worst = std::max(worst, std::fabs(a - b) / std::max(1e-300, std::fabs(a)));
            const double c = ensemble_average(f, direct);
            path_worst = std::max(path_worst, std::fabs(b - c) / std::max(1e-300, std::fabs(c)));
        }
        rec.add("refinement", "average preserved (rel)", worst, 1e-12, worst <= 1e-12, log);
        rec.add("refinement", "direct vs chained (rel)", path_worst, 1e-12, path_worst <= 1e-12,
                log);
    }

    // budget identity on a short advective run
    {
        const Grid3 g20 = Grid3::make(20, 2.0 * M_PI);
        const VectorField3 u0 = initial_random_bandlimited(g20, cfg.seed, 2, 4, 0.5);
        Fft fft(g20);
        const VectorField3 w0 = curl(fft, u0);
        SolverConfig sc;
        sc.viscosity = 1.0;
        sc.dt = 4e-4;
        sc.nonlinear = true;
        Trajectory traj = run(w0, 0.02, 1, sc);
        const SpatialCutoff p20 = SpatialCutoff::make({0, 0, 0}, 0.9, c0, cfg.rho, kind);
        const TemporalCutoff eta = TemporalCutoff::make(traj.T, c0, cfg.rho);
        const CutoffEnsemble e = build_cover_ensemble(p20, 0.45, cfg.k1, cfg.k2, g20, width);
        const FluxBudget fb = flux_budget(traj, e, eta, fft);
        rec.add("budget", "identity residual", fb.max_residual, 1e-3, fb.max_residual <= 1e-3,
                log);
        const ScalarField f = flux_density(traj, eta, fft);
        const LocalizedFlux lf = localized_flux(f, e, traj, eta, fft);
        rec.add("budget", "ibp disagreement", lf.max_disagreement, 1e-6,
                lf.max_disagreement <= 1e-6, log);
    }

    // determinism
    {
        std::mt19937_64 rng(cfg.seed);
        std::vector<double> data(300000);
        for (double& d : data) d = (double(rng() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
        const double a = det_sum(data);
        const double b = det_sum_serial(data);
        rec.add("determinism", "parallel vs serial blocked sum", std::fabs(a - b), 0.0, a == b,
                log);
        const double naive = serial_ref::naive_sum(data);
        const double rel = std::fabs(a - naive) / std::max(1e-300, std::fabs(naive));
        rec.add("determinism", "blocked vs naive sum (rel)", rel, 1e-10, rel <= 1e-10, log);
        const ScalarField f = random_density(grid, cfg.seed + 1000, 4);
        const CutoffEnsemble e = build_cover_ensemble(psi0, R0 / 2.0, cfg.k1, cfg.k2, grid, width);
        const double e1 = ensemble_average(f, e);
        const double e2 = ensemble_average(f, e);
        rec.add("determinism", "repeated ensemble average", std::fabs(e1 - e2), 0.0, e1 == e2,
                log);
    }

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_text(dir / "verify.json", rec.results.dump(2) + "\n");
    log << (rec.all_pass ? "verify: all suites passed\n" : "verify: FAILURES\n");
    return rec.all_pass ? kExitOk : kExitSuite;
}

}  // namespace enscade
