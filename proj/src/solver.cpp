#include "enscade/solver.hpp"

#include <cmath>
#include <random>

#include "enscade/quadrature.hpp"
#include "enscade/reduce.hpp"

namespace enscade {

namespace {

double mode_ksq(const Grid3& g, std::size_t idx, double tpl) {
    const int n = g.n;
    const int nxh = n / 2 + 1;
    const int kx = int(idx % nxh);
    const int iy = int((idx / nxh) % n);
    const int iz = int(idx / (std::size_t(nxh) * n));
    const double k1 = tpl * signed_mode(kx, n);
    const double k2 = tpl * signed_mode(iy, n);
    const double k3 = tpl * signed_mode(iz, n);
    return k1 * k1 + k2 * k2 + k3 * k3;
}

double spectral_weight(const Grid3& g, std::size_t idx) {
    const int nxh = g.n / 2 + 1;
    const int kx = int(idx % nxh);
    return (kx == 0 || kx == g.n / 2) ? 1.0 : 2.0;
}

}  // namespace

std::vector<double> Trajectory::quadrature_weights() const {
    std::vector<double> w(times.size(), 0.0);
    if (times.size() < 2) return w;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double half = 0.5 * (times[k + 1] - times[k]);
        w[k] += half;
        w[k + 1] += half;
    }
    return w;
}

const VectorField3& Trajectory::terminal() const {
    if (snapshots.empty()) throw FieldError("empty trajectory");
    return snapshots.back();
}

void Trajectory::validate() const {
    if (times.size() != snapshots.size() || times.empty())
        throw FieldError("trajectory: times/snapshots mismatch");
    if (times.front() != 0.0) throw FieldError("trajectory must start at t = 0");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (!(times[k] < times[k + 1])) throw FieldError("trajectory times must increase");
    if (std::fabs(times.back() - T) > 1e-12 * std::max(1.0, T))
        throw FieldError("trajectory must end at t = T");
}

VorticitySolver::VorticitySolver(const Grid3& grid, const SolverConfig& config)
    : grid_(grid), config_(config), fft_(grid), state_(grid) {
    if (!(config.dt > 0.0)) throw FieldError("solver: dt must be positive");
    if (!(config.viscosity > 0.0)) throw FieldError("solver: viscosity must be positive");
    const std::size_t modes = state_[0].c.size();
    decay_half_.resize(modes);
    decay_full_.resize(modes);
    const double tpl = fft_.two_pi_over_l();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)modes; ++i) {
        const double ksq = mode_ksq(grid_, std::size_t(i), tpl);
        decay_half_[i] = std::exp(-0.5 * config_.viscosity * ksq * config_.dt);
        decay_full_[i] = decay_half_[i] * decay_half_[i];
    }
}

void VorticitySolver::set_state(const VectorField3& omega) {
    require_finite(omega, "solver state");
    require_same_grid(omega.grid, grid_, "solver state");
    SpectralVector s = fft_.forward(omega);
    const double scale = max_norm(omega);
    for (int c = 0; c < 3; ++c) {
        if (std::abs(s[c].c[0]) > 1e-12 * std::max(1.0, scale))
            throw FieldError("solver state must be mean-free");
    }
    // divergence relative to the largest derivative magnitude present
    const double tpl = fft_.two_pi_over_l();
    double div_max = 0.0;
    const int n = grid_.n, nxh = n / 2 + 1;
#pragma omp parallel for schedule(static) reduction(max : div_max)
    for (long long i = 0; i < (long long)s[0].c.size(); ++i) {
        const int kx = int(i % nxh);
        const int iy = int((i / nxh) % n);
        const int iz = int(i / (std::size_t(nxh) * n));
        const std::complex<double> d = std::complex<double>(0, 1) *
            (tpl * signed_mode(kx, n) * s[0].c[i] + tpl * signed_mode(iy, n) * s[1].c[i] +
             tpl * signed_mode(iz, n) * s[2].c[i]);
        const double a = std::abs(d);
        if (a > div_max) div_max = a;
    }
    const double div_scale = tpl * (n / 2) * std::max(1.0, scale);
    if (div_max > 1e-10 * div_scale)
        throw FieldError("solver state must be divergence-free (relative divergence " +
                         std::to_string(div_max / div_scale) + ")");
    project_solenoidal(fft_, s);
    zero_mean(s);
    if (config_.dealias) apply_dealias_mask(s);
    state_ = std::move(s);
    time_ = 0.0;
}

SpectralVector VorticitySolver::nonlinear_term(const SpectralVector& w, double* max_u) const {
    SpectralVector out(grid_);
    if (!config_.nonlinear) {
        if (max_u) *max_u = 0.0;
        return out;  // zero-initialized
    }
    SpectralVector uhat(grid_);
    velocity_spectral(fft_, w, uhat);
    const VectorField3 u = fft_.inverse(uhat);
    const VectorField3 vort = fft_.inverse(w);
    if (max_u) *max_u = max_norm(u);
    VectorField3 cross(grid_);
    const std::size_t count = grid_.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)count; ++i) {
        const double u1 = u[0].v[i], u2 = u[1].v[i], u3 = u[2].v[i];
        const double w1 = vort[0].v[i], w2 = vort[1].v[i], w3 = vort[2].v[i];
        cross[0].v[i] = u2 * w3 - u3 * w2;
        cross[1].v[i] = u3 * w1 - u1 * w3;
        cross[2].v[i] = u1 * w2 - u2 * w1;
    }
    SpectralVector chat = fft_.forward(cross);
    curl_spectral(fft_, chat, out);
    if (config_.dealias) apply_dealias_mask(out);
    return out;
}

void VorticitySolver::step() {
    const double dt = config_.dt;
    double max_u = 0.0;
    const SpectralVector a = nonlinear_term(state_, &max_u);
    last_max_u_ = max_u;
    if (config_.nonlinear && max_u > 0.0) {
        const double limit = 0.5 * grid_.h / max_u;
        if (dt > limit)
            throw NumericalError("CFL violation at t = " + std::to_string(time_) +
                                 ": dt = " + std::to_string(dt) + " exceeds 0.5 h / max|u| = " +
                                 std::to_string(limit));
    }
    const std::size_t modes = state_[0].c.size();
    SpectralVector stage(grid_), b(grid_), c(grid_), d(grid_);

    // integrating-factor RK4: the viscous semigroup is applied exactly
    for (int comp = 0; comp < 3; ++comp)
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)modes; ++i)
            stage[comp].c[i] = decay_half_[i] * (state_[comp].c[i] + 0.5 * dt * a[comp].c[i]);
    b = nonlinear_term(stage, nullptr);

    for (int comp = 0; comp < 3; ++comp)
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)modes; ++i)
            stage[comp].c[i] = decay_half_[i] * state_[comp].c[i] + 0.5 * dt * b[comp].c[i];
    c = nonlinear_term(stage, nullptr);

    for (int comp = 0; comp < 3; ++comp)
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)modes; ++i)
            stage[comp].c[i] =
                decay_full_[i] * state_[comp].c[i] + dt * decay_half_[i] * c[comp].c[i];
    d = nonlinear_term(stage, nullptr);

    double finite_guard = 0.0;
    for (int comp = 0; comp < 3; ++comp) {
#pragma omp parallel for schedule(static) reduction(max : finite_guard)
        for (long long i = 0; i < (long long)modes; ++i) {
            const std::complex<double> next =
                decay_full_[i] * state_[comp].c[i] +
                (dt / 6.0) * (decay_full_[i] * a[comp].c[i] +
                              2.0 * decay_half_[i] * (b[comp].c[i] + c[comp].c[i]) +
                              d[comp].c[i]);
            state_[comp].c[i] = next;
            const double mag = std::norm(next);
            if (mag > finite_guard) finite_guard = mag;
        }
    }
    if (!std::isfinite(finite_guard))
        throw NumericalError("blow-up detected at t = " + std::to_string(time_ + dt));
    project_solenoidal(fft_, state_);
    zero_mean(state_);
    if (config_.dealias) apply_dealias_mask(state_);
    time_ += dt;
}

VectorField3 VorticitySolver::state() const { return fft_.inverse(state_); }

StepStats VorticitySolver::current_stats() const {
    StepStats st;
    st.time = time_;
    const double volume = grid_.length * grid_.length * grid_.length;
    const std::size_t modes = state_[0].c.size();
    const double tpl = fft_.two_pi_over_l();
    double ens = 0.0, palin = 0.0;
    for (int comp = 0; comp < 3; ++comp) {
        ens += spectral_dot(state_[comp], state_[comp]);
        palin += volume * det_sum_indexed(modes, [&](std::size_t i) {
                     return spectral_weight(grid_, i) * mode_ksq(grid_, i, tpl) *
                            std::norm(state_[comp].c[i]);
                 });
    }
    st.enstrophy = 0.5 * ens;
    st.palinstrophy = palin;
    double max_u = 0.0;
    const SpectralVector nl = nonlinear_term(state_, &max_u);
    st.max_velocity = max_u;
    double prod = 0.0;
    for (int comp = 0; comp < 3; ++comp) prod += spectral_dot(nl[comp], state_[comp]);
    st.production = prod;
    return st;
}

Trajectory run(const VectorField3& omega0, double T, int snapshot_every,
               const SolverConfig& config) {
    if (T < 0.0) throw FieldError("run: T must be nonnegative");
    if (snapshot_every < 1) throw FieldError("run: snapshot_every must be >= 1");
    Trajectory traj;
    traj.grid = omega0.grid;
    traj.config = config;
    traj.T = T;

    VorticitySolver solver(omega0.grid, config);
    solver.set_state(omega0);
    traj.times.push_back(0.0);
    traj.snapshots.push_back(solver.state());
    traj.history.push_back(solver.current_stats());
    if (T == 0.0) return traj;

    const long long full_steps = (long long)std::floor(T / config.dt + 1e-9);
    const double tail = T - double(full_steps) * config.dt;
    long long k = 0;
    for (; k < full_steps; ++k) {
        solver.step();
        traj.history.push_back(solver.current_stats());
        const bool at_end = (k + 1 == full_steps) && tail <= 1e-12 * T;
        if ((k + 1) % snapshot_every == 0 || at_end) {
            traj.times.push_back(solver.time());
            traj.snapshots.push_back(solver.state());
        }
    }
    if (tail > 1e-12 * T) {
        SolverConfig tail_config = config;
        tail_config.dt = tail;
        VorticitySolver tail_solver(omega0.grid, tail_config);
        tail_solver.set_state(solver.state());
        tail_solver.step();
        traj.history.push_back(tail_solver.current_stats());
        traj.times.push_back(double(full_steps) * config.dt + tail);
        traj.snapshots.push_back(tail_solver.state());
        // history times are relative to the tail solver; fix the offset
        traj.history.back().time = traj.times.back();
    }
    // ensure the recorded terminal time is exactly T
    traj.times.back() = T;
    traj.validate();
    return traj;
}

VectorField3 step_once(const VectorField3& omega, const SolverConfig& config) {
    VorticitySolver solver(omega.grid, config);
    solver.set_state(omega);
    solver.step();
    return solver.state();
}

VectorField3 initial_taylor_green(const Grid3& grid, double amplitude) {
    VectorField3 u(grid);
    const double alpha = 2.0 * M_PI / grid.length;
#pragma omp parallel for collapse(2) schedule(static)
    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                const double X = alpha * grid.coord(ix);
                const double Y = alpha * grid.coord(iy);
                const double Z = alpha * grid.coord(iz);
                const std::size_t i = grid.index(ix, iy, iz);
                u[0].v[i] = amplitude * std::cos(X) * std::sin(Y) * std::sin(Z);
                u[1].v[i] = -amplitude * std::sin(X) * std::cos(Y) * std::sin(Z);
                u[2].v[i] = 0.0;
            }
    return u;
}

VectorField3 initial_abc(const Grid3& grid, double A, double B, double C) {
    VectorField3 u(grid);
    const double alpha = 2.0 * M_PI / grid.length;
#pragma omp parallel for collapse(2) schedule(static)
    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                const double X = alpha * grid.coord(ix);
                const double Y = alpha * grid.coord(iy);
                const double Z = alpha * grid.coord(iz);
                const std::size_t i = grid.index(ix, iy, iz);
                u[0].v[i] = A * std::sin(Z) + C * std::cos(Y);
                u[1].v[i] = B * std::sin(X) + A * std::cos(Z);
                u[2].v[i] = C * std::sin(Y) + B * std::cos(X);
            }
    return u;
}

VectorField3 initial_random_bandlimited(const Grid3& grid, std::uint64_t seed, int k_min,
                                        int k_max, double energy) {
    const int cut = grid.n / 3;
    if (k_min < 1 || k_max < k_min || k_max > cut)
        throw FieldError("random band [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                         "] outside the resolvable range [1, " + std::to_string(cut) + "]");
    if (!(energy > 0.0)) throw FieldError("random field energy must be positive");

    // deterministic white noise (explicit Box-Muller over mt19937_64)
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (double(rng() >> 11) + 0.5) * 0x1.0p-53; };
    VectorField3 u(grid);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = std::sqrt(-2.0 * std::log(uniform()));
            u[c].v[i] = r * std::cos(2.0 * M_PI * uniform());
        }

    Fft fft(grid);
    SpectralVector s = fft.forward(u);
    const int n = grid.n, nxh = n / 2 + 1;
#pragma omp parallel for collapse(2) schedule(static)
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int kx = 0; kx < nxh; ++kx) {
                const int m2 = kx * kx + signed_mode(iy, n) * signed_mode(iy, n) +
                               signed_mode(iz, n) * signed_mode(iz, n);
                if (m2 < k_min * k_min || m2 > k_max * k_max) {
                    const std::size_t idx = s[0].index(kx, iy, iz);
                    s[0].c[idx] = s[1].c[idx] = s[2].c[idx] = 0.0;
                }
            }
    project_solenoidal(fft, s);
    zero_mean(s);
    u = fft.inverse(s);

    double e_now = 0.0;
    for (int c = 0; c < 3; ++c) e_now += 0.5 * grid.h * grid.h * grid.h * det_dot(u[c].v, u[c].v);
    if (!(e_now > 0.0)) throw FieldError("random band produced an empty field");
    const double volume = grid.length * grid.length * grid.length;
    const double scale = std::sqrt(energy * volume / e_now);
    for (int c = 0; c < 3; ++c)
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)grid.size(); ++i) u[c].v[i] *= scale;
    return u;
}

}  // namespace enscade
