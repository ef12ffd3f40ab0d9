#include "enscade/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "enscade/quadrature.hpp"
#include "enscade/reduce.hpp"
#include "enscade/spectral_ops.hpp"

namespace enscade {

namespace {

/// Per-axis derivatives of all three components of a spectral vector field.
std::array<VectorField3, 3> gradients_of(const Fft& fft, const SpectralVector& s) {
    const Grid3& g = fft.grid();
    const double tpl = fft.two_pi_over_l();
    const std::complex<double> I(0.0, 1.0);
    const int n = g.n, nxh = n / 2 + 1;
    std::array<VectorField3, 3> out{VectorField3(g), VectorField3(g), VectorField3(g)};
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
            SpectralScalar d(g);
#pragma omp parallel for collapse(2) schedule(static)
            for (int iz = 0; iz < n; ++iz)
                for (int iy = 0; iy < n; ++iy) {
                    const double kz = tpl * signed_mode(iz, n);
                    const double ky = tpl * signed_mode(iy, n);
                    const std::size_t row =
                        std::size_t(nxh) * (std::size_t(iy) + std::size_t(n) * iz);
                    for (int kx = 0; kx < nxh; ++kx) {
                        double k = a == 0 ? tpl * kx : (a == 1 ? ky : kz);
                        // Nyquist plane carries no consistent odd derivative
                        const int mi = a == 0 ? kx : (a == 1 ? signed_mode(iy, n)
                                                            : signed_mode(iz, n));
                        if (2 * std::abs(mi) == n) k = 0.0;
                        d.c[row + kx] = I * k * s[c].c[row + kx];
                    }
                }
            out[a][c] = fft.inverse(d);
        }
    return out;
}

/// Derived per-snapshot fields used by the budget terms.
struct Derived {
    VectorField3 u;
    ScalarField e;        ///< (1/2)|omega|^2
    ScalarField palin;    ///< |grad omega|^2
    ScalarField stretch;  ///< (omega . grad u) . omega
    ScalarField advect;   ///< (u . grad omega) . omega
};

Derived derive_fields(const VectorField3& omega, const Fft& fft, bool want_palin,
                      bool want_stretch, bool want_advect) {
    const Grid3& g = fft.grid();
    Derived d;
    SpectralVector what = fft.forward(omega);
    SpectralVector uhat(g);
    velocity_spectral(fft, what, uhat);
    d.u = fft.inverse(uhat);
    d.e = ScalarField(g);
    const std::size_t count = g.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)count; ++i)
        d.e.v[i] = 0.5 * (omega[0].v[i] * omega[0].v[i] + omega[1].v[i] * omega[1].v[i] +
                          omega[2].v[i] * omega[2].v[i]);
    if (want_palin || want_advect) {
        const std::array<VectorField3, 3> dw = gradients_of(fft, what);
        if (want_palin) {
            d.palin = ScalarField(g);
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < (long long)count; ++i) {
                double s = 0.0;
                for (int a = 0; a < 3; ++a)
                    for (int c = 0; c < 3; ++c) s += dw[a][c].v[i] * dw[a][c].v[i];
                d.palin.v[i] = s;
            }
        }
        if (want_advect) {
            d.advect = ScalarField(g);
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < (long long)count; ++i) {
                double s = 0.0;
                for (int a = 0; a < 3; ++a) {
                    double row = 0.0;
                    for (int c = 0; c < 3; ++c) row += dw[a][c].v[i] * omega[c].v[i];
                    s += d.u[a].v[i] * row;
                }
                d.advect.v[i] = s;
            }
        }
    }
    if (want_stretch) {
        const std::array<VectorField3, 3> du = gradients_of(fft, uhat);
        d.stretch = ScalarField(g);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)count; ++i) {
            double s = 0.0;
            for (int a = 0; a < 3; ++a) {
                double row = 0.0;
                for (int c = 0; c < 3; ++c) row += du[a][c].v[i] * omega[c].v[i];
                s += omega[a].v[i] * row;
            }
            d.stretch.v[i] = s;
        }
    }
    return d;
}

/// h^3 sum over the sample box of field * weight (deterministic order).
double box_sum(const ScalarField& f, const CutoffSamples& s, const std::vector<double>& w) {
    return box_dot(f, s, w);
}

/// h^3 sum over the sample box of e * (u . grad psi).
double box_flux(const ScalarField& e, const VectorField3& u, const CutoffSamples& s) {
    const std::size_t count = s.count();
    if (count == 0) return 0.0;
    const Grid3& g = e.grid;
    const int nx = s.hi[0] - s.lo[0] + 1, ny = s.hi[1] - s.lo[1] + 1;
    const double cell = g.h * g.h * g.h;
    const double sum = det_sum_indexed_serial(count, [&](std::size_t i) {
        const int kx = int(i % std::size_t(nx));
        const int ky = int((i / std::size_t(nx)) % std::size_t(ny));
        const int kz = int(i / (std::size_t(nx) * std::size_t(ny)));
        const std::size_t gi = g.index(s.lo[0] + kx, s.lo[1] + ky, s.lo[2] + kz);
        const double udg =
            u[0].v[gi] * s.gx[i] + u[1].v[gi] * s.gy[i] + u[2].v[gi] * s.gz[i];
        return e.v[gi] * udg;
    });
    return cell * sum;
}

/// h^3 sum of 2 e over grid nodes within `radius` of `center`.
double ball_enstrophy(const ScalarField& e, const Point3& center, double radius) {
    const Grid3& g = e.grid;
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0, (int)std::ceil((center[a] - radius + 0.5 * g.length) / g.h));
        hi[a] = std::min(g.n - 1, (int)std::floor((center[a] + radius + 0.5 * g.length) / g.h));
    }
    if (lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]) return 0.0;
    const std::size_t nx = std::size_t(hi[0] - lo[0] + 1);
    const std::size_t ny = std::size_t(hi[1] - lo[1] + 1);
    const std::size_t nz = std::size_t(hi[2] - lo[2] + 1);
    const double r2 = radius * radius;
    const double sum = det_sum_indexed_serial(nx * ny * nz, [&](std::size_t i) {
        const int ix = lo[0] + int(i % nx);
        const int iy = lo[1] + int((i / nx) % ny);
        const int iz = lo[2] + int(i / (nx * ny));
        const double dx = g.coord(ix) - center[0];
        const double dy = g.coord(iy) - center[1];
        const double dz = g.coord(iz) - center[2];
        if (dx * dx + dy * dy + dz * dz >= r2) return 0.0;
        return 2.0 * e.v[g.index(ix, iy, iz)];
    });
    return g.h * g.h * g.h * sum;
}

}  // namespace

ScalarField flux_density(const Trajectory& traj, const TemporalCutoff& eta, const Fft& fft) {
    traj.validate();
    require_same_grid(traj.grid, fft.grid(), "flux_density");
    ScalarField f(traj.grid);
    if (!traj.advective() || traj.times.size() < 2) return f;  // no advection term
    const std::vector<double> w = traj.quadrature_weights();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double coeff = w[k] * eta.value(traj.times[k]) / traj.T;
        if (coeff == 0.0) continue;
        const Derived d = derive_fields(traj.snapshots[k], fft, false, false, true);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)f.v.size(); ++i) f.v[i] -= coeff * d.advect.v[i];
    }
    return f;
}

LocalizedFlux localized_flux(const ScalarField& f, const CutoffEnsemble& e,
                             const Trajectory& traj, const TemporalCutoff& eta, const Fft& fft) {
    require_same_grid(f.grid, e.grid, "localized_flux");
    const std::size_t n = e.members.size();
    LocalizedFlux out;
    out.f_form.resize(n, 0.0);
    out.ibp_form.resize(n, 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)n; ++i)
        out.f_form[std::size_t(i)] =
            traj.T * box_sum(f, e.samples[std::size_t(i)], e.samples[std::size_t(i)].psi);

    if (traj.advective() && traj.times.size() >= 2) {
        const std::vector<double> w = traj.quadrature_weights();
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const double coeff = w[k] * eta.value(traj.times[k]);
            if (coeff == 0.0) continue;
            const Derived d = derive_fields(traj.snapshots[k], fft, false, false, false);
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < (long long)n; ++i)
                out.ibp_form[std::size_t(i)] +=
                    coeff * box_flux(d.e, d.u, e.samples[std::size_t(i)]);
        }
    }
    out.average = ensemble_average(f, e);
    double fmax = 0.0;
    for (double v : out.f_form) fmax = std::max(fmax, std::fabs(v));
    double dis = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double denom =
            std::max(std::fabs(out.f_form[i]) + std::fabs(out.ibp_form[i]), 1e-12 * fmax) +
            1e-300;
        dis = std::max(dis, std::fabs(out.f_form[i] - out.ibp_form[i]) / denom);
    }
    out.max_disagreement = dis;
    return out;
}

FluxBudget flux_budget(const Trajectory& traj, const CutoffEnsemble& e,
                       const TemporalCutoff& eta, const Fft& fft) {
    traj.validate();
    require_same_grid(traj.grid, e.grid, "flux_budget");
    const std::size_t n = e.members.size();
    FluxBudget out;
    out.members.resize(n);
    if (traj.times.size() < 2)
        throw FieldError("flux_budget needs a trajectory with at least two snapshots");

    const std::vector<double> w = traj.quadrature_weights();
    std::vector<double> sup_loc(n, 0.0);
    std::vector<Point3> centers(n);
    std::vector<double> wide_radius(n);
    for (std::size_t i = 0; i < n; ++i) {
        centers[i] = e.members[i].center();
        const double R = e.members[i].scale();
        wide_radius[i] = 2.0 * R + std::pow(R, 2.0 / 3.0);
    }

    const bool advective = traj.advective();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        const double ev = eta.value(t);
        const double ed = eta.deriv(t);
        const Derived d =
            derive_fields(traj.snapshots[k], fft, true, advective && ev * w[k] != 0.0, false);
#pragma omp parallel for schedule(static)
        for (long long li = 0; li < (long long)n; ++li) {
            const std::size_t i = std::size_t(li);
            const CutoffSamples& s = e.samples[i];
            MemberBudget& m = out.members[i];
            const double loc_ens = box_sum(d.e, s, s.psi);
            if (loc_ens > sup_loc[i]) sup_loc[i] = loc_ens;
            m.a_terminal += w[k] * ev * box_sum(d.palin, s, s.psi);
            m.b_cutoff += w[k] * (ed * loc_ens + ev * box_sum(d.e, s, s.lap));
            if (advective && ev * w[k] != 0.0) {
                m.c_stretch += w[k] * ev * box_sum(d.stretch, s, s.psi);
                m.flux += w[k] * ev * box_flux(d.e, d.u, s);
            }
            m.omega_star_ball += w[k] * ball_enstrophy(d.e, centers[i], e.members[i].scale());
            m.omega_star_wide += w[k] * ball_enstrophy(d.e, centers[i], wide_radius[i]);
        }
    }
    // terminal enstrophy term and assembly
    const Derived dT = derive_fields(traj.terminal(), fft, false, false, false);
    double max_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        MemberBudget& m = out.members[i];
        const double terminal = box_sum(dT.e, e.samples[i], e.samples[i].psi);
        m.a_sup = m.a_terminal + std::max(sup_loc[i], terminal);
        m.a_terminal += terminal;
        m.omega_star_ball = std::sqrt(std::max(0.0, m.omega_star_ball));
        m.omega_star_wide = std::sqrt(std::max(0.0, m.omega_star_wide));
        const double denom =
            std::fabs(m.a_terminal) + std::fabs(m.b_cutoff) + std::fabs(m.c_stretch) + 1e-14;
        m.residual = std::fabs(m.flux - (m.a_terminal - m.b_cutoff - m.c_stretch)) / denom;
        max_res = std::max(max_res, m.residual);
    }
    out.max_residual = max_res;
    return out;
}

ScalarField vortex_stretch_spectral(const VectorField3& omega, const Fft& fft) {
    require_finite(omega, "vortex_stretch_spectral");
    const Derived d = derive_fields(omega, fft, false, true, false);
    return d.stretch;
}

double vortex_stretch_kernel(const VectorField3& omega, const Point3& probe, double eps) {
    const Grid3& g = omega.grid;
    if (!(eps > 0.0)) throw FieldError("stretch kernel: eps must be positive");
    // the free-space kernel needs the support well away from the box edge
    double w_max = 0.0;
    for (int c = 0; c < 3; ++c) w_max = std::max(w_max, max_abs(omega[c]));
    const double margin = 0.35 * g.length;
    for (int c = 0; c < 3; ++c)
        for (int iz = 0; iz < g.n; ++iz)
            for (int iy = 0; iy < g.n; ++iy)
                for (int ix = 0; ix < g.n; ++ix) {
                    if (std::fabs(omega[c](ix, iy, iz)) <= 1e-13 * w_max) continue;
                    const Point3 x = g.node(ix, iy, iz);
                    if (std::fabs(x[0]) > margin || std::fabs(x[1]) > margin ||
                        std::fabs(x[2]) > margin)
                        throw FieldError("stretch kernel: vorticity support touches the box "
                                         "boundary region");
                }

    // snap the probe to the nearest node so the excised neighborhood is
    // lattice-symmetric (that symmetry is what makes the pv limit converge)
    int pi[3];
    for (int a = 0; a < 3; ++a) {
        pi[a] = (int)std::llround((probe[a] + 0.5 * g.length) / g.h);
        pi[a] = std::clamp(pi[a], 0, g.n - 1);
    }
    const Point3 x = g.node(pi[0], pi[1], pi[2]);
    const std::size_t px = g.index(pi[0], pi[1], pi[2]);
    const Point3 wx{omega[0].v[px], omega[1].v[px], omega[2].v[px]};
    // cells whose cube intersects B(x, eps) are dropped
    const double excise = eps + 0.5 * std::sqrt(3.0) * g.h;
    const double ex2 = excise * excise;

    const double sum = det_sum_indexed(g.size(), [&](std::size_t i) {
        const int ix = int(i % std::size_t(g.n));
        const int iy = int((i / std::size_t(g.n)) % std::size_t(g.n));
        const int iz = int(i / (std::size_t(g.n) * std::size_t(g.n)));
        const double rx = x[0] - g.coord(ix);
        const double ry = x[1] - g.coord(iy);
        const double rz = x[2] - g.coord(iz);
        const double r2 = rx * rx + ry * ry + rz * rz;
        if (r2 <= ex2) return 0.0;
        const double rn = std::sqrt(r2);
        const double inv3 = 1.0 / (r2 * rn);
        const double inv5 = inv3 / r2;
        const double rdw = rx * wx[0] + ry * wx[1] + rz * wx[2];
        // G_k = w_k(x)/r^3 - 3 r_k (r . w(x))/r^5
        const double Gx = wx[0] * inv3 - 3.0 * rx * rdw * inv5;
        const double Gy = wx[1] * inv3 - 3.0 * ry * rdw * inv5;
        const double Gz = wx[2] * inv3 - 3.0 * rz * rdw * inv5;
        const double wy0 = omega[0].v[i], wy1 = omega[1].v[i], wy2 = omega[2].v[i];
        const double cx = wx[1] * wy2 - wx[2] * wy1;
        const double cy = wx[2] * wy0 - wx[0] * wy2;
        const double cz = wx[0] * wy1 - wx[1] * wy0;
        return cx * Gx + cy * Gy + cz * Gz;
    });
    return g.h * g.h * g.h * sum / (4.0 * M_PI);
}

ScaleStats mean_scales(const Trajectory& traj, const SpatialCutoff& psi0,
                       const TemporalCutoff& eta, const Fft& fft) {
    traj.validate();
    const double R0 = psi0.scale();
    const double norm = 1.0 / (traj.T * R0 * R0 * R0);
    const double pw = 2.0 * psi0.rho() - 1.0;
    const CutoffSamples s = sample_cutoff(psi0, traj.grid, pw);
    const std::vector<double> w = traj.quadrature_weights();
    ScaleStats out;
    if (traj.times.size() < 2) return out;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double ev = eta.value(traj.times[k]);
        const Derived d = derive_fields(traj.snapshots[k], fft, ev * w[k] != 0.0, false, false);
        if (ev * w[k] != 0.0) {
            out.E0 += w[k] * std::pow(ev, pw) * box_sum(d.e, s, s.psi_pow) * norm;
            out.P0 += w[k] * ev * box_sum(d.palin, s, s.psi) * norm;
        }
    }
    const Derived dT = derive_fields(traj.terminal(), fft, false, false, false);
    out.P0 += 2.0 * box_sum(dT.e, s, s.psi) * norm;  // |omega(T)|^2 = 2 e(T)
    if (out.P0 > 0.0) out.sigma0 = std::sqrt(out.E0 / out.P0);
    return out;
}

double sup_l1_vorticity(const Trajectory& traj) {
    double sup = 0.0;
    const Grid3& g = traj.grid;
    for (const VectorField3& snap : traj.snapshots) {
        const double v = g.h * g.h * g.h * det_sum_indexed(g.size(), [&](std::size_t i) {
                             return std::sqrt(snap[0].v[i] * snap[0].v[i] +
                                              snap[1].v[i] * snap[1].v[i] +
                                              snap[2].v[i] * snap[2].v[i]);
                         });
        sup = std::max(sup, v);
    }
    return sup;
}

MorreyResult morrey_norm(const Trajectory& traj, double q, double R0, const MorreyParams& p) {
    if (!(q > 2.0)) throw FieldError("morrey_norm: q must exceed 2");
    traj.validate();
    const Grid3& g = traj.grid;
    MorreyResult out;
    out.q = q;
    out.region_radius = 2.0 * R0 + std::pow(R0, 2.0 / 3.0);

    // radius ladder, ascending, dyadic by default
    std::vector<double> radii;
    const double rmin = p.min_radius_cells * g.h;
    const double factor = std::pow(2.0, 1.0 / std::max(1, p.radii_per_octave));
    for (double r = out.region_radius; r >= rmin; r /= factor) radii.push_back(r);
    std::sort(radii.begin(), radii.end());
    out.radii = radii;
    if (radii.empty()) return out;

    // center subsample: strided nodes inside the region
    std::vector<std::array<int, 3>> centers;
    const int stride = std::max(1, p.center_stride);
    for (int iz = 0; iz < g.n; iz += stride)
        for (int iy = 0; iy < g.n; iy += stride)
            for (int ix = 0; ix < g.n; ix += stride) {
                const Point3 x = g.node(ix, iy, iz);
                if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <
                    out.region_radius * out.region_radius)
                    centers.push_back({ix, iy, iz});
            }
    out.centers = centers.size();
    if (centers.empty()) return out;

    const double expo = 3.0 * (1.0 - 2.0 / q);
    std::vector<double> denom(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) denom[j] = std::pow(radii[j], expo);

    const std::vector<double> w = traj.quadrature_weights();
    const double cell = g.h * g.h * g.h;
    double time_integral = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (w[k] == 0.0 && traj.times.size() > 1) continue;
        const VectorField3& snap = traj.snapshots[k];
        double snap_sup = 0.0;
#pragma omp parallel for schedule(dynamic, 1) reduction(max : snap_sup)
        for (long long ci = 0; ci < (long long)centers.size(); ++ci) {
            const auto& c = centers[std::size_t(ci)];
            const Point3 y = g.node(c[0], c[1], c[2]);
            const double rmax = radii.back();
            int lo[3], hi[3];
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::max(0, (int)std::ceil((y[a] - rmax + 0.5 * g.length) / g.h));
                hi[a] = std::min(g.n - 1, (int)std::floor((y[a] + rmax + 0.5 * g.length) / g.h));
            }
            std::vector<double> bins(radii.size(), 0.0);
            for (int iz = lo[2]; iz <= hi[2]; ++iz)
                for (int iy = lo[1]; iy <= hi[1]; ++iy)
                    for (int ix = lo[0]; ix <= hi[0]; ++ix) {
                        const Point3 xx = g.node(ix, iy, iz);
                        if (xx[0] * xx[0] + xx[1] * xx[1] + xx[2] * xx[2] >=
                            out.region_radius * out.region_radius)
                            continue;
                        const double dx = xx[0] - y[0], dy = xx[1] - y[1], dz = xx[2] - y[2];
                        const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                        const auto it = std::lower_bound(radii.begin(), radii.end(), dist);
                        if (it == radii.end()) continue;
                        const std::size_t bin = std::size_t(it - radii.begin());
                        const std::size_t gi = g.index(ix, iy, iz);
                        bins[bin] += snap[0].v[gi] * snap[0].v[gi] +
                                     snap[1].v[gi] * snap[1].v[gi] +
                                     snap[2].v[gi] * snap[2].v[gi];
                    }
            double acc = 0.0;
            for (std::size_t j = 0; j < radii.size(); ++j) {
                acc += bins[j];
                const double cand = cell * acc / denom[j];
                if (cand > snap_sup) snap_sup = cand;
            }
        }
        time_integral += (traj.times.size() == 1 ? 1.0 : w[k]) * snap_sup;
    }
    out.value = std::sqrt(std::max(0.0, time_integral));
    return out;
}

CoherenceResult coherence_estimate(const Trajectory& traj, double M, double R0,
                                   const CoherenceParams& p, const Fft& fft) {
    if (!(M > 0.0)) throw FieldError("coherence: gradient threshold must be positive");
    traj.validate();
    const Grid3& g = traj.grid;
    const double region = 2.0 * R0 + std::pow(R0, 2.0 / 3.0);
    const double inner = 2.0 * R0;
    CoherenceResult out;
    std::size_t violations = 0;

    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const VectorField3& omega = traj.snapshots[k];
        SpectralVector what = fft.forward(omega);
        SpectralVector uhat(g);
        velocity_spectral(fft, what, uhat);
        const std::array<VectorField3, 3> du = gradients_of(fft, uhat);

        std::vector<std::size_t> xs, ys;
        for (int iz = 0; iz < g.n; ++iz)
            for (int iy = 0; iy < g.n; ++iy)
                for (int ix = 0; ix < g.n; ++ix) {
                    const Point3 x = g.node(ix, iy, iz);
                    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                    if (r2 >= region * region) continue;
                    const std::size_t i = g.index(ix, iy, iz);
                    const double wmag =
                        std::sqrt(omega[0].v[i] * omega[0].v[i] + omega[1].v[i] * omega[1].v[i] +
                                  omega[2].v[i] * omega[2].v[i]);
                    if (wmag < 1e-12) continue;  // direction undefined
                    ys.push_back(i);
                    if (r2 < inner * inner) {
                        double gn = 0.0;
                        for (int a = 0; a < 3; ++a)
                            for (int c = 0; c < 3; ++c) gn += du[a][c].v[i] * du[a][c].v[i];
                        if (std::sqrt(gn) > M) xs.push_back(i);
                    }
                }
        out.qualifying_points += xs.size();
        // deterministic subsampling of both sides
        auto subsample = [&](std::vector<std::size_t>& v) {
            if (v.size() <= p.pair_budget || p.pair_budget == 0) return;
            const std::size_t stride = (v.size() + p.pair_budget - 1) / p.pair_budget;
            const std::size_t start = std::size_t(p.seed % stride);
            std::vector<std::size_t> keep;
            for (std::size_t i = start; i < v.size(); i += stride) keep.push_back(v[i]);
            v.swap(keep);
        };
        subsample(xs);
        subsample(ys);
        out.sampled_points += ys.size();
        out.pairs += xs.size() * ys.size();

        double c1 = out.c1;
        std::size_t viol = 0;
#pragma omp parallel for schedule(static) reduction(max : c1) reduction(+ : viol)
        for (long long a = 0; a < (long long)xs.size(); ++a) {
            const std::size_t ia = xs[std::size_t(a)];
            const int ax = int(ia % std::size_t(g.n));
            const int ay = int((ia / std::size_t(g.n)) % std::size_t(g.n));
            const int az = int(ia / (std::size_t(g.n) * std::size_t(g.n)));
            const Point3 xa = g.node(ax, ay, az);
            const double w0 = omega[0].v[ia], w1 = omega[1].v[ia], w2 = omega[2].v[ia];
            const double na = std::sqrt(w0 * w0 + w1 * w1 + w2 * w2);
            for (std::size_t b = 0; b < ys.size(); ++b) {
                const std::size_t ib = ys[b];
                if (ib == ia) continue;
                const int bx = int(ib % std::size_t(g.n));
                const int by = int((ib / std::size_t(g.n)) % std::size_t(g.n));
                const int bz = int(ib / (std::size_t(g.n) * std::size_t(g.n)));
                const Point3 xb = g.node(bx, by, bz);
                const double v0 = omega[0].v[ib], v1 = omega[1].v[ib], v2 = omega[2].v[ib];
                const double nb = std::sqrt(v0 * v0 + v1 * v1 + v2 * v2);
                const double cx = w1 * v2 - w2 * v1;
                const double cy = w2 * v0 - w0 * v2;
                const double cz = w0 * v1 - w1 * v0;
                const double sin_angle =
                    std::sqrt(cx * cx + cy * cy + cz * cz) / (na * nb);
                const double dx = xa[0] - xb[0], dy = xa[1] - xb[1], dz = xa[2] - xb[2];
                const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                const double ratio = sin_angle / std::sqrt(dist);
                if (ratio > c1) c1 = ratio;
                if (p.c1_reference > 0.0 && ratio > p.c1_reference) ++viol;
            }
        }
        out.c1 = c1;
        violations += viol;
    }
    out.violating_fraction = out.pairs > 0 ? double(violations) / double(out.pairs) : 0.0;
    return out;
}

double modulation_ratio(const Trajectory& traj, const SpatialCutoff& psi0) {
    traj.validate();
    const CutoffSamples s = sample_cutoff(psi0, traj.grid, 1.0);
    const Grid3& g = traj.grid;
    auto localized = [&](const VectorField3& snap) {
        const int nx = s.hi[0] - s.lo[0] + 1, ny = s.hi[1] - s.lo[1] + 1;
        if (s.count() == 0) return 0.0;
        const double sum = det_sum_indexed_serial(s.count(), [&](std::size_t i) {
            const int kx = int(i % std::size_t(nx));
            const int ky = int((i / std::size_t(nx)) % std::size_t(ny));
            const int kz = int(i / (std::size_t(nx) * std::size_t(ny)));
            const std::size_t gi = g.index(s.lo[0] + kx, s.lo[1] + ky, s.lo[2] + kz);
            return (snap[0].v[gi] * snap[0].v[gi] + snap[1].v[gi] * snap[1].v[gi] +
                    snap[2].v[gi] * snap[2].v[gi]) *
                   s.psi[i];
        });
        return g.h * g.h * g.h * sum;
    };
    const double terminal = localized(traj.terminal());
    double sup = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] <= 0.0) continue;
        sup = std::max(sup, localized(traj.snapshots[k]));
    }
    if (sup == 0.0) return 1.0;  // degenerate trajectory: 0/0 counts as modulated
    return terminal / sup;
}

}  // namespace enscade
