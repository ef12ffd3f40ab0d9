#include "enscade/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace enscade {

Transition ramp_transition(double s, RampKind kind) {
    if (s <= 0.0) return {1.0, 0.0, 0.0};
    if (s >= 1.0) return {0.0, 0.0, 0.0};
    if (kind == RampKind::cosine) {
        const double c = std::cos(M_PI * s);
        const double sn = std::sin(M_PI * s);
        return {0.5 * (1.0 + c), -0.5 * M_PI * sn, -0.5 * M_PI * M_PI * c};
    }
    // blended: cosine of w(s) = s - sin(2 pi s)/(2 pi); w' and w'' vanish at the
    // endpoints, which buys two extra continuous derivatives at the contact points.
    const double w = s - std::sin(2.0 * M_PI * s) / (2.0 * M_PI);
    const double w1 = 1.0 - std::cos(2.0 * M_PI * s);
    const double w2 = 2.0 * M_PI * std::sin(2.0 * M_PI * s);
    const double c = std::cos(M_PI * w);
    const double sn = std::sin(M_PI * w);
    Transition t;
    t.value = 0.5 * (1.0 + c);
    t.d1 = -0.5 * M_PI * sn * w1;
    t.d2 = -0.5 * M_PI * (c * M_PI * w1 * w1 + sn * w2);
    return t;
}

Bump1D::Bump1D(double plateau, double support, double power, RampKind kind)
    : a_(plateau), s_(support), w_(support - plateau), m_(power), kind_(kind) {
    if (!(plateau >= 0.0) || !(support > plateau))
        throw FieldError("bump: need 0 <= plateau < support");
    if (!(power >= 2.0)) throw FieldError("bump: power must be >= 2");
}

Transition Bump1D::eval(double x) const {
    const double t = std::fabs(x);
    if (t <= a_) return {1.0, 0.0, 0.0};
    if (t >= s_) return {0.0, 0.0, 0.0};
    const Transition th = ramp_transition((t - a_) / w_, kind_);
    const double sign = x < 0.0 ? -1.0 : 1.0;
    const double vm1 = std::pow(th.value, m_ - 1.0);
    const double vm2 = std::pow(th.value, m_ - 2.0);
    Transition out;
    out.value = vm1 * th.value;
    out.d1 = sign * (m_ / w_) * vm1 * th.d1;
    out.d2 = (m_ / (w_ * w_)) * ((m_ - 1.0) * vm2 * th.d1 * th.d1 + vm1 * th.d2);
    return out;
}

namespace {

double power_for_rho(double rho) {
    if (!(rho >= 0.5 && rho < 1.0))
        throw FieldError("rho must lie in [1/2, 1), got " + std::to_string(rho));
    return 1.0 / (1.0 - rho);
}

struct CertKey {
    long long m_fixed;
    RampKind kind;
    bool operator<(const CertKey& o) const {
        return m_fixed != o.m_fixed ? m_fixed < o.m_fixed : kind < o.kind;
    }
};

}  // namespace

ProfileCertificate certify_profile(double rho, RampKind kind) {
    static std::map<CertKey, ProfileCertificate> cache;
    static std::mutex mutex;
    const double m = power_for_rho(rho);
    const CertKey key{(long long)std::llround(m * 1e12), kind};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    // Radial profile with plateau 1, support 2: ratios depend on xi only.
    //   |grad| R / psi^rho          = m |theta'|
    //   |lap| R^2 / psi^(2 rho - 1) = m |(m-1) theta'^2 + theta theta'' + (2/r) theta theta'|
    const std::size_t sweep = 1u << 21;
    double grad_max = 0.0, lap_max = 0.0;
#pragma omp parallel for schedule(static) reduction(max : grad_max, lap_max)
    for (long long i = 0; i <= (long long)sweep; ++i) {
        const double xi = double(i) / double(sweep);
        const Transition th = ramp_transition(xi, kind);
        const double r = 1.0 + xi;
        const double g = m * std::fabs(th.d1);
        const double l = m * std::fabs((m - 1.0) * th.d1 * th.d1 + th.value * th.d2 +
                                       (2.0 / r) * th.value * th.d1);
        if (g > grad_max) grad_max = g;
        if (l > lap_max) lap_max = l;
    }
    ProfileCertificate cert;
    cert.grad_ratio = grad_max;
    cert.lap_ratio = lap_max;
    cert.c0_min = std::max(grad_max, lap_max) * (1.0 + 1e-9);
    std::lock_guard<std::mutex> lock(mutex);
    cache[key] = cert;
    return cert;
}

double certify_temporal(double rho, RampKind kind) {
    const double m = power_for_rho(rho);
    double grad_max = 0.0;
    const std::size_t sweep = 1u << 20;
    for (std::size_t i = 0; i <= sweep; ++i) {
        const double g = 3.0 * m * std::fabs(ramp_transition(double(i) / sweep, kind).d1);
        if (g > grad_max) grad_max = g;
    }
    return grad_max * (1.0 + 1e-9);
}

double auto_c0(double rho, RampKind kind) {
    const double spatial = certify_profile(rho, kind).c0_min;
    const double temporal =
        std::max(certify_temporal(rho, kind), certify_temporal(rho, RampKind::cosine));
    return 1.25 * std::max(spatial, temporal);
}

SpatialCutoff SpatialCutoff::make(const Point3& center, double radius, double c0, double rho,
                                  RampKind kind) {
    if (!(radius > 0.0)) throw FieldError("cutoff scale must be positive");
    const double m = power_for_rho(rho);
    const ProfileCertificate cert = certify_profile(rho, kind);
    if (!(c0 >= cert.c0_min))
        throw FieldError("C0 = " + std::to_string(c0) +
                         " is below the certified constant of this profile (" +
                         std::to_string(cert.c0_min) + ")");
    SpatialCutoff f;
    f.base_center_ = center;
    f.base_radius_ = radius;
    f.scale_ = radius;
    f.power_ = m;
    f.rho_ = rho;
    f.c0_ = c0;
    f.kind_ = kind;
    f.radial_ = Bump1D(radius, 2.0 * radius, m, kind);
    return f;
}

namespace {

/// Per-axis lattice sum S(x) = sum_j b(x - spacing j) with derivatives.
Transition lattice_sum(const Bump1D& b, double spacing, double x) {
    const double sh = b.support();
    const long j_lo = (long)std::ceil((x - sh) / spacing);
    const long j_hi = (long)std::floor((x + sh) / spacing);
    Transition s{0.0, 0.0, 0.0};
    for (long j = j_lo; j <= j_hi; ++j) {
        const Transition t = b.eval(x - spacing * double(j));
        s.value += t.value;
        s.d1 += t.d1;
        s.d2 += t.d2;
    }
    return s;
}

/// One normalized partition factor t = b_j / S with derivatives.
Transition partition_factor(const Bump1D& b, double spacing, long cell, double x) {
    const Transition bj = b.eval(x - spacing * double(cell));
    if (bj.value == 0.0) return {0.0, 0.0, 0.0};
    const Transition S = lattice_sum(b, spacing, x);
    Transition t;
    t.value = bj.value / S.value;
    t.d1 = (bj.d1 - t.value * S.d1) / S.value;
    t.d2 = (bj.d2 - 2.0 * t.d1 * S.d1 - t.value * S.d2) / S.value;
    return t;
}

}  // namespace

CutoffEval SpatialCutoff::eval(const Point3& x) const {
    // radial factor
    const double dx = x[0] - base_center_[0];
    const double dy = x[1] - base_center_[1];
    const double dz = x[2] - base_center_[2];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    const Transition rad = radial_.eval(r);
    if (rad.value == 0.0) return {};
    double rv = rad.value, rlap = 0.0;
    Point3 rgrad{0.0, 0.0, 0.0};
    if (rad.d1 != 0.0 || rad.d2 != 0.0) {
        rgrad = {rad.d1 * dx / r, rad.d1 * dy / r, rad.d1 * dz / r};
        rlap = rad.d2 + 2.0 * rad.d1 / r;
    }
    // per-axis multiplier products across refinement levels
    Transition axis[3] = {{1, 0, 0}, {1, 0, 0}, {1, 0, 0}};
    for (const LatticeLevel& lvl : levels_) {
        const Bump1D gen(lvl.plateau_half, lvl.support_half, lvl.power, lvl.kind);
        for (int a = 0; a < 3; ++a) {
            const Transition t = partition_factor(gen, lvl.spacing, lvl.cell[a], x[a]);
            if (t.value == 0.0) return {};
            const Transition p = axis[a];
            axis[a].value = p.value * t.value;
            axis[a].d1 = p.d1 * t.value + p.value * t.d1;
            axis[a].d2 = p.d2 * t.value + 2.0 * p.d1 * t.d1 + p.value * t.d2;
        }
    }
    const double f0 = axis[0].value, f1 = axis[1].value, f2 = axis[2].value;
    const double prod = f0 * f1 * f2;
    CutoffEval out;
    out.value = rv * prod;
    const double pair01 = f0 * f1, pair02 = f0 * f2, pair12 = f1 * f2;
    out.grad[0] = rgrad[0] * prod + rv * axis[0].d1 * pair12;
    out.grad[1] = rgrad[1] * prod + rv * axis[1].d1 * pair02;
    out.grad[2] = rgrad[2] * prod + rv * axis[2].d1 * pair01;
    out.lap = rlap * prod +
              2.0 * (rgrad[0] * axis[0].d1 * pair12 + rgrad[1] * axis[1].d1 * pair02 +
                     rgrad[2] * axis[2].d1 * pair01) +
              rv * (axis[0].d2 * pair12 + axis[1].d2 * pair02 + axis[2].d2 * pair01);
    return out;
}

double SpatialCutoff::value(const Point3& x) const {
    const double dx = x[0] - base_center_[0];
    const double dy = x[1] - base_center_[1];
    const double dz = x[2] - base_center_[2];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    double v = radial_.eval(r).value;
    if (v == 0.0) return 0.0;
    for (const LatticeLevel& lvl : levels_) {
        const Bump1D gen(lvl.plateau_half, lvl.support_half, lvl.power, lvl.kind);
        for (int a = 0; a < 3; ++a) {
            const Transition bj = gen.eval(x[a] - lvl.spacing * double(lvl.cell[a]));
            if (bj.value == 0.0) return 0.0;
            v *= bj.value / lattice_sum(gen, lvl.spacing, x[a]).value;
        }
    }
    return v;
}

bool SpatialCutoff::supports(const Point3& x) const {
    const double dx = x[0] - base_center_[0];
    const double dy = x[1] - base_center_[1];
    const double dz = x[2] - base_center_[2];
    if (dx * dx + dy * dy + dz * dz >= 4.0 * base_radius_ * base_radius_) return false;
    for (const LatticeLevel& lvl : levels_)
        for (int a = 0; a < 3; ++a)
            if (std::fabs(x[a] - lvl.spacing * double(lvl.cell[a])) >= lvl.support_half)
                return false;
    return true;
}

Point3 SpatialCutoff::center() const {
    if (levels_.empty()) return base_center_;
    const LatticeLevel& lvl = levels_.back();
    return {lvl.spacing * double(lvl.cell[0]), lvl.spacing * double(lvl.cell[1]),
            lvl.spacing * double(lvl.cell[2])};
}

std::array<std::array<double, 2>, 3> SpatialCutoff::support_box() const {
    std::array<std::array<double, 2>, 3> box;
    for (int a = 0; a < 3; ++a)
        box[a] = {base_center_[a] - 2.0 * base_radius_, base_center_[a] + 2.0 * base_radius_};
    for (const LatticeLevel& lvl : levels_)
        for (int a = 0; a < 3; ++a) {
            const double c = lvl.spacing * double(lvl.cell[a]);
            box[a][0] = std::max(box[a][0], c - lvl.support_half);
            box[a][1] = std::min(box[a][1], c + lvl.support_half);
        }
    return box;
}

double SpatialCutoff::support_radius() const {
    const auto box = support_box();
    const Point3 c = center();
    double r2 = 0.0;
    for (int cx = 0; cx < 2; ++cx)
        for (int cy = 0; cy < 2; ++cy)
            for (int cz = 0; cz < 2; ++cz) {
                const double dx = box[0][cx] - c[0];
                const double dy = box[1][cy] - c[1];
                const double dz = box[2][cz] - c[2];
                r2 = std::max(r2, dx * dx + dy * dy + dz * dz);
            }
    return std::sqrt(r2);
}

struct RefineAccess {
    static SpatialCutoff child(const SpatialCutoff& parent, const LatticeLevel& lvl,
                               double child_c0) {
        SpatialCutoff c = parent;
        c.levels_.push_back(lvl);
        c.scale_ = lvl.plateau_half;
        c.c0_ = child_c0;
        return c;
    }
};

Refinement refine(const SpatialCutoff& parent, double child_scale, GeneratorWidth width) {
    if (!(child_scale > 0.0) || !(child_scale < parent.scale()))
        throw FieldError("refine: child scale must satisfy 0 < R' < R (R = " +
                         std::to_string(parent.scale()) + ", R' = " +
                         std::to_string(child_scale) + ")");
    const double spacing = 2.0 * child_scale;
    const double support_half =
        width == GeneratorWidth::wide ? 2.0 * child_scale : 2.0 * child_scale / std::sqrt(3.0);

    const double lemma_c0 =
        std::max(parent.c0(), certify_profile(parent.rho(), parent.kind()).c0_min);
    const double child_c0 = 4.0 * lemma_c0 + 22.0 * lemma_c0 * lemma_c0;

    const auto pbox = parent.support_box();
    const Point3 bc = parent.base_center();
    const double ball_r = 2.0 * parent.base_radius();

    std::array<long, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
        lo[a] = (long)std::ceil((pbox[a][0] - support_half) / spacing);
        hi[a] = (long)std::floor((pbox[a][1] + support_half) / spacing);
    }

    Refinement out;
    out.lemma_c0 = lemma_c0;
    LatticeLevel lvl;
    lvl.spacing = spacing;
    lvl.plateau_half = child_scale;
    lvl.support_half = support_half;
    lvl.power = parent.power();
    lvl.kind = parent.kind();

    for (long pz = lo[2]; pz <= hi[2]; ++pz)
        for (long py = lo[1]; py <= hi[1]; ++py)
            for (long px = lo[0]; px <= hi[0]; ++px) {
                const std::array<long, 3> cell{px, py, pz};
                // exact support-overlap test: child box n parent box n parent ball
                double dist2 = 0.0;
                bool empty = false;
                for (int a = 0; a < 3; ++a) {
                    const double c = spacing * double(cell[a]);
                    const double blo = std::max(c - support_half, pbox[a][0]);
                    const double bhi = std::min(c + support_half, pbox[a][1]);
                    if (blo >= bhi) {
                        empty = true;
                        break;
                    }
                    const double clamped = std::clamp(bc[a], blo, bhi);
                    dist2 += (clamped - bc[a]) * (clamped - bc[a]);
                }
                if (empty || dist2 >= ball_r * ball_r) continue;
                ++out.candidate_count;
                lvl.cell = cell;
                out.children.push_back(RefineAccess::child(parent, lvl, child_c0));
            }
    return out;
}

TemporalCutoff TemporalCutoff::make(double total_time, double c0, double rho, RampKind kind) {
    if (!(total_time > 0.0)) throw FieldError("temporal cutoff: T must be positive");
    const double m = power_for_rho(rho);
    // |eta'| T / eta^rho = 3 m |theta'|; certify by dense sweep of the shape.
    double grad_max = 0.0;
    const std::size_t sweep = 1u << 20;
    for (std::size_t i = 0; i <= sweep; ++i) {
        const double g = 3.0 * m * std::fabs(ramp_transition(double(i) / sweep, kind).d1);
        if (g > grad_max) grad_max = g;
    }
    const double c0_min = grad_max * (1.0 + 1e-9);
    if (!(c0 >= c0_min))
        throw FieldError("C0 = " + std::to_string(c0) +
                         " is below the certified temporal constant (" + std::to_string(c0_min) +
                         ")");
    TemporalCutoff e;
    e.T_ = total_time;
    e.c0_ = c0;
    e.rho_ = rho;
    e.power_ = m;
    e.kind_ = kind;
    return e;
}

double TemporalCutoff::value(double t) const {
    if (t <= T_ / 3.0) return 0.0;
    if (t >= 2.0 * T_ / 3.0) return 1.0;
    const double xi = (t - T_ / 3.0) / (T_ / 3.0);
    return std::pow(ramp_transition(1.0 - xi, kind_).value, power_);
}

double TemporalCutoff::deriv(double t) const {
    if (t <= T_ / 3.0 || t >= 2.0 * T_ / 3.0) return 0.0;
    const double xi = (t - T_ / 3.0) / (T_ / 3.0);
    const Transition th = ramp_transition(1.0 - xi, kind_);
    return std::pow(th.value, power_ - 1.0) * power_ * th.d1 * (-3.0 / T_);
}

namespace {

constexpr double kValueFloor = 1e-250;

struct RatioMax {
    double grad = 0.0, lap = 0.0;
    std::size_t points = 0;
};

void ratio_at(const SpatialCutoff& psi, const Point3& x, double c0g, double c0l, RatioMax& acc) {
    const CutoffEval e = psi.eval(x);
    if (e.value <= kValueFloor) return;
    const double R = psi.scale();
    const double gmag = norm2(e.grad);
    const double g = gmag * R / (c0g * std::pow(e.value, psi.rho()));
    const double l =
        std::fabs(e.lap) * R * R / (c0l * std::pow(e.value, 2.0 * psi.rho() - 1.0));
    if (g > acc.grad) acc.grad = g;
    if (l > acc.lap) acc.lap = l;
    ++acc.points;
}

}  // namespace

BoundReport verify_bounds(const SpatialCutoff& psi, double c0_grad, double c0_lap,
                          const Grid3* grid, std::size_t sweep_points) {
    RatioMax acc;
    if (grid) {
        const auto box = psi.support_box();
        int lo[3], hi[3];
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::max(0, (int)std::ceil((box[a][0] + 0.5 * grid->length) / grid->h));
            hi[a] = std::min(grid->n - 1,
                             (int)std::floor((box[a][1] + 0.5 * grid->length) / grid->h));
        }
        double gmax = 0.0, lmax = 0.0;
        long long pts = 0;
#pragma omp parallel for collapse(2) schedule(static) reduction(max : gmax, lmax) \
    reduction(+ : pts)
        for (int iz = lo[2]; iz <= hi[2]; ++iz)
            for (int iy = lo[1]; iy <= hi[1]; ++iy) {
                RatioMax local;
                for (int ix = lo[0]; ix <= hi[0]; ++ix)
                    ratio_at(psi, grid->node(ix, iy, iz), c0_grad, c0_lap, local);
                if (local.grad > gmax) gmax = local.grad;
                if (local.lap > lmax) lmax = local.lap;
                pts += (long long)local.points;
            }
        acc.grad = gmax;
        acc.lap = lmax;
        acc.points = std::size_t(pts);
    }
    if (psi.levels().empty()) {
        // radial profile: exact 1D sweep along a ray
        const Point3 c = psi.base_center();
        const double R = psi.base_radius();
        double gmax = acc.grad, lmax = acc.lap;
#pragma omp parallel for schedule(static) reduction(max : gmax, lmax)
        for (long long i = 0; i <= (long long)sweep_points; ++i) {
            const double r = 2.0 * R * double(i) / double(sweep_points);
            RatioMax local;
            ratio_at(psi, {c[0] + r, c[1], c[2]}, c0_grad, c0_lap, local);
            if (local.grad > gmax) gmax = local.grad;
            if (local.lap > lmax) lmax = local.lap;
        }
        acc.grad = gmax;
        acc.lap = lmax;
        acc.points += sweep_points + 1;
    } else {
        // low-discrepancy sweep of the support box (R2 sequence)
        const auto box = psi.support_box();
        constexpr double a1 = 0.8191725133961645;   // 1/r, r = plastic constant
        constexpr double a2 = 0.6710436067037893;   // 1/r^2
        constexpr double a3 = 0.5497004779019703;   // 1/r^3
        double gmax = acc.grad, lmax = acc.lap;
#pragma omp parallel for schedule(static) reduction(max : gmax, lmax)
        for (long long i = 0; i < (long long)sweep_points; ++i) {
            const double f1 = std::fmod(0.5 + a1 * double(i + 1), 1.0);
            const double f2 = std::fmod(0.5 + a2 * double(i + 1), 1.0);
            const double f3 = std::fmod(0.5 + a3 * double(i + 1), 1.0);
            const Point3 x{box[0][0] + f1 * (box[0][1] - box[0][0]),
                           box[1][0] + f2 * (box[1][1] - box[1][0]),
                           box[2][0] + f3 * (box[2][1] - box[2][0])};
            RatioMax local;
            ratio_at(psi, x, c0_grad, c0_lap, local);
            if (local.grad > gmax) gmax = local.grad;
            if (local.lap > lmax) lmax = local.lap;
        }
        acc.grad = gmax;
        acc.lap = lmax;
        acc.points += sweep_points;
    }
    BoundReport rep;
    rep.max_grad_ratio = acc.grad;
    rep.max_lap_ratio = acc.lap;
    rep.points_checked = acc.points;
    rep.pass = acc.grad < 1.0 && acc.lap < 1.0;
    return rep;
}

BoundReport verify_bounds(const SpatialCutoff& psi, const Grid3* grid,
                          std::size_t sweep_points) {
    return verify_bounds(psi, psi.c0(), psi.c0(), grid, sweep_points);
}

BoundReport verify_bounds(const TemporalCutoff& eta, double c0_budget,
                          std::size_t sweep_points) {
    const double T = eta.total_time();
    double gmax = 0.0;
    std::size_t pts = 0;
#pragma omp parallel for schedule(static) reduction(max : gmax) reduction(+ : pts)
    for (long long i = 0; i <= (long long)sweep_points; ++i) {
        const double t = T * double(i) / double(sweep_points);
        const double v = eta.value(t);
        if (v <= kValueFloor) continue;
        const double ratio = std::fabs(eta.deriv(t)) * T / (c0_budget * std::pow(v, eta.rho()));
        if (ratio > gmax) gmax = ratio;
        ++pts;
    }
    BoundReport rep;
    rep.max_grad_ratio = gmax;
    rep.max_lap_ratio = 0.0;
    rep.points_checked = pts;
    rep.pass = gmax < 1.0;
    return rep;
}

BoundReport verify_bounds(const TemporalCutoff& eta, std::size_t sweep_points) {
    return verify_bounds(eta, eta.c0(), sweep_points);
}

PartitionScan scan_partition(double child_scale, double power, double rho, RampKind kind,
                             GeneratorWidth width, std::size_t sweep_points) {
    const double spacing = 2.0 * child_scale;
    const double support_half =
        width == GeneratorWidth::wide ? 2.0 * child_scale : 2.0 * child_scale / std::sqrt(3.0);
    const Bump1D gen(child_scale, support_half, power, kind);
    PartitionScan scan;
    scan.min_sum = 1e300;
    scan.max_sum = -1e300;
    double hmax = 0.0, smin = 1e300, smax = -1e300;
#pragma omp parallel for schedule(static) reduction(max : hmax, smax) reduction(min : smin)
    for (long long i = 0; i <= (long long)sweep_points; ++i) {
        // one full period is enough; scan across the central cell and beyond
        const double x = -spacing + 2.0 * spacing * double(i) / double(sweep_points);
        const Transition S = lattice_sum(gen, spacing, x);
        if (S.value < smin) smin = S.value;
        if (S.value > smax) smax = S.value;
        const Transition t = partition_factor(gen, spacing, 0, x);
        if (t.value > kValueFloor) {
            const double ratio =
                std::fabs(t.d1) * child_scale / std::pow(t.value, rho);
            if (ratio > hmax) hmax = ratio;
        }
    }
    scan.min_sum = smin;
    scan.max_sum = smax;
    scan.max_h_grad_ratio = hmax;
    return scan;
}

}  // namespace enscade
