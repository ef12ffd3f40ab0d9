#include "enscade/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "enscade/reduce.hpp"

namespace enscade {

namespace {

constexpr double kMemberFloor = 1e-14;  ///< grid max below which a piece is counted, not stored

std::array<int, 3> clamp_lo(const std::array<std::array<double, 2>, 3>& box, const Grid3& g) {
    std::array<int, 3> lo;
    for (int a = 0; a < 3; ++a)
        lo[a] = std::max(0, (int)std::ceil((box[a][0] + 0.5 * g.length) / g.h));
    return lo;
}

std::array<int, 3> clamp_hi(const std::array<std::array<double, 2>, 3>& box, const Grid3& g) {
    std::array<int, 3> hi;
    for (int a = 0; a < 3; ++a)
        hi[a] = std::min(g.n - 1, (int)std::floor((box[a][1] + 0.5 * g.length) / g.h));
    return hi;
}

}  // namespace

std::size_t CutoffSamples::count() const {
    if (hi[0] < lo[0] || hi[1] < lo[1] || hi[2] < lo[2]) return 0;
    return std::size_t(hi[0] - lo[0] + 1) * std::size_t(hi[1] - lo[1] + 1) *
           std::size_t(hi[2] - lo[2] + 1);
}

std::size_t CutoffSamples::local_index(int ix, int iy, int iz) const {
    const std::size_t nx = std::size_t(hi[0] - lo[0] + 1);
    const std::size_t ny = std::size_t(hi[1] - lo[1] + 1);
    return std::size_t(ix - lo[0]) + nx * (std::size_t(iy - lo[1]) + ny * std::size_t(iz - lo[2]));
}

CutoffSamples sample_cutoff(const SpatialCutoff& fn, const Grid3& grid, double pow_exponent) {
    CutoffSamples s;
    const auto box = fn.support_box();
    s.lo = clamp_lo(box, grid);
    s.hi = clamp_hi(box, grid);
    const std::size_t count = s.count();
    s.psi.resize(count);
    s.gx.resize(count);
    s.gy.resize(count);
    s.gz.resize(count);
    s.lap.resize(count);
    s.psi_pow.resize(count);
    if (count == 0) return s;
    const int nx = s.hi[0] - s.lo[0] + 1, ny = s.hi[1] - s.lo[1] + 1, nz = s.hi[2] - s.lo[2] + 1;
    double vmax = 0.0;
#pragma omp parallel for collapse(2) schedule(static) reduction(max : vmax)
    for (int kz = 0; kz < nz; ++kz)
        for (int ky = 0; ky < ny; ++ky) {
            for (int kx = 0; kx < nx; ++kx) {
                const Point3 x = grid.node(s.lo[0] + kx, s.lo[1] + ky, s.lo[2] + kz);
                const CutoffEval e = fn.eval(x);
                const std::size_t i =
                    std::size_t(kx) + std::size_t(nx) * (std::size_t(ky) + std::size_t(ny) * kz);
                s.psi[i] = e.value;
                s.gx[i] = e.grad[0];
                s.gy[i] = e.grad[1];
                s.gz[i] = e.grad[2];
                s.lap[i] = e.lap;
                s.psi_pow[i] = e.value > 0.0 ? std::pow(e.value, pow_exponent) : 0.0;
                if (e.value > vmax) vmax = e.value;
            }
        }
    s.max_value = vmax;
    return s;
}

double box_dot(const ScalarField& f, const CutoffSamples& s, const std::vector<double>& w) {
    const std::size_t count = s.count();
    if (count == 0) return 0.0;
    const Grid3& g = f.grid;
    const int nx = s.hi[0] - s.lo[0] + 1, ny = s.hi[1] - s.lo[1] + 1;
    const double cell = g.h * g.h * g.h;
    const double sum = det_sum_indexed_serial(count, [&](std::size_t i) {
        const int kx = int(i % std::size_t(nx));
        const int ky = int((i / std::size_t(nx)) % std::size_t(ny));
        const int kz = int(i / (std::size_t(nx) * std::size_t(ny)));
        return f.v[g.index(s.lo[0] + kx, s.lo[1] + ky, s.lo[2] + kz)] * w[i];
    });
    return cell * sum;
}

CutoffEnsemble build_cover_ensemble(const SpatialCutoff& psi0, double R, double K1, double K2,
                                    const Grid3& grid, GeneratorWidth width) {
    const double R0 = psi0.scale();
    if (!(R > 0.0) || R > R0 * (1.0 + 1e-12))
        throw FieldError("ensemble scale must satisfy 0 < R <= R0");
    if (K1 < 64.0)
        throw FieldError("K1 must be >= 64 (lattice construction), got " + std::to_string(K1));
    if (K2 < 8.0)
        throw FieldError("K2 must be >= 8 (lattice construction), got " + std::to_string(K2));

    CutoffEnsemble e;
    e.R = R;
    e.R0 = R0;
    e.K1 = K1;
    e.K2 = K2;
    e.rho = psi0.rho();
    e.grid = grid;
    e.psi0 = psi0;
    e.psi0_samples = sample_cutoff(psi0, grid, 2.0 * psi0.rho() - 1.0);

    const double pow_exp = 2.0 * psi0.rho() - 1.0;
    if (std::fabs(R - R0) <= 1e-12 * R0) {
        e.C0 = psi0.c0();
        e.nominal_n = 1;
        e.members.push_back(psi0);
        e.samples.push_back(e.psi0_samples);
    } else {
        Refinement ref = refine(psi0, R, width);
        e.C0 = ref.children.empty() ? psi0.c0() : ref.children.front().c0();
        const double ratio3 = (R0 / R) * (R0 / R) * (R0 / R);
        e.nominal_n = (long long)std::ceil(ratio3 - 1e-9);
        for (SpatialCutoff& child : ref.children) {
            CutoffSamples s = sample_cutoff(child, grid, pow_exp);
            if (s.max_value < kMemberFloor) {
                ++e.dropped_members;
                continue;
            }
            e.members.push_back(std::move(child));
            e.samples.push_back(std::move(s));
        }
    }

    const EnsembleValidation v = validate(e);
    if (!v.pass())
        throw FieldError("cover ensemble failed its own property validation (overlap " +
                         std::to_string(v.max_overlap) + ", surplus " +
                         std::to_string(v.min_cover_surplus) + ")");
    return e;
}

double ensemble_average(const ScalarField& f, const CutoffEnsemble& e) {
    require_same_grid(f.grid, e.grid, "ensemble_average");
    const std::size_t n = e.members.size();
    std::vector<double> vals(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)n; ++i)
        vals[std::size_t(i)] = box_dot(f, e.samples[std::size_t(i)], e.samples[std::size_t(i)].psi);
    const double total = pairwise_combine(vals);
    return total / (double(e.nominal_n) * e.R * e.R * e.R);
}

double large_scale_mean(const ScalarField& f, const SpatialCutoff& psi0, const Grid3& grid) {
    require_same_grid(f.grid, grid, "large_scale_mean");
    const CutoffSamples s = sample_cutoff(psi0, grid, 1.0);
    const double R0 = psi0.scale();
    return box_dot(f, s, s.psi) / (R0 * R0 * R0);
}

double modified_average(const ScalarField& f, const CutoffEnsemble& e, double delta) {
    if (!(delta > 0.0)) throw FieldError("modified_average: delta must be positive");
    require_same_grid(f.grid, e.grid, "modified_average");
    const std::size_t n = e.members.size();
    std::vector<double> vals(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)n; ++i) {
        const CutoffSamples& s = e.samples[std::size_t(i)];
        std::vector<double> w(s.psi.size());
        for (std::size_t j = 0; j < w.size(); ++j)
            w[j] = s.psi[j] > 0.0 ? std::pow(s.psi[j], delta) : 0.0;
        vals[std::size_t(i)] = box_dot(f, s, w);
    }
    const double total = pairwise_combine(vals);
    return total / (double(e.nominal_n) * e.R * e.R * e.R);
}

CutoffEnsemble refine_ensemble(const CutoffEnsemble& e, double child_scale,
                               GeneratorWidth width) {
    if (!(child_scale > 0.0) || !(child_scale < e.R))
        throw FieldError("refine_ensemble: need 0 < R' < R");
    const double ratio3 = std::pow(e.R / child_scale, 3.0);
    const double rounded = std::round(ratio3);
    if (std::fabs(ratio3 - rounded) > 1e-9 * rounded)
        throw FieldError("refine_ensemble: (R/R')^3 must be integral to preserve averages, got " +
                         std::to_string(ratio3));

    CutoffEnsemble out;
    out.R = child_scale;
    out.R0 = e.R0;
    out.K1 = 64.0 * e.K1;
    out.K2 = 8.0 * e.K2;
    out.rho = e.rho;
    out.grid = e.grid;
    out.psi0 = e.psi0;
    out.psi0_samples = e.psi0_samples;
    out.nominal_n = e.nominal_n * (long long)rounded;

    const double pow_exp = 2.0 * e.rho - 1.0;
    double child_c0 = e.C0;
    for (const SpatialCutoff& member : e.members) {
        Refinement ref = refine(member, child_scale, width);
        if (!ref.children.empty()) child_c0 = ref.children.front().c0();
        for (SpatialCutoff& child : ref.children) {
            CutoffSamples s = sample_cutoff(child, e.grid, pow_exp);
            if (s.max_value < kMemberFloor) {
                ++out.dropped_members;
                continue;
            }
            out.members.push_back(std::move(child));
            out.samples.push_back(std::move(s));
        }
    }
    out.C0 = child_c0;
    return out;
}

EnsembleValidation validate(const CutoffEnsemble& e) {
    EnsembleValidation v;
    v.nominal_n = e.nominal_n;
    const Grid3& g = e.grid;

    // accumulate member sums and support multiplicity (member order fixed)
    std::vector<double> sum(g.size(), 0.0);
    std::vector<int> mult(g.size(), 0);
    double max_excess = -1e300;
    for (std::size_t m = 0; m < e.members.size(); ++m) {
        const CutoffSamples& s = e.samples[m];
        const SpatialCutoff& fn = e.members[m];
        if (s.count() == 0) continue;
        const int nx = s.hi[0] - s.lo[0] + 1, ny = s.hi[1] - s.lo[1] + 1,
                  nz = s.hi[2] - s.lo[2] + 1;
        double excess = -1e300;
#pragma omp parallel for collapse(2) schedule(static) reduction(max : excess)
        for (int kz = 0; kz < nz; ++kz)
            for (int ky = 0; ky < ny; ++ky)
                for (int kx = 0; kx < nx; ++kx) {
                    const int ix = s.lo[0] + kx, iy = s.lo[1] + ky, iz = s.lo[2] + kz;
                    const std::size_t gi = g.index(ix, iy, iz);
                    const std::size_t li = s.local_index(ix, iy, iz);
                    sum[gi] += s.psi[li];
                    if (fn.supports(g.node(ix, iy, iz))) ++mult[gi];
                    const double psi0v =
                        (ix >= e.psi0_samples.lo[0] && ix <= e.psi0_samples.hi[0] &&
                         iy >= e.psi0_samples.lo[1] && iy <= e.psi0_samples.hi[1] &&
                         iz >= e.psi0_samples.lo[2] && iz <= e.psi0_samples.hi[2])
                            ? e.psi0_samples.psi[e.psi0_samples.local_index(ix, iy, iz)]
                            : 0.0;
                    const double d = s.psi[li] - psi0v;
                    if (d > excess) excess = d;
                }
        if (excess > max_excess) max_excess = excess;
    }
    v.max_member_excess = max_excess == -1e300 ? 0.0 : max_excess;

    // cover surplus over the support of psi0, multiplicity over B(0, 2 R0)
    const CutoffSamples& p0 = e.psi0_samples;
    double smin = 1e300, smax = -1e300;
    int omax = 0;
    const double region = 2.0 * e.R0;
#pragma omp parallel for collapse(2) schedule(static) reduction(min : smin) \
    reduction(max : smax, omax)
    for (int iz = p0.lo[2]; iz <= p0.hi[2]; ++iz)
        for (int iy = p0.lo[1]; iy <= p0.hi[1]; ++iy)
            for (int ix = p0.lo[0]; ix <= p0.hi[0]; ++ix) {
                const std::size_t gi = g.index(ix, iy, iz);
                const double surplus = sum[gi] - p0.psi[p0.local_index(ix, iy, iz)];
                if (surplus < smin) smin = surplus;
                if (surplus > smax) smax = surplus;
                const Point3 x = g.node(ix, iy, iz);
                if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < region * region)
                    if (mult[gi] > omax) omax = mult[gi];
            }
    v.min_cover_surplus = smin == 1e300 ? 0.0 : smin;
    v.max_cover_surplus = smax == -1e300 ? 0.0 : smax;
    v.max_overlap = omax;

    const double ratio3 = std::pow(e.R0 / e.R, 3.0);
    v.domination_pass = v.max_member_excess <= 1e-12;
    v.cover_pass = v.min_cover_surplus >= -1e-12;
    v.count_pass = double(e.nominal_n) >= ratio3 * (1.0 - 1e-12) &&
                   double(e.nominal_n) <= e.K1 * ratio3 * (1.0 + 1e-12);
    v.overlap_pass = double(v.max_overlap) <= e.K2;
    return v;
}

}  // namespace enscade
