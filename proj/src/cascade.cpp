#include "enscade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "enscade/version.hpp"

namespace enscade {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json row_json(const CascadeRow& r) {
    ordered_json j;
    j["R"] = r.R;
    j["kind"] = r.pinned ? "pinned" : "range";
    j["nominal_n"] = r.nominal_n;
    j["stored_members"] = r.stored_members;
    j["average_flux"] = r.average_flux;
    j["sum_a"] = r.sum_a;
    j["sum_b"] = r.sum_b;
    j["sum_c"] = r.sum_c;
    j["identity_residual"] = r.identity_residual;
    j["ibp_disagreement"] = r.ibp_disagreement;
    j["lower_bound"] = r.lower_bound;
    j["upper_bound"] = r.upper_bound;
    j["pass_lower"] = r.pass_lower;
    j["pass_upper"] = r.pass_upper;
    j["omega_star_ball_max"] = r.omega_star_ball_max;
    j["omega_star_wide_max"] = r.omega_star_wide_max;
    return j;
}

}  // namespace

std::string CascadeReport::to_json() const {
    ordered_json j;
    j["version"] = version;
    j["grid"] = {{"n", n}, {"L", L}};
    j["time"] = {{"T", T}};
    j["params"] = {{"R0", R0},
                   {"K1", params.K1},
                   {"K2", params.K2},
                   {"C0", params.C0},
                   {"rho", params.rho},
                   {"beta", params.beta},
                   {"q", params.q},
                   {"grad_threshold", params.grad_threshold},
                   {"coherence_c1", params.coherence_c1},
                   {"smallness_c", params.smallness_c}};
    // constants used by the sandwich verdicts, for auditability
    j["constants"] = {{"refine_count_factor", 64.0},
                      {"refine_overlap_bound", 8.0},
                      {"pinned_lower", 1.0 / (4.0 * params.K1)},
                      {"pinned_upper", params.K2 + 1.0 / (4.0 * params.K1)},
                      {"range_lower", 1.0 / (256.0 * params.K1)},
                      {"range_upper", 8.0 * params.K2 + 1.0 / (256.0 * params.K1)}};
    j["scales"]["E0"] = E0;
    j["scales"]["P0"] = P0;
    if (sigma0)
        j["scales"]["sigma0"] = *sigma0;
    else
        j["scales"]["sigma0"] = nullptr;
    j["scales"]["BT"] = BT;
    j["scales"]["morrey"] = {{"value", morrey.value},
                             {"q", morrey.q},
                             {"region_radius", morrey.region_radius},
                             {"centers", morrey.centers},
                             {"radii", morrey.radii}};
    j["scales"]["coherence"] = {{"c1", coherence.c1},
                                {"violating_fraction", coherence.violating_fraction},
                                {"qualifying_points", coherence.qualifying_points},
                                {"sampled_points", coherence.sampled_points},
                                {"pairs", coherence.pairs}};
    ordered_json a;
    a["coherence"] = {{"measured_c1", assumptions.coherence_c1},
                      {"violating_fraction", assumptions.coherence_violating_fraction},
                      {"checked", assumptions.coherence_checked},
                      {"pass", assumptions.coherence_pass}};
    a["kraichnan"] = {{"defined", assumptions.kraichnan_defined},
                      {"pass", assumptions.kraichnan_pass}};
    a["morrey_smallness"] = {{"raw", assumptions.morrey_raw},
                             {"threshold", assumptions.morrey_threshold},
                             {"checked", assumptions.morrey_checked},
                             {"pass", assumptions.morrey_pass}};
    a["modulation"] = {{"ratio", assumptions.modulation}, {"pass", assumptions.modulation_pass}};
    j["assumptions"] = a;
    j["degenerate"] = degenerate;
    ordered_json rows_j = ordered_json::array();
    for (const CascadeRow& r : rows) rows_j.push_back(row_json(r));
    j["rows"] = rows_j;
    j["notes"] = notes;
    return j.dump(2) + "\n";
}

std::string CascadeReport::to_csv() const {
    std::ostringstream out;
    out << "R,kind,nominal_n,stored_members,average_flux,sum_a,sum_b,sum_c,"
           "identity_residual,ibp_disagreement,lower_bound,upper_bound,pass_lower,pass_upper,"
           "omega_star_ball_max,omega_star_wide_max\n";
    out.precision(17);
    for (const CascadeRow& r : rows) {
        out << r.R << ',' << (r.pinned ? "pinned" : "range") << ',' << r.nominal_n << ','
            << r.stored_members << ',' << r.average_flux << ',' << r.sum_a << ',' << r.sum_b
            << ',' << r.sum_c << ',' << r.identity_residual << ',' << r.ibp_disagreement << ','
            << r.lower_bound << ',' << r.upper_bound << ',' << (r.pass_lower ? 1 : 0) << ','
            << (r.pass_upper ? 1 : 0) << ',' << r.omega_star_ball_max << ','
            << r.omega_star_wide_max << '\n';
    }
    return out.str();
}

CascadeReport cascade_verdict(const Trajectory& traj, const SpatialCutoff& psi0,
                              const VerdictParams& params, const Fft& fft) {
    traj.validate();
    CascadeReport rep;
    rep.version = std::string(kVersion);
    rep.n = traj.grid.n;
    rep.L = traj.grid.length;
    rep.T = traj.T;
    rep.R0 = psi0.scale();
    rep.params = params;
    rep.params.C0 = psi0.c0();

    const TemporalCutoff eta = TemporalCutoff::make(traj.T, psi0.c0(), psi0.rho());

    const ScaleStats scales = mean_scales(traj, psi0, eta, fft);
    rep.E0 = scales.E0;
    rep.P0 = scales.P0;
    rep.sigma0 = scales.sigma0;
    rep.BT = sup_l1_vorticity(traj);
    rep.morrey = morrey_norm(traj, params.q, rep.R0, params.morrey);
    CoherenceParams cp = params.coherence;
    cp.c1_reference = params.coherence_c1;
    rep.coherence = coherence_estimate(traj, params.grad_threshold, rep.R0, cp, fft);

    rep.assumptions.coherence_c1 = rep.coherence.c1;
    rep.assumptions.coherence_violating_fraction = rep.coherence.violating_fraction;
    rep.assumptions.coherence_checked = params.coherence_c1 > 0.0;
    rep.assumptions.coherence_pass =
        rep.assumptions.coherence_checked && rep.coherence.c1 <= params.coherence_c1;

    rep.assumptions.kraichnan_defined = scales.sigma0.has_value();
    rep.assumptions.kraichnan_pass =
        scales.sigma0 && *scales.sigma0 < params.beta * rep.R0;

    if (scales.sigma0) {
        rep.assumptions.morrey_raw =
            std::pow(*scales.sigma0, 1.0 - 2.0 / params.q) * rep.morrey.value;
        rep.assumptions.morrey_checked = params.smallness_c > 0.0;
        if (rep.assumptions.morrey_checked) {
            rep.assumptions.morrey_threshold =
                std::pow(0.5 * params.beta, 1.0 - 2.0 / params.q) / params.smallness_c;
            rep.assumptions.morrey_pass =
                rep.assumptions.morrey_raw < rep.assumptions.morrey_threshold;
        }
    }

    rep.assumptions.modulation = modulation_ratio(traj, psi0);
    rep.assumptions.modulation_pass = rep.assumptions.modulation >= 0.5;

    if (!scales.sigma0) {
        rep.degenerate = true;
        rep.notes.push_back("P0 = 0: sigma0 undefined, no scale sweep performed");
        return rep;
    }

    const double r_pin = *scales.sigma0 / params.beta;
    if (r_pin > rep.R0) {
        rep.notes.push_back("sigma0/beta exceeds R0: no inertial range, sweep empty");
        return rep;
    }

    // dyadic sweep R0, R0/2, ... down to sigma0/beta, plus the pinned scale itself
    std::vector<std::pair<double, bool>> scales_list;
    for (double R = rep.R0; R > r_pin * (1.0 + 1e-12); R *= 0.5) scales_list.push_back({R, false});
    if (!scales_list.empty() && std::fabs(scales_list.back().first - r_pin) <= 1e-12 * r_pin)
        scales_list.back().second = true;
    else
        scales_list.push_back({r_pin, true});

    const ScalarField f = flux_density(traj, eta, fft);
    for (const auto& [R, pinned] : scales_list) {
        CutoffEnsemble e =
            build_cover_ensemble(psi0, R, params.K1, params.K2, traj.grid, params.generator);
        CascadeRow row;
        row.R = R;
        row.pinned = pinned;
        row.nominal_n = e.nominal_n;
        row.stored_members = e.stored_count();
        row.average_flux = ensemble_average(f, e);

        const FluxBudget budget = flux_budget(traj, e, eta, fft);
        const double norm = 1.0 / (double(e.nominal_n) * traj.T * R * R * R);
        double sa = 0.0, sb = 0.0, sc = 0.0, osb = 0.0, osw = 0.0;
        for (const MemberBudget& m : budget.members) {
            sa += m.a_terminal;
            sb += m.b_cutoff;
            sc += m.c_stretch;
            osb = std::max(osb, m.omega_star_ball);
            osw = std::max(osw, m.omega_star_wide);
        }
        row.sum_a = sa * norm;
        row.sum_b = sb * norm;
        row.sum_c = sc * norm;
        row.identity_residual = budget.max_residual;
        row.omega_star_ball_max = osb;
        row.omega_star_wide_max = osw;

        const LocalizedFlux lf = localized_flux(f, e, traj, eta, fft);
        row.ibp_disagreement = lf.max_disagreement;

        if (pinned) {
            row.lower_bound = rep.P0 / (4.0 * params.K1);
            row.upper_bound = (params.K2 + 1.0 / (4.0 * params.K1)) * rep.P0;
        } else {
            row.lower_bound = rep.P0 / (256.0 * params.K1);
            row.upper_bound = (8.0 * params.K2 + 1.0 / (256.0 * params.K1)) * rep.P0;
        }
        row.pass_lower = row.average_flux >= row.lower_bound;
        row.pass_upper = row.average_flux <= row.upper_bound;
        rep.rows.push_back(row);
    }
    if (!traj.advective())
        rep.notes.push_back("non-advective trajectory: flux density is identically zero");
    return rep;
}

}  // namespace enscade
