#include "gbas/screening.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gbas/errors.hpp"

namespace gbas {

void ScreeningContext::validate() const
{
    threat.validate();
    limits.validate();
    if (combos.empty()) throw ConfigError("screening grid is empty");
    for (const auto& c : combos) {
        if (c.x_dh < 0.0 || c.x_aircraft < c.x_dh)
            throw ConfigError("combo requires 0 <= x_dh <= x_aircraft");
    }
    if (reference_combo >= combos.size()) throw ConfigError("reference combo outside grid");
    if (!(constants.k_ffmd > 0.0) || !(constants.k_md_eph > 0.0))
        throw ConfigError("integrity constants must be positive");
    if (!(aircraft.tau > 0.0) || aircraft.v_aircraft < 0.0)
        throw ConfigError("aircraft model requires tau > 0 and v >= 0");
    if (!(p_nominal >= 0.0)) throw ConfigError("P_k must be nonnegative");
    if (subset_depth < 0) throw ConfigError("subset depth must be nonnegative");
    if (error_cap_m && !(*error_cap_m > 0.0)) throw ConfigError("error cap must be positive");
}

std::size_t find_combo(const std::vector<ScreeningCombo>& combos, const ScreeningCombo& combo)
{
    for (std::size_t i = 0; i < combos.size(); ++i) {
        if (std::abs(combos[i].x_dh - combo.x_dh) < 1e-9 &&
            std::abs(combos[i].x_aircraft - combo.x_aircraft) < 1e-9)
            return i;
    }
    throw ConfigError("combo (" + std::to_string(combo.x_dh) + ", " +
                      std::to_string(combo.x_aircraft) + ") is not on the screening grid");
}

void EpochGeometry::variances(std::size_t c, std::span<const double> sigma_pr_gnd,
                              double sigma_vig, std::vector<double>& out) const
{
    const auto& fixed = fixed_var[c];
    const auto& unit = iono_unit[c];
    out.resize(size());
    for (std::size_t j = 0; j < size(); ++j) {
        const double iono = unit[j] * sigma_vig;
        out[j] = sigma_pr_gnd[j] * sigma_pr_gnd[j] + fixed[j] + iono * iono;
    }
}

std::vector<SigmaBudget> EpochGeometry::budgets(std::size_t c,
                                                std::span<const double> sigma_pr_gnd,
                                                double sigma_vig) const
{
    std::vector<SigmaBudget> out;
    out.reserve(size());
    for (std::size_t j = 0; j < size(); ++j) {
        SigmaBudget b;
        b.sigma_tropo = sigma_tropo[c][j];
        b.sigma_pr_air = sigma_pr_air[j];
        b.sigma_iono = iono_unit[c][j] * sigma_vig;
        b.obliquity = obliquity[j];
        out.push_back(b.with_ground(sigma_pr_gnd[j]));
    }
    return out;
}

EpochGeometry prepare_epoch(std::vector<SatelliteView> views, double time_s,
                            const ScreeningContext& ctx)
{
    if (views.size() < 4)
        throw ConfigError("only " + std::to_string(views.size()) +
                          " satellites in view at t=" + std::to_string(time_s) + " s");
    EpochGeometry e;
    e.time_s = time_s;
    e.hour_ut = std::fmod(time_s / 3600.0, 24.0);
    e.views = std::move(views);
    e.geometry = make_geometry(e.views);
    e.subsets = enumerate_subsets(static_cast<int>(e.size()), ctx.subset_depth);

    const double floor = ctx.threat.sigma_vig_min;
    e.sigma_pr_gnd_nominal.resize(e.size());
    e.sigma_pr_air.resize(e.size());
    e.obliquity.resize(e.size());
    e.sigma_tropo.assign(ctx.combos.size(), std::vector<double>(e.size()));
    e.fixed_var.assign(ctx.combos.size(), std::vector<double>(e.size()));
    e.iono_unit.assign(ctx.combos.size(), std::vector<double>(e.size()));
    for (std::size_t c = 0; c < ctx.combos.size(); ++c) {
        for (std::size_t j = 0; j < e.size(); ++j) {
            const auto b = sigma_budget(e.views[j], ctx.combos[c], floor, ctx.aircraft, ctx.nominal);
            e.sigma_pr_gnd_nominal[j] = b.sigma_pr_gnd;
            e.sigma_pr_air[j] = b.sigma_pr_air;
            e.obliquity[j] = b.obliquity;
            e.sigma_tropo[c][j] = b.sigma_tropo;
            e.fixed_var[c][j] = b.sigma_tropo * b.sigma_tropo + b.sigma_pr_air * b.sigma_pr_air;
            e.iono_unit[c][j] = b.sigma_iono / floor;
        }
    }
    return e;
}

double worst_range_error(double g_max, const ScreeningCombo& combo, const AircraftModel& aircraft)
{
    // mm/km * km -> mm
    return g_max * (combo.x_aircraft + aircraft.smoothing_distance_km()) * 1e-3;
}

double miev(std::span<const double> s_vert, std::span<const double> eps, double c)
{
    const std::size_t n = s_vert.size();
    double worst = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double lo_m = -c * eps[m] * s_vert[m];
        const double hi_m = eps[m] * s_vert[m];
        worst = std::max({worst, std::abs(lo_m), std::abs(hi_m)});
        for (std::size_t k = m + 1; k < n; ++k) {
            const double lo_k = -c * eps[k] * s_vert[k];
            const double hi_k = eps[k] * s_vert[k];
            worst = std::max({worst, std::abs(lo_m + lo_k), std::abs(lo_m + hi_k),
                              std::abs(hi_m + lo_k), std::abs(hi_m + hi_k)});
        }
    }
    return worst;
}

ScreeningResult find_unsafe(const EpochGeometry& epoch, const ScreeningContext& ctx,
                            std::vector<SubsetVerdict>* all)
{
    ScreeningResult result;
    const std::size_t n = epoch.size();
    std::vector<double> sigma2_all;
    std::vector<double> eps_all(n);
    std::vector<double> eps, sigma2_sub, p_sub;

    for (std::size_t c = 0; c < ctx.combos.size(); ++c) {
        const auto& combo = ctx.combos[c];
        const double tel = tel_of(combo, ctx.limits);
        epoch.variances(c, epoch.sigma_pr_gnd_nominal, ctx.threat.sigma_vig_min, sigma2_all);
        for (std::size_t j = 0; j < n; ++j) {
            const double el = epoch.views[j].elevation;
            double g = active_gradient(epoch.hour_ut, ctx.threat, el);
            if (ctx.obliquity_scaled_gradient)
                g *= obliquity(el, ctx.nominal.shell.shell_height, ctx.nominal.shell.earth_radius);
            double e = worst_range_error(g, combo, ctx.aircraft);
            if (ctx.error_cap_m) e = std::min(e, *ctx.error_cap_m);
            eps_all[j] = e;
        }

        for (std::size_t s = 0; s < epoch.subsets.size(); ++s) {
            const auto& subset = epoch.subsets[s];
            Eigen::VectorXd s_vert;
            try {
                s_vert = projection_vertical(epoch.geometry, subset, sigma2_all);
            } catch (const SingularGeometry&) {
                ++result.skipped_singular;
                continue;
            }
            ++result.evaluated;
            eps.clear();
            sigma2_sub.clear();
            for (int m : subset.members) {
                eps.push_back(eps_all[static_cast<std::size_t>(m)]);
                sigma2_sub.push_back(sigma2_all[static_cast<std::size_t>(m)]);
            }
            const double error = miev(as_span(s_vert), eps, ctx.threat.c_factor);
            const bool unsafe = error > tel;
            if (!unsafe && !all) continue;

            SubsetVerdict v;
            v.subset_index = s;
            v.subset = subset;
            v.combo_index = c;
            v.combo = combo;
            v.miev = error;
            v.tel = tel;
            v.unsafe = unsafe;
            p_sub.assign(subset.n_u(), ctx.p_nominal);
            v.nominal_vpl = vpl(as_span(s_vert), sigma2_sub, p_sub, combo.x_aircraft, ctx.constants);
            v.s_vert.assign(s_vert.data(), s_vert.data() + s_vert.size());
            if (all) all->push_back(v);
            if (unsafe) result.unsafe.push_back(std::move(v));
        }
    }
    return result;
}

}  // namespace gbas
