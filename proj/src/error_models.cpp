#include "gbas/error_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gbas/errors.hpp"

namespace gbas {

namespace {

double interpolate(const std::vector<std::pair<double, double>>& anchors, double x)
{
    if (anchors.empty()) throw ConfigError("empty interpolation table");
    if (x <= anchors.front().first) return anchors.front().second;
    if (x >= anchors.back().first) return anchors.back().second;
    const auto hi = std::upper_bound(anchors.begin(), anchors.end(), x,
                                     [](double v, const auto& a) { return v < a.first; });
    const auto lo = hi - 1;
    if (x == lo->first) return lo->second;
    const double f = (x - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
}

void check_anchors(const std::vector<std::pair<double, double>>& anchors, const char* name)
{
    if (anchors.empty()) throw ConfigError(std::string(name) + " table is empty");
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (!std::isfinite(anchors[i].first) || !(anchors[i].second > 0.0))
            throw ConfigError(std::string(name) + " anchor values must be positive");
        if (i > 0 && !(anchors[i].first > anchors[i - 1].first))
            throw ConfigError(std::string(name) + " anchors must have increasing dx");
        if (i > 0 && anchors[i].second < anchors[i - 1].second)
            throw ConfigError(std::string(name) + " must be nondecreasing in dx");
    }
}

}  // namespace

double ElevationCurve::sigma(double elevation) const
{
    const double el_deg = elevation / kDegToRad;
    if (terms.empty() && constant == 0.0) throw ConfigError("nominal error curve has no terms");
    if (el_deg < min_elevation_deg)
        throw ConfigError("nominal error curve undefined at elevation " + std::to_string(el_deg) +
                          " deg");
    double var = constant * constant;
    for (const auto& t : terms) {
        const double s = t.a0 + t.a1 * std::exp(-el_deg / t.decay_deg);
        var += s * s / t.divisor;
    }
    return std::sqrt(var);
}

double TropoModel::sigma(double elevation, double x_aircraft_km) const
{
    const double dh = x_aircraft_km * 1000.0 * std::tan(glide_slope_deg * kDegToRad);
    const double se = std::sin(elevation);
    return refractivity_sigma * scale_height * 1e-6 / std::sqrt(0.002 + se * se) *
           (1.0 - std::exp(-dh / scale_height));
}

NominalErrorConfig default_nominal_errors()
{
    NominalErrorConfig cfg;
    cfg.ground.terms = {{0.15, 0.84, 15.5, 4.0}};
    cfg.ground.constant = 0.04;
    cfg.air.terms = {{0.13, 0.53, 10.0, 1.0}, {0.11, 0.13, 4.0, 1.0}};
    return cfg;
}

SigmaBudget SigmaBudget::with_ground(double ground) const
{
    SigmaBudget out = *this;
    out.sigma_pr_gnd = ground;
    out.sigma_total_sq = ground * ground + sigma_tropo * sigma_tropo +
                         sigma_pr_air * sigma_pr_air + sigma_iono * sigma_iono;
    return out;
}

void LimitTable::validate() const
{
    check_anchors(val, "VAL");
    check_anchors(tel, "TEL");
    for (const auto& [dx, v] : val) {
        if (tel_at(dx) < v) throw ConfigError("TEL below VAL at dx=" + std::to_string(dx));
    }
    for (const auto& [dx, t] : tel) {
        if (t < val_at(dx)) throw ConfigError("TEL below VAL at dx=" + std::to_string(dx));
    }
}

double LimitTable::val_at(double dx) const { return interpolate(val, dx); }
double LimitTable::tel_at(double dx) const { return interpolate(tel, dx); }

LimitTable default_limit_table()
{
    return LimitTable{{{0.0, 10.0}, {3.0, 25.0}}, {{0.0, 28.78}, {3.0, 78.0}}};
}

double val_of(const ScreeningCombo& combo, const LimitTable& table)
{
    return table.val_at(combo.delta());
}

double tel_of(const ScreeningCombo& combo, const LimitTable& table)
{
    return table.tel_at(combo.delta());
}

double GradientProfile::at(double elevation) const
{
    return interpolate(anchors, elevation / kDegToRad);
}

GradientProfile conus_gradient_profile()
{
    return GradientProfile{{{15.0, 375.0}, {65.0, 425.0}}};
}

void ThreatModel::validate() const
{
    if (!(g_max_night > 0.0)) throw ConfigError("g_max_night must be positive");
    if (!(c_factor > 0.0 && c_factor <= 1.0)) throw ConfigError("c factor must be in (0, 1]");
    if (!(sigma_vig_min > 0.0)) throw ConfigError("sigma_vig floor must be positive");
    if (daytime.anchors.empty()) throw ConfigError("daytime gradient profile is empty");
    for (std::size_t i = 0; i < daytime.anchors.size(); ++i) {
        if (daytime.anchors[i].second < 0.0) throw ConfigError("negative daytime gradient");
        if (i > 0 && !(daytime.anchors[i].first > daytime.anchors[i - 1].first))
            throw ConfigError("daytime gradient anchors must have increasing elevation");
    }
    for (const auto& w : night_windows) {
        if (!(w.start_h >= 0.0 && w.end_h <= 24.0 && w.start_h < w.end_h))
            throw ConfigError("night window must lie within [0, 24) with start < end");
    }
}

bool ThreatModel::is_night(double epoch_ut_hours) const
{
    return std::any_of(night_windows.begin(), night_windows.end(), [&](const NightWindow& w) {
        return epoch_ut_hours >= w.start_h && epoch_ut_hours < w.end_h;
    });
}

double obliquity(double elevation, double shell_height, double earth_radius)
{
    const double ratio = earth_radius * std::cos(elevation) / (earth_radius + shell_height);
    return 1.0 / std::sqrt(1.0 - ratio * ratio);
}

double active_gradient(double epoch_ut_hours, const ThreatModel& threat, double elevation)
{
    return threat.is_night(epoch_ut_hours) ? threat.g_max_night : threat.daytime.at(elevation);
}

SigmaBudget sigma_budget(const SatelliteView& view, const ScreeningCombo& combo, double sigma_vig,
                         const AircraftModel& aircraft, const NominalErrorConfig& nominal)
{
    SigmaBudget b;
    b.obliquity = obliquity(view.elevation, nominal.shell.shell_height, nominal.shell.earth_radius);
    b.sigma_pr_gnd = nominal.ground.sigma(view.elevation);
    b.sigma_pr_air = nominal.air.sigma(view.elevation);
    b.sigma_tropo = nominal.tropo.sigma(view.elevation, combo.x_aircraft);
    // mm/km * km = mm
    b.sigma_iono = b.obliquity * sigma_vig *
                   (combo.x_aircraft + aircraft.smoothing_distance_km()) * 1e-3;
    return b.with_ground(b.sigma_pr_gnd);
}

std::vector<ScreeningCombo> grid_combos(double x_dh_max, double extra, double step)
{
    if (!(step > 0.0)) throw ConfigError("grid step must be positive");
    std::vector<ScreeningCombo> out;
    const auto n_dh = static_cast<int>(std::floor(x_dh_max / step + 1e-9));
    const auto n_extra = static_cast<int>(std::floor(extra / step + 1e-9));
    for (int i = 0; i <= n_dh; ++i) {
        const double x_dh = i * step;
        for (int j = 0; j <= n_extra; ++j) out.push_back({x_dh, x_dh + j * step});
    }
    return out;
}

}  // namespace gbas
