#pragma once

#include <compare>
#include <utility>
#include <vector>

#include "gbas/constellation.hpp"

namespace gbas {

/// One elevation-dependent term (a0 + a1 exp(-el/decay))^2 / divisor.
struct ElevationTerm {
    double a0 = 0.0;          // m
    double a1 = 0.0;          // m
    double decay_deg = 1.0;   // deg
    double divisor = 1.0;     // e.g. number of reference receivers
};

/// Root-sum-square of elevation terms plus a constant floor.
struct ElevationCurve {
    std::vector<ElevationTerm> terms;
    double constant = 0.0;           // m, added in quadrature
    double min_elevation_deg = 0.0;  // curve undefined below this

    /// Throws ConfigError when the curve is undefined at `elevation` (rad).
    double sigma(double elevation) const;
};

/// Residual tropospheric error for an aircraft on the glide path.
struct TropoModel {
    double refractivity_sigma = 10.0;  // sigma_N, dimensionless refractivity units
    double scale_height = 7600.0;      // m
    double glide_slope_deg = 3.0;

    double sigma(double elevation, double x_aircraft_km) const;
};

struct IonoShell {
    double shell_height = 350e3;        // m
    double earth_radius = 6378.1363e3;  // m
};

struct NominalErrorConfig {
    ElevationCurve ground;
    ElevationCurve air;
    TropoModel tropo;
    IonoShell shell;
};

/// Documented defaults: GAD-C ground accuracy with four reference receivers and
/// the AAD-B airborne multipath + noise curves.
NominalErrorConfig default_nominal_errors();

struct AircraftModel {
    double tau = 100.0;        // s
    double v_aircraft = 70.0;  // m/s

    /// 2 tau v in km
    double smoothing_distance_km() const { return 2.0 * tau * v_aircraft / 1000.0; }
};

struct SigmaBudget {
    double sigma_pr_gnd = 0.0;  // m
    double sigma_tropo = 0.0;   // m
    double sigma_pr_air = 0.0;  // m
    double sigma_iono = 0.0;    // m
    double sigma_total_sq = 0.0;
    double obliquity = 1.0;

    /// Same budget with a different broadcast ground sigma.
    SigmaBudget with_ground(double sigma_pr_gnd) const;
};

struct ScreeningCombo {
    double x_dh = 0.0;        // km
    double x_aircraft = 0.0;  // km

    double delta() const { return x_aircraft - x_dh; }
    auto operator<=>(const ScreeningCombo&) const = default;
};

/// Piecewise-linear VAL and TEL against dx = x_aircraft - x_dh (km), clamped at the ends.
struct LimitTable {
    std::vector<std::pair<double, double>> val;  // (dx km, m)
    std::vector<std::pair<double, double>> tel;  // (dx km, m)

    /// Throws ConfigError on an invalid table.
    void validate() const;
    double val_at(double dx) const;
    double tel_at(double dx) const;
};

/// VAL 10 m and TEL 28.78 m at dx = 0; 25 m and 78 m at dx = 3 km.
LimitTable default_limit_table();

double val_of(const ScreeningCombo& combo, const LimitTable& table);
double tel_of(const ScreeningCombo& combo, const LimitTable& table);

struct NightWindow {
    double start_h = 0.0;  // UT, inclusive
    double end_h = 0.0;    // UT, exclusive
};

/// Slant gradient bound as a piecewise-linear function of elevation (deg -> mm/km),
/// clamped outside the anchors.
struct GradientProfile {
    std::vector<std::pair<double, double>> anchors;

    double at(double elevation) const;
};

/// 375 mm/km at or below 15 deg rising linearly to 425 mm/km at 65 deg and above.
GradientProfile conus_gradient_profile();

struct ThreatModel {
    double g_max_night = 850.7;  // mm/km
    GradientProfile daytime = conus_gradient_profile();
    std::vector<NightWindow> night_windows;
    double c_factor = 1.0;
    double sigma_vig_min = 14.0;  // mm/km

    void validate() const;
    bool is_night(double epoch_ut_hours) const;
};

/// Obliquity factor of the thin-shell ionosphere.
double obliquity(double elevation, double shell_height, double earth_radius);

double active_gradient(double epoch_ut_hours, const ThreatModel& threat, double elevation);

/// sigma_vig in mm/km; iono term F * sigma_vig * (x_aircraft + 2 tau v).
SigmaBudget sigma_budget(const SatelliteView& view, const ScreeningCombo& combo, double sigma_vig,
                         const AircraftModel& aircraft, const NominalErrorConfig& nominal);

/// x_dh in [0, x_dh_max] and x_aircraft in [x_dh, x_dh + extra], both on `step`.
std::vector<ScreeningCombo> grid_combos(double x_dh_max = 6.0, double extra = 7.0,
                                        double step = 1.0);

}  // namespace gbas
