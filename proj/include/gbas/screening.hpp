#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gbas/error_models.hpp"
#include "gbas/geometry.hpp"

namespace gbas {

/// Everything about an airport's screening problem that does not change per epoch.
struct ScreeningContext {
    ThreatModel threat;
    LimitTable limits = default_limit_table();
    std::vector<ScreeningCombo> combos = grid_combos();
    std::size_t reference_combo = 2;  // (0, 2) in the default grid is overwritten by config
    IntegrityConstants constants;
    AircraftModel aircraft;
    NominalErrorConfig nominal = default_nominal_errors();
    double p_nominal = 0.000180;
    int subset_depth = 2;
    bool obliquity_scaled_gradient = false;
    std::optional<double> error_cap_m;

    void validate() const;
    const ScreeningCombo& reference() const { return combos.at(reference_combo); }
};

/// Index of `combo` in ctx.combos; throws ConfigError when absent.
std::size_t find_combo(const std::vector<ScreeningCombo>& combos, const ScreeningCombo& combo);

/// Per-epoch quantities shared by screening and every inflation algorithm.
/// Variance of satellite j at combo c for broadcast (sigma_pr_gnd, sigma_vig):
///   sigma_pr_gnd^2 + fixed_var[c][j] + (iono_unit[c][j] * sigma_vig)^2
struct EpochGeometry {
    double time_s = 0.0;
    double hour_ut = 0.0;
    std::vector<SatelliteView> views;
    GeometryMatrix geometry;
    std::vector<SubsetId> subsets;
    std::vector<double> sigma_pr_gnd_nominal;
    std::vector<double> sigma_pr_air;
    std::vector<double> obliquity;
    std::vector<std::vector<double>> sigma_tropo;  // [combo][sat]
    std::vector<std::vector<double>> fixed_var;    // tropo^2 + air^2, [combo][sat]
    std::vector<std::vector<double>> iono_unit;    // m per (mm/km), [combo][sat]

    std::size_t size() const { return views.size(); }

    /// Fills out[j] with satellite variances at combo c.
    void variances(std::size_t c, std::span<const double> sigma_pr_gnd, double sigma_vig,
                   std::vector<double>& out) const;

    std::vector<SigmaBudget> budgets(std::size_t c, std::span<const double> sigma_pr_gnd,
                                     double sigma_vig) const;
};

/// Throws ConfigError when fewer than four satellites are in view.
EpochGeometry prepare_epoch(std::vector<SatelliteView> views, double time_s,
                            const ScreeningContext& ctx);

struct SubsetVerdict {
    std::size_t subset_index = 0;
    SubsetId subset;
    std::size_t combo_index = 0;
    ScreeningCombo combo;
    double miev = 0.0;
    double tel = 0.0;
    bool unsafe = false;
    double nominal_vpl = 0.0;
    std::vector<double> s_vert;  // nominal projection, aligned with subset.members
};

/// epsilon = g (x_aircraft + 2 tau v); g in mm/km, result in m.
double worst_range_error(double g_max, const ScreeningCombo& combo, const AircraftModel& aircraft);

/// Largest vertical error from any satellite pair (or single satellite) hit by
/// corner errors in {-c eps, +eps}.
double miev(std::span<const double> s_vert, std::span<const double> eps, double c);

struct ScreeningResult {
    std::vector<SubsetVerdict> unsafe;
    std::size_t evaluated = 0;
    std::size_t skipped_singular = 0;
};

/// Screens every subset at every combo with nominal parameters. When `all` is
/// given, every evaluated verdict (safe or unsafe) is appended to it.
ScreeningResult find_unsafe(const EpochGeometry& epoch, const ScreeningContext& ctx,
                            std::vector<SubsetVerdict>* all = nullptr);

}  // namespace gbas
