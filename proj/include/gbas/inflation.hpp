#pragma once

#include <span>
#include <vector>

#include "gbas/lp_solver.hpp"
#include "gbas/screening.hpp"

namespace gbas {

constexpr double kSigmaPrGndMax = 5.08;         // m, largest broadcastable value
constexpr double kBroadcastResolution = 0.02;   // m
constexpr double kDefaultPkMax = 1.275e-3;      // largest broadcastable P_k

/// What the ground facility broadcasts, indexed like the epoch's satellites.
struct BroadcastParams {
    std::vector<double> sigma_pr_gnd;  // m
    double sigma_vig = 0.0;            // mm/km
    std::vector<double> p;             // m/m
};

BroadcastParams nominal_params(const EpochGeometry& epoch, const ScreeningContext& ctx);

struct InflationResult {
    BroadcastParams params;
    int lp_count = 0;
    int adjust_iterations = 0;
    std::vector<double> all_in_view_vpl;  // per combo, with the final params
    bool screened = false;
    double worst_margin = 0.0;
    bool lp_infeasible = false;                     // optimal method only
    std::vector<std::size_t> p_lp_infeasible;       // targeted: combos whose P_k LP failed
    std::vector<std::size_t> sigma_lp_infeasible;   // targeted: combos whose sigma LP failed
};

struct ScreeningCheck {
    bool screened = true;
    double worst_margin = 0.0;  // min VPL - VAL; +inf with no constraints
};

/// Smallest multiple of the 0.02 m broadcast resolution that is >= sigma.
double quantize_broadcast(double sigma);

/// VPL of one subset at one combo under `params`, with the projection recomputed
/// from the parameters' own variances.
double subset_vpl(const SubsetId& subset, std::size_t combo, const BroadcastParams& params,
                  const EpochGeometry& epoch, const ScreeningContext& ctx);

/// Recomputes every unsafe verdict's VPL from the actual inflated projections
/// (full projection matrix route) and checks VPL >= VAL.
ScreeningCheck verify_screened(const BroadcastParams& params,
                               std::span<const SubsetVerdict> unsafe, const EpochGeometry& epoch,
                               const ScreeningContext& ctx);

std::vector<double> all_in_view_vpls(const BroadcastParams& params, const EpochGeometry& epoch,
                                     const ScreeningContext& ctx);

/// Minimise sum S_vert,i^2 sigma_i^2 over the all-in-view geometry at the reference
/// combo, one row per (unsafe subset, combo) with S fixed at nominal values.
/// Variables are sigma_i^2 at the reference combo; rows at other combos are shifted
/// by the difference in their non-ground variance terms.
lp::LinearProgram build_optimal_lp(const EpochGeometry& epoch, const ScreeningContext& ctx,
                                   std::span<const SubsetVerdict> unsafe,
                                   std::span<const double> p);

/// Raises sigma_pr_gnd one broadcast step at a time until every constraint holds.
/// Each step goes to the failing subset's member with the largest ratio of its
/// subset weight S_U,j^2 to its current all-in-view weight at the reference
/// combo. The 5.08 m level is used only once all members sit one step below it.
/// Returns the number of increments; throws Unscreenable when every member is at 5.08 m.
int adjust_sigma_pr_gnd(BroadcastParams& params, std::span<const SubsetVerdict> unsafe,
                        const EpochGeometry& epoch, const ScreeningContext& ctx);

InflationResult optimal_sigma_prgnd_inflation(const EpochGeometry& epoch,
                                              const ScreeningContext& ctx,
                                              std::span<const SubsetVerdict> unsafe);

struct SigmaVigSettings {
    double step = 0.1;       // mm/km
    double ceiling = 100.0;  // mm/km
};

InflationResult sigma_vig_inflation(const EpochGeometry& epoch, const ScreeningContext& ctx,
                                    std::span<const SubsetVerdict> unsafe,
                                    const SigmaVigSettings& settings = {});

struct TargetedSettings {
    double p_max = kDefaultPkMax;
};

InflationResult targeted_inflation(const EpochGeometry& epoch, const ScreeningContext& ctx,
                                   std::span<const SubsetVerdict> unsafe,
                                   const TargetedSettings& settings = {});

}  // namespace gbas
