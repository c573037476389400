#include "gbas/inflation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "gbas/errors.hpp"

namespace gbas {

namespace {

constexpr int kMaxBroadcastUnits = 254;  // 5.08 m / 0.02 m
// Constraints are enforced with a hair of margin so that the independent
// verification route never disagrees on a rounding tie.
constexpr double kCheckMargin = 1e-9;

int broadcast_units(double sigma)
{
    auto units = static_cast<long>(std::ceil(sigma / kBroadcastResolution));
    while (units > 0 && (units - 1) * kBroadcastResolution >= sigma) --units;
    while (units * kBroadcastResolution < sigma) ++units;
    return static_cast<int>(units);
}

/// Evaluates VPL - VAL for unsafe constraints with cached per-combo variances.
class ConstraintChecker {
public:
    ConstraintChecker(const EpochGeometry& epoch, const ScreeningContext& ctx,
                      std::span<const SubsetVerdict> unsafe, const BroadcastParams& params)
        : epoch_(epoch), ctx_(ctx), unsafe_(unsafe), params_(params),
          sigma2_(ctx.combos.size()), valid_(ctx.combos.size(), 0), val_(ctx.combos.size())
    {
        for (std::size_t c = 0; c < ctx.combos.size(); ++c) val_[c] = val_of(ctx.combos[c], ctx.limits);
    }

    std::size_t size() const { return unsafe_.size(); }

    double margin(std::size_t k)
    {
        const auto& v = unsafe_[k];
        const std::size_t c = v.combo_index;
        if (!valid_[c]) {
            epoch_.variances(c, params_.sigma_pr_gnd, params_.sigma_vig, sigma2_[c]);
            valid_[c] = 1;
        }
        s_ = projection_vertical(epoch_.geometry, v.subset, sigma2_[c]);
        const Eigen::VectorXd& s = s_;
        sub_sigma2_.clear();
        sub_p_.clear();
        for (int m : v.subset.members) {
            sub_sigma2_.push_back(sigma2_[c][static_cast<std::size_t>(m)]);
            sub_p_.push_back(params_.p[static_cast<std::size_t>(m)]);
        }
        return vpl(as_span(s), sub_sigma2_, sub_p_, v.combo.x_aircraft, ctx_.constants) - val_[c];
    }

    void satellite_changed(std::size_t j)
    {
        for (std::size_t c = 0; c < valid_.size(); ++c) {
            if (!valid_[c]) continue;
            const double g = params_.sigma_pr_gnd[j];
            const double iono = epoch_.iono_unit[c][j] * params_.sigma_vig;
            sigma2_[c][j] = g * g + epoch_.fixed_var[c][j] + iono * iono;
        }
    }

    /// Subset projection from the most recent margin() call.
    const Eigen::VectorXd& last_projection() const { return s_; }

    void everything_changed() { std::fill(valid_.begin(), valid_.end(), 0); }

private:
    const EpochGeometry& epoch_;
    const ScreeningContext& ctx_;
    std::span<const SubsetVerdict> unsafe_;
    const BroadcastParams& params_;
    std::vector<std::vector<double>> sigma2_;
    std::vector<char> valid_;
    std::vector<double> val_;
    std::vector<double> sub_sigma2_;
    std::vector<double> sub_p_;
    Eigen::VectorXd s_;
};

/// Cycles over constraints until all of them pass in one unbroken sweep,
/// calling `on_fail(k)` to make progress whenever constraint k fails.
template <class OnFail>
void sweep_until_satisfied(ConstraintChecker& checker, OnFail&& on_fail)
{
    const std::size_t n = checker.size();
    std::size_t cursor = 0;
    std::size_t streak = 0;
    while (streak < n) {
        if (checker.margin(cursor) >= kCheckMargin) {
            ++streak;
            cursor = (cursor + 1) % n;
        } else {
            streak = 0;
            on_fail(cursor);
        }
    }
}

InflationResult finish(BroadcastParams params, std::span<const SubsetVerdict> unsafe,
                       const EpochGeometry& epoch, const ScreeningContext& ctx)
{
    InflationResult r;
    const auto check = verify_screened(params, unsafe, epoch, ctx);
    r.screened = check.screened;
    r.worst_margin = check.worst_margin;
    r.all_in_view_vpl = all_in_view_vpls(params, epoch, ctx);
    r.params = std::move(params);
    return r;
}

/// LP row for one unsafe verdict, in variables sigma_i^2 at combo
/// `var_combo`. Returns false when the ephemeris term alone already screens it.
bool sigma_row(const SubsetVerdict& v, const EpochGeometry& epoch, const ScreeningContext& ctx,
               std::span<const double> p, std::size_t var_combo, std::vector<double>& row,
               double& rhs)
{
    const double val = val_of(v.combo, ctx.limits);
    double bias_slope = 0.0;  // max_k |S_U,k| P_k
    for (std::size_t i = 0; i < v.subset.n_u(); ++i) {
        const auto m = static_cast<std::size_t>(v.subset.members[i]);
        bias_slope = std::max(bias_slope, std::abs(v.s_vert[i]) * p[m]);
    }
    const double remaining = val - bias_slope * v.combo.x_aircraft * 1000.0;
    if (remaining <= 0.0) return false;

    const double h0_term = -(val / ctx.constants.k_ffmd) * (val / ctx.constants.k_ffmd);
    const double eph_term = -(remaining / ctx.constants.k_md_eph) * (remaining / ctx.constants.k_md_eph);
    rhs = std::max(h0_term, eph_term);

    row.assign(epoch.size(), 0.0);
    const std::size_t c = v.combo_index;
    for (std::size_t i = 0; i < v.subset.n_u(); ++i) {
        const auto m = static_cast<std::size_t>(v.subset.members[i]);
        const double s2 = v.s_vert[i] * v.s_vert[i];
        row[m] = -s2;
        // sigma_m^2 at combo c = variable + (offset at c - offset at var_combo)
        const double iono_c = epoch.iono_unit[c][m] * ctx.threat.sigma_vig_min;
        const double iono_v = epoch.iono_unit[var_combo][m] * ctx.threat.sigma_vig_min;
        const double shift = (epoch.fixed_var[c][m] + iono_c * iono_c) -
                             (epoch.fixed_var[var_combo][m] + iono_v * iono_v);
        rhs += s2 * shift;
    }
    return true;
}

double non_ground_variance(const EpochGeometry& epoch, const ScreeningContext& ctx,
                           std::size_t c, std::size_t j)
{
    const double iono = epoch.iono_unit[c][j] * ctx.threat.sigma_vig_min;
    return epoch.fixed_var[c][j] + iono * iono;
}

lp::LinearProgram sigma_lp(const EpochGeometry& epoch, const ScreeningContext& ctx,
                           std::span<const SubsetVerdict> unsafe, std::span<const double> p,
                           std::size_t var_combo)
{
    const std::size_t n = epoch.size();
    lp::LinearProgram lp;

    std::vector<double> nominal2(n);
    epoch.variances(var_combo, epoch.sigma_pr_gnd_nominal, ctx.threat.sigma_vig_min, nominal2);
    const Eigen::VectorXd s_all = projection_vertical(epoch.geometry, nominal2);

    lp.objective.resize(n);
    lp.lower.resize(n);
    lp.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double off = non_ground_variance(epoch, ctx, var_combo, i);
        const double g0 = epoch.sigma_pr_gnd_nominal[i];
        lp.objective[i] = s_all(static_cast<Eigen::Index>(i)) * s_all(static_cast<Eigen::Index>(i));
        lp.lower[i] = g0 * g0 + off;
        const double top = kSigmaPrGndMax - kBroadcastResolution;
        lp.upper[i] = top * top + off;
    }

    std::vector<double> row;
    double rhs = 0.0;
    for (const auto& v : unsafe) {
        if (sigma_row(v, epoch, ctx, p, var_combo, row, rhs)) lp.add_row(row, rhs);
    }
    return lp;
}

/// Ground sigmas from an LP solution in sigma_i^2 at `var_combo`, quantized up
/// for satellites the LP actually inflated.
std::vector<double> recover_sigma_pr_gnd(const lp::LpOutcome& out, const EpochGeometry& epoch,
                                         const ScreeningContext& ctx, std::size_t var_combo)
{
    std::vector<double> sigma(epoch.size());
    for (std::size_t i = 0; i < epoch.size(); ++i) {
        const double g0 = epoch.sigma_pr_gnd_nominal[i];
        const double g2 = out.x[i] - non_ground_variance(epoch, ctx, var_combo, i);
        if (g2 <= g0 * g0 * (1.0 + 1e-9)) {
            sigma[i] = g0;
        } else {
            sigma[i] = std::min(kSigmaPrGndMax, quantize_broadcast(std::sqrt(g2)));
        }
    }
    return sigma;
}

}  // namespace

double quantize_broadcast(double sigma)
{
    if (!(sigma >= 0.0)) throw NumericalFailure("broadcast sigma must be nonnegative");
    return broadcast_units(sigma) * kBroadcastResolution;
}

BroadcastParams nominal_params(const EpochGeometry& epoch, const ScreeningContext& ctx)
{
    BroadcastParams p;
    p.sigma_pr_gnd = epoch.sigma_pr_gnd_nominal;
    p.sigma_vig = ctx.threat.sigma_vig_min;
    p.p.assign(epoch.size(), ctx.p_nominal);
    return p;
}

double subset_vpl(const SubsetId& subset, std::size_t combo, const BroadcastParams& params,
                  const EpochGeometry& epoch, const ScreeningContext& ctx)
{
    std::vector<double> sigma2_all;
    epoch.variances(combo, params.sigma_pr_gnd, params.sigma_vig, sigma2_all);
    const GeometryMatrix g = select(epoch.geometry, subset);
    std::vector<double> sigma2, p;
    for (int m : subset.members) {
        sigma2.push_back(sigma2_all[static_cast<std::size_t>(m)]);
        p.push_back(params.p[static_cast<std::size_t>(m)]);
    }
    const Eigen::VectorXd s = projection_vertical(g, sigma2);
    return vpl(as_span(s), sigma2, p, ctx.combos[combo].x_aircraft, ctx.constants);
}

ScreeningCheck verify_screened(const BroadcastParams& params,
                               std::span<const SubsetVerdict> unsafe, const EpochGeometry& epoch,
                               const ScreeningContext& ctx)
{
    ScreeningCheck out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& v : unsafe) {
        const double margin =
            subset_vpl(v.subset, v.combo_index, params, epoch, ctx) - val_of(v.combo, ctx.limits);
        out.worst_margin = std::min(out.worst_margin, margin);
        if (margin < 0.0) out.screened = false;
    }
    return out;
}

std::vector<double> all_in_view_vpls(const BroadcastParams& params, const EpochGeometry& epoch,
                                     const ScreeningContext& ctx)
{
    std::vector<double> out;
    out.reserve(ctx.combos.size());
    std::vector<double> sigma2;
    for (std::size_t c = 0; c < ctx.combos.size(); ++c) {
        epoch.variances(c, params.sigma_pr_gnd, params.sigma_vig, sigma2);
        const Eigen::VectorXd s = projection_vertical(epoch.geometry, sigma2);
        out.push_back(vpl(as_span(s), sigma2, params.p, ctx.combos[c].x_aircraft, ctx.constants));
    }
    return out;
}

lp::LinearProgram build_optimal_lp(const EpochGeometry& epoch, const ScreeningContext& ctx,
                                   std::span<const SubsetVerdict> unsafe,
                                   std::span<const double> p)
{
    return sigma_lp(epoch, ctx, unsafe, p, ctx.reference_combo);
}

int adjust_sigma_pr_gnd(BroadcastParams& params, std::span<const SubsetVerdict> unsafe,
                        const EpochGeometry& epoch, const ScreeningContext& ctx)
{
    ConstraintChecker checker(epoch, ctx, unsafe, params);
    const std::size_t n = epoch.size();
    int increments = 0;

    // Marginal cost of each satellite in the all-in-view vertical variance at
    // the reference combo. Raising a satellite that matters to the failing
    // subset but little to the full set costs the least availability.
    std::vector<double> all_weight(n);
    std::vector<double> ref_var;
    auto refresh_weights = [&] {
        epoch.variances(ctx.reference_combo, params.sigma_pr_gnd, params.sigma_vig, ref_var);
        const Eigen::VectorXd s_all = projection_vertical(epoch.geometry, ref_var);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = s_all(static_cast<Eigen::Index>(i));
            all_weight[i] = std::max(w * w, 1e-9);
        }
    };
    refresh_weights();

    sweep_until_satisfied(checker, [&](std::size_t k) {
        const auto& subset = unsafe[k].subset;
        const Eigen::VectorXd& s_u = checker.last_projection();
        // the top broadcast level is only used once every member sits below it
        std::size_t pick = n;
        for (int ceiling : {kMaxBroadcastUnits - 1, kMaxBroadcastUnits}) {
            double best = -1.0;
            for (std::size_t i = 0; i < subset.n_u(); ++i) {
                const auto j = static_cast<std::size_t>(subset.members[i]);
                if (params.sigma_pr_gnd[j] >= ceiling * kBroadcastResolution - 1e-12) continue;
                const double su = s_u(static_cast<Eigen::Index>(i));
                const double score = su * su / all_weight[j];
                if (score > best) {  // strict: ties keep the lower PRN
                    best = score;
                    pick = j;
                }
            }
            if (pick != n) break;
        }
        if (pick == n)
            throw Unscreenable("subset constraint still fails with every member at " +
                               std::to_string(kSigmaPrGndMax) + " m (t=" +
                               std::to_string(epoch.time_s) + " s)");
        // land on the broadcast grid; an off-grid value moves to the next level
        const int units = broadcast_units(params.sigma_pr_gnd[pick]);
        const int next = units * kBroadcastResolution > params.sigma_pr_gnd[pick] ? units : units + 1;
        params.sigma_pr_gnd[pick] = std::min(next, kMaxBroadcastUnits) * kBroadcastResolution;
        checker.satellite_changed(pick);
        refresh_weights();
        ++increments;
    });
    return increments;
}

InflationResult optimal_sigma_prgnd_inflation(const EpochGeometry& epoch,
                                              const ScreeningContext& ctx,
                                              std::span<const SubsetVerdict> unsafe)
{
    BroadcastParams params = nominal_params(epoch, ctx);
    const auto lp = build_optimal_lp(epoch, ctx, unsafe, params.p);
    const auto out = lp::solve(lp);

    bool lp_infeasible = false;
    if (out.optimal()) {
        params.sigma_pr_gnd = recover_sigma_pr_gnd(out, epoch, ctx, ctx.reference_combo);
    } else {
        // no broadcastable point satisfies the linearised rows; the adjustment
        // loop either finds one or reports Unscreenable
        lp_infeasible = true;
    }
    const int iterations = adjust_sigma_pr_gnd(params, unsafe, epoch, ctx);

    auto r = finish(std::move(params), unsafe, epoch, ctx);
    r.lp_count = 1;
    r.adjust_iterations = iterations;
    r.lp_infeasible = lp_infeasible;
    return r;
}

InflationResult sigma_vig_inflation(const EpochGeometry& epoch, const ScreeningContext& ctx,
                                    std::span<const SubsetVerdict> unsafe,
                                    const SigmaVigSettings& settings)
{
    if (!(settings.step > 0.0)) throw ConfigError("sigma_vig step must be positive");
    BroadcastParams params = nominal_params(epoch, ctx);
    const double floor = ctx.threat.sigma_vig_min;
    ConstraintChecker checker(epoch, ctx, unsafe, params);
    int steps = 0;

    sweep_until_satisfied(checker, [&](std::size_t) {
        ++steps;
        const double next = floor + steps * settings.step;
        if (next > settings.ceiling + 1e-12)
            throw Unscreenable("sigma_vig reached the " + std::to_string(settings.ceiling) +
                               " mm/km ceiling (t=" + std::to_string(epoch.time_s) + " s)");
        params.sigma_vig = next;
        checker.everything_changed();
    });

    auto r = finish(std::move(params), unsafe, epoch, ctx);
    r.lp_count = 0;
    r.adjust_iterations = steps;
    return r;
}

InflationResult targeted_inflation(const EpochGeometry& epoch, const ScreeningContext& ctx,
                                   std::span<const SubsetVerdict> unsafe,
                                   const TargetedSettings& settings)
{
    const std::size_t n = epoch.size();
    BroadcastParams params = nominal_params(epoch, ctx);
    std::vector<double> p_final = params.p;
    std::vector<double> sigma_final = params.sigma_pr_gnd;
    int lp_count = 0;
    std::vector<std::size_t> p_failed, sigma_failed;

    std::map<std::size_t, std::vector<SubsetVerdict>> by_combo;
    for (const auto& v : unsafe) {
        if (v.nominal_vpl < val_of(v.combo, ctx.limits)) by_combo[v.combo_index].push_back(v);
    }

    std::vector<double> nominal2;
    for (const auto& [c, verdicts] : by_combo) {
        const auto& combo = ctx.combos[c];
        const double val = val_of(combo, ctx.limits);
        const double x_m = combo.x_aircraft * 1000.0;

        // P_k LP: lift the ephemeris bound of each unsafe subset to VAL through
        // its most sensitive satellite.
        epoch.variances(c, epoch.sigma_pr_gnd_nominal, ctx.threat.sigma_vig_min, nominal2);
        const Eigen::VectorXd s_all = projection_vertical(epoch.geometry, nominal2);
        lp::LinearProgram p_lp;
        p_lp.objective.resize(n);
        p_lp.lower.assign(n, ctx.p_nominal);
        p_lp.upper.assign(n, std::max(settings.p_max, ctx.p_nominal));
        for (std::size_t k = 0; k < n; ++k)
            p_lp.objective[k] = std::abs(s_all(static_cast<Eigen::Index>(k))) * x_m;
        for (const auto& v : verdicts) {
            double sigma_u = 0.0;
            std::size_t lever = 0;
            double lever_s = -1.0;
            for (std::size_t i = 0; i < v.subset.n_u(); ++i) {
                const auto m = static_cast<std::size_t>(v.subset.members[i]);
                sigma_u += v.s_vert[i] * v.s_vert[i] * nominal2[m];
                if (std::abs(v.s_vert[i]) > lever_s) {
                    lever_s = std::abs(v.s_vert[i]);
                    lever = m;
                }
            }
            const double needed = val - ctx.constants.k_md_eph * std::sqrt(sigma_u);
            std::vector<double> row(n, 0.0);
            row[lever] = -lever_s * x_m;
            p_lp.add_row(std::move(row), -needed);
        }
        ++lp_count;
        const auto p_out = lp::solve(p_lp);
        if (p_out.optimal()) {
            for (std::size_t k = 0; k < n; ++k) p_final[k] = std::max(p_final[k], p_out.x[k]);
            continue;
        }
        p_failed.push_back(c);

        // sigma_pr_gnd LP restricted to this combo
        const auto s_lp = sigma_lp(epoch, ctx, verdicts, params.p, c);
        ++lp_count;
        const auto s_out = lp::solve(s_lp);
        if (!s_out.optimal()) {
            sigma_failed.push_back(c);
            continue;
        }
        const auto sigma = recover_sigma_pr_gnd(s_out, epoch, ctx, c);
        for (std::size_t k = 0; k < n; ++k) sigma_final[k] = std::max(sigma_final[k], sigma[k]);
    }

    params.p = std::move(p_final);
    params.sigma_pr_gnd = std::move(sigma_final);
    const int iterations = adjust_sigma_pr_gnd(params, unsafe, epoch, ctx);

    auto r = finish(std::move(params), unsafe, epoch, ctx);
    r.lp_count = lp_count;
    r.adjust_iterations = iterations;
    r.p_lp_infeasible = std::move(p_failed);
    r.sigma_lp_infeasible = std::move(sigma_failed);
    return r;
}

}  // namespace gbas
