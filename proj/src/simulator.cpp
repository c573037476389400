#include "gbas/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gbas/errors.hpp"

namespace gbas {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::size_t index_of(Algorithm a)
{
    for (std::size_t i = 0; i < kAllAlgorithms.size(); ++i)
        if (kAllAlgorithms[i] == a) return i;
    return 0;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results are written by
// index so ordering never depends on scheduling; the lowest-index failure wins.
template <class Fn>
void for_each_epoch(std::size_t n, unsigned workers, Fn&& fn)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex mutex;
    std::size_t next = 0;
    std::size_t failed_at = n;
    std::exception_ptr failure;
    auto worker = [&] {
        while (true) {
            std::size_t i;
            {
                std::lock_guard lock(mutex);
                if (next >= n || next > failed_at) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

template <class E>
[[noreturn]] void rethrow_at(std::size_t epoch, const E& e)
{
    throw E("epoch " + std::to_string(epoch) + ": " + e.what());
}

}  // namespace

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::sigma_vig: return "sigma-vig";
    case Algorithm::targeted: return "targeted";
    case Algorithm::optimal: return "optimal";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name)
{
    for (auto a : kAllAlgorithms)
        if (to_string(a) == name) return a;
    throw ConfigError("unknown algorithm '" + std::string(name) +
                      "' (expected sigma-vig, targeted or optimal)");
}

void AirportConfig::validate() const
{
    if (name.empty()) throw ConfigError("airport name is empty");
    gbas::validate(site);
    for (const auto& e : almanac) gbas::validate(e);
    if (!(mask_deg >= 0.0 && mask_deg < 90.0)) throw ConfigError("elevation mask must be in [0, 90) deg");
    if (!std::isfinite(start_time_s)) throw ConfigError("start time must be finite");
    for (double x : runway_x_dh_km)
        if (!(x >= 0.0)) throw ConfigError("runway x_DH must be nonnegative");
    context.validate();
    if (!(sigma_vig.step > 0.0) || sigma_vig.ceiling < context.threat.sigma_vig_min)
        throw ConfigError("sigma_vig search needs step > 0 and ceiling >= floor");
    if (!(targeted.p_max >= context.p_nominal)) throw ConfigError("P_k maximum below nominal P_k");
}

void RunConfig::validate() const
{
    airport.validate();
    if (!(step_s > 0.0)) throw ConfigError("epoch step must be positive");
    if (!(day_s > 0.0)) throw ConfigError("day length must be positive");
    const double ratio = day_s / step_s;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ConfigError("day length must be a multiple of the epoch step");
    if (c_factor && !(*c_factor > 0.0 && *c_factor <= 1.0))
        throw ConfigError("c factor must be in (0, 1]");
}

std::size_t RunConfig::epoch_count() const
{
    return static_cast<std::size_t>(std::llround(day_s / step_s));
}

ScreeningContext RunConfig::context() const
{
    ScreeningContext ctx = airport.context;
    if (c_factor) ctx.threat.c_factor = *c_factor;
    return ctx;
}

ScreenedEpoch screen_epoch(const RunConfig& config, const ScreeningContext& ctx, std::size_t epoch)
{
    const auto start = Clock::now();
    const double t_rel = static_cast<double>(epoch) * config.step_s;
    const double t = config.airport.start_time_s + t_rel;  // s of week; 0 is 00:00 UT
    auto views = visible_satellites(config.airport.almanac, config.airport.site, t,
                                    config.airport.mask_deg * kDegToRad);
    ScreenedEpoch out;
    out.epoch = epoch;
    try {
        out.geometry = prepare_epoch(std::move(views), t, ctx);
        out.screening = find_unsafe(out.geometry, ctx);
        out.nominal_vpls = all_in_view_vpls(nominal_params(out.geometry, ctx), out.geometry, ctx);
    } catch (const ConfigError& e) {
        rethrow_at(epoch, e);
    }
    out.screening_ms = elapsed_ms(start);
    return out;
}

EpochResult inflate_epoch(const ScreenedEpoch& screened, const ScreeningContext& ctx,
                          const RunConfig& config, Algorithm algorithm)
{
    const auto start = Clock::now();
    const auto& epoch = screened.geometry;
    const auto& unsafe = screened.screening.unsafe;

    InflationResult r;
    try {
        switch (algorithm) {
        case Algorithm::sigma_vig:
            r = sigma_vig_inflation(epoch, ctx, unsafe, config.airport.sigma_vig);
            break;
        case Algorithm::targeted:
            r = targeted_inflation(epoch, ctx, unsafe, config.airport.targeted);
            break;
        case Algorithm::optimal:
            r = optimal_sigma_prgnd_inflation(epoch, ctx, unsafe);
            break;
        }
    } catch (const Unscreenable& e) {
        rethrow_at(screened.epoch, e);
    }
    if (!r.screened)
        throw IntegrityFailure("epoch " + std::to_string(screened.epoch) + ": " +
                               std::string(to_string(algorithm)) +
                               " output leaves an unsafe subset with VPL < VAL (margin " +
                               std::to_string(r.worst_margin) + " m)");

    EpochResult out;
    out.epoch = screened.epoch;
    out.time_s = static_cast<double>(screened.epoch) * config.step_s;
    for (const auto& v : epoch.views) out.prns.push_back(v.prn);
    out.nominal_vpl = screened.nominal_vpls[ctx.reference_combo];
    out.inflated_vpl = r.all_in_view_vpl[ctx.reference_combo];
    out.val = val_of(ctx.reference(), ctx.limits);
    out.available = out.inflated_vpl < out.val;
    out.night = ctx.threat.is_night(epoch.hour_ut);
    out.unsafe_count = unsafe.size();
    out.lp_count = r.lp_count;
    out.adjust_iterations = r.adjust_iterations;
    out.worst_margin = r.worst_margin;
    out.params = std::move(r.params);
    out.timing_ms = screened.screening_ms + elapsed_ms(start);
    return out;
}

std::vector<EpochResult> run_day(const RunConfig& config)
{
    config.validate();
    if (config.airport.almanac.empty()) throw ConfigError("epoch 0: almanac has no satellites");
    const ScreeningContext ctx = config.context();
    std::vector<EpochResult> results(config.epoch_count());
    for_each_epoch(results.size(), config.workers, [&](std::size_t i) {
        const auto screened = screen_epoch(config, ctx, i);
        results[i] = inflate_epoch(screened, ctx, config, config.algorithm);
    });
    return results;
}

double availability(const std::vector<EpochResult>& results)
{
    if (results.empty()) throw EmptyInput("availability of an empty run");
    const auto available =
        std::count_if(results.begin(), results.end(), [](const auto& r) { return r.available; });
    const double pct = 100.0 * static_cast<double>(available) / static_cast<double>(results.size());
    return std::round(pct * 100.0) / 100.0;
}

double mean_inflation(const std::vector<EpochResult>& results)
{
    if (results.empty()) throw EmptyInput("mean inflation of an empty run");
    double sum = 0.0;
    for (const auto& r : results) sum += r.inflated_vpl - r.nominal_vpl;
    return sum / static_cast<double>(results.size());
}

AlgorithmSummary summarize(Algorithm a, const std::vector<EpochResult>& results)
{
    AlgorithmSummary s;
    s.algorithm = a;
    s.availability = availability(results);
    s.mean_inflation = mean_inflation(results);
    for (const auto& r : results) {
        s.total_lps += r.lp_count;
        s.max_lps = std::max(s.max_lps, r.lp_count);
        s.total_adjust_iterations += r.adjust_iterations;
        s.wall_ms += r.timing_ms;
    }
    return s;
}

const std::vector<EpochResult>& Comparison::run(Algorithm a) const { return runs[index_of(a)]; }
const AlgorithmSummary& Comparison::summary(Algorithm a) const { return summaries[index_of(a)]; }

Comparison compare_algorithms(const RunConfig& config)
{
    config.validate();
    if (config.airport.almanac.empty()) throw ConfigError("epoch 0: almanac has no satellites");
    const auto start = Clock::now();
    const ScreeningContext ctx = config.context();
    const std::size_t n = config.epoch_count();

    Comparison cmp;
    for (auto& run : cmp.runs) run.resize(n);
    std::vector<double> screening_ms(n);
    std::array<std::vector<double>, 3> inflate_ms;
    for (auto& v : inflate_ms) v.resize(n);

    for_each_epoch(n, config.workers, [&](std::size_t i) {
        const auto screened = screen_epoch(config, ctx, i);
        screening_ms[i] = screened.screening_ms;
        for (std::size_t a = 0; a < kAllAlgorithms.size(); ++a) {
            cmp.runs[a][i] = inflate_epoch(screened, ctx, config, kAllAlgorithms[a]);
            inflate_ms[a][i] = cmp.runs[a][i].timing_ms - screened.screening_ms;
        }
    });

    for (std::size_t a = 0; a < kAllAlgorithms.size(); ++a)
        cmp.summaries[a] = summarize(kAllAlgorithms[a], cmp.runs[a]);
    for (double ms : screening_ms) cmp.screening_ms += ms;

    const auto& vig = cmp.run(Algorithm::sigma_vig);
    const auto& tgt = cmp.run(Algorithm::targeted);
    const auto& opt = cmp.run(Algorithm::optimal);
    std::size_t below_vig = 0, below_tgt = 0, lowest = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!opt[i].night) continue;
        ++cmp.night_epochs;
        const bool bv = opt[i].inflated_vpl < vig[i].inflated_vpl;
        const bool bt = opt[i].inflated_vpl < tgt[i].inflated_vpl;
        below_vig += bv;
        below_tgt += bt;
        lowest += bv && bt;
    }
    if (cmp.night_epochs > 0) {
        const auto night = static_cast<double>(cmp.night_epochs);
        cmp.optimal_below_sigma_vig = static_cast<double>(below_vig) / night;
        cmp.optimal_below_targeted = static_cast<double>(below_tgt) / night;
        cmp.optimal_lowest = static_cast<double>(lowest) / night;
    }
    cmp.wall_ms = elapsed_ms(start);
    return cmp;
}

}  // namespace gbas
