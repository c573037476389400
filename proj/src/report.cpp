#include "gbas/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "gbas/errors.hpp"

namespace gbas {

namespace {

using nlohmann::json;

std::string fixed(double v, int digits = 6)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// JSON has no infinity; unconstrained epochs report null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double max_of(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

std::ofstream open(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

json run_settings(const RunConfig& config)
{
    const auto ctx = config.context();
    return {
        {"airport", config.airport.name},
        {"c_factor", ctx.threat.c_factor},
        {"epochs", config.epoch_count()},
        {"step_s", config.step_s},
        {"reference_combo", {ctx.reference().x_dh, ctx.reference().x_aircraft}},
        {"val_m", val_of(ctx.reference(), ctx.limits)},
    };
}

json algorithm_json(const AlgorithmSummary& s)
{
    return {
        {"algorithm", to_string(s.algorithm)},
        {"availability_pct", s.availability},
        {"mean_vpl_inflation_m", s.mean_inflation},
        {"total_lps", s.total_lps},
        {"max_lps_per_epoch", s.max_lps},
        {"total_adjust_iterations", s.total_adjust_iterations},
    };
}

}  // namespace

void write_epochs_csv(std::ostream& os, const std::vector<EpochResult>& results)
{
    os << "epoch,time_s,prns,nominal_vpl_m,inflated_vpl_m,val_m,available,night,unsafe_subsets,"
          "lp_count,adjust_iterations,sigma_vig_mm_km,max_sigma_pr_gnd_m,max_p,worst_margin_m,"
          "timing_ms\n";
    for (const auto& r : results) {
        std::string prns;
        for (std::size_t i = 0; i < r.prns.size(); ++i) {
            if (i) prns += ' ';
            prns += std::to_string(r.prns[i]);
        }
        os << r.epoch << ',' << fixed(r.time_s, 0) << ',' << prns << ',' << fixed(r.nominal_vpl)
           << ',' << fixed(r.inflated_vpl) << ',' << fixed(r.val, 3) << ',' << int{r.available}
           << ',' << int{r.night} << ',' << r.unsafe_count << ',' << r.lp_count << ','
           << r.adjust_iterations << ',' << fixed(r.params.sigma_vig, 1) << ','
           << fixed(max_of(r.params.sigma_pr_gnd), 2) << ',' << fixed(max_of(r.params.p), 8) << ','
           << fixed(r.worst_margin) << ',' << fixed(r.timing_ms, 3) << '\n';
    }
}

void write_vpl_series(std::ostream& os, const std::vector<const std::vector<EpochResult>*>& runs,
                      const std::vector<Algorithm>& algorithms)
{
    if (runs.empty() || runs.size() != algorithms.size())
        throw EmptyInput("vpl series needs one run per algorithm");
    os << "epoch,time_h,nominal_vpl_m";
    for (auto a : algorithms) os << ',' << to_string(a) << "_vpl_m";
    os << ",val_m\n";
    const auto& first = *runs.front();
    for (std::size_t i = 0; i < first.size(); ++i) {
        os << first[i].epoch << ',' << fixed(first[i].time_s / 3600.0, 4) << ','
           << fixed(first[i].nominal_vpl);
        for (const auto* run : runs) os << ',' << fixed((*run)[i].inflated_vpl);
        os << ',' << fixed(first[i].val, 3) << '\n';
    }
}

void write_inflation_jsonl(std::ostream& os, const std::vector<EpochResult>& results)
{
    for (const auto& r : results) {
        json line = {
            {"epoch", r.epoch},
            {"prns", r.prns},
            {"sigma_pr_gnd_m", r.params.sigma_pr_gnd},
            {"sigma_vig_mm_km", r.params.sigma_vig},
            {"p", r.params.p},
            {"unsafe_subsets", r.unsafe_count},
            {"worst_margin_m", finite_or_null(r.worst_margin)},
        };
        os << line.dump() << '\n';
    }
}

void write_run_summary(std::ostream& os, const RunConfig& config,
                       const std::vector<EpochResult>& results)
{
    const auto s = summarize(config.algorithm, results);
    json out = run_settings(config);
    out.update(algorithm_json(s));
    out["timing"] = {{"wall_ms", s.wall_ms}};
    os << out.dump(2) << '\n';
}

void write_compare_summary(std::ostream& os, const RunConfig& config, const Comparison& cmp)
{
    json out = run_settings(config);
    json algs = json::array();
    json timing = {{"screening_ms", cmp.screening_ms}, {"wall_ms", cmp.wall_ms}};
    for (const auto& s : cmp.summaries) {
        algs.push_back(algorithm_json(s));
        timing[std::string(to_string(s.algorithm)) + "_ms"] = s.wall_ms;
    }
    out["algorithms"] = algs;
    out["night_epochs"] = cmp.night_epochs;
    out["night_optimal_below_sigma_vig"] = cmp.optimal_below_sigma_vig;
    out["night_optimal_below_targeted"] = cmp.optimal_below_targeted;
    out["night_optimal_lowest"] = cmp.optimal_lowest;
    out["timing"] = timing;
    os << out.dump(2) << '\n';
}

void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config,
                       const std::vector<EpochResult>& results)
{
    std::filesystem::create_directories(dir);
    auto epochs = open(dir / "epochs.csv");
    write_epochs_csv(epochs, results);
    auto summary = open(dir / "summary.json");
    write_run_summary(summary, config, results);
    auto series = open(dir / "vpl_series.csv");
    write_vpl_series(series, {&results}, {config.algorithm});
    auto inflation = open(dir / "inflation.jsonl");
    write_inflation_jsonl(inflation, results);
}

void write_compare_outputs(const std::filesystem::path& dir, const RunConfig& config,
                           const Comparison& cmp)
{
    std::filesystem::create_directories(dir);
    auto summary = open(dir / "summary.json");
    write_compare_summary(summary, config, cmp);
    std::vector<const std::vector<EpochResult>*> runs;
    std::vector<Algorithm> algs;
    for (auto a : kAllAlgorithms) {
        runs.push_back(&cmp.run(a));
        algs.push_back(a);
        auto epochs = open(dir / ("epochs_" + std::string(to_string(a)) + ".csv"));
        write_epochs_csv(epochs, cmp.run(a));
    }
    auto series = open(dir / "vpl_series.csv");
    write_vpl_series(series, runs, algs);
}

}  // namespace gbas
