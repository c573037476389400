// gbas-screen: day-long geometry screening runs from an airport config.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gbas/config.hpp"
#include "gbas/errors.hpp"
#include "gbas/report.hpp"
#include "gbas/simulator.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIntegrity = 3;

struct Options {
    std::string config;
    std::string algorithm = "optimal";
    std::optional<double> c_factor;
    std::string out = "out";
    std::size_t epoch = 0;
    double step = 60.0;
    double day = 86400.0;
    unsigned workers = 1;
};

gbas::RunConfig make_run(const Options& o)
{
    gbas::RunConfig run;
    run.airport = gbas::load_airport(o.config);
    run.algorithm = gbas::parse_algorithm(o.algorithm);
    run.c_factor = o.c_factor;
    run.step_s = o.step;
    run.day_s = o.day;
    run.workers = o.workers;
    run.validate();
    return run;
}

int cmd_run(const Options& o)
{
    const auto run = make_run(o);
    const auto results = gbas::run_day(run);
    gbas::write_run_outputs(o.out, run, results);
    const auto s = gbas::summarize(run.algorithm, results);
    std::cout << run.airport.name << ' ' << gbas::to_string(run.algorithm)
              << ": availability " << s.availability << "%, mean inflation " << s.mean_inflation
              << " m, " << s.total_lps << " LPs\n";
    return 0;
}

int cmd_compare(const Options& o)
{
    const auto run = make_run(o);
    const auto cmp = gbas::compare_algorithms(run);
    gbas::write_compare_outputs(o.out, run, cmp);
    for (const auto& s : cmp.summaries) {
        std::cout << gbas::to_string(s.algorithm) << ": availability " << s.availability
                  << "%, mean inflation " << s.mean_inflation << " m, " << s.total_lps
                  << " LPs\n";
    }
    std::cout << "night epochs " << cmp.night_epochs << ", optimal below sigma-vig "
              << 100.0 * cmp.optimal_below_sigma_vig << "%, below targeted "
              << 100.0 * cmp.optimal_below_targeted << "%\n";
    return 0;
}

int cmd_dump_lp(const Options& o)
{
    const auto run = make_run(o);
    if (o.epoch >= run.epoch_count())
        throw gbas::ConfigError("epoch " + std::to_string(o.epoch) + " outside the run");
    const auto ctx = run.context();
    const auto screened = gbas::screen_epoch(run, ctx, o.epoch);
    const auto params = gbas::nominal_params(screened.geometry, ctx);
    const auto lp = gbas::build_optimal_lp(screened.geometry, ctx, screened.screening.unsafe, params.p);
    std::cout << "# epoch " << o.epoch << ", " << screened.geometry.size() << " satellites, "
              << screened.screening.unsafe.size() << " unsafe subset/combo pairs\n";
    gbas::lp::write_tableau(std::cout, lp);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"GBAS geometry screening simulator"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "Airport JSON config")->required()->check(CLI::ExistingFile);
        sub->add_option("--c-factor", o.c_factor, "Override the threat model c factor");
        sub->add_option("--step", o.step, "Epoch step in seconds");
        sub->add_option("--day", o.day, "Simulated span in seconds");
    };

    auto* run = app.add_subcommand("run", "Simulate one algorithm over a day");
    common(run);
    run->add_option("--algorithm", o.algorithm, "sigma-vig, targeted or optimal")
        ->check(CLI::IsMember({"sigma-vig", "targeted", "optimal"}));
    run->add_option("--out", o.out, "Output directory");
    run->add_option("--workers", o.workers, "Worker threads");

    auto* compare = app.add_subcommand("compare", "Run all three algorithms on identical epochs");
    common(compare);
    compare->add_option("--out", o.out, "Output directory");
    compare->add_option("--workers", o.workers, "Worker threads");

    auto* dump = app.add_subcommand("dump-lp", "Print the optimal-inflation LP for one epoch");
    common(dump);
    dump->add_option("--epoch", o.epoch, "Epoch index")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(o);
        if (*compare) return cmd_compare(o);
        return cmd_dump_lp(o);
    } catch (const gbas::IntegrityFailure& e) {
        std::cerr << "integrity failure: " << e.what() << '\n';
        return kExitIntegrity;
    } catch (const gbas::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const gbas::ParseError& e) {
        std::cerr << "almanac error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
