#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gbas/config.hpp"
#include "gbas/errors.hpp"
#include "gbas/report.hpp"
#include "gbas/simulator.hpp"

using namespace gbas;

namespace {

const std::filesystem::path kRoot(GBAS_SOURCE_DIR);

RunConfig short_run(const char* airport, Algorithm a, double day_s = 3 * 3600.0, double step_s = 600.0)
{
    RunConfig run;
    run.airport = load_airport(kRoot / "configs" / airport);
    run.algorithm = a;
    run.day_s = day_s;
    run.step_s = step_s;
    return run;
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("algorithm names")
{
    for (auto a : kAllAlgorithms) CHECK(parse_algorithm(to_string(a)) == a);
    CHECK(parse_algorithm("sigma-vig") == Algorithm::sigma_vig);
    CHECK_THROWS_AS(parse_algorithm("fastest"), ConfigError);
}

TEST_CASE("bundled airport configs")
{
    const auto galeao = load_airport(kRoot / "configs/galeao.json");
    CHECK(galeao.almanac.size() == 24);
    CHECK(galeao.context.threat.g_max_night == 850.7);
    CHECK(galeao.context.threat.is_night(2.0));
    CHECK(galeao.context.threat.sigma_vig_min == 14.0);
    CHECK(galeao.context.combos.size() == 56);
    CHECK(galeao.context.reference() == ScreeningCombo{2.0, 2.0});

    const auto memphis = load_airport(kRoot / "configs/memphis.json");
    CHECK(memphis.context.threat.sigma_vig_min == 6.4);
    CHECK(memphis.context.threat.night_windows.empty());

    for (const char* name : {"ishigaki.json", "chennai.json"}) {
        const auto a = load_airport(kRoot / "configs" / name);
        CHECK(a.context.threat.g_max_night == 600.0);
    }
}

TEST_CASE("config errors")
{
    const auto base = kRoot / "configs";
    CHECK_THROWS_AS(parse_airport("{not json", base), ConfigError);
    CHECK_THROWS_AS(parse_airport(R"({"site": {"latitude_deg": 0, "longitude_deg": 0}, "almanac": "../data/rtca24.alm"})", base), ConfigError);
    CHECK_THROWS_AS(parse_airport(R"({"name": "x", "almanac": "../data/rtca24.alm"})", base), ConfigError);
    CHECK_THROWS_AS(parse_airport(R"({"name": "x", "site": {"latitude_deg": 0, "longitude_deg": 0}, "almanac": "missing.alm"})", base), ConfigError);
    const char* bad_c = R"({"name": "x", "site": {"latitude_deg": 0, "longitude_deg": 0},
        "almanac": "../data/rtca24.alm", "threat": {"c_factor": 1.5}})";
    CHECK_THROWS_AS(parse_airport(bad_c, base), ConfigError);
    const char* bad_ref = R"({"name": "x", "site": {"latitude_deg": 0, "longitude_deg": 0},
        "almanac": "../data/rtca24.alm", "reference_x_dh_km": 9})";
    CHECK_THROWS_AS(parse_airport(bad_ref, base), ConfigError);
    // comments are allowed
    const char* ok = R"({"name": "x", // test site
        "site": {"latitude_deg": 10, "longitude_deg": 20}, "almanac": "../data/rtca24.alm"})";
    CHECK(parse_airport(ok, base).name == "x");
}

TEST_CASE("run settings")
{
    RunConfig run = short_run("galeao.json", Algorithm::optimal);
    CHECK(run.epoch_count() == 18);
    run.day_s = 86400.0;
    run.step_s = 60.0;
    CHECK(run.epoch_count() == 1440);
    run.c_factor = 0.5;
    CHECK(run.context().threat.c_factor == 0.5);
    run.step_s = 0.0;
    CHECK_THROWS_AS(run.validate(), ConfigError);
}

TEST_CASE("availability arithmetic")
{
    std::vector<EpochResult> r(1440);
    for (auto& e : r) e.available = true;
    CHECK(availability(r) == 100.0);
    for (std::size_t i = 0; i < 292; ++i) r[i].available = false;
    CHECK(availability(r) == 79.72);
    CHECK_THROWS_AS(availability({}), EmptyInput);

    std::vector<EpochResult> two(2);
    two[0].nominal_vpl = 4.0;
    two[0].inflated_vpl = 5.0;
    two[1].nominal_vpl = 3.0;
    two[1].inflated_vpl = 3.0;
    CHECK(mean_inflation(two) == doctest::Approx(0.5));
}

TEST_CASE("short runs are screened and consistent")
{
    for (auto a : kAllAlgorithms) {
        const auto run = short_run("galeao.json", a);
        const auto results = run_day(run);
        REQUIRE(results.size() == run.epoch_count());
        for (const auto& r : results) {
            CHECK(r.inflated_vpl >= r.nominal_vpl - 1e-9);
            CHECK(r.available == (r.inflated_vpl < r.val));
            CHECK(r.night == (r.time_s < 9 * 3600.0));
            CHECK(r.worst_margin >= 0.0);
            if (a == Algorithm::optimal) CHECK(r.lp_count == 1);
            if (a == Algorithm::sigma_vig) CHECK(r.lp_count == 0);
            if (a == Algorithm::targeted) CHECK(r.lp_count <= 112);
        }
    }
}

TEST_CASE("workers do not change results")
{
    auto run = short_run("galeao.json", Algorithm::targeted, 2 * 3600.0, 900.0);
    const auto serial = run_day(run);
    run.workers = 3;
    const auto parallel = run_day(run);
    std::ostringstream a, b;
    write_epochs_csv(a, serial);
    write_epochs_csv(b, parallel);
    auto strip = [](const std::string& s) {
        std::istringstream in(s);
        std::string line, out;
        while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
        return out;
    };
    CHECK(strip(a.str()) == strip(b.str()));
}

TEST_CASE("comparison shares epochs")
{
    const auto run = short_run("galeao.json", Algorithm::optimal, 2 * 3600.0, 900.0);
    const auto cmp = compare_algorithms(run);
    CHECK(cmp.night_epochs == 8);
    for (auto a : kAllAlgorithms) {
        const auto& r = cmp.run(a);
        REQUIRE(r.size() == 8);
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(r[i].prns == cmp.run(Algorithm::optimal)[i].prns);
            CHECK(r[i].nominal_vpl == cmp.run(Algorithm::optimal)[i].nominal_vpl);
        }
        CHECK(cmp.summary(a).algorithm == a);
    }
    CHECK(cmp.optimal_lowest <= std::min(cmp.optimal_below_sigma_vig, cmp.optimal_below_targeted));
}

TEST_CASE("output files")
{
    const auto run = short_run("memphis.json", Algorithm::optimal, 3600.0, 600.0);
    const auto results = run_day(run);
    const auto dir = std::filesystem::temp_directory_path() / "gbas_report_test";
    std::filesystem::remove_all(dir);
    write_run_outputs(dir, run, results);
    for (const char* f : {"epochs.csv", "summary.json", "vpl_series.csv", "inflation.jsonl"})
        CHECK(std::filesystem::exists(dir / f));

    const auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary["airport"] == "Memphis");
    CHECK(summary["algorithm"] == "optimal");
    CHECK(summary["epochs"] == 6);
    CHECK(summary.contains("timing"));

    const auto csv = read_file(dir / "epochs.csv");
    CHECK(csv.rfind("epoch,time_s,prns,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

    std::istringstream jl(read_file(dir / "inflation.jsonl"));
    std::string line;
    int lines = 0;
    while (std::getline(jl, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["sigma_pr_gnd_m"].size() == j["prns"].size());
        ++lines;
    }
    CHECK(lines == 6);
    std::filesystem::remove_all(dir);
}

TEST_CASE("an empty sky is a config error")
{
    RunConfig run = short_run("memphis.json", Algorithm::optimal, 600.0, 60.0);
    run.airport.almanac.clear();
    CHECK_THROWS_AS(run_day(run), ConfigError);
}
