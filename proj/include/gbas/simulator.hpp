#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gbas/constellation.hpp"
#include "gbas/inflation.hpp"
#include "gbas/screening.hpp"

namespace gbas {

enum class Algorithm { sigma_vig, targeted, optimal };

constexpr std::array<Algorithm, 3> kAllAlgorithms{Algorithm::sigma_vig, Algorithm::targeted,
                                                  Algorithm::optimal};

std::string_view to_string(Algorithm a);
/// Accepts "sigma-vig", "targeted", "optimal"; throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view name);

/// Everything loaded from an airport file.
struct AirportConfig {
    std::string name;
    SiteLocation site;
    std::filesystem::path almanac_path;
    std::vector<AlmanacEntry> almanac;
    double start_time_s = 0.0;  // s of week for epoch 0
    double mask_deg = 5.0;
    std::vector<double> runway_x_dh_km;
    ScreeningContext context;
    SigmaVigSettings sigma_vig;
    TargetedSettings targeted;

    void validate() const;
};

struct RunConfig {
    AirportConfig airport;
    Algorithm algorithm = Algorithm::optimal;
    std::optional<double> c_factor;  // overrides the airport's threat model
    double step_s = 60.0;
    double day_s = 86400.0;
    unsigned workers = 1;

    void validate() const;
    std::size_t epoch_count() const;
    /// Airport context with the c factor override applied.
    ScreeningContext context() const;
};

struct EpochResult {
    std::size_t epoch = 0;
    double time_s = 0.0;  // since epoch 0
    std::vector<int> prns;
    double nominal_vpl = 0.0;   // all-in-view, reference combo
    double inflated_vpl = 0.0;  // all-in-view, reference combo
    double val = 0.0;
    bool available = false;
    bool night = false;
    std::size_t unsafe_count = 0;
    int lp_count = 0;
    int adjust_iterations = 0;
    double worst_margin = 0.0;
    BroadcastParams params;
    double timing_ms = 0.0;
};

/// Visibility, nominal budgets and screening for one epoch; shared by every algorithm.
struct ScreenedEpoch {
    std::size_t epoch = 0;
    EpochGeometry geometry;
    ScreeningResult screening;
    std::vector<double> nominal_vpls;  // all-in-view, per combo
    double screening_ms = 0.0;
};

ScreenedEpoch screen_epoch(const RunConfig& config, const ScreeningContext& ctx, std::size_t epoch);

/// Runs one algorithm on an already screened epoch and verifies the outcome.
/// Throws IntegrityFailure when the inflated parameters do not screen every
/// unsafe subset.
EpochResult inflate_epoch(const ScreenedEpoch& screened, const ScreeningContext& ctx,
                          const RunConfig& config, Algorithm algorithm);

std::vector<EpochResult> run_day(const RunConfig& config);

/// Percentage of available epochs, rounded to 2 decimals. Throws EmptyInput.
double availability(const std::vector<EpochResult>& results);

double mean_inflation(const std::vector<EpochResult>& results);

struct AlgorithmSummary {
    Algorithm algorithm = Algorithm::optimal;
    double availability = 0.0;
    double mean_inflation = 0.0;  // m, all-in-view at the reference combo
    long total_lps = 0;
    int max_lps = 0;
    long total_adjust_iterations = 0;
    double wall_ms = 0.0;
};

struct Comparison {
    std::array<std::vector<EpochResult>, 3> runs;  // indexed like kAllAlgorithms
    std::array<AlgorithmSummary, 3> summaries;
    std::size_t night_epochs = 0;
    double optimal_below_sigma_vig = 0.0;  // fraction of night epochs, strict
    double optimal_below_targeted = 0.0;
    double optimal_lowest = 0.0;           // strictly below both
    double screening_ms = 0.0;
    double wall_ms = 0.0;

    const std::vector<EpochResult>& run(Algorithm a) const;
    const AlgorithmSummary& summary(Algorithm a) const;
};

AlgorithmSummary summarize(Algorithm a, const std::vector<EpochResult>& results);

/// All three algorithms over identical screened epochs.
Comparison compare_algorithms(const RunConfig& config);

}  // namespace gbas
