#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gbas/simulator.hpp"

namespace gbas {

// Per-epoch table; timing_ms is always the last column so it can be cut off
// when comparing runs.
void write_epochs_csv(std::ostream& os, const std::vector<EpochResult>& results);

/// epoch, time, nominal VPL, then one inflated-VPL column per run given.
void write_vpl_series(std::ostream& os, const std::vector<const std::vector<EpochResult>*>& runs,
                      const std::vector<Algorithm>& algorithms);

/// One JSON object per epoch with the broadcast parameters that were chosen.
void write_inflation_jsonl(std::ostream& os, const std::vector<EpochResult>& results);

/// Summary for a single-algorithm run. Wall-clock numbers live under "timing".
void write_run_summary(std::ostream& os, const RunConfig& config,
                       const std::vector<EpochResult>& results);

void write_compare_summary(std::ostream& os, const RunConfig& config, const Comparison& cmp);

/// Writes epochs.csv, summary.json, vpl_series.csv and inflation.jsonl into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config,
                       const std::vector<EpochResult>& results);

/// Writes summary.json, vpl_series.csv and epochs_<algorithm>.csv into `dir`.
void write_compare_outputs(const std::filesystem::path& dir, const RunConfig& config,
                           const Comparison& cmp);

}  // namespace gbas
