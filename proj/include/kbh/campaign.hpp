#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kbh/datagen.hpp"

namespace kbh {

// One (run, estimator) cell of a campaign.
struct RunOutcome {
  int run = 0;
  std::uint64_t seed = 0;
  std::string estimator;  // "kbh" or "baseline"
  bool ok = false;
  std::string error;  // empty when ok
  double fit_g = 0.0;
  double fit_f = 0.0;
  int iterations = 0;
  double seconds = 0.0;  // wall time; reported separately, see below
};

struct CampaignResult {
  ExperimentConfig config;
  std::string label;  // e.g. "nu10_snr10"
  std::vector<RunOutcome> rows;  // sorted by run, kbh before baseline
};

std::string experiment_label(const ExperimentConfig& config);

// Quantile with linear interpolation between order statistics (the
// convention with h = (m - 1) q). values need not be sorted.
double quantile(std::vector<double> values, double q);

// Executes runs x {kbh, baseline}. Per-run data comes from seed + run index
// (estimator initialization uses a hash-derived stream so it never replays
// the dataset draws), so any parallelism degree yields the same rows.
// Writes, under output_dir:
//   results.csv    one row per (run, estimator) with scores and status
//   aggregate.csv  quartiles per (estimator, metric) over successful rows
//   timing.csv     wall-clock seconds per row; the only output that is NOT
//                  byte-reproducible across executions
//   runs/run_NNNN/ truth and raw estimate vectors (plus the dataset itself
//                  when save_datasets is set)
// Single-run failures are recorded and the campaign continues.
CampaignResult run_campaign(const ExperimentConfig& config,
                            const std::filesystem::path& output_dir, int parallelism,
                            bool save_datasets);

// Fraction of failed rows (0 when there are no rows).
double failure_fraction(const CampaignResult& result);

}  // namespace kbh
