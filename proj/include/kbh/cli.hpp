#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kbh {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad flags, unreadable/malformed files
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitCampaignFailures = 3;  // > 10% of cells failed

struct IdentifyOptions {
  std::string input;
  std::string output_dir = ".";
  int n = 0;  // 0: take the dataset header recommendation
  int p = 7;
  double tol = 1e-3;
  int max_iter = 200;
  int restarts = 3;
  std::uint64_t seed = 0;
  std::string estimator = "kbh";  // or "baseline"
};

// Fits one dataset and writes g_hat.csv, c_hat.csv, theta.csv and trace.csv
// into output_dir.
int run_identify(const IdentifyOptions& options);

struct CampaignOptions {
  std::string config_file;
  std::string output_dir = "campaign_out";
  std::optional<int> runs;            // override config
  std::optional<std::uint64_t> seed;  // override config
  int parallelism = 1;
  bool save_datasets = false;
};

// Config file: '#' comments plus "key = value" lines with keys
// nu, snr, N, n, p, runs, seed.
int run_campaign_cmd(const CampaignOptions& options);

struct PlotdataOptions {
  std::string campaign_dir;
  std::string output_dir;        // empty: <campaign_dir>/plots
  std::vector<int> runs = {0};   // runs to overlay
  int grid_points = 200;         // nonlinearity evaluation grid on [-2, 2]
};

// Emits boxplot.csv (five-number summaries) and per-run overlay files of the
// true vs estimated impulse response and nonlinearity.
int run_plotdata(const PlotdataOptions& options);

}  // namespace kbh
