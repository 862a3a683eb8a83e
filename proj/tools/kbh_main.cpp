// Command-line front end: single-dataset identification, Monte Carlo
// campaigns over both estimators, and plot-data extraction from finished
// campaigns. See README.md for file formats.

#include <CLI11.hpp>

#include "kbh/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hammerstein system identification (kernel-based estimator + "
               "over-parameterization baseline)"};
  app.require_subcommand(1);

  kbh::IdentifyOptions identify;
  CLI::App* id = app.add_subcommand("identify", "fit one dataset and write the estimate");
  id->add_option("-i,--input", identify.input, "dataset CSV")->required();
  id->add_option("-o,--output-dir", identify.output_dir, "output directory");
  id->add_option("-n,--n", identify.n, "impulse-response length (default: dataset header)");
  id->add_option("-p,--p", identify.p, "basis size (monomials 1..x^{p-1})");
  id->add_option("--tol", identify.tol, "EM convergence threshold");
  id->add_option("--max-iter", identify.max_iter, "EM iteration cap");
  id->add_option("--restarts", identify.restarts, "random starts, best objective wins");
  id->add_option("--seed", identify.seed, "initialization seed");
  id->add_option("--estimator", identify.estimator, "kbh or baseline");

  kbh::CampaignOptions campaign;
  int campaign_runs = -1;
  std::int64_t campaign_seed = -1;
  CLI::App* camp = app.add_subcommand("campaign", "Monte Carlo benchmark campaign");
  camp->add_option("-c,--config", campaign.config_file, "experiment config file")->required();
  camp->add_option("-o,--output-dir", campaign.output_dir, "output directory");
  camp->add_option("--runs", campaign_runs, "override run count");
  camp->add_option("--seed", campaign_seed, "override master seed");
  camp->add_option("--parallelism", campaign.parallelism, "worker threads");
  camp->add_flag("--save-datasets", campaign.save_datasets, "write per-run dataset files");

  kbh::PlotdataOptions plotdata;
  CLI::App* plot = app.add_subcommand("plotdata", "summaries and overlays from a campaign");
  plot->add_option("-d,--campaign-dir", plotdata.campaign_dir, "campaign output directory")
      ->required();
  plot->add_option("-o,--output-dir", plotdata.output_dir,
                   "plot-data directory (default <campaign>/plots)");
  plot->add_option("--run", plotdata.runs, "run indices to overlay");
  plot->add_option("--grid-points", plotdata.grid_points, "nonlinearity grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kbh::kExitUsage;
  }

  if (id->parsed()) return kbh::run_identify(identify);
  if (camp->parsed()) {
    if (campaign_runs >= 0) campaign.runs = campaign_runs;
    if (campaign_seed >= 0) campaign.seed = static_cast<std::uint64_t>(campaign_seed);
    return kbh::run_campaign_cmd(campaign);
  }
  return kbh::run_plotdata(plotdata);
}
