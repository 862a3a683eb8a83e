#include "kbh/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "kbh/baseline.hpp"
#include "kbh/campaign.hpp"
#include "kbh/dataset_io.hpp"
#include "kbh/em.hpp"
#include "kbh/errors.hpp"
#include "kbh/metrics.hpp"

namespace kbh {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& text) {
  const std::size_t first = text.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const std::size_t last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

ExperimentConfig parse_experiment_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ParseError("cannot open " + file.string());
  }
  ExperimentConfig config;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError(file.string() + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    char* end = nullptr;
    const double numeric = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
      throw ParseError(file.string() + ":" + std::to_string(line_no) + ": bad value '" +
                       value + "'");
    }
    if (key == "nu") config.nu = static_cast<int>(numeric);
    else if (key == "snr") config.snr = numeric;
    else if (key == "N") config.num_samples = static_cast<int>(numeric);
    else if (key == "n") config.impulse_length = static_cast<int>(numeric);
    else if (key == "p") config.basis_size = static_cast<int>(numeric);
    else if (key == "runs") config.runs = static_cast<int>(numeric);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(numeric);
    else {
      throw ParseError(file.string() + ":" + std::to_string(line_no) + ": unknown key '" +
                       key + "'");
    }
  }
  return config;
}

void write_theta_csv(const fs::path& file, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream out(file, std::ios::trunc);
  out << "name,value\n";
  for (const auto& [name, value] : rows) out << name << "," << value << "\n";
}

void write_trace_csv(const fs::path& file, const EmTrace* trace) {
  std::ofstream out(file, std::ios::trunc);
  out << "iteration,nll\n";
  if (trace == nullptr) return;
  for (const EmIterationRecord& rec : trace->iterations) {
    out << rec.iteration << "," << format_double(rec.neg_loglik) << "\n";
  }
}

// results.csv reader used by plotdata.
struct ResultRow {
  std::string experiment;
  int run = 0;
  std::string estimator;
  bool ok = false;
  double fit_g = 0.0;
  double fit_f = 0.0;
};

std::vector<ResultRow> read_results_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ParseError("cannot open " + file.string());
  }
  std::vector<ResultRow> rows;
  std::string line;
  long line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "experiment,run,seed,estimator,fit_g,fit_f,iterations,status") {
        throw ParseError(file.string() + ": unexpected results header");
      }
      saw_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() < 8) {
      throw ParseError(file.string() + ":" + std::to_string(line_no) + ": short row");
    }
    ResultRow row;
    row.experiment = fields[0];
    row.run = std::atoi(fields[1].c_str());
    row.estimator = fields[3];
    row.ok = fields[7] == "ok";
    if (row.ok) {
      row.fit_g = std::strtod(fields[4].c_str(), nullptr);
      row.fit_f = std::strtod(fields[5].c_str(), nullptr);
    }
    rows.push_back(row);
  }
  if (!saw_header) {
    throw ParseError(file.string() + ": empty results file");
  }
  return rows;
}

}  // namespace

int run_identify(const IdentifyOptions& options) {
  try {
    const Dataset dataset = read_dataset(options.input);
    const int n = options.n > 0 ? options.n : dataset.n_hint;
    if (n <= 0) {
      std::cerr << "identify: no impulse-response length; pass --n or add an 'n='"
                   " recommendation to the dataset header\n";
      return kExitUsage;
    }
    if (options.estimator != "kbh" && options.estimator != "baseline") {
      std::cerr << "identify: unknown estimator '" << options.estimator << "'\n";
      return kExitUsage;
    }

    const SignalRecord record{dataset.u, dataset.y};
    const PolynomialBasis basis(options.p);
    const fs::path out_dir(options.output_dir);
    fs::create_directories(out_dir);

    if (options.estimator == "kbh") {
      EmConfig config;
      config.tol = options.tol;
      config.max_iter = options.max_iter;
      config.restarts = options.restarts;
      config.rng_seed = options.seed;
      const HammersteinEstimate est = em_fit(record, basis, n, config);

      write_indexed_vector(out_dir / "g_hat.csv", est.g_hat);
      write_indexed_vector(out_dir / "c_hat.csv", est.c_hat);
      write_theta_csv(out_dir / "theta.csv",
                      {{"estimator", "kbh"},
                       {"sigma2", format_double(est.theta_hat.sigma2)},
                       {"beta", format_double(est.theta_hat.beta)},
                       {"iterations",
                        std::to_string(est.trace.iterations.size() - 1)},
                       {"termination", est.trace.termination == Termination::kConverged
                                           ? "converged"
                                           : "max-iterations"}});
      write_trace_csv(out_dir / "trace.csv", &est.trace);
      std::cout << "kbh: " << est.trace.iterations.size() - 1 << " iterations, final nll "
                << format_double(est.trace.iterations.back().neg_loglik) << ", outputs in "
                << out_dir.string() << "\n";
    } else {
      const BilinearEstimate est = baseline_fit(record, basis, n);
      write_indexed_vector(out_dir / "g_hat.csv", est.g_hat);
      write_indexed_vector(out_dir / "c_hat.csv", est.c_hat);
      write_theta_csv(out_dir / "theta.csv",
                      {{"estimator", "baseline"},
                       {"residual_norm", format_double(est.residual_norm)}});
      write_trace_csv(out_dir / "trace.csv", nullptr);
      std::cout << "baseline: residual norm " << format_double(est.residual_norm)
                << ", outputs in " << out_dir.string() << "\n";
    }
    return kExitOk;
  } catch (const ParseError& err) {
    std::cerr << "identify: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "identify: " << err.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& err) {
    std::cerr << "identify: numerical failure: " << err.what() << "\n";
    return kExitNumerical;
  }
}

int run_campaign_cmd(const CampaignOptions& options) {
  try {
    ExperimentConfig config = parse_experiment_file(options.config_file);
    if (options.runs) config.runs = *options.runs;
    if (options.seed) config.seed = *options.seed;

    if (config.runs == 0) {
      std::cerr << "campaign: runs = 0, writing empty result tables\n";
    }
    const CampaignResult result =
        run_campaign(config, options.output_dir, options.parallelism, options.save_datasets);

    const double failed = failure_fraction(result);
    std::cout << "campaign " << result.label << ": " << result.rows.size() << " rows, "
              << static_cast<int>(failed * result.rows.size() + 0.5) << " failures, results in "
              << options.output_dir << "\n";
    if (failed > 0.10) {
      std::cerr << "campaign: failure fraction " << failed << " exceeds 10%\n";
      return kExitCampaignFailures;
    }
    return kExitOk;
  } catch (const ParseError& err) {
    std::cerr << "campaign: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "campaign: " << err.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& err) {
    std::cerr << "campaign: numerical failure: " << err.what() << "\n";
    return kExitNumerical;
  }
}

int run_plotdata(const PlotdataOptions& options) {
  try {
    const fs::path campaign_dir(options.campaign_dir);
    const fs::path out_dir =
        options.output_dir.empty() ? campaign_dir / "plots" : fs::path(options.output_dir);
    fs::create_directories(out_dir);

    const std::vector<ResultRow> rows = read_results_csv(campaign_dir / "results.csv");

    // Five-number summaries per (experiment, estimator, metric).
    {
      std::ofstream out(out_dir / "boxplot.csv", std::ios::trunc);
      out << "experiment,estimator,metric,min,q1,median,q3,max\n";
      std::vector<std::string> experiments;
      for (const ResultRow& row : rows) {
        if (std::find(experiments.begin(), experiments.end(), row.experiment) ==
            experiments.end()) {
          experiments.push_back(row.experiment);
        }
      }
      for (const std::string& experiment : experiments) {
        for (const std::string estimator : {"kbh", "baseline"}) {
          for (const std::string metric : {"fit_g", "fit_f"}) {
            std::vector<double> values;
            for (const ResultRow& row : rows) {
              if (row.ok && row.experiment == experiment && row.estimator == estimator) {
                values.push_back(metric == "fit_g" ? row.fit_g : row.fit_f);
              }
            }
            out << experiment << "," << estimator << "," << metric << ",";
            if (values.empty()) {
              out << ",,,,\n";
            } else {
              out << format_double(quantile(values, 0.0)) << ","
                  << format_double(quantile(values, 0.25)) << ","
                  << format_double(quantile(values, 0.5)) << ","
                  << format_double(quantile(values, 0.75)) << ","
                  << format_double(quantile(values, 1.0)) << "\n";
            }
          }
        }
      }
    }

    // Per-run overlays of true vs estimated quantities.
    for (const int run : options.runs) {
      char name[32];
      std::snprintf(name, sizeof(name), "run_%04d", run);
      const fs::path run_dir = campaign_dir / "runs" / name;
      const TruthFile truth = read_truth(run_dir / "truth.csv");

      const Eigen::VectorXd g_kbh = read_indexed_vector(run_dir / "kbh_g.csv");
      const Eigen::VectorXd c_kbh = read_indexed_vector(run_dir / "kbh_c.csv");
      const Eigen::VectorXd g_base = read_indexed_vector(run_dir / "baseline_g.csv");
      const Eigen::VectorXd c_base = read_indexed_vector(run_dir / "baseline_c.csv");

      const AlignedEstimate kbh_aligned = align_scale(g_kbh, c_kbh, truth.g);
      const AlignedEstimate base_aligned = align_scale(g_base, c_base, truth.g);

      {
        std::ofstream out(out_dir / (std::string("overlay_g_") + name + ".csv"),
                          std::ios::trunc);
        out << "index,g_true,g_kbh,g_baseline\n";
        for (Eigen::Index i = 0; i < truth.g.size(); ++i) {
          out << (i + 1) << "," << format_double(truth.g(i)) << ","
              << format_double(kbh_aligned.g(i)) << "," << format_double(base_aligned.g(i))
              << "\n";
        }
      }
      {
        Eigen::VectorXd grid(options.grid_points);
        for (int i = 0; i < options.grid_points; ++i) {
          grid(i) = -2.0 + 4.0 * static_cast<double>(i) /
                               static_cast<double>(options.grid_points - 1);
        }
        // The truth polynomial and the estimates may have different degrees;
        // each is evaluated in its own monomial basis.
        auto evaluate = [&grid](const Eigen::VectorXd& coeffs) {
          return apply_nonlinearity(PolynomialBasis(static_cast<int>(coeffs.size())),
                                    coeffs, grid);
        };
        const Eigen::VectorXd f_true = evaluate(truth.c);
        const Eigen::VectorXd f_kbh = evaluate(kbh_aligned.c);
        const Eigen::VectorXd f_base = evaluate(base_aligned.c);

        std::ofstream out(out_dir / (std::string("overlay_f_") + name + ".csv"),
                          std::ios::trunc);
        out << "u,f_true,f_kbh,f_baseline\n";
        for (int i = 0; i < options.grid_points; ++i) {
          out << format_double(grid(i)) << "," << format_double(f_true(i)) << ","
              << format_double(f_kbh(i)) << "," << format_double(f_base(i)) << "\n";
        }
      }
    }

    std::cout << "plotdata: wrote " << (out_dir / "boxplot.csv").string() << " and "
              << options.runs.size() << " overlay pair(s)\n";
    return kExitOk;
  } catch (const ParseError& err) {
    std::cerr << "plotdata: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "plotdata: " << err.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace kbh
