#include "kbh/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "kbh/baseline.hpp"
#include "kbh/dataset_io.hpp"
#include "kbh/em.hpp"
#include "kbh/errors.hpp"
#include "kbh/metrics.hpp"

namespace kbh {

namespace {

std::string sanitize(std::string text) {
  for (char& ch : text) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return text;
}

std::string run_dir_name(int run) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "run_%04d", run);
  return buffer;
}

std::string trim_number(double value) { return format_double(value); }

void write_trace_csv(const std::filesystem::path& file, const EmTrace& trace) {
  std::ofstream out(file, std::ios::trunc);
  out << "iteration,nll\n";
  for (const EmIterationRecord& rec : trace.iterations) {
    out << rec.iteration << "," << format_double(rec.neg_loglik) << "\n";
  }
}

// One (dataset, estimator) evaluation, scored against the generating truth.
RunOutcome evaluate_cell(const SimulatedRun& sim, const ExperimentConfig& config,
                         const std::string& estimator, int run, std::uint64_t run_seed,
                         const std::filesystem::path& run_dir) {
  RunOutcome outcome;
  outcome.run = run;
  outcome.seed = run_seed;
  outcome.estimator = estimator;

  const PolynomialBasis basis(config.basis_size);
  const auto start = std::chrono::steady_clock::now();
  try {
    Eigen::VectorXd g_hat;
    Eigen::VectorXd c_hat;
    if (estimator == "kbh") {
      EmConfig em;
      // Decouple the initialization stream from the dataset stream.
      em.rng_seed = run_seed ^ 0x9e3779b97f4a7c15ULL;
      const HammersteinEstimate est =
          em_fit(sim.data, basis, config.impulse_length, em);
      g_hat = est.g_hat;
      c_hat = est.c_hat;
      outcome.iterations = static_cast<int>(est.trace.iterations.size()) - 1;
      write_trace_csv(run_dir / "kbh_trace.csv", est.trace);
    } else {
      const BilinearEstimate est = baseline_fit(sim.data, basis, config.impulse_length);
      g_hat = est.g_hat;
      c_hat = est.c_hat;
      outcome.iterations = 0;
    }
    write_indexed_vector(run_dir / (estimator + "_g.csv"), g_hat);
    write_indexed_vector(run_dir / (estimator + "_c.csv"), c_hat);

    const AlignedEstimate aligned = align_scale(g_hat, c_hat, sim.truth.g);
    outcome.fit_g = fit_g(sim.truth.g, aligned.g);
    // Monomial bases nest, so padding the shorter coefficient vector lets the
    // score compare polynomials of different degree when p != 7.
    const Eigen::Index p_max = std::max(sim.truth.c.size(), aligned.c.size());
    Eigen::VectorXd c_true_pad = Eigen::VectorXd::Zero(p_max);
    Eigen::VectorXd c_hat_pad = Eigen::VectorXd::Zero(p_max);
    c_true_pad.head(sim.truth.c.size()) = sim.truth.c;
    c_hat_pad.head(aligned.c.size()) = aligned.c;
    outcome.fit_f = fit_f(c_true_pad, c_hat_pad,
                          PolynomialBasis(static_cast<int>(p_max)), sim.data.u);
    outcome.ok = true;
  } catch (const std::exception& err) {
    outcome.ok = false;
    outcome.error = sanitize(err.what());
  }
  outcome.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

void write_results_csv(const std::filesystem::path& file, const CampaignResult& result) {
  std::ofstream out(file, std::ios::trunc);
  out << "experiment,run,seed,estimator,fit_g,fit_f,iterations,status\n";
  for (const RunOutcome& row : result.rows) {
    out << result.label << "," << row.run << "," << row.seed << "," << row.estimator << ",";
    if (row.ok) {
      out << trim_number(row.fit_g) << "," << trim_number(row.fit_f) << ","
          << row.iterations << ",ok\n";
    } else {
      out << ",," << row.iterations << ",failed:" << row.error << "\n";
    }
  }
}

void write_aggregate_csv(const std::filesystem::path& file, const CampaignResult& result) {
  std::ofstream out(file, std::ios::trunc);
  out << "experiment,estimator,metric,q1,median,q3,count\n";
  for (const std::string estimator : {"kbh", "baseline"}) {
    for (const std::string metric : {"fit_g", "fit_f"}) {
      std::vector<double> values;
      for (const RunOutcome& row : result.rows) {
        if (row.ok && row.estimator == estimator) {
          values.push_back(metric == "fit_g" ? row.fit_g : row.fit_f);
        }
      }
      out << result.label << "," << estimator << "," << metric << ",";
      if (values.empty()) {
        out << ",,,0\n";
      } else {
        out << trim_number(quantile(values, 0.25)) << ","
            << trim_number(quantile(values, 0.5)) << ","
            << trim_number(quantile(values, 0.75)) << "," << values.size() << "\n";
      }
    }
  }
}

void write_timing_csv(const std::filesystem::path& file, const CampaignResult& result) {
  std::ofstream out(file, std::ios::trunc);
  out << "experiment,run,estimator,seconds\n";
  for (const RunOutcome& row : result.rows) {
    out << result.label << "," << row.run << "," << row.estimator << ","
        << trim_number(row.seconds) << "\n";
  }
}

}  // namespace

std::string experiment_label(const ExperimentConfig& config) {
  return "nu" + std::to_string(config.nu) + "_snr" + format_double(config.snr);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("quantile: empty sample");
  }
  if (q < 0.0 || q > 1.0) {
    throw std::invalid_argument("quantile: q outside [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

CampaignResult run_campaign(const ExperimentConfig& config,
                            const std::filesystem::path& output_dir, int parallelism,
                            bool save_datasets) {
  validate_experiment(config);
  if (parallelism < 1) {
    throw std::invalid_argument("run_campaign: parallelism must be >= 1");
  }

  std::filesystem::create_directories(output_dir / "runs");

  CampaignResult result;
  result.config = config;
  result.label = experiment_label(config);
  result.rows.resize(static_cast<std::size_t>(config.runs) * 2);

  std::atomic<int> next_run{0};
  auto worker = [&]() {
    while (true) {
      const int run = next_run.fetch_add(1);
      if (run >= config.runs) return;

      const std::uint64_t run_seed = config.seed + static_cast<std::uint64_t>(run);
      try {
        const std::filesystem::path run_dir = output_dir / "runs" / run_dir_name(run);
        std::filesystem::create_directories(run_dir);

        Rng rng(run_seed);
        const SystemSpec system = random_system(config.nu, config.impulse_length, rng);
        const Eigen::VectorXd c_true = random_polynomial(rng);
        // Data generation always uses the truth polynomial's own basis; the
        // estimators see only config.basis_size.
        const PolynomialBasis truth_basis(static_cast<int>(c_true.size()));
        const SimulatedRun sim =
            simulate(system, c_true, truth_basis, config.num_samples, config.snr, rng);

        write_truth(run_dir / "truth.csv",
                    TruthFile{sim.truth.g, sim.truth.c, sim.truth.sigma2});
        if (save_datasets) {
          write_dataset(run_dir / "dataset.csv",
                        Dataset{sim.data.u, sim.data.y, config.impulse_length});
        }

        result.rows[2 * run] = evaluate_cell(sim, config, "kbh", run, run_seed, run_dir);
        result.rows[2 * run + 1] =
            evaluate_cell(sim, config, "baseline", run, run_seed, run_dir);
      } catch (const std::exception& err) {
        // Generation or artifact I/O broke before the estimators ran; record
        // the whole run as failed and keep the campaign going.
        for (const int slot : {2 * run, 2 * run + 1}) {
          RunOutcome& row = result.rows[slot];
          row.run = run;
          row.seed = run_seed;
          row.estimator = slot == 2 * run ? "kbh" : "baseline";
          row.ok = false;
          row.error = sanitize(err.what());
        }
      }
    }
  };

  const int threads = std::min(parallelism, std::max(config.runs, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  write_results_csv(output_dir / "results.csv", result);
  write_aggregate_csv(output_dir / "aggregate.csv", result);
  write_timing_csv(output_dir / "timing.csv", result);
  return result;
}

double failure_fraction(const CampaignResult& result) {
  if (result.rows.empty()) return 0.0;
  const auto failed = std::count_if(result.rows.begin(), result.rows.end(),
                                    [](const RunOutcome& row) { return !row.ok; });
  return static_cast<double>(failed) / static_cast<double>(result.rows.size());
}

}  // namespace kbh
