#include "kbh/em.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kbh/errors.hpp"
#include "kbh/kernel.hpp"
#include "kbh/rng.hpp"
#include "kbh/toeplitz.hpp"

namespace kbh {

namespace {

constexpr double kSigma2Floor = 1e-12;

Eigen::VectorXd theta_vector(const HyperParameters& theta) {
  Eigen::VectorXd v(theta.c.size() + 2);
  v.head(theta.c.size()) = theta.c;
  v(theta.c.size()) = theta.sigma2;
  v(theta.c.size() + 1) = theta.beta;
  return v;
}

double beta_objective(const StableSplineKernel& kernel, const Eigen::MatrixXd& m) {
  return kernel.log_det() + kernel.inv_quadform(m);
}

// Grid kernels do not depend on the data, so their log-determinants and
// inverses are computed once per fit and reused by every beta update.
struct BetaGridCache {
  std::vector<double> betas;
  std::vector<double> log_dets;
  std::vector<Eigen::MatrixXd> inverses;

  BetaGridCache(std::span<const double> grid, int n) {
    betas.reserve(grid.size());
    for (double beta : grid) {
      StableSplineKernel kernel(beta, n);
      betas.push_back(beta);
      log_dets.push_back(kernel.log_det());
      Eigen::MatrixXd inv = kernel.solve_matrix(Eigen::MatrixXd::Identity(n, n));
      inverses.push_back(0.5 * (inv + inv.transpose()));
    }
  }

  double objective(std::size_t i, const Eigen::MatrixXd& m) const {
    return log_dets[i] + inverses[i].cwiseProduct(m).sum();
  }
};

HyperParameters random_initialization(const SignalRecord& data, const Eigen::MatrixXd& regressor,
                                      std::uint64_t seed) {
  Rng rng(seed);
  HyperParameters theta;
  theta.c.resize(regressor.cols());
  for (Eigen::Index j = 0; j < theta.c.size(); ++j) theta.c(j) = rng.normal();
  const double scale = (regressor * theta.c).norm();
  if (scale > 0.0) theta.c *= data.y.norm() / scale;

  const double mean = data.y.mean();
  theta.sigma2 = std::max((data.y.array() - mean).square().mean(), kSigma2Floor);
  theta.beta = 0.5;
  return theta;
}

}  // namespace

std::vector<double> default_beta_grid() {
  std::vector<double> grid(99);
  for (int i = 0; i < 99; ++i) grid[i] = (i + 1) / 100.0;
  return grid;
}

void validate_config(const EmConfig& config) {
  if (!(config.tol > 0.0)) {
    throw std::invalid_argument("em config: tol must be positive");
  }
  if (config.max_iter < 0) {
    throw std::invalid_argument("em config: max_iter must be >= 0");
  }
  if (config.restarts < 1) {
    throw std::invalid_argument("em config: restarts must be >= 1");
  }
  if (config.beta_grid.empty()) {
    throw std::invalid_argument("em config: empty beta grid");
  }
  double prev = 0.0;
  for (double b : config.beta_grid) {
    if (!(b > 0.0) || !(b < 1.0) || !(b > prev)) {
      throw std::invalid_argument("em config: beta grid must be strictly increasing in (0, 1)");
    }
    prev = b;
  }
  if (config.initial) validate_hyperparameters(*config.initial);
}

CoefficientSystem mstep_normal_equations(const SignalRecord& data, const BasisSet& basis,
                                         const PosteriorMoments& post, int n) {
  validate_signal(data);
  const int p = basis.size();
  if (post.mean.size() != n || post.cov.rows() != n || post.cov.cols() != n) {
    throw std::invalid_argument("mstep_normal_equations: posterior moments do not match n");
  }
  const Eigen::MatrixXd regressor = build_regressor(basis, data.u);
  const Eigen::MatrixXd m2 = post.cov + post.mean * post.mean.transpose();

  std::vector<ToeplitzSpec> columns;
  columns.reserve(p);
  for (int a = 0; a < p; ++a) {
    columns.push_back(make_toeplitz_spec(regressor.col(a), n));
  }

  CoefficientSystem system;
  system.quad.resize(p, p);
  system.lin.resize(p);
  for (int a = 0; a < p; ++a) {
    for (int b = a; b < p; ++b) {
      const double v = toeplitz_cross_gram(columns[a], columns[b]).cwiseProduct(m2).sum();
      system.quad(a, b) = v;
      system.quad(b, a) = v;
    }
    system.lin(a) = toeplitz_matvec(columns[a], post.mean).dot(data.y);
  }
  return system;
}

Eigen::VectorXd mstep_coefficients(const SignalRecord& data, const BasisSet& basis,
                                   const PosteriorMoments& post, int n) {
  const CoefficientSystem system = mstep_normal_equations(data, basis, post, n);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(system.quad);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double d_max = d.maxCoeff();
  if (ldlt.info() != Eigen::Success || !(d_max > 0.0) || d.minCoeff() <= 1e-12 * d_max) {
    throw NumericalError(
        "mstep_coefficients: singular coefficient system (rank-deficient regressor columns "
        "or vanishing posterior second moment)");
  }
  return ldlt.solve(system.lin);
}

NoiseUpdate mstep_noise_variance(const SignalRecord& data, const Eigen::VectorXd& w_new,
                                 const PosteriorMoments& post, int n) {
  validate_signal(data);
  if (w_new.size() != data.size()) {
    throw std::invalid_argument("mstep_noise_variance: signal length mismatch");
  }
  const ToeplitzSpec spec = make_toeplitz_spec(w_new, n);
  const double resid = (data.y - toeplitz_matvec(spec, post.mean)).squaredNorm();
  const double smear = toeplitz_gram(spec).cwiseProduct(post.cov).sum();  // Tr(W P W^T)
  const double raw = (resid + smear) / static_cast<double>(data.size());

  NoiseUpdate update;
  update.clamped = !(raw > kSigma2Floor);
  update.sigma2 = update.clamped ? kSigma2Floor : raw;
  return update;
}

double mstep_beta(const PosteriorMoments& post, std::span<const double> grid) {
  if (grid.empty()) {
    throw std::invalid_argument("mstep_beta: empty candidate grid");
  }
  const Eigen::MatrixXd m2 = post.cov + post.mean * post.mean.transpose();
  const int n = static_cast<int>(m2.rows());

  double best_beta = std::numeric_limits<double>::quiet_NaN();
  double best_value = std::numeric_limits<double>::infinity();
  for (double beta : grid) {
    double value;
    try {
      value = beta_objective(StableSplineKernel(beta, n), m2);
    } catch (const NumericalError&) {
      continue;
    }
    if (std::isfinite(value) && value < best_value) {
      best_value = value;
      best_beta = beta;
    }
  }
  if (!std::isfinite(best_value)) {
    throw NumericalError("mstep_beta: every grid evaluation failed");
  }
  return best_beta;
}

double q_function(const SignalRecord& data, const BasisSet& basis, int n,
                  const HyperParameters& theta, const PosteriorMoments& prev) {
  validate_signal(data);
  validate_hyperparameters(theta);
  const double N = static_cast<double>(data.size());
  const Eigen::MatrixXd m2 = prev.cov + prev.mean * prev.mean.transpose();

  const Eigen::VectorXd w = apply_nonlinearity(basis, theta.c, data.u);
  const ToeplitzSpec spec = make_toeplitz_spec(w, n);
  const double quad = toeplitz_gram(spec).cwiseProduct(m2).sum();  // Tr(W^T W M)
  const double cross = toeplitz_matvec(spec, prev.mean).dot(data.y);

  const StableSplineKernel kernel(theta.beta, n);
  return -0.5 * N * std::log(theta.sigma2) -
         (data.y.squaredNorm() + quad - 2.0 * cross) / (2.0 * theta.sigma2) -
         0.5 * kernel.log_det() - 0.5 * kernel.inv_quadform(m2);
}

namespace {

HammersteinEstimate em_fit_single(const SignalRecord& data, const BasisSet& basis, int n,
                                  const EmConfig& config, const Eigen::MatrixXd& regressor,
                                  const BetaGridCache& grid_cache, HyperParameters theta) {
  HammersteinEstimate estimate;
  estimate.trace.termination = Termination::kMaxIterations;

  EvidenceEval ev = evaluate_evidence(data, basis, theta, n);
  estimate.trace.iterations.push_back(
      {0, theta, ev.neg_loglik, std::numeric_limits<double>::quiet_NaN(), false});

  for (int k = 1; k <= config.max_iter; ++k) {
    try {
      const PosteriorMoments& moments = ev.moments;

      HyperParameters next;
      next.c = mstep_coefficients(data, basis, moments, n);
      const Eigen::VectorXd w_new = regressor * next.c;
      const NoiseUpdate noise = mstep_noise_variance(data, w_new, moments, n);
      next.sigma2 = noise.sigma2;

      // Grid argmin, with the previous iterate included as a candidate so
      // the beta block can never move to a worse value.
      const Eigen::MatrixXd m2 = moments.cov + moments.mean * moments.mean.transpose();
      double best_beta = theta.beta;
      double best_value = beta_objective(StableSplineKernel(theta.beta, n), m2);
      for (std::size_t i = 0; i < grid_cache.betas.size(); ++i) {
        const double value = grid_cache.objective(i, m2);
        if (std::isfinite(value) &&
            (value < best_value ||
             (value == best_value && grid_cache.betas[i] < best_beta))) {
          best_value = value;
          best_beta = grid_cache.betas[i];
        }
      }
      next.beta = best_beta;

      const double q_value = q_function(data, basis, n, next, moments);
      ev = evaluate_evidence(data, basis, next, n);
      estimate.trace.iterations.push_back({k, next, ev.neg_loglik, q_value, noise.clamped});

      const double step = (theta_vector(next) - theta_vector(theta)).norm();
      theta = next;
      if (step < config.tol) {
        estimate.trace.termination = Termination::kConverged;
        break;
      }
    } catch (const NumericalError& err) {
      throw NumericalError("em iteration " + std::to_string(k) + ": " + err.what());
    }
  }

  estimate.theta_hat = theta;
  estimate.c_hat = theta.c;
  estimate.g_hat = ev.moments.mean;
  return estimate;
}

}  // namespace

HammersteinEstimate em_fit(const SignalRecord& data, const BasisSet& basis, int n,
                           const EmConfig& config) {
  validate_signal(data);
  validate_config(config);
  const Eigen::Index N = data.size();
  if (n < 1 || n > N) {
    throw std::invalid_argument("em_fit: impulse length " + std::to_string(n) +
                                " outside [1, N = " + std::to_string(N) + "]");
  }

  const Eigen::MatrixXd regressor = build_regressor(basis, data.u);
  const BetaGridCache grid_cache(config.beta_grid, n);

  if (config.initial) {
    if (config.initial->c.size() != basis.size()) {
      throw std::invalid_argument("em_fit: initial coefficient size does not match basis");
    }
    return em_fit_single(data, basis, n, config, regressor, grid_cache, *config.initial);
  }

  HammersteinEstimate best;
  double best_final = std::numeric_limits<double>::infinity();
  for (int r = 0; r < config.restarts; ++r) {
    const HyperParameters start =
        random_initialization(data, regressor, config.rng_seed + static_cast<std::uint64_t>(r));
    HammersteinEstimate candidate =
        em_fit_single(data, basis, n, config, regressor, grid_cache, start);
    const double final_nll = candidate.trace.iterations.back().neg_loglik;
    if (final_nll < best_final) {
      best_final = final_nll;
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace kbh
