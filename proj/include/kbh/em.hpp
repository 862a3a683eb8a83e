#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "kbh/nonlinearity.hpp"
#include "kbh/posterior.hpp"
#include "kbh/signal.hpp"

namespace kbh {

// 99 uniform points 0.01, 0.02, ..., 0.99.
std::vector<double> default_beta_grid();

struct EmConfig {
  // Stop when the 2-norm of the raw hyperparameter change drops below tol.
  // The vector [c; sigma2; beta] mixes units; the threshold is applied to it
  // as-is, so rescaling the data changes what tol means.
  double tol = 1e-3;
  int max_iter = 200;
  std::vector<double> beta_grid = default_beta_grid();  // strictly increasing, in (0,1)
  std::uint64_t rng_seed = 0;
  // Number of random starts; the fit with the smallest final marginal
  // objective is returned. Restart r draws its start point from
  // rng_seed + r. At very high signal-to-noise ratios a single random start
  // can settle on an inferior stationary point, so the default runs three.
  // Ignored (single run) when `initial` is supplied.
  int restarts = 3;
  // When set, the start point is fixed: no randomness, restarts ignored.
  // Otherwise the start is drawn per restart: c0 standard normal scaled so
  // |F(u) c0| = |y|, sigma2 = variance of y, beta = 0.5.
  std::optional<HyperParameters> initial;
};

void validate_config(const EmConfig& config);

enum class Termination { kConverged, kMaxIterations };

struct EmIterationRecord {
  int iteration = 0;  // 0 is the initialization row
  HyperParameters theta;
  double neg_loglik = 0.0;  // marginal objective at theta
  // Expected complete-data log-likelihood of theta under the previous
  // iterate's posterior; NaN on the initialization row.
  double q_value = 0.0;
  bool sigma2_clamped = false;
};

struct EmTrace {
  std::vector<EmIterationRecord> iterations;
  Termination termination = Termination::kMaxIterations;
};

struct HammersteinEstimate {
  Eigen::VectorXd g_hat;  // posterior mean at theta_hat
  Eigen::VectorXd c_hat;
  HyperParameters theta_hat;
  EmTrace trace;
};

// Normal equations of the coefficient block of the expected complete-data
// log-likelihood, assembled column-by-column from banded operators:
//
//   quad(a, b) = Tr(Z_a^T Z_b M),   lin(a) = (Z_a m)^T y,
//
// where Z_a is the banded Toeplitz operator of the a-th regressor column
// and M = P + m m^T. Nothing of size N*n is ever materialized; by linearity
// of the Toeplitz map this equals the vectorized-selector form of the
// quadratic cost.
struct CoefficientSystem {
  Eigen::MatrixXd quad;  // p x p, symmetric PSD
  Eigen::VectorXd lin;   // p
};

CoefficientSystem mstep_normal_equations(const SignalRecord& data, const BasisSet& basis,
                                         const PosteriorMoments& post, int n);

// Maximizer of the coefficient block: solves quad * c = lin. Throws
// NumericalError when the system is singular (rank-deficient regressors,
// e.g. constant input, or M = 0).
Eigen::VectorXd mstep_coefficients(const SignalRecord& data, const BasisSet& basis,
                                   const PosteriorMoments& post, int n);

struct NoiseUpdate {
  double sigma2 = 0.0;
  bool clamped = false;  // true when the raw value fell below the 1e-12 floor
};

// Noise-variance update (1/N)(|y - W m|^2 + Tr(W P W^T)) where W is the
// Toeplitz operator of the post-coefficient-update signal w_new.
NoiseUpdate mstep_noise_variance(const SignalRecord& data, const Eigen::VectorXd& w_new,
                                 const PosteriorMoments& post, int n);

// Shaping-parameter update. The prior block of the expected complete-data
// log-likelihood is -(1/2)(log det K_beta + Tr(K_beta^{-1} M)) with
// M = P + m m^T, so maximizing it over beta means MINIMIZING
// log det K_beta + Tr(K_beta^{-1} M); this routine returns the candidate
// attaining the minimum, ties broken toward the smaller beta. Candidates
// that fail numerically are skipped; all failing is an error.
double mstep_beta(const PosteriorMoments& post, std::span<const double> grid);

// Exact expected complete-data log-likelihood of theta under the posterior
// moments of the previous iterate:
//
//   -(N/2) log sigma2 - (y^T y + Tr(W^T W M) - 2 y^T W m) / (2 sigma2)
//   - (1/2) log det K_beta - (1/2) Tr(K_beta^{-1} M)
//
// with W built from theta.c and M = P + m m^T. Used for the trace and for
// stationarity checks of the update rules.
double q_function(const SignalRecord& data, const BasisSet& basis, int n,
                  const HyperParameters& theta, const PosteriorMoments& prev);

// Full empirical-Bayes fit: alternate posterior moments at the current
// hyperparameters with the three closed-form/grid updates (c, then sigma2
// using the updated signal, then beta) until the hyperparameter change
// drops below tol or max_iter is reached; with restarts > 1 the whole loop
// reruns from fresh random starts and the best final marginal objective
// wins (ties to the earliest restart). The returned g_hat is the posterior
// mean re-evaluated at the final hyperparameters of the winning run, and
// trace records that run's iterates.
HammersteinEstimate em_fit(const SignalRecord& data, const BasisSet& basis, int n,
                           const EmConfig& config = {});

}  // namespace kbh
