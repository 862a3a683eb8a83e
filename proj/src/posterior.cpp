#include "kbh/posterior.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kbh/errors.hpp"
#include "kbh/kernel.hpp"
#include "kbh/toeplitz.hpp"

namespace kbh {

void validate_hyperparameters(const HyperParameters& theta) {
  if (!(theta.sigma2 > 0.0) || !std::isfinite(theta.sigma2)) {
    throw std::invalid_argument("hyperparameters: sigma2 must be positive and finite");
  }
  if (!(theta.beta > 0.0) || !(theta.beta < 1.0)) {
    throw std::invalid_argument("hyperparameters: beta = " + std::to_string(theta.beta) +
                                " outside (0, 1)");
  }
  if (theta.c.size() < 1 || !theta.c.allFinite()) {
    throw std::invalid_argument("hyperparameters: coefficient vector empty or non-finite");
  }
}

EvidenceEval evaluate_evidence(const SignalRecord& data, const BasisSet& basis,
                               const HyperParameters& theta, int n) {
  validate_signal(data);
  validate_hyperparameters(theta);
  const Eigen::Index N = data.size();
  if (n < 1 || n > N) {
    throw std::invalid_argument("evaluate_evidence: impulse length " + std::to_string(n) +
                                " outside [1, N = " + std::to_string(N) + "]");
  }
  if (theta.c.size() != basis.size()) {
    throw std::invalid_argument("evaluate_evidence: coefficient/basis size mismatch");
  }

  const Eigen::VectorXd w = apply_nonlinearity(basis, theta.c, data.u);
  const ToeplitzSpec spec = make_toeplitz_spec(w, n);
  const Eigen::MatrixXd gram = toeplitz_gram(spec);          // W^T W
  const Eigen::VectorXd q = toeplitz_matvec_adjoint(spec, data.y);  // W^T y

  const StableSplineKernel kernel(theta.beta, n);
  const Eigen::MatrixXd& L = kernel.cholesky_factor();

  Eigen::MatrixXd B = (L.transpose() * gram * L) / theta.sigma2;
  B.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("posterior: inner factorization failed (sigma2 = " +
                         std::to_string(theta.sigma2) + ", beta = " +
                         std::to_string(theta.beta) + ", n = " + std::to_string(n) + ")");
  }

  const Eigen::VectorXd t = L.transpose() * q;
  const Eigen::VectorXd s = llt.solve(t);

  EvidenceEval out;
  out.moments.mean = L * s / theta.sigma2;
  Eigen::MatrixXd p = L * llt.solve(Eigen::MatrixXd::Identity(n, n)) * L.transpose();
  out.moments.cov = 0.5 * (p + p.transpose());

  const double log_det_b =
      2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  out.neg_loglik = static_cast<double>(N) * std::log(theta.sigma2) + log_det_b +
                   (data.y.squaredNorm() - t.dot(s) / theta.sigma2) / theta.sigma2;
  return out;
}

PosteriorMoments posterior_moments(const SignalRecord& data, const BasisSet& basis,
                                   const HyperParameters& theta, int n) {
  return evaluate_evidence(data, basis, theta, n).moments;
}

double marginal_neg_loglik(const SignalRecord& data, const BasisSet& basis,
                           const HyperParameters& theta, int n) {
  return evaluate_evidence(data, basis, theta, n).neg_loglik;
}

}  // namespace kbh
