#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace kbh {

// First-order stable-spline (TC) covariance for impulse-response weights:
// entry (i, j) = beta^max(i+1, j+1) for 0-based i, j, with shaping parameter
// beta in (0, 1). The kernel scale is pinned to 1; the overall gain of the
// identified system lives in the nonlinearity coefficients instead, which
// resolves the scaling ambiguity of the cascade.
//
// Realizations drawn from this covariance decay geometrically (variance of
// lag k is beta^k), which is what makes it a sensible prior for BIBO-stable
// impulse responses.
class StableSplineKernel {
 public:
  // Builds the matrix and its lower Cholesky factor. Throws
  // std::invalid_argument for beta outside (0, 1) or order < 1, and
  // NumericalError if the factorization fails even after a single jitter
  // retry (1e-10 * max diagonal added once).
  StableSplineKernel(double beta, int order);

  double beta() const { return beta_; }
  int order() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  // Lower-triangular L with K = L L^T (jitter included if it was needed).
  const Eigen::MatrixXd& cholesky_factor() const { return chol_lower_; }

  // log det K, from the factorization.
  double log_det() const { return log_det_; }

  // Tr(K^{-1} M) for a symmetric M of matching size, via triangular solves.
  double inv_quadform(const Eigen::MatrixXd& m) const;

  // K^{-1} v via forward/back substitution.
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;

  // Columnwise K^{-1} B.
  Eigen::MatrixXd solve_matrix(const Eigen::MatrixXd& b) const;

 private:
  double beta_ = 0.0;
  Eigen::MatrixXd matrix_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd chol_lower_;
  double log_det_ = 0.0;
};

}  // namespace kbh
