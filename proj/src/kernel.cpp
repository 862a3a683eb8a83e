#include "kbh/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kbh/errors.hpp"

namespace kbh {

StableSplineKernel::StableSplineKernel(double beta, int order) : beta_(beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::invalid_argument("stable-spline kernel: beta = " + std::to_string(beta) +
                                " outside (0, 1)");
  }
  if (order < 1) {
    throw std::invalid_argument("stable-spline kernel: order must be >= 1");
  }

  // powers(k) = beta^{k+1}; entry (i, j) = powers(max(i, j)).
  Eigen::VectorXd powers(order);
  powers(0) = beta;
  for (int k = 1; k < order; ++k) powers(k) = powers(k - 1) * beta;

  matrix_.resize(order, order);
  for (int j = 0; j < order; ++j) {
    for (int i = 0; i < order; ++i) {
      matrix_(i, j) = powers(i > j ? i : j);
    }
  }

  llt_.compute(matrix_);
  if (llt_.info() != Eigen::Success) {
    // One jitter retry keeps the grid search alive at extreme beta values.
    const double jitter = 1e-10 * matrix_.diagonal().maxCoeff();
    Eigen::MatrixXd bumped = matrix_;
    bumped.diagonal().array() += jitter;
    llt_.compute(bumped);
    if (llt_.info() != Eigen::Success) {
      throw NumericalError("stable-spline kernel: Cholesky failed for beta = " +
                           std::to_string(beta) + ", order = " + std::to_string(order));
    }
  }
  chol_lower_ = llt_.matrixL();
  log_det_ = 2.0 * chol_lower_.diagonal().array().log().sum();
}

double StableSplineKernel::inv_quadform(const Eigen::MatrixXd& m) const {
  if (m.rows() != matrix_.rows() || m.cols() != matrix_.cols()) {
    throw std::invalid_argument("stable-spline kernel: quadform operand is " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                ", kernel order is " + std::to_string(matrix_.rows()));
  }
  return llt_.solve(m).trace();
}

Eigen::VectorXd StableSplineKernel::solve(const Eigen::VectorXd& v) const {
  if (v.size() != matrix_.rows()) {
    throw std::invalid_argument("stable-spline kernel: solve operand has length " +
                                std::to_string(v.size()) + ", kernel order is " +
                                std::to_string(matrix_.rows()));
  }
  return llt_.solve(v);
}

Eigen::MatrixXd StableSplineKernel::solve_matrix(const Eigen::MatrixXd& b) const {
  if (b.rows() != matrix_.rows()) {
    throw std::invalid_argument("stable-spline kernel: solve operand has " +
                                std::to_string(b.rows()) + " rows, kernel order is " +
                                std::to_string(matrix_.rows()));
  }
  return llt_.solve(b);
}

}  // namespace kbh
