#include "kbh/baseline.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbh/errors.hpp"
#include "kbh/toeplitz.hpp"

namespace kbh {

BilinearEstimate baseline_fit(const SignalRecord& data, const BasisSet& basis, int n) {
  validate_signal(data);
  const Eigen::Index N = data.size();
  const int p = basis.size();
  if (n < 1 || n > N) {
    throw std::invalid_argument("baseline_fit: impulse length " + std::to_string(n) +
                                " outside [1, N = " + std::to_string(N) + "]");
  }
  if (data.y.isZero(0.0)) {
    throw std::invalid_argument("baseline_fit: output is identically zero");
  }

  const Eigen::MatrixXd regressor = build_regressor(basis, data.u);
  std::vector<ToeplitzSpec> columns;
  columns.reserve(p);
  for (int a = 0; a < p; ++a) {
    columns.push_back(make_toeplitz_spec(regressor.col(a), n));
  }

  // Normal equations of the stacked regressor [Z_1 ... Z_p] assembled
  // blockwise from banded cross-Grams; nothing N x (n*p) is formed.
  const int np = n * p;
  Eigen::MatrixXd normal(np, np);
  Eigen::VectorXd rhs(np);
  for (int a = 0; a < p; ++a) {
    for (int b = a; b < p; ++b) {
      const Eigen::MatrixXd block = toeplitz_cross_gram(columns[a], columns[b]);
      normal.block(a * n, b * n, n, n) = block;
      if (b != a) normal.block(b * n, a * n, n, n) = block.transpose();
    }
    rhs.segment(a * n, n) = toeplitz_matvec_adjoint(columns[a], data.y);
  }

  const double ridge = 1e-6 * normal.trace() / np;
  normal.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("baseline_fit: normal-equation factorization failed");
  }
  const Eigen::VectorXd packed = llt.solve(rhs);

  BilinearEstimate est;
  est.theta.resize(n, p);
  for (int a = 0; a < p; ++a) est.theta.col(a) = packed.segment(a * n, n);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(est.theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  est.g_hat = svd.matrixU().col(0);
  est.c_hat = svd.singularValues()(0) * svd.matrixV().col(0);

  for (Eigen::Index i = 0; i < est.g_hat.size(); ++i) {
    if (std::abs(est.g_hat(i)) > 1e-9) {
      if (est.g_hat(i) < 0.0) {
        est.g_hat = -est.g_hat;
        est.c_hat = -est.c_hat;
      }
      break;
    }
  }

  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(N);
  for (int a = 0; a < p; ++a) {
    fitted += toeplitz_matvec(columns[a], est.theta.col(a));
  }
  est.residual_norm = (data.y - fitted).norm();
  return est;
}

}  // namespace kbh
