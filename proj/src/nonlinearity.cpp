#include "kbh/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kbh {

void BasisSet::row(double x, RowRef out) const {
  for (int j = 0; j < size(); ++j) out(j) = value(j, x);
}

PolynomialBasis::PolynomialBasis(int p) : p_(p) {
  if (p < 1) {
    throw std::invalid_argument("polynomial basis: need at least one function");
  }
}

double PolynomialBasis::value(int index, double x) const {
  if (index < 0 || index >= p_) {
    throw std::invalid_argument("polynomial basis: index " + std::to_string(index) +
                                " outside [0, " + std::to_string(p_) + ")");
  }
  double v = 1.0;
  for (int k = 0; k < index; ++k) v *= x;
  return v;
}

void PolynomialBasis::row(double x, RowRef out) const {
  double v = 1.0;
  for (int j = 0; j < p_; ++j) {
    out(j) = v;
    v *= x;
  }
}

Eigen::MatrixXd build_regressor(const BasisSet& basis, const Eigen::VectorXd& u) {
  const Eigen::Index N = u.size();
  if (N < 1) {
    throw std::invalid_argument("build_regressor: empty input");
  }
  const int p = basis.size();
  Eigen::MatrixXd F(N, p);
  for (Eigen::Index t = 0; t < N; ++t) {
    basis.row(u(t), F.row(t));
    for (int j = 0; j < p; ++j) {
      if (!std::isfinite(F(t, j))) {
        throw std::invalid_argument("build_regressor: non-finite value at sample " +
                                    std::to_string(t) + ", basis index " + std::to_string(j));
      }
    }
  }
  return F;
}

Eigen::VectorXd apply_nonlinearity(const BasisSet& basis, const Eigen::VectorXd& coeffs,
                                   const Eigen::VectorXd& u) {
  if (coeffs.size() != basis.size()) {
    throw std::invalid_argument("apply_nonlinearity: " + std::to_string(coeffs.size()) +
                                " coefficients for a basis of size " +
                                std::to_string(basis.size()));
  }
  const Eigen::Index N = u.size();
  const int p = basis.size();
  Eigen::VectorXd w(N);
  Eigen::RowVectorXd phi(p);
  for (Eigen::Index t = 0; t < N; ++t) {
    basis.row(u(t), phi);
    w(t) = phi * coeffs;
  }
  return w;
}

}  // namespace kbh
