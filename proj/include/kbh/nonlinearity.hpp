#pragma once

#include <Eigen/Core>

namespace kbh {

// A finite set of scalar basis functions spanning the candidate static
// nonlinearities. Implementations must be stateless (or internally
// immutable): the same (index, x) always yields the same value.
//
// Index convention: value(j, x) is the (j+1)-th basis function, j = 0..p-1.
class BasisSet {
 public:
  virtual ~BasisSet() = default;

  // Accepts strided destinations so matrix rows bind directly.
  using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

  virtual int size() const = 0;
  virtual double value(int index, double x) const = 0;

  // Fills out with [value(0, x), ..., value(p-1, x)]. Overridable when a
  // whole row is cheaper than p independent evaluations.
  virtual void row(double x, RowRef out) const;
};

// Monomials 1, x, x^2, ..., x^{p-1}; evaluated by iterated multiplication.
class PolynomialBasis final : public BasisSet {
 public:
  explicit PolynomialBasis(int p);

  int size() const override { return p_; }
  double value(int index, double x) const override;
  void row(double x, RowRef out) const override;

 private:
  int p_ = 0;
};

// Regression matrix: row t holds the basis evaluated at u(t); N x p.
// Throws if any evaluation is non-finite, naming the offending sample and
// basis index.
Eigen::MatrixXd build_regressor(const BasisSet& basis, const Eigen::VectorXd& u);

// The intermediate signal w with w(t) = sum_j coeffs(j) * value(j, u(t)).
Eigen::VectorXd apply_nonlinearity(const BasisSet& basis, const Eigen::VectorXd& coeffs,
                                   const Eigen::VectorXd& u);

}  // namespace kbh
