#pragma once

#include <Eigen/Core>

#include "kbh/nonlinearity.hpp"
#include "kbh/signal.hpp"

namespace kbh {

// Over-parameterization estimate: the bilinear parameter matrix g c^T is fit
// by ridge least squares over all n*p lagged-regressor products, then
// factored back into (g, c) by a rank-1 SVD truncation. This is a
// self-contained comparison estimator, NOT a prediction-error method; at
// benchmark scale it carries n*p = 700 free parameters, and every report
// labels it separately from the kernel-based estimator.
struct BilinearEstimate {
  Eigen::MatrixXd theta;     // n x p least-squares estimate of g c^T
  Eigen::VectorXd g_hat;     // unit norm, leading element positive
  Eigen::VectorXd c_hat;
  double residual_norm = 0.0;
};

// Ridge factor: 1e-6 times the mean diagonal of the normal matrix. The
// system is underdetermined whenever n*p > N, so the ridge is mandatory.
BilinearEstimate baseline_fit(const SignalRecord& data, const BasisSet& basis, int n);

}  // namespace kbh
