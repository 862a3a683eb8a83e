#pragma once

#include <Eigen/Core>

#include "kbh/nonlinearity.hpp"
#include "kbh/signal.hpp"

namespace kbh {

// The decision variables of the evidence maximization: nonlinearity
// coefficients c, noise variance sigma2 (output units squared) and the
// kernel shaping parameter beta. Note the convergence norm over this vector
// mixes units; that is deliberate and documented with EmConfig::tol.
struct HyperParameters {
  Eigen::VectorXd c;
  double sigma2 = 1.0;
  double beta = 0.5;
};

void validate_hyperparameters(const HyperParameters& theta);

// Posterior mean and covariance of the impulse-response weights given the
// observed output at fixed hyperparameters.
struct PosteriorMoments {
  Eigen::VectorXd mean;  // length n
  Eigen::MatrixXd cov;   // n x n, symmetric PSD
};

// Both quantities come from one shared factorization pass, so callers that
// need the moments and the objective at the same point pay once.
struct EvidenceEval {
  PosteriorMoments moments;
  double neg_loglik = 0.0;  // log det Sigma_y + y^T Sigma_y^{-1} y
};

// Factorization-based evaluation at theta. With w = F(u) c and W the banded
// Toeplitz operator of w, the posterior is
//
//   P = (W^T W / sigma2 + K^{-1})^{-1},   m = P W^T y / sigma2,
//
// computed as P = L (L^T W^T W L / sigma2 + I)^{-1} L^T with K = L L^T, so
// no kernel inverse is ever formed and P inherits symmetry and P <= K (in
// the PSD order) from the inner inverse. The marginal objective uses the
// matching low-rank identities
//
//   log det Sigma_y = N log sigma2 + log det B,
//   y^T Sigma_y^{-1} y = |y|^2 / sigma2 - (L^T W^T y)^T B^{-1} (L^T W^T y) / sigma2^2,
//
// with B = L^T W^T W L / sigma2 + I, so everything stays n-dimensional.
EvidenceEval evaluate_evidence(const SignalRecord& data, const BasisSet& basis,
                               const HyperParameters& theta, int n);

PosteriorMoments posterior_moments(const SignalRecord& data, const BasisSet& basis,
                                   const HyperParameters& theta, int n);

double marginal_neg_loglik(const SignalRecord& data, const BasisSet& basis,
                           const HyperParameters& theta, int n);

}  // namespace kbh
