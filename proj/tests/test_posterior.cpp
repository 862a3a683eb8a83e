#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "kbh/kernel.hpp"
#include "kbh/nonlinearity.hpp"
#include "kbh/posterior.hpp"
#include "kbh/rng.hpp"
#include "oracles.hpp"

using kbh::evaluate_evidence;
using kbh::HyperParameters;
using kbh::marginal_neg_loglik;
using kbh::PolynomialBasis;
using kbh::posterior_moments;
using kbh::SignalRecord;

namespace {

SignalRecord random_record(kbh::Rng& rng, int N) {
  return SignalRecord{oracle::random_vector(rng, N), oracle::random_vector(rng, N)};
}

HyperParameters random_theta(kbh::Rng& rng, int p) {
  HyperParameters theta;
  theta.c = oracle::random_vector(rng, p);
  theta.sigma2 = 0.2 + rng.unit();
  theta.beta = 0.15 + 0.7 * rng.unit();
  return theta;
}

}  // namespace

TEST_CASE("no-information limit: zero coefficients give the prior back") {
  kbh::Rng rng(41);
  const SignalRecord data = random_record(rng, 30);
  const PolynomialBasis basis(3);
  HyperParameters theta;
  theta.c = Eigen::VectorXd::Zero(3);
  theta.sigma2 = 0.7;
  theta.beta = 0.6;

  const auto moments = posterior_moments(data, basis, theta, 8);
  CHECK(moments.mean.isZero(0.0));
  CHECK((moments.cov - oracle::dense_kernel(0.6, 8)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("huge noise variance washes out the data") {
  kbh::Rng rng(43);
  const SignalRecord data = random_record(rng, 40);
  const PolynomialBasis basis(2);
  HyperParameters theta = random_theta(rng, 2);
  theta.sigma2 = 1e12;

  const auto moments = posterior_moments(data, basis, theta, 10);
  const Eigen::MatrixXd kernel = oracle::dense_kernel(theta.beta, 10);
  CHECK(moments.mean.lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK((moments.cov - kernel).norm() < 1e-6 * kernel.norm());
}

TEST_CASE("moments match direct joint-Gaussian conditioning") {
  kbh::Rng rng(47);
  const PolynomialBasis basis(2);
  for (int trial = 0; trial < 10; ++trial) {
    const SignalRecord data = random_record(rng, 15);
    const HyperParameters theta = random_theta(rng, 2);
    const int n = 4;

    const auto moments = posterior_moments(data, basis, theta, n);

    const Eigen::VectorXd w = apply_nonlinearity(basis, theta.c, data.u);
    const auto dense = oracle::dense_conditioning(oracle::dense_toeplitz(w, n),
                                                  oracle::dense_kernel(theta.beta, n),
                                                  theta.sigma2, data.y);
    CHECK((moments.mean - dense.mean).norm() <= 1e-8 * (1.0 + dense.mean.norm()));
    CHECK((moments.cov - dense.cov).norm() <= 1e-8 * dense.cov.norm());
  }
}

TEST_CASE("posterior covariance is symmetric, PSD, and below the prior") {
  kbh::Rng rng(53);
  const PolynomialBasis basis(3);
  const SignalRecord data = random_record(rng, 60);
  const HyperParameters theta = random_theta(rng, 3);
  const int n = 20;

  const auto moments = posterior_moments(data, basis, theta, n);
  CHECK((moments.cov - moments.cov.transpose()).lpNorm<Eigen::Infinity>() < 1e-10);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moments.cov);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

  const Eigen::MatrixXd gap = moments.cov - oracle::dense_kernel(theta.beta, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gap_eig(gap);
  CHECK(gap_eig.eigenvalues().maxCoeff() <= 1e-10);
}

TEST_CASE("marginal objective: zero-signal closed form") {
  kbh::Rng rng(59);
  SignalRecord data = random_record(rng, 25);
  const PolynomialBasis basis(2);
  HyperParameters theta;
  theta.c = Eigen::VectorXd::Zero(2);
  theta.sigma2 = 0.9;
  theta.beta = 0.4;

  const double nll = marginal_neg_loglik(data, basis, theta, 6);
  const double expected = 25.0 * std::log(0.9) + data.y.squaredNorm() / 0.9;
  CHECK(nll == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("marginal objective matches dense evaluation") {
  kbh::Rng rng(61);
  const PolynomialBasis basis(2);
  for (int trial = 0; trial < 8; ++trial) {
    const SignalRecord data = random_record(rng, 15);
    const HyperParameters theta = random_theta(rng, 2);
    const int n = 4;

    const Eigen::VectorXd w = apply_nonlinearity(basis, theta.c, data.u);
    const auto dense = oracle::dense_conditioning(oracle::dense_toeplitz(w, n),
                                                  oracle::dense_kernel(theta.beta, n),
                                                  theta.sigma2, data.y);
    const double nll = marginal_neg_loglik(data, basis, theta, n);
    CHECK(nll == doctest::Approx(dense.neg_loglik).epsilon(1e-8));
  }
}

TEST_CASE("marginal objective: quadratic term scales with the output") {
  kbh::Rng rng(67);
  const PolynomialBasis basis(2);
  const SignalRecord data = random_record(rng, 30);
  const HyperParameters theta = random_theta(rng, 2);
  const int n = 7;

  SignalRecord doubled = data;
  doubled.y *= 2.0;
  SignalRecord zeroed = data;
  zeroed.y.setZero();

  const double base = marginal_neg_loglik(data, basis, theta, n);
  const double twice = marginal_neg_loglik(doubled, basis, theta, n);
  const double logdet_only = marginal_neg_loglik(zeroed, basis, theta, n);
  CHECK(twice - logdet_only ==
        doctest::Approx(4.0 * (base - logdet_only)).epsilon(1e-12));
}

TEST_CASE("evidence evaluation rejects bad inputs") {
  kbh::Rng rng(71);
  const SignalRecord data = random_record(rng, 10);
  const PolynomialBasis basis(2);
  HyperParameters theta = random_theta(rng, 2);

  CHECK_THROWS_AS(evaluate_evidence(data, basis, theta, 11), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_evidence(data, basis, theta, 0), std::invalid_argument);

  theta.sigma2 = -1.0;
  CHECK_THROWS_AS(evaluate_evidence(data, basis, theta, 4), std::invalid_argument);
  theta.sigma2 = 1.0;
  theta.beta = 1.0;
  CHECK_THROWS_AS(evaluate_evidence(data, basis, theta, 4), std::invalid_argument);
}
