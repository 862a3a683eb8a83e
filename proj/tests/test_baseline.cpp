#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "kbh/baseline.hpp"
#include "kbh/datagen.hpp"
#include "kbh/metrics.hpp"
#include "kbh/nonlinearity.hpp"
#include "kbh/rng.hpp"
#include "kbh/toeplitz.hpp"
#include "oracles.hpp"

using kbh::baseline_fit;
using kbh::PolynomialBasis;
using kbh::SignalRecord;

TEST_CASE("baseline recovers a noiseless system up to equivalence") {
  kbh::Rng rng(301);
  const int n = 8;
  const int p = 3;
  const kbh::SystemSpec system = kbh::random_system(2, n, rng);
  Eigen::VectorXd c_true(p);
  c_true << 0.5, 1.0, -0.25;

  const PolynomialBasis basis(p);
  SignalRecord data;
  data.u.resize(400);
  for (int t = 0; t < 400; ++t) data.u(t) = rng.uniform(-2.0, 2.0);
  const Eigen::VectorXd w = apply_nonlinearity(basis, c_true, data.u);
  data.y = kbh::toeplitz_matvec(kbh::make_toeplitz_spec(w, n), system.impulse);

  const auto est = baseline_fit(data, basis, n);
  const auto aligned = kbh::align_scale(est.g_hat, est.c_hat, system.impulse);
  CHECK(kbh::fit_g(system.impulse, aligned.g) > 0.99);
  CHECK(kbh::fit_f(c_true, aligned.c, basis, data.u) > 0.99);
  CHECK(est.residual_norm < 1e-3 * data.y.norm());
}

TEST_CASE("rank-1 parameter matrices factor exactly") {
  kbh::Rng rng(307);
  const int n = 12;
  const int p = 4;
  Eigen::VectorXd g = oracle::random_vector(rng, n);
  g /= g.norm();
  if (g(0) < 0) g = -g;
  const Eigen::VectorXd c = oracle::random_vector(rng, p);
  const Eigen::MatrixXd theta = g * c.transpose();

  // Feed the factorization stage directly through an SVD oracle: the best
  // rank-1 Frobenius approximation of an exactly rank-1 matrix is itself.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  CHECK(svd.singularValues().tail(p - 1).lpNorm<Eigen::Infinity>() < 1e-12);
  Eigen::VectorXd g_svd = svd.matrixU().col(0);
  Eigen::VectorXd c_svd = svd.singularValues()(0) * svd.matrixV().col(0);
  if (g_svd(0) < 0) {
    g_svd = -g_svd;
    c_svd = -c_svd;
  }
  CHECK((g_svd - g).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((c_svd - c).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("rank-1 truncation error matches the trailing singular values") {
  kbh::Rng rng(311);
  const PolynomialBasis basis(3);
  SignalRecord data;
  data.u.resize(150);
  for (int t = 0; t < 150; ++t) data.u(t) = rng.uniform(-2.0, 2.0);
  data.y = oracle::random_vector(rng, 150);

  const auto est = baseline_fit(data, basis, 6);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(est.theta);
  const double tail = std::sqrt(svd.singularValues().tail(2).squaredNorm());
  CHECK((est.theta - est.g_hat * est.c_hat.transpose()).norm() ==
        doctest::Approx(tail).epsilon(1e-10));
}

TEST_CASE("pure-noise output yields a near-total residual and poor fit") {
  kbh::Rng rng(313);
  const PolynomialBasis basis(3);
  SignalRecord data;
  data.u.resize(300);
  for (int t = 0; t < 300; ++t) data.u(t) = rng.uniform(-2.0, 2.0);
  data.y = oracle::random_vector(rng, 300) * 2.0;

  const auto est = baseline_fit(data, basis, 10);
  CHECK(est.residual_norm > 0.8 * data.y.norm());

  const kbh::SystemSpec probe = kbh::random_system(2, 10, rng);
  const auto aligned = kbh::align_scale(est.g_hat, est.c_hat, probe.impulse);
  CHECK(kbh::fit_g(probe.impulse, aligned.g) < 0.5);
}

TEST_CASE("baseline is deterministic and rejects zero data") {
  kbh::Rng rng(317);
  const PolynomialBasis basis(2);
  SignalRecord data;
  data.u = oracle::random_vector(rng, 50);
  data.y = oracle::random_vector(rng, 50);

  const auto first = baseline_fit(data, basis, 5);
  const auto second = baseline_fit(data, basis, 5);
  CHECK((first.g_hat.array() == second.g_hat.array()).all());
  CHECK((first.c_hat.array() == second.c_hat.array()).all());

  data.y.setZero();
  CHECK_THROWS_AS(baseline_fit(data, basis, 5), std::invalid_argument);
}
