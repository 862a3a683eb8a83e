#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "kbh/kernel.hpp"
#include "kbh/rng.hpp"
#include "oracles.hpp"

using kbh::StableSplineKernel;

TEST_CASE("kernel entries") {
  const StableSplineKernel k(0.5, 2);
  Eigen::MatrixXd expected(2, 2);
  expected << 0.5, 0.25, 0.25, 0.25;
  CHECK((k.matrix() - expected).lpNorm<Eigen::Infinity>() < 1e-15);

  const StableSplineKernel k3(0.5, 3);
  CHECK(k3.matrix()(0, 2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(k3.matrix()(2, 0) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("kernel parameter domain") {
  CHECK_THROWS_AS(StableSplineKernel(0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(StableSplineKernel(1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(StableSplineKernel(-0.2, 5), std::invalid_argument);
  CHECK_THROWS_AS(StableSplineKernel(1.7, 5), std::invalid_argument);
  CHECK_THROWS_AS(StableSplineKernel(0.5, 0), std::invalid_argument);
}

TEST_CASE("large-order factorization succeeds") {
  const StableSplineKernel k(0.9, 100);
  CHECK(k.cholesky_factor().diagonal().minCoeff() > 0.0);
}

TEST_CASE("log determinant") {
  CHECK(StableSplineKernel(0.5, 1).log_det() == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(StableSplineKernel(0.5, 2).log_det() ==
        doctest::Approx(std::log(0.0625)).epsilon(1e-13));

  // Eigenvalue-sum oracle at n = 50.
  const StableSplineKernel k(0.8, 50);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.matrix());
  const double from_eigs = eig.eigenvalues().array().log().sum();
  CHECK(k.log_det() == doctest::Approx(from_eigs).epsilon(1e-10));
}

TEST_CASE("inverse quadratic form") {
  const StableSplineKernel k(0.37, 12);
  CHECK(k.inv_quadform(k.matrix()) == doctest::Approx(12.0).epsilon(1e-12));

  const StableSplineKernel k1(0.5, 1);
  CHECK(k1.inv_quadform(Eigen::MatrixXd::Identity(1, 1)) == doctest::Approx(2.0));

  kbh::Rng rng(7);
  const StableSplineKernel k20(0.65, 20);
  const Eigen::MatrixXd m = oracle::random_psd(rng, 20);
  const double via_inverse = (k20.matrix().inverse() * m).trace();
  CHECK(k20.inv_quadform(m) == doctest::Approx(via_inverse).epsilon(1e-9));

  CHECK_THROWS_AS(k20.inv_quadform(Eigen::MatrixXd::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("solve round trip") {
  kbh::Rng rng(13);
  const StableSplineKernel k(0.72, 30);
  const Eigen::VectorXd w = oracle::random_vector(rng, 30);
  const Eigen::VectorXd v = k.matrix() * w;
  CHECK((k.solve(v) - w).norm() < 1e-9 * w.norm());

  CHECK(k.solve(Eigen::VectorXd::Zero(30)).isZero(0.0));
  CHECK(StableSplineKernel(0.5, 1).solve(Eigen::VectorXd::Ones(1))(0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(k.solve(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("positive definiteness across the shaping grid") {
  for (int grid = 1; grid <= 19; ++grid) {
    const double beta = 0.05 * grid;
    for (const int n : {1, 5, 50, 100}) {
      const StableSplineKernel k(beta, n);
      CHECK((k.matrix() - k.matrix().transpose()).lpNorm<Eigen::Infinity>() == 0.0);
      // All Cholesky pivots positive <=> min eigenvalue > 0.
      CHECK(k.cholesky_factor().diagonal().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("realizations decay at the prior rate") {
  // The variance of the lag-n weight is beta^n; check the sampler against it
  // within three standard errors of the sample variance.
  const int n = 100;
  const double beta = 0.7;
  const StableSplineKernel k(beta, n);
  const Eigen::RowVectorXd last_row = k.cholesky_factor().row(n - 1);

  kbh::Rng rng(191);
  const int draws = 10000;
  double sum_sq = 0.0;
  Eigen::VectorXd xi(n);
  for (int d = 0; d < draws; ++d) {
    for (int i = 0; i < n; ++i) xi(i) = rng.normal();
    const double g_last = last_row * xi;
    sum_sq += g_last * g_last;
  }
  const double sample_var = sum_sq / draws;
  const double target = std::pow(beta, n);
  const double stderr3 = 3.0 * target * std::sqrt(2.0 / (draws - 1.0));
  CHECK(std::abs(sample_var - target) <= stderr3);
}
