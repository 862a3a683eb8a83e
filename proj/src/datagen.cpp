#include "kbh/datagen.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kbh/toeplitz.hpp"

namespace kbh {

namespace {

std::vector<std::complex<double>> draw_conjugate_roots(int count, Rng& rng) {
  std::vector<std::complex<double>> roots;
  roots.reserve(count);
  for (int i = 0; i + 1 < count; i += 2) {
    const double mag = rng.uniform(0.4, 0.93);
    const double phase = rng.uniform(0.0, std::numbers::pi);
    const std::complex<double> root = std::polar(mag, phase);
    roots.push_back(root);
    roots.push_back(std::conj(root));
  }
  if (count % 2 == 1) {
    const double mag = rng.uniform(0.4, 0.93);
    const double sign = rng.unit() < 0.5 ? -1.0 : 1.0;
    roots.emplace_back(sign * mag, 0.0);
  }
  return roots;
}

// Coefficients of prod (1 - r z^{-1}) in ascending powers of z^{-1}.
// Conjugate pairs are multiplied as real quadratics so the result is real.
Eigen::VectorXd real_polynomial_from_roots(const std::vector<std::complex<double>>& roots) {
  Eigen::VectorXd poly = Eigen::VectorXd::Zero(roots.size() + 1);
  poly(0) = 1.0;
  int degree = 0;
  std::size_t i = 0;
  while (i < roots.size()) {
    if (roots[i].imag() != 0.0) {
      // (1 - r z^{-1})(1 - conj(r) z^{-1}) = 1 - 2 Re(r) z^{-1} + |r|^2 z^{-2}
      const double b1 = -2.0 * roots[i].real();
      const double b2 = std::norm(roots[i]);
      for (int k = degree; k >= 0; --k) {
        poly(k + 2) += b2 * poly(k);
        poly(k + 1) += b1 * poly(k);
      }
      degree += 2;
      i += 2;
    } else {
      const double b1 = -roots[i].real();
      for (int k = degree; k >= 0; --k) {
        poly(k + 1) += b1 * poly(k);
      }
      degree += 1;
      i += 1;
    }
  }
  return poly;
}

// Long division of (numer / denom) in powers of z^{-1}, first `count` terms.
Eigen::VectorXd long_division(const Eigen::VectorXd& numer, const Eigen::VectorXd& denom,
                              int count) {
  Eigen::VectorXd series = Eigen::VectorXd::Zero(count);
  for (int j = 0; j < count; ++j) {
    double value = j < numer.size() ? numer(j) : 0.0;
    const int reach = std::min<int>(j, static_cast<int>(denom.size()) - 1);
    for (int i = 1; i <= reach; ++i) {
      value -= denom(i) * series(j - i);
    }
    series(j) = value;  // denom(0) == 1
  }
  return series;
}

}  // namespace

void validate_experiment(const ExperimentConfig& config) {
  if (config.nu < 1) throw std::invalid_argument("experiment: nu must be >= 1");
  if (!(config.snr > 0.0)) throw std::invalid_argument("experiment: snr must be positive");
  if (config.num_samples < 1) throw std::invalid_argument("experiment: N must be >= 1");
  if (config.impulse_length < config.nu || config.impulse_length > config.num_samples) {
    throw std::invalid_argument("experiment: need nu <= n <= N");
  }
  if (config.basis_size < 1) throw std::invalid_argument("experiment: p must be >= 1");
  if (config.runs < 0) throw std::invalid_argument("experiment: runs must be >= 0");
}

SystemSpec random_system(int nu, int n, Rng& rng) {
  if (nu < 1) throw std::invalid_argument("random_system: order must be >= 1");
  if (n < nu) throw std::invalid_argument("random_system: need n >= nu");

  SystemSpec spec;
  spec.order = nu;
  spec.poles = draw_conjugate_roots(nu, rng);
  spec.zeros = draw_conjugate_roots(nu, rng);

  const Eigen::VectorXd numer = real_polynomial_from_roots(spec.zeros);
  const Eigen::VectorXd denom = real_polynomial_from_roots(spec.poles);

  // The extra one-step delay puts the first response sample at lag 1, so the
  // series of numer/denom maps directly onto lags 1..n.
  Eigen::VectorXd g = long_division(numer, denom, n);
  g /= g.norm();  // the leading series term is 1, so the norm is positive
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::abs(g(i)) > 1e-12) {
      if (g(i) < 0.0) g = -g;
      break;
    }
  }
  spec.impulse = g;
  return spec;
}

Eigen::VectorXd expand_roots(std::span<const double> roots) {
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(roots.size() + 1);
  coeffs(0) = 1.0;
  int degree = 0;
  for (const double r : roots) {
    // multiply by (x - r): shift up, subtract r * current
    for (int k = degree; k >= 0; --k) {
      coeffs(k + 1) += coeffs(k);
      coeffs(k) *= -r;
    }
    ++degree;
  }
  return coeffs;
}

Eigen::VectorXd random_polynomial(Rng& rng) {
  std::array<double, 6> roots;
  for (double& r : roots) r = rng.uniform(-2.0, 2.0);
  Eigen::VectorXd coeffs = expand_roots(roots);
  if (rng.unit() < 0.5) coeffs = -coeffs;
  return coeffs;
}

SimulatedRun simulate(const SystemSpec& system, const Eigen::VectorXd& coeffs,
                      const BasisSet& basis, int num_samples, double snr, Rng& rng) {
  if (num_samples < system.impulse.size()) {
    throw std::invalid_argument("simulate: need N >= impulse length");
  }
  if (!(snr > 0.0)) {
    throw std::invalid_argument("simulate: snr must be positive");
  }

  Eigen::VectorXd u(num_samples);
  for (int t = 0; t < num_samples; ++t) u(t) = rng.uniform(-2.0, 2.0);

  const Eigen::VectorXd w = apply_nonlinearity(basis, coeffs, u);
  const Eigen::VectorXd z =
      toeplitz_matvec(make_toeplitz_spec(w, static_cast<int>(system.impulse.size())),
                      system.impulse);

  const double var_z = (z.array() - z.mean()).square().mean();
  const double sigma2 = var_z / snr;
  const double noise_scale = std::sqrt(sigma2);

  Eigen::VectorXd y(num_samples);
  for (int t = 0; t < num_samples; ++t) y(t) = z(t) + noise_scale * rng.normal();

  SimulatedRun run;
  run.data = SignalRecord{u, y};
  run.truth = GroundTruth{system.impulse, coeffs, sigma2, z};
  return run;
}

}  // namespace kbh
