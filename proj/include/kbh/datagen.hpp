#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "kbh/nonlinearity.hpp"
#include "kbh/rng.hpp"
#include "kbh/signal.hpp"

namespace kbh {

// A randomly drawn stable rational system together with its truncated
// impulse response. Poles and zeros have magnitudes in [0.4, 0.93] and come
// in conjugate pairs (one real root with random sign when the order is
// odd), so the response is real. The transfer function carries an extra
// one-step delay, making the system strictly causal; the stored response
// covers lags 1..n and is normalized to unit 2-norm with its first nonzero
// element positive.
struct SystemSpec {
  int order = 0;
  std::vector<std::complex<double>> poles;
  std::vector<std::complex<double>> zeros;
  Eigen::VectorXd impulse;  // length n
};

// One benchmark cell: system order, signal-to-noise ratio and problem sizes,
// plus the number of Monte Carlo runs and the master seed.
struct ExperimentConfig {
  int nu = 4;
  double snr = 10.0;
  int num_samples = 500;    // N
  int impulse_length = 100; // n
  int basis_size = 7;       // p
  int runs = 100;
  std::uint64_t seed = 0;
};

void validate_experiment(const ExperimentConfig& config);

// Draws magnitudes/phases, expands the conjugate-paired roots into real
// numerator/denominator polynomials and long-divides to n response samples.
SystemSpec random_system(int nu, int n, Rng& rng);

// Monic polynomial prod (x - r_i) as ascending coefficients (length
// roots.size() + 1, leading coefficient 1).
Eigen::VectorXd expand_roots(std::span<const double> roots);

// Degree-6 polynomial with 6 roots uniform in [-2, 2] and a random overall
// sign; coefficients ascending (length 7) in the monomial basis.
Eigen::VectorXd random_polynomial(Rng& rng);

struct GroundTruth {
  Eigen::VectorXd g;
  Eigen::VectorXd c;
  double sigma2 = 0.0;
  Eigen::VectorXd noiseless;  // z = W g before noise
};

struct SimulatedRun {
  SignalRecord data;
  GroundTruth truth;
};

// Draws u uniform on [-2, 2], pushes it through the nonlinearity and the
// system (null initial conditions), then adds Gaussian noise with variance
// var(z) / snr where var is the population variance of the noiseless output.
SimulatedRun simulate(const SystemSpec& system, const Eigen::VectorXd& coeffs,
                      const BasisSet& basis, int num_samples, double snr, Rng& rng);

}  // namespace kbh
