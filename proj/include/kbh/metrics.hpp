#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "kbh/nonlinearity.hpp"

namespace kbh {

// Scores for one identification run, plus the run metadata the harness
// carries into its result tables.
struct FitReport {
  double fit_g = 0.0;
  double fit_f = 0.0;
  std::uint64_t seed = 0;
  int nu = 0;
  double snr = 0.0;
  int iterations = 0;
  double seconds = 0.0;
};

struct AlignedEstimate {
  Eigen::VectorXd g;
  Eigen::VectorXd c;
};

// Resolves the scale/sign ambiguity of the cascade: any (alpha * g, c / alpha)
// pair produces the same input-output map, so estimates are reported with
// |g| = 1 and the sign of the first non-negligible element of g matched to
// the reference. The coefficient vector absorbs the inverse factor.
AlignedEstimate align_scale(const Eigen::VectorXd& g_hat, const Eigen::VectorXd& c_hat,
                            const Eigen::VectorXd& g_ref);

// 1 - |g_true - g_hat| / |g_true - mean(g_true)|; 1 is perfect recovery.
// Throws when g_true is constant (zero denominator). Alignment is the
// caller's responsibility.
double fit_g(const Eigen::VectorXd& g_true, const Eigen::VectorXd& g_hat);

// Same score for the nonlinearity, evaluated on the run's own input samples:
// 1 - |f(u) - f_hat(u)| / |f(u) - mean(f(u))|.
double fit_f(const Eigen::VectorXd& c_true, const Eigen::VectorXd& c_hat,
             const BasisSet& basis, const Eigen::VectorXd& u);

}  // namespace kbh
