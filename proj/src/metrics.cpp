#include "kbh/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kbh {

AlignedEstimate align_scale(const Eigen::VectorXd& g_hat, const Eigen::VectorXd& c_hat,
                            const Eigen::VectorXd& g_ref) {
  if (g_hat.size() != g_ref.size()) {
    throw std::invalid_argument("align_scale: estimate and reference lengths differ");
  }
  const double norm = g_hat.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("align_scale: zero impulse-response estimate");
  }

  AlignedEstimate out;
  out.g = g_hat / norm;
  Eigen::Index lead = -1;
  for (Eigen::Index i = 0; i < out.g.size(); ++i) {
    if (std::abs(out.g(i)) > 1e-9) {
      lead = i;
      break;
    }
  }
  // |out.g| = 1, so some entry exceeds 1/sqrt(n) and lead is always found.
  const bool flip = (out.g(lead) < 0.0) != (g_ref(lead) < 0.0);
  const double sign = flip ? -1.0 : 1.0;
  out.g *= sign;
  out.c = c_hat * (sign * norm);
  return out;
}

namespace {

double fit_score(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate,
                 const char* what) {
  if (truth.size() != estimate.size()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch");
  }
  const double denom = (truth.array() - truth.mean()).matrix().norm();
  if (denom == 0.0) {
    throw std::invalid_argument(std::string(what) + ": constant reference, score undefined");
  }
  return 1.0 - (truth - estimate).norm() / denom;
}

}  // namespace

double fit_g(const Eigen::VectorXd& g_true, const Eigen::VectorXd& g_hat) {
  return fit_score(g_true, g_hat, "fit_g");
}

double fit_f(const Eigen::VectorXd& c_true, const Eigen::VectorXd& c_hat,
             const BasisSet& basis, const Eigen::VectorXd& u) {
  const Eigen::VectorXd f_true = apply_nonlinearity(basis, c_true, u);
  const Eigen::VectorXd f_hat = apply_nonlinearity(basis, c_hat, u);
  return fit_score(f_true, f_hat, "fit_f");
}

}  // namespace kbh
