#pragma once

#include <Eigen/Core>

namespace kbh {

// Lower-triangular banded Toeplitz operator, kept in factored form.
//
// The implied matrix is N x n with entry (t, k) = source(t - k) for t >= k
// (0-based row t, column k); zero above the band. Applying it to a length-n
// coefficient vector v is the strictly causal truncated convolution
//
//   out(t) = sum_{j=0..min(t, n-1)} v(j) * source(t - j),
//
// i.e. output time t+1 mixes source times <= t only. Nothing is ever stored
// densely here; every operation runs in O(N n) time or better.
struct ToeplitzSpec {
  Eigen::VectorXd source;  // length N
  int band_width = 0;      // n, with 1 <= n <= N
};

// Validates and builds a spec (finite source, 1 <= band_width <= N).
ToeplitzSpec make_toeplitz_spec(Eigen::VectorXd source, int band_width);

// T(source) * v for a length band_width vector v; result has length N.
Eigen::VectorXd toeplitz_matvec(const ToeplitzSpec& spec, const Eigen::VectorXd& v);

// T(source)^T * r for a length-N vector r; result has length band_width.
Eigen::VectorXd toeplitz_matvec_adjoint(const ToeplitzSpec& spec, const Eigen::VectorXd& r);

// T(a)^T * T(b) for two specs over the same sample count and band width.
// Entry (i, j) = sum_{t >= max(i,j)} a(t-i) b(t-j), computed with running
// lag-product sums in O(N n) total.
Eigen::MatrixXd toeplitz_cross_gram(const ToeplitzSpec& a, const ToeplitzSpec& b);

// Gram matrix T(source)^T T(source): symmetric positive semidefinite n x n.
Eigen::MatrixXd toeplitz_gram(const ToeplitzSpec& spec);

// Convolution commutation: T(b) a == T(a_padded) b elementwise, where
// a (length n) is zero-padded to the length N of b. Returns that common
// value as a length-N vector. Requires n <= N.
Eigen::VectorXd commuted_toeplitz_apply(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace kbh
