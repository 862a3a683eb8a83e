#include "kbh/toeplitz.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace kbh {

namespace {

void check_band(const ToeplitzSpec& spec) {
  const Eigen::Index n = spec.band_width;
  if (n < 1 || n > spec.source.size()) {
    throw std::invalid_argument("toeplitz: band width " + std::to_string(n) +
                                " outside [1, " + std::to_string(spec.source.size()) + "]");
  }
}

}  // namespace

ToeplitzSpec make_toeplitz_spec(Eigen::VectorXd source, int band_width) {
  if (!source.allFinite()) {
    throw std::invalid_argument("toeplitz: non-finite source entry");
  }
  ToeplitzSpec spec{std::move(source), band_width};
  check_band(spec);
  return spec;
}

Eigen::VectorXd toeplitz_matvec(const ToeplitzSpec& spec, const Eigen::VectorXd& v) {
  check_band(spec);
  const Eigen::Index N = spec.source.size();
  const Eigen::Index n = spec.band_width;
  if (v.size() != n) {
    throw std::invalid_argument("toeplitz_matvec: vector has length " +
                                std::to_string(v.size()) + ", band width is " +
                                std::to_string(n));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  // Accumulate per coefficient: v(j) contributes v(j)*source shifted by j.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double vj = v(j);
    if (vj == 0.0) continue;
    out.tail(N - j) += vj * spec.source.head(N - j);
  }
  return out;
}

Eigen::VectorXd toeplitz_matvec_adjoint(const ToeplitzSpec& spec, const Eigen::VectorXd& r) {
  check_band(spec);
  const Eigen::Index N = spec.source.size();
  const Eigen::Index n = spec.band_width;
  if (r.size() != N) {
    throw std::invalid_argument("toeplitz_matvec_adjoint: vector has length " +
                                std::to_string(r.size()) + ", expected " + std::to_string(N));
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j) = spec.source.head(N - j).dot(r.tail(N - j));
  }
  return out;
}

Eigen::MatrixXd toeplitz_cross_gram(const ToeplitzSpec& a, const ToeplitzSpec& b) {
  check_band(a);
  check_band(b);
  const Eigen::Index N = a.source.size();
  const Eigen::Index n = a.band_width;
  if (b.source.size() != N || b.band_width != n) {
    throw std::invalid_argument("toeplitz_cross_gram: mismatched shapes");
  }
  Eigen::MatrixXd gram(n, n);
  // Entry (i, i-d) for lag d = i - j >= 0 is the partial lag product
  // sum_{tau=0..N-1-i} a(tau) b(tau+d). Sweeping i downward grows the sum by
  // one term per step, so each lag costs O(N); entries with i < j follow the
  // mirrored recursion with the roles of a and b swapped.
  for (Eigen::Index d = 0; d < n; ++d) {
    const Eigen::Index len0 = N - n + 1;  // terms for i = n-1
    double acc = a.source.head(len0).dot(b.source.segment(d, len0));
    gram(n - 1, n - 1 - d) = acc;
    for (Eigen::Index i = n - 2; i >= d; --i) {
      const Eigen::Index m = N - 1 - i;
      acc += a.source(m) * b.source(m + d);
      gram(i, i - d) = acc;
    }
    if (d == 0) continue;
    acc = a.source.segment(d, len0).dot(b.source.head(len0));
    gram(n - 1 - d, n - 1) = acc;
    for (Eigen::Index j = n - 2; j >= d; --j) {
      const Eigen::Index m = N - 1 - j;
      acc += a.source(m + d) * b.source(m);
      gram(j - d, j) = acc;
    }
  }
  return gram;
}

Eigen::MatrixXd toeplitz_gram(const ToeplitzSpec& spec) {
  // With a == b the two mirrored recursions accumulate identical terms in
  // identical order, so the result is exactly symmetric.
  return toeplitz_cross_gram(spec, spec);
}

Eigen::VectorXd commuted_toeplitz_apply(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() > b.size()) {
    throw std::invalid_argument("commuted_toeplitz_apply: short factor has length " +
                                std::to_string(a.size()) + " > " + std::to_string(b.size()));
  }
  if (a.size() < 1) {
    throw std::invalid_argument("commuted_toeplitz_apply: empty factor");
  }
  return toeplitz_matvec(make_toeplitz_spec(b, static_cast<int>(a.size())), a);
}

}  // namespace kbh
