#pragma once

#include <Eigen/Core>

namespace kbh {

// One record of paired input/output samples.
//
// Indexing convention used throughout the library: every vector is stored
// 0-based. u(i) is the input at time i (i = 0..N-1); y(i) is the output at
// time i+1 (outputs start one step after the first input because the linear
// block is strictly causal); impulse-response and posterior-mean vectors g
// index lags 1..n, stored at positions 0..n-1.
struct SignalRecord {
  Eigen::VectorXd u;
  Eigen::VectorXd y;

  Eigen::Index size() const { return u.size(); }
};

// Checks the record invariants: equal lengths, N >= 1, all entries finite.
void validate_signal(const SignalRecord& record);

}  // namespace kbh
