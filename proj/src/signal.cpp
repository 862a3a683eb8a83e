#include "kbh/signal.hpp"

#include <stdexcept>
#include <string>

namespace kbh {

void validate_signal(const SignalRecord& record) {
  if (record.u.size() != record.y.size()) {
    throw std::invalid_argument("signal record: u has " + std::to_string(record.u.size()) +
                                " samples but y has " + std::to_string(record.y.size()));
  }
  if (record.u.size() < 1) {
    throw std::invalid_argument("signal record: need at least one sample");
  }
  if (!record.u.allFinite() || !record.y.allFinite()) {
    throw std::invalid_argument("signal record: non-finite sample");
  }
}

}  // namespace kbh
