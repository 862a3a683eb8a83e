#include "kbh/rng.hpp"

#include <cmath>
#include <numbers>

namespace kbh {

double Rng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0, 1] x [0, 1).
  const double r = std::sqrt(-2.0 * std::log(1.0 - unit()));
  const double angle = 2.0 * std::numbers::pi * unit();
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

}  // namespace kbh
