#pragma once

#include <cstdint>
#include <random>

namespace kbh {

// Seeded random source with explicit uniform/normal transforms. The
// transforms are implemented here (53-bit mantissa scaling, Box-Muller)
// instead of the std distributions, whose output sequences vary between
// standard-library implementations; a fixed seed must reproduce a dataset
// on any build of this project.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double unit();

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Standard normal via Box-Muller; the paired value is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kbh
