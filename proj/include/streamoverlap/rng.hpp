#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace streamoverlap {

/// Seeded generator with portable derived distributions.
///
/// std::mt19937_64 output is fixed by the standard, but the std
/// distributions are not, so bounded integers and unit reals are derived
/// here to keep samples identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Uniform real in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

// k distinct indices drawn uniformly from [0, n), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace streamoverlap
