// Seeded RNG used by every constructor. mt19937_64 has a standard-mandated
// output sequence, and the 53-bit mapping below sidesteps
// std::uniform_real_distribution, whose results are implementation-defined;
// together they make seeded constructions bit-identical across toolchains.
// There is no global generator; callers create one per construction.
#pragma once

#include <cstdint>
#include <random>

#include "bealab/linalg.hpp"

namespace bealab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // in [0, 1), 53 uniform mantissa bits
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  ParamVector uniform_vec(std::size_t dim, double lo, double hi) {
    ParamVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace bealab
