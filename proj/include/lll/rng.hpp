// Small deterministic RNG (splitmix64). The standard <random> distributions
// are not bit-stable across library implementations, and generator output
// feeds frozen test expectations, so we keep the whole pipeline explicit.
#pragma once

#include <cstdint>

namespace lll {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), n >= 1. Rejection-free modulo is fine here: n is
  // always tiny compared to 2^64, so the bias is far below anything a test
  // could observe, and determinism is what actually matters.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Uniform in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace lll
