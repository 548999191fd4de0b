#pragma once

#include <cmath>
#include <cstdint>

namespace stochpot {

// Counter-based random streams: the stream for Monte Carlo sample i is
// derived from (master_seed, i) alone, so results do not depend on how
// samples are distributed across worker threads.
class Rng {
 public:
  explicit Rng(std::uint64_t stream_seed) {
    std::uint64_t z = stream_seed;
    for (auto& word : state_) {
      z = mix_step(z);
      word = z;
    }
    // xoshiro must not start from the all-zero state
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  static Rng for_sample(std::uint64_t master_seed, std::uint64_t sample_index) {
    return Rng(mix(master_seed, 0x9E3779B97F4A7C15ull * (sample_index + 1)));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal, Box-Muller pair cached per stream
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return mix_step(a ^ mix_step(b));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  // splitmix64 finalizer
  static std::uint64_t mix_step(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace stochpot
