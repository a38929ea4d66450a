#pragma once

#include <cstdint>
#include <vector>

namespace koss {

// Counter-based generator: value = mix(seed, stream, counter) where mix is
// two rounds of splitmix64 over the combined key. Any (seed, stream) pair
// yields an independent reproducible stream; no state beyond the counter, so
// batches can be regenerated from (seed, stream, index) alone.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  uint64_t next_u64() { return at(counter_++); }

  // Direct random access, does not advance the counter.
  uint64_t at(uint64_t counter) const;

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller (consumes two uniforms).
  double next_normal();

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace koss
