#pragma once

#include <cstdint>

namespace jscc {

// Counter-based generator (SplitMix64). Draw i of stream s from seed q is
// mix(base(q, s) + i * GAMMA), so a stream is fully determined by
// (seed, stream) and worker streams never share state. Monte Carlo code
// assigns stream = worker index; identical (seed, workers) configurations
// therefore reproduce bit-identical estimates regardless of scheduling.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0)
      : counter_(mix(seed ^ 0x6A09E667F3BCC909ull) +
                 mix(stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull)) {}

  uint64_t next() {
    counter_ += 0x9E3779B97F4A7C15ull;
    return mix(counter_);
  }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t counter_;
};

}  // namespace jscc
