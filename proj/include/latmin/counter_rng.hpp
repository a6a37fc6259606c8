#pragma once

#include <cstdint>
#include <string_view>

namespace latmin {

/// Counter-based generator: every draw is a pure function of
/// (key, stream, counter), so samples can be produced in any order or
/// partition across workers and still agree bit-for-bit.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t stream = 0) : key_(key), stream_(stream) {}

  /// Key derived from a seed and an arbitrary label (e.g. an instance digest).
  static std::uint64_t derive_key(std::uint64_t seed, std::string_view label);

  std::uint64_t at(std::uint64_t counter) const;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  // Sequential interface on top of the counter.
  std::uint64_t next() { return at(position_++); }
  double next_uniform() { return uniform_at(position_++); }
  /// Uniform integer in [lo, hi], inclusive.
  long long next_int(long long lo, long long hi);

  CounterRng substream(std::uint64_t index) const;

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
};

}  // namespace latmin
