#include "latmin/counter_rng.hpp"

namespace latmin {

namespace {

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t CounterRng::derive_key(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = mix64(seed + kGolden);
  for (unsigned char c : label) h = mix64(h ^ (c + kGolden));
  return h;
}

std::uint64_t CounterRng::at(std::uint64_t counter) const {
  // Two rounds keep consecutive counters and neighbouring keys decorrelated.
  std::uint64_t x = mix64(key_ ^ mix64(stream_ + kGolden));
  return mix64(x + mix64(counter * kGolden + 0x632be59bd9b4e019ULL));
}

long long CounterRng::next_int(long long lo, long long hi) {
  const auto span = static_cast<unsigned long long>(hi - lo) + 1ULL;
  if (span == 0) return static_cast<long long>(next());
  // Rejection keeps the draw unbiased.
  const unsigned long long limit = ~0ULL - (~0ULL % span);
  unsigned long long v;
  do {
    v = next();
  } while (v >= limit);
  return lo + static_cast<long long>(v % span);
}

CounterRng CounterRng::substream(std::uint64_t index) const {
  return CounterRng(mix64(key_ ^ mix64(index + 0x51afd7ed558ccd2dULL)), stream_);
}

}  // namespace latmin
