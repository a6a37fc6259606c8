#pragma once

#include <cstdint>
#include <vector>

#include "latmin/lattice_core.hpp"

namespace latmin {

enum class ThresholdKind { Closed, Open };  // ||v|| <= 1  /  ||v|| < 1

/// 10^8 unless the LATMIN_BUDGET environment variable overrides it.
std::uint64_t default_budget();

struct EnumerationOptions {
  std::uint64_t budget = default_budget();
  unsigned threads = 1;
};

struct SectionSet {
  std::vector<IntVector> vectors;  // sorted lexicographically; empty unless collected
  ThresholdKind kind = ThresholdKind::Closed;
  std::uint64_t count = 0;
  double log_count = 0.0;
  std::size_t span_rank = 0;

  LogValue log_count_exact() const;
};

/// Lattice points with  base_norm(v) <= scale * exp(shift)  (or < for Open),
/// where base_norm ignores the module's own twist.
struct BallQuery {
  Rational scale{1};
  Rational shift{0};
  ThresholdKind kind = ThresholdKind::Closed;
};

/// Integers B_k with ||x|| <= 1  =>  |x_k| <= B_k.
std::vector<long long> enclosing_box(const NormSpec& norm);
std::vector<long long> enclosing_box(const NormedModule& module, const BallQuery& query);

SectionSet enumerate_ball(const NormedModule& module, const BallQuery& query, bool collect,
                          const EnumerationOptions& options = {});

SectionSet effective_sections(const NormedModule& module, const EnumerationOptions& options = {},
                              bool collect = true);
SectionSet strictly_effective_sections(const NormedModule& module,
                                       const EnumerationOptions& options = {},
                                       bool collect = true);

double h0_hat(const NormedModule& module, const EnumerationOptions& options = {});
double h0_hat_sef(const NormedModule& module, const EnumerationOptions& options = {});

/// A rational eps > 0 such that H0(M(-e)) = H0_sef(M) for all 0 < e <= eps:
/// a rational lower bound for half the gap between 1 and the largest norm < 1.
Rational sef_limit_epsilon(const NormedModule& module, const EnumerationOptions& options = {});

}  // namespace latmin
