#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "latmin/enumeration.hpp"
#include "latmin/json_io.hpp"
#include "latmin/minima_volume.hpp"
#include "latmin/report.hpp"

namespace latmin {

enum class NormFamily { Ellipsoid, PolyMax };

struct SuiteConfig {
  std::uint64_t seed = 0;
  std::uint64_t trials = 100;
  std::size_t rank_min = 1;
  std::size_t rank_max = 4;
  std::vector<NormFamily> norm_families{NormFamily::Ellipsoid, NormFamily::PolyMax};
  Rational alpha_min{-1, 2};   // module twist range
  Rational alpha_max{3, 2};
  Rational scaling_alpha_max{3};  // alpha for the norm-scaling checks, drawn in [0, max]
  std::size_t filtration_max_len = 6;
  std::uint64_t budget = 10'000'000;
  std::uint64_t samples = 100'000;  // monte-carlo volume samples
  unsigned threads = 1;
  bool include_witnesses = true;  // prepend the fixed tight instances

  void validate() const;
};

SuiteConfig suite_config_from_json(const Json& j);
Json suite_config_to_json(const SuiteConfig& c);

struct CheckContext {
  EnumerationOptions enumeration;
  VolumeOptions volume;
};

/// h0(M(-a)) <= h0(M) <= h0(M(-a)) + r a + r log 3, and the sef analogues.
std::vector<InequalityReport> check_norm_scaling(const NormedModule& m, const Rational& alpha,
                                                 const CheckContext& ctx = {});

/// h0_sef <= h0 <= h0_sef + r log 3.
std::vector<InequalityReport> check_sef_gap(const NormedModule& m, const CheckContext& ctx = {});

/// Upper and lower filtration bounds for h0 and h0_sef. alphas must start
/// at 0 and be nondecreasing.
std::vector<InequalityReport> check_filtration(const NormedModule& m,
                                               const std::vector<Rational>& alphas,
                                               const CheckContext& ctx = {});

/// r log 2 - log r! <= chi - sum mu_i <= r log 2.
std::vector<InequalityReport> check_second_minima(const NormedModule& m,
                                                  const CheckContext& ctx = {});

/// |h0 - sum max(mu_i, 0)| <= r log 3 + 2 r log r, and the h0_sef variant.
std::vector<InequalityReport> check_gs_count(const NormedModule& m, const CheckContext& ctx = {});

/// chi <= h0 + r log 2.
InequalityReport check_minkowski_count(const NormedModule& m, const CheckContext& ctx = {});

/// Deterministic random instance for (seed, config).
NormedModule random_module(std::uint64_t seed, const SuiteConfig& config);

/// Instances on which known inequalities are tight: (Z, |.|),
/// (Z^2, max(|x|/4, |y|)) and (Z^2, Euclidean).
std::vector<NormedModule> witness_modules();

struct InequalityTally {
  std::uint64_t holds = 0;
  std::uint64_t violations = 0;
  std::uint64_t inconclusive = 0;
  std::uint64_t skips = 0;
  std::uint64_t exact = 0;
  std::uint64_t tight = 0;  // |slack| < 1e-9
  double min_slack = 0.0;
  bool seen = false;

  void add(const InequalityReport& r);
  void merge(const InequalityTally& other);
};

struct Violation {
  InequalityReport report;
  Json instance;
  Json parameters;
};

struct SuiteSummary {
  std::uint64_t instances = 0;
  std::uint64_t skipped_instances = 0;
  std::map<std::string, InequalityTally> tallies;
  std::vector<Violation> violations;

  std::uint64_t total_violations() const;
};

SuiteSummary run_suite(const SuiteConfig& config);
Json suite_summary_to_json(const SuiteSummary& s, const SuiteConfig& c);

}  // namespace latmin
