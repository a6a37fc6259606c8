#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "latmin/json_io.hpp"
#include "latmin/report.hpp"

namespace latmin {

enum class LedgerMode { PositiveGenus, GenusZero, CliffordHyperelliptic, CliffordNonhyperelliptic };

const char* ledger_mode_name(LedgerMode mode);
LedgerMode ledger_mode_from_name(const std::string& name);

/// One reduction step. Degrees and ranks are over Q, i.e. already scaled by
/// kappa.
struct LedgerStep {
  long long d = 1;
  long long r = 1;
  double c = 0.0;
  double slack = 0.0;
};

struct Ledger {
  unsigned g = 0;
  unsigned kappa = 1;
  std::vector<LedgerStep> steps;
  double L2_0 = 0.0;
  LedgerMode mode = LedgerMode::PositiveGenus;

  /// Structural checks throw SchemaViolation, rank constraints of the mode
  /// throw InfeasibleLedger.
  void validate() const;
};

Json ledger_to_json(const Ledger& ledger);
Ledger ledger_from_json(const Json& j);

/// Absolute tolerance for every real comparison in this module.
constexpr double kLedgerTolerance = 1e-9;

struct DerivedIntersections {
  std::vector<double> L2;        // self-intersection before subtracting c_i
  std::vector<double> L2_prime;  // after: L2[i] - 2 d_i c_i
};

/// Forward sequences; throws InfeasibleLedger if any value is negative.
DerivedIntersections derived_intersections(const Ledger& ledger);

struct OneStepChain {
  InequalityReport report;  // L'_j^2 + 2 sum_{i<=j} d_i c_i <= L^2
  /// sum_{i<=j} r_i c_i + 4 r_0 log r_0 + 2 r_0 log 3, to be added to the
  /// strictly effective count of the j-th twisted bundle.
  double count_increment = 0.0;
};

OneStepChain onestep_chain(const Ledger& ledger, std::size_t j);

/// c_0 + sum_{i=0}^{n} c_i <= L^2 / d_0.
InequalityReport sum_ci_bound(const Ledger& ledger);

double trivial_bound(long long r_minus, long long deg_LQ, double L2);
double theorem_b_bound(unsigned g, long long d_circ, unsigned kappa, double L2);
double theorem_c_bound(long long d_circ, unsigned kappa, int eps, double L2);
double theorem_d_bound(unsigned g, unsigned kappa, int eps, double omega2);
double deg_one_bound(unsigned g, unsigned kappa, double L2);

/// log of the volume of the euclidean unit ball in R^m.
double log_ball_volume(unsigned m);
double chi_ok(unsigned g, unsigned r1, unsigned r2, double absD);

InequalityReport stirling_check(unsigned g, unsigned r1, unsigned r2);

struct StirlingSweep {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  std::vector<std::array<unsigned, 3>> equality_cases;  // (g, r1, r2)
  double min_strict_slack = 0.0;
};

/// Every (g, r1, r2) with 2 <= g <= g_max and r1 + 2 r2 = kappa <= kappa_max.
StirlingSweep stirling_sweep(unsigned g_max, unsigned kappa_max);

double noether_chi_fal(double omega2, double delta, unsigned g, unsigned kappa);

struct ArithmeticContext {
  unsigned g = 2;
  unsigned kappa = 1;
  int eps = 1;
  double absD = 1.0;
  unsigned r1 = 1;
  unsigned r2 = 0;
  double omega2 = 0.0;
  double delta = 0.0;
  double gamma = 0.0;

  void validate() const;
};

ArithmeticContext arithmetic_context_from_json(const Json& j);

struct CorollaryE {
  // C = log_absD_coeff * log|D| + dlogd_coeff * d log d + d_coeff * d
  long long log_absD_coeff = 0;
  long long dlogd_coeff = 18;
  long long d_coeff = 25;
  long long d = 0;
  double constant = 0.0;
  double chi_fal = 0.0;
  double rhs_omega = 0.0;  // bound through omega^2 and gamma
  double rhs_chi = 0.0;    // bound through chi_Fal and gamma
  InequalityReport report_omega;
  InequalityReport report_chi;
};

CorollaryE corollary_e(const ArithmeticContext& ctx);

/// The three absorption steps at one grid point, in order (i), (ii), (iii).
std::vector<InequalityReport> constant_chain_reports(unsigned g, unsigned kappa);

struct ConstantChainSummary {
  unsigned g_max = 0;
  unsigned kappa_max = 0;
  std::uint64_t points = 0;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  /// Minimum of slack / d over the grid for each step.
  std::array<double, 3> min_margin{};
  std::array<std::array<unsigned, 2>, 3> argmin{};
  /// Limit of the per-degree margin of step (ii) as g grows.
  double asymptotic_margin = 0.0;
  std::vector<InequalityReport> failures;
};

ConstantChainSummary verify_constant_chain(unsigned g_max, unsigned kappa_max,
                                           unsigned threads = 1);

struct SimulationParams {
  LedgerMode mode = LedgerMode::PositiveGenus;
  unsigned g = 2;  // ignored in genus-zero mode
  unsigned kappa = 1;
  unsigned max_steps = 4;
  unsigned d_circ_max = 8;  // cap on d_0 / kappa outside clifford modes
  double c_max = 2.0;
  double slack_max = 2.0;
  double final_L2_max = 4.0;

  void validate() const;
};

/// Deterministic admissible ledger. Values are dyadic so that the forward
/// recomputation is exact in binary floating point.
Ledger simulate_reduction(std::uint64_t seed, const SimulationParams& params);

struct TheoremChain {
  double value = 0.0;  // sum r_i c_i + 4 r_0 log r_0 + 2 r_0 log 3
  double bound = 0.0;
  std::string theorem;
  InequalityReport report;
};

/// Compares the chained reduction bound against the closed-form theorem
/// bound for the ledger's mode.
TheoremChain theorem_chain_check(const Ledger& ledger);

std::string ledger_digest(const Ledger& ledger);

}  // namespace latmin
