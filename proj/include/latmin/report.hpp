#pragma once

#include <string>

#include "latmin/json_io.hpp"
#include "latmin/log_value.hpp"

namespace latmin {

enum class CheckMode { Exact, Interval };
enum class Verdict { Holds, Violated, Inconclusive };

const char* verdict_name(Verdict v);

/// Outcome of checking lhs <= rhs on one instance.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool holds = false;
  Verdict verdict = Verdict::Violated;
  CheckMode mode = CheckMode::Exact;
  double tolerance = 0.0;
  std::string instance_digest;
};

constexpr double kIntervalTolerance = 1e-9;

/// Decides lhs <= rhs exactly. The reported slack is 0 when the exact
/// difference is 0.
InequalityReport exact_report(std::string name, const LogValue& lhs, const LogValue& rhs,
                              std::string digest);

/// Floating comparison with tolerance 1e-9; sigma widens the band in which
/// the outcome is reported as inconclusive instead of violated.
InequalityReport interval_report(std::string name, double lhs, double rhs, double sigma,
                                 std::string digest);

Json report_to_json(const InequalityReport& r);

}  // namespace latmin
