#include "latmin/report.hpp"

namespace latmin {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

InequalityReport exact_report(std::string name, const LogValue& lhs, const LogValue& rhs,
                              std::string digest) {
  InequalityReport r;
  r.name = std::move(name);
  r.mode = CheckMode::Exact;
  r.instance_digest = std::move(digest);
  r.lhs = lhs.approx();
  r.rhs = rhs.approx();
  const LogValue diff = rhs - lhs;
  const int s = diff.sign();
  r.slack = s == 0 ? 0.0 : diff.approx();
  r.holds = s >= 0;
  r.verdict = r.holds ? Verdict::Holds : Verdict::Violated;
  return r;
}

InequalityReport interval_report(std::string name, double lhs, double rhs, double sigma,
                                 std::string digest) {
  InequalityReport r;
  r.name = std::move(name);
  r.mode = CheckMode::Interval;
  r.instance_digest = std::move(digest);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = kIntervalTolerance;
  r.holds = r.slack >= -kIntervalTolerance;
  if (r.holds)
    r.verdict = Verdict::Holds;
  else if (r.slack >= -(4.0 * sigma + kIntervalTolerance))
    r.verdict = Verdict::Inconclusive;
  else
    r.verdict = Verdict::Violated;
  return r;
}

Json report_to_json(const InequalityReport& r) {
  Json j;
  j["name"] = r.name;
  j["lhs"] = format_real(r.lhs);
  j["rhs"] = format_real(r.rhs);
  j["slack"] = format_real(r.slack);
  j["holds"] = r.holds;
  j["verdict"] = verdict_name(r.verdict);
  j["mode"] = r.mode == CheckMode::Exact ? "exact" : "interval";
  j["instance_digest"] = r.instance_digest;
  return j;
}

}  // namespace latmin
