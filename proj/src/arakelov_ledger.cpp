#include "latmin/arakelov_ledger.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>

#include "latmin/counter_rng.hpp"
#include "latmin/digest.hpp"
#include "latmin/error.hpp"
#include "workers.hpp"

namespace latmin {

namespace {

const double kLog3 = std::log(3.0);
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double n_log_n(double n) { return n > 0 ? n * std::log(n) : 0.0; }

// 4 r log r + 2 r log 3, the count-side error of one reduction.
double reduction_error(long long r0) {
  const double r = static_cast<double>(r0);
  return 4.0 * n_log_n(r) + 2.0 * r * kLog3;
}

void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorCode::PreconditionViolated, msg);
}

}  // namespace

const char* ledger_mode_name(LedgerMode mode) {
  switch (mode) {
    case LedgerMode::PositiveGenus: return "positive-genus";
    case LedgerMode::GenusZero: return "genus-zero";
    case LedgerMode::CliffordHyperelliptic: return "clifford-hyperelliptic";
    case LedgerMode::CliffordNonhyperelliptic: return "clifford-nonhyperelliptic";
  }
  return "unknown";
}

LedgerMode ledger_mode_from_name(const std::string& name) {
  for (auto m : {LedgerMode::PositiveGenus, LedgerMode::GenusZero, LedgerMode::CliffordHyperelliptic,
                 LedgerMode::CliffordNonhyperelliptic})
    if (name == ledger_mode_name(m)) return m;
  fail(ErrorCode::SchemaViolation, "unknown ledger mode '" + name + "'");
}

void Ledger::validate() const {
  auto schema = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorCode::SchemaViolation, msg);
  };
  schema(kappa >= 1, "kappa must be positive");
  schema(!steps.empty(), "ledger needs at least one step");
  schema(std::isfinite(L2_0) && L2_0 >= 0, "L2_0 must be nonnegative");
  const long long k = kappa;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const std::string at = "step " + std::to_string(i) + ": ";
    schema(s.d > 0 && s.r > 0, at + "d and r must be positive");
    schema(s.d % k == 0 && s.r % k == 0, at + "d and r must be multiples of kappa");
    schema(std::isfinite(s.c) && s.c >= 0, at + "c must be nonnegative");
    schema(std::isfinite(s.slack) && s.slack >= 0, at + "slack must be nonnegative");
    if (i > 0) schema(s.d < steps[i - 1].d, at + "degrees must be strictly decreasing");
  }
  schema(steps.back().slack == 0, "the last step has no following divisor, its slack must be 0");

  auto feasible = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorCode::InfeasibleLedger, msg);
  };
  const long long d0 = steps.front().d;
  switch (mode) {
    case LedgerMode::PositiveGenus:
      feasible(g > 0, "positive-genus mode needs g > 0");
      feasible(d0 > k, "positive-genus mode needs d_0 > kappa");
      for (const auto& s : steps) feasible(s.r <= s.d, "positive-genus mode needs r_i <= d_i");
      break;
    case LedgerMode::GenusZero:
      feasible(g == 0, "genus-zero mode needs g = 0");
      for (const auto& s : steps) feasible(s.r == s.d + k, "genus-zero mode needs r_i = d_i + kappa");
      break;
    case LedgerMode::CliffordHyperelliptic:
    case LedgerMode::CliffordNonhyperelliptic: {
      feasible(g >= 2, "clifford modes need g >= 2");
      feasible(d0 >= 2 * k && d0 <= (2 * static_cast<long long>(g) - 2) * k,
               "clifford modes need 2 <= d_0/kappa <= 2g - 2");
      const bool hyper = mode == LedgerMode::CliffordHyperelliptic;
      for (std::size_t i = 0; i < steps.size(); ++i) {
        // 2 r <= d + 2 kappa, or d + kappa past the first step without hyperellipticity
        const long long extra = (hyper || i == 0) ? 2 * k : k;
        feasible(2 * steps[i].r <= steps[i].d + extra, "step " + std::to_string(i) + " violates the Clifford rank bound");
      }
      break;
    }
  }
}

Json ledger_to_json(const Ledger& l) {
  Json j;
  j["g"] = l.g;
  j["kappa"] = l.kappa;
  j["mode"] = ledger_mode_name(l.mode);
  j["L2_0"] = format_real(l.L2_0);
  Json steps = Json::array();
  for (const auto& s : l.steps)
    steps.push_back({{"d", s.d}, {"r", s.r}, {"c", format_real(s.c)}, {"slack", format_real(s.slack)}});
  j["steps"] = steps;
  return j;
}

Ledger ledger_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::SchemaViolation, "ledger must be a JSON object");
  auto uint_field = [&](const Json& obj, const char* key) -> long long {
    if (!obj.contains(key) || !obj[key].is_number_integer())
      fail(ErrorCode::SchemaViolation, std::string("missing integer field '") + key + "'");
    const auto v = obj[key].get<long long>();
    if (v < 0) fail(ErrorCode::SchemaViolation, std::string("field '") + key + "' must be nonnegative");
    return v;
  };
  auto real_field = [&](const Json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    try {
      return real_from_json(obj[key]);
    } catch (const Error&) {
      fail(ErrorCode::SchemaViolation, std::string("field '") + key + "' is not a number");
    }
  };
  Ledger l;
  l.g = static_cast<unsigned>(uint_field(j, "g"));
  l.kappa = static_cast<unsigned>(j.contains("kappa") ? uint_field(j, "kappa") : 1);
  l.mode = j.contains("mode") ? ledger_mode_from_name(j["mode"].get<std::string>())
                              : (l.g == 0 ? LedgerMode::GenusZero : LedgerMode::PositiveGenus);
  if (!j.contains("L2_0")) fail(ErrorCode::SchemaViolation, "missing field 'L2_0'");
  l.L2_0 = real_field(j, "L2_0", 0.0);
  if (!j.contains("steps") || !j["steps"].is_array())
    fail(ErrorCode::SchemaViolation, "missing array 'steps'");
  for (const auto& s : j["steps"]) {
    if (!s.is_object()) fail(ErrorCode::SchemaViolation, "each step must be an object");
    l.steps.push_back({uint_field(s, "d"), uint_field(s, "r"), real_field(s, "c", 0.0),
                       real_field(s, "slack", 0.0)});
  }
  l.validate();
  return l;
}

DerivedIntersections derived_intersections(const Ledger& ledger) {
  ledger.validate();
  DerivedIntersections out;
  double current = ledger.L2_0;
  for (std::size_t i = 0; i < ledger.steps.size(); ++i) {
    const auto& s = ledger.steps[i];
    if (i > 0) current -= ledger.steps[i - 1].slack;
    if (current < -kLedgerTolerance)
      fail(ErrorCode::InfeasibleLedger, "L_" + std::to_string(i) + "^2 is negative");
    out.L2.push_back(current);
    const double prime = current - 2.0 * static_cast<double>(s.d) * s.c;
    if (prime < -kLedgerTolerance)
      fail(ErrorCode::InfeasibleLedger, "L'_" + std::to_string(i) + "^2 = " + format_real(prime) + " is negative");
    out.L2_prime.push_back(prime);
    current = prime;
  }
  return out;
}

OneStepChain onestep_chain(const Ledger& ledger, std::size_t j) {
  const auto derived = derived_intersections(ledger);
  require(j < ledger.steps.size(), "step index out of range");
  double dc = 0.0, rc = 0.0;
  for (std::size_t i = 0; i <= j; ++i) {
    const auto& s = ledger.steps[i];
    dc += static_cast<double>(s.d) * s.c;
    rc += static_cast<double>(s.r) * s.c;
  }
  OneStepChain out;
  out.report = interval_report("onestep_chain", derived.L2_prime[j] + 2.0 * dc, ledger.L2_0, 0.0,
                               ledger_digest(ledger));
  out.count_increment = rc + reduction_error(ledger.steps.front().r);
  return out;
}

InequalityReport sum_ci_bound(const Ledger& ledger) {
  derived_intersections(ledger);
  double lhs = ledger.steps.front().c;
  for (const auto& s : ledger.steps) lhs += s.c;
  return interval_report("sum_ci_bound", lhs, ledger.L2_0 / static_cast<double>(ledger.steps.front().d), 0.0,
                         ledger_digest(ledger));
}

double trivial_bound(long long r_minus, long long deg_LQ, double L2) {
  require(r_minus > 0 && deg_LQ > 0, "trivial bound needs positive rank and degree");
  return static_cast<double>(r_minus) / static_cast<double>(deg_LQ) * L2 +
         static_cast<double>(r_minus) * kLog3;
}

double theorem_b_bound(unsigned g, long long d_circ, unsigned kappa, double L2) {
  require(kappa >= 1, "kappa must be positive");
  if (g > 0) {
    require(d_circ > 1, "positive genus needs d_circ > 1");
    const double d = static_cast<double>(d_circ) * kappa;
    return L2 / 2.0 + 4.0 * d * std::log(3.0 * d);
  }
  require(d_circ > 0, "genus zero needs d_circ > 0");
  const double r = static_cast<double>(d_circ + 1) * kappa;
  return (0.5 + 1.0 / static_cast<double>(d_circ)) * L2 + 4.0 * r * std::log(3.0 * r);
}

double theorem_c_bound(long long d_circ, unsigned kappa, int eps, double L2) {
  require(d_circ > 1, "theorem C needs d_circ > 1");
  require(eps == 1 || eps == 2, "eps must be 1 or 2");
  require(kappa >= 1, "kappa must be positive");
  const double dc = static_cast<double>(d_circ);
  const double d = dc * kappa;
  return (0.25 + eps / (2.0 * dc)) * L2 + 4.0 * d * std::log(3.0 * d);
}

double theorem_d_bound(unsigned g, unsigned kappa, int eps, double omega2) {
  require(g > 1, "theorem D needs g > 1");
  return theorem_c_bound(2 * static_cast<long long>(g) - 2, kappa, eps, omega2);
}

double deg_one_bound(unsigned g, unsigned kappa, double L2) {
  return L2 + (g > 0 ? 1.0 : 5.0) * kappa * kLog3;
}

double log_ball_volume(unsigned m) {
  const double half = m / 2.0;
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

double chi_ok(unsigned g, unsigned r1, unsigned r2, double absD) {
  require(g >= 1, "chi_ok needs g >= 1");
  require(absD >= 1.0, "|D_K| must be at least 1");
  return r1 * log_ball_volume(g) + r2 * log_ball_volume(2 * g) - g / 2.0 * std::log(absD);
}

InequalityReport stirling_check(unsigned g, unsigned r1, unsigned r2) {
  require(g >= 1, "stirling check needs g >= 1");
  const double r = static_cast<double>(g) * (r1 + 2.0 * r2);
  const double lhs = r / 2.0 * kLog2Pi - n_log_n(r) / 2.0;
  const double rhs = chi_ok(g, r1, r2, 1.0);
  return interval_report("stirling", lhs, rhs, 0.0,
                         "g=" + std::to_string(g) + ",r1=" + std::to_string(r1) + ",r2=" + std::to_string(r2));
}

StirlingSweep stirling_sweep(unsigned g_max, unsigned kappa_max) {
  StirlingSweep out;
  bool seen_strict = false;
  for (unsigned g = 2; g <= g_max; ++g)
    for (unsigned kappa = 1; kappa <= kappa_max; ++kappa)
      for (unsigned r2 = 0; 2 * r2 <= kappa; ++r2) {
        const unsigned r1 = kappa - 2 * r2;
        const auto rep = stirling_check(g, r1, r2);
        ++out.checks;
        if (!rep.holds) ++out.violations;
        if (std::fabs(rep.slack) <= kLedgerTolerance) {
          out.equality_cases.push_back({g, r1, r2});
        } else if (!seen_strict || rep.slack < out.min_strict_slack) {
          out.min_strict_slack = rep.slack;
          seen_strict = true;
        }
      }
  return out;
}

double noether_chi_fal(double omega2, double delta, unsigned g, unsigned kappa) {
  return (omega2 + delta) / 12.0 - static_cast<double>(g) * kappa / 3.0 * kLog2Pi;
}

void ArithmeticContext::validate() const {
  require(g >= 2, "arithmetic context needs g >= 2");
  require(kappa >= 1, "kappa must be positive");
  require(eps == 1 || eps == 2, "eps must be 1 or 2");
  require(absD >= 1.0, "|D_K| must be at least 1");
  require(r1 + 2 * r2 == kappa, "r1 + 2 r2 must equal kappa");
  require(omega2 >= 0, "omega^2 must be nonnegative");
}

ArithmeticContext arithmetic_context_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::SchemaViolation, "context must be a JSON object");
  ArithmeticContext c;
  auto uint_field = [&](const char* key, unsigned& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
      fail(ErrorCode::SchemaViolation, std::string("field '") + key + "' must be a nonnegative integer");
    field = j[key].get<unsigned>();
  };
  auto real_field = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    try {
      field = real_from_json(j[key]);
    } catch (const Error&) {
      fail(ErrorCode::SchemaViolation, std::string("field '") + key + "' is not a number");
    }
  };
  uint_field("g", c.g);
  uint_field("kappa", c.kappa);
  if (j.contains("eps")) {
    if (!j["eps"].is_number_integer()) fail(ErrorCode::SchemaViolation, "field 'eps' must be 1 or 2");
    c.eps = j["eps"].get<int>();
  }
  c.r1 = c.kappa;
  uint_field("r1", c.r1);
  uint_field("r2", c.r2);
  real_field("absD", c.absD);
  real_field("omega2", c.omega2);
  real_field("delta", c.delta);
  real_field("gamma", c.gamma);
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::SchemaViolation, e.what());
  }
  return c;
}

CorollaryE corollary_e(const ArithmeticContext& ctx) {
  ctx.validate();
  CorollaryE out;
  out.log_absD_coeff = 2 * static_cast<long long>(ctx.g);
  out.d = (2 * static_cast<long long>(ctx.g) - 2) * ctx.kappa;
  const double d = static_cast<double>(out.d);
  const double gm1 = ctx.g - 1.0;
  out.constant = out.log_absD_coeff * std::log(ctx.absD) + out.dlogd_coeff * n_log_n(d) + out.d_coeff * d;
  out.chi_fal = noether_chi_fal(ctx.omega2, ctx.delta, ctx.g, ctx.kappa);
  out.rhs_omega = (2.0 + 3.0 * ctx.eps / gm1) * ctx.omega2 + 12.0 * ctx.gamma + 3.0 * out.constant;
  out.rhs_chi = (8.0 + 4.0 * ctx.eps / (gm1 + ctx.eps)) * out.chi_fal +
                4.0 * gm1 / (gm1 + ctx.eps) * ctx.gamma + out.constant;
  out.report_omega = interval_report("corollary_e.omega", ctx.delta, out.rhs_omega, 0.0, "");
  out.report_chi = interval_report("corollary_e.chi_fal", ctx.delta, out.rhs_chi, 0.0, "");
  return out;
}

std::vector<InequalityReport> constant_chain_reports(unsigned g, unsigned kappa) {
  require(g >= 2 && kappa >= 1, "constant chain needs g >= 2 and kappa >= 1");
  const double d = (2.0 * g - 2.0) * kappa;
  const double r = static_cast<double>(g) * kappa;
  // C' without its |D_K| part; those terms cancel in (i) and (ii).
  const double c_prime = 4.5 * n_log_n(d) + 4.0 * d * kLog3;
  const std::string tag = "g=" + std::to_string(g) + ",kappa=" + std::to_string(kappa);
  return {
      interval_report("constant_chain.i", 12.0 * c_prime + 4.0 * r * kLog2Pi, 54.0 * n_log_n(d) + 61.0 * d, 0.0, tag),
      interval_report("constant_chain.ii", 4.0 * c_prime + 4.0 * r * kLog2Pi, 18.0 * n_log_n(d) + 25.0 * d, 0.0, tag),
      interval_report("constant_chain.iii",
                      4.0 * d * std::log(3.0 * d) + r * std::log(2.0) + n_log_n(r) / 2.0 - r / 2.0 * kLog2Pi,
                      c_prime, 0.0, tag),
  };
}

ConstantChainSummary verify_constant_chain(unsigned g_max, unsigned kappa_max, unsigned threads) {
  require(g_max >= 2, "g_max must be at least 2");
  require(kappa_max >= 1, "kappa_max must be at least 1");

  // One partial summary per g, merged in g order.
  std::vector<ConstantChainSummary> rows(g_max - 1);
  auto run_row = [&](unsigned g) {
    auto& row = rows[g - 2];
    for (unsigned kappa = 1; kappa <= kappa_max; ++kappa) {
      const auto reports = constant_chain_reports(g, kappa);
      const double d = (2.0 * g - 2.0) * kappa;
      ++row.points;
      for (std::size_t k = 0; k < 3; ++k) {
        ++row.checks;
        if (!reports[k].holds) {
          ++row.violations;
          row.failures.push_back(reports[k]);
        }
        const double margin = reports[k].slack / d;
        if (row.points == 1 || margin < row.min_margin[k]) {
          row.min_margin[k] = margin;
          row.argmin[k] = {g, kappa};
        }
      }
    }
  };
  std::atomic<unsigned> next{2};
  auto work = [&] {
    for (unsigned g; (g = next.fetch_add(1)) <= g_max;) run_row(g);
  };
  run_workers(threads, [&](unsigned) { work(); });

  ConstantChainSummary out;
  out.g_max = g_max;
  out.kappa_max = kappa_max;
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < 3; ++k)
      if (out.points == 0 || row.min_margin[k] < out.min_margin[k]) {
        out.min_margin[k] = row.min_margin[k];
        out.argmin[k] = row.argmin[k];
      }
    out.points += row.points;
    out.checks += row.checks;
    out.violations += row.violations;
    out.failures.insert(out.failures.end(), row.failures.begin(), row.failures.end());
  }
  out.asymptotic_margin = 25.0 - 16.0 * kLog3 - 2.0 * kLog2Pi;
  return out;
}

void SimulationParams::validate() const {
  require(kappa >= 1, "kappa must be positive");
  require(max_steps >= 1, "max_steps must be positive");
  require(c_max >= 0 && slack_max >= 0 && final_L2_max >= 0, "ranges must be nonnegative");
  switch (mode) {
    case LedgerMode::PositiveGenus:
      require(g >= 1, "positive-genus mode needs g >= 1");
      require(d_circ_max >= 2, "positive-genus mode needs d_circ_max >= 2");
      break;
    case LedgerMode::GenusZero:
      require(d_circ_max >= 1, "d_circ_max must be positive");
      break;
    default:
      require(g >= 2, "clifford modes need g >= 2");
  }
}

Ledger simulate_reduction(std::uint64_t seed, const SimulationParams& params) {
  params.validate();
  CounterRng rng(CounterRng::derive_key(seed, std::string("ledger/") + ledger_mode_name(params.mode)));
  // Multiples of 1/8 keep every sum and product exact in doubles.
  auto dyadic = [&](double max) {
    const auto top = static_cast<long long>(std::floor(max * 8.0));
    return static_cast<double>(rng.next_int(0, top)) / 8.0;
  };

  Ledger l;
  l.mode = params.mode;
  l.kappa = params.kappa;
  l.g = params.mode == LedgerMode::GenusZero ? 0 : params.g;
  const long long k = params.kappa;

  long long lo = 1, hi = params.d_circ_max;
  if (params.mode == LedgerMode::PositiveGenus) lo = 2;
  if (params.mode == LedgerMode::CliffordHyperelliptic || params.mode == LedgerMode::CliffordNonhyperelliptic) {
    lo = 2;
    hi = 2 * static_cast<long long>(l.g) - 2;
  }
  const long long d_circ = rng.next_int(lo, hi);

  // d_0 = d_circ, later degrees a random decreasing subset of 1..d_circ-1
  std::vector<long long> degrees{d_circ};
  const auto steps = static_cast<long long>(
      std::min<long long>(params.max_steps, d_circ));
  const long long n_steps = rng.next_int(1, steps);
  std::vector<long long> pool;
  for (long long x = 1; x < d_circ; ++x) pool.push_back(x);
  for (long long i = 1; i < n_steps; ++i) {
    const auto idx = static_cast<std::size_t>(rng.next_int(0, static_cast<long long>(pool.size()) - 1));
    degrees.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  std::sort(degrees.begin() + 1, degrees.end(), std::greater<>());

  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const long long dc = degrees[i];
    long long r_circ = 1;
    switch (params.mode) {
      case LedgerMode::PositiveGenus: r_circ = rng.next_int(1, dc); break;
      case LedgerMode::GenusZero: r_circ = dc + 1; break;
      case LedgerMode::CliffordHyperelliptic: r_circ = rng.next_int(1, dc / 2 + 1); break;
      case LedgerMode::CliffordNonhyperelliptic:
        r_circ = rng.next_int(1, i == 0 ? dc / 2 + 1 : (dc + 1) / 2);
        break;
    }
    LedgerStep s;
    s.d = dc * k;
    s.r = r_circ * k;
    s.c = dyadic(params.c_max);
    s.slack = i + 1 < degrees.size() ? dyadic(params.slack_max) : 0.0;
    l.steps.push_back(s);
  }

  // Enough total slack that c_0 + sum c_i <= L^2 / d_0 holds.
  const std::size_t n = l.steps.size() - 1;
  if (n > 0) {
    double beta = 0.0, weighted = 0.0, slack = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      beta += l.steps[i].c;
      weighted += static_cast<double>(l.steps[i].d) * l.steps[i].c;
    }
    for (std::size_t i = 0; i < n; ++i) slack += l.steps[i].slack;
    const double needed = static_cast<double>(l.steps[n].d + l.steps[0].d) * beta - 2.0 * weighted - slack;
    if (needed > 0) l.steps[n - 1].slack += needed;
  }

  // Build the intersections backward from a nonnegative final value.
  double value = dyadic(params.final_L2_max);
  for (std::size_t i = n + 1; i-- > 0;) {
    value += 2.0 * static_cast<double>(l.steps[i].d) * l.steps[i].c;
    if (i > 0) value += l.steps[i - 1].slack;
  }
  l.L2_0 = value;
  l.validate();
  return l;
}

TheoremChain theorem_chain_check(const Ledger& ledger) {
  derived_intersections(ledger);
  TheoremChain out;
  for (const auto& s : ledger.steps) out.value += static_cast<double>(s.r) * s.c;
  out.value += reduction_error(ledger.steps.front().r);
  const long long d_circ = ledger.steps.front().d / ledger.kappa;
  switch (ledger.mode) {
    case LedgerMode::PositiveGenus:
    case LedgerMode::GenusZero:
      out.theorem = "B";
      out.bound = theorem_b_bound(ledger.g, d_circ, ledger.kappa, ledger.L2_0);
      break;
    case LedgerMode::CliffordHyperelliptic:
      out.theorem = "C";
      out.bound = theorem_c_bound(d_circ, ledger.kappa, 2, ledger.L2_0);
      break;
    case LedgerMode::CliffordNonhyperelliptic:
      out.theorem = "C";
      out.bound = theorem_c_bound(d_circ, ledger.kappa, 1, ledger.L2_0);
      break;
  }
  out.report = interval_report("theorem_chain." + out.theorem, out.value, out.bound, 0.0, ledger_digest(ledger));
  return out;
}

std::string ledger_digest(const Ledger& ledger) { return sha256_hex(ledger_to_json(ledger).dump()); }

}  // namespace latmin
