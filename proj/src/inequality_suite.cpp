#include "latmin/inequality_suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>

#include "latmin/counter_rng.hpp"
#include "latmin/error.hpp"
#include "workers.hpp"

namespace latmin {

namespace {

Rational int_rational(std::size_t n) { return Rational(BigInt(static_cast<unsigned long>(n))); }

LogValue log_count(std::uint64_t count) {
  return LogValue::log_of(Rational(BigInt(std::to_string(count))));
}

// c * n * log(n), with 0 log 0 = 0.
LogValue n_log_n(std::size_t n, long c) {
  if (n <= 1) return {};
  return LogValue::log_of(int_rational(n), Rational(c) * int_rational(n));
}

LogValue log_factorial(std::size_t n) {
  BigInt f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return LogValue::log_of(Rational(f));
}

struct Counts {
  std::uint64_t closed = 0;
  std::uint64_t open = 0;
  std::size_t closed_rank = 0;
  std::size_t open_rank = 0;
};

Counts counts_of(const NormedModule& m, const EnumerationOptions& opt) {
  auto c = effective_sections(m, opt, false);
  auto o = strictly_effective_sections(m, opt, false);
  return {c.count, o.count, c.span_rank, o.span_rank};
}

Rational random_rational(CounterRng& rng, const Rational& lo, const Rational& hi, long steps) {
  const long k = rng.next_int(0, steps);
  return lo + (hi - lo) * Rational(k, steps);
}

}  // namespace

void SuiteConfig::validate() const {
  if (trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (rank_min > rank_max) fail(ErrorCode::InvalidArgument, "rank_min exceeds rank_max");
  if (rank_max > 8) fail(ErrorCode::InvalidArgument, "rank_max must be <= 8");
  if (norm_families.empty()) fail(ErrorCode::InvalidArgument, "no norm family enabled");
  if (alpha_min > alpha_max) fail(ErrorCode::InvalidArgument, "empty alpha range");
  if (sgn(scaling_alpha_max) < 0) fail(ErrorCode::InvalidArgument, "scaling alpha must be >= 0");
  if (budget == 0) fail(ErrorCode::InvalidArgument, "budget must be positive");
}

SuiteConfig suite_config_from_json(const Json& j) {
  SuiteConfig c;
  auto get_u = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
      fail(ErrorCode::SchemaViolation, std::string(key) + " must be a nonnegative integer");
    field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get_u("seed", c.seed);
  get_u("trials", c.trials);
  get_u("rank_min", c.rank_min);
  get_u("rank_max", c.rank_max);
  get_u("filtration_max_len", c.filtration_max_len);
  get_u("budget", c.budget);
  get_u("samples", c.samples);
  get_u("threads", c.threads);
  if (j.contains("alpha_min")) c.alpha_min = rational_from_json(j["alpha_min"]);
  if (j.contains("alpha_max")) c.alpha_max = rational_from_json(j["alpha_max"]);
  if (j.contains("scaling_alpha_max")) c.scaling_alpha_max = rational_from_json(j["scaling_alpha_max"]);
  if (j.contains("include_witnesses")) c.include_witnesses = j["include_witnesses"].get<bool>();
  if (j.contains("norm_families")) {
    c.norm_families.clear();
    for (const auto& f : j["norm_families"]) {
      const auto name = f.get<std::string>();
      if (name == "ellipsoid")
        c.norm_families.push_back(NormFamily::Ellipsoid);
      else if (name == "polymax")
        c.norm_families.push_back(NormFamily::PolyMax);
      else
        fail(ErrorCode::SchemaViolation, "unknown norm family '" + name + "'");
    }
  }
  c.validate();
  return c;
}

Json suite_config_to_json(const SuiteConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["rank_min"] = c.rank_min;
  j["rank_max"] = c.rank_max;
  Json fams = Json::array();
  for (auto f : c.norm_families) fams.push_back(f == NormFamily::Ellipsoid ? "ellipsoid" : "polymax");
  j["norm_families"] = fams;
  j["alpha_min"] = format_rational(c.alpha_min);
  j["alpha_max"] = format_rational(c.alpha_max);
  j["scaling_alpha_max"] = format_rational(c.scaling_alpha_max);
  j["filtration_max_len"] = c.filtration_max_len;
  j["budget"] = c.budget;
  j["samples"] = c.samples;
  j["include_witnesses"] = c.include_witnesses;
  return j;
}

std::vector<InequalityReport> check_norm_scaling(const NormedModule& m, const Rational& alpha,
                                                 const CheckContext& ctx) {
  if (sgn(alpha) < 0) fail(ErrorCode::PreconditionViolated, "norm scaling needs alpha >= 0");
  const auto& d = m.digest();
  const Counts base = counts_of(m, ctx.enumeration);
  const Counts shrunk = counts_of(twist(m, -alpha), ctx.enumeration);
  const Rational r = int_rational(m.rank());
  const LogValue error = LogValue::rational(r * alpha) + LogValue::log_of(3, r);

  std::vector<InequalityReport> out;
  out.push_back(exact_report("norm_scaling.h0_lower", log_count(shrunk.closed), log_count(base.closed), d));
  out.push_back(exact_report("norm_scaling.h0_upper", log_count(base.closed),
                             log_count(shrunk.closed) + error, d));
  out.push_back(exact_report("norm_scaling.sef_lower", log_count(shrunk.open), log_count(base.open), d));
  out.push_back(exact_report("norm_scaling.sef_upper", log_count(base.open),
                             log_count(shrunk.open) + error, d));
  return out;
}

std::vector<InequalityReport> check_sef_gap(const NormedModule& m, const CheckContext& ctx) {
  const auto& d = m.digest();
  const Counts c = counts_of(m, ctx.enumeration);
  const Rational r = int_rational(m.rank());
  return {exact_report("sef_gap.lower", log_count(c.open), log_count(c.closed), d),
          exact_report("sef_gap.upper", log_count(c.closed),
                       log_count(c.open) + LogValue::log_of(3, r), d)};
}

std::vector<InequalityReport> check_filtration(const NormedModule& m,
                                               const std::vector<Rational>& alphas,
                                               const CheckContext& ctx) {
  if (alphas.empty() || sgn(alphas.front()) != 0)
    fail(ErrorCode::PreconditionViolated, "filtration must start at alpha_0 = 0");
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (alphas[i] < alphas[i - 1])
      fail(ErrorCode::PreconditionViolated, "filtration alphas must be nondecreasing");

  std::vector<Counts> levels;
  for (const auto& a : alphas) levels.push_back(counts_of(twist(m, -a), ctx.enumeration));

  auto bounds = [&](bool sef, const char* upper_name, const char* lower_name) {
    auto count = [&](const Counts& c) { return sef ? c.open : c.closed; };
    auto rank = [&](const Counts& c) { return int_rational(sef ? c.open_rank : c.closed_rank); };
    const std::size_t r0 = sef ? levels[0].open_rank : levels[0].closed_rank;
    Rational upper_sum = 0, lower_sum = 0;
    for (std::size_t i = 1; i < alphas.size(); ++i) {
      const Rational step = alphas[i] - alphas[i - 1];
      upper_sum += rank(levels[i - 1]) * step;
      lower_sum += rank(levels[i]) * step;
    }
    const LogValue h0 = log_count(count(levels[0]));
    const LogValue upper_rhs = log_count(count(levels.back())) + LogValue::rational(upper_sum) +
                               n_log_n(r0, 4) + LogValue::log_of(3, 2 * int_rational(r0));
    const LogValue lower_lhs = LogValue::rational(lower_sum) - n_log_n(r0, 2) -
                               LogValue::log_of(3, int_rational(r0));
    return std::vector<InequalityReport>{exact_report(upper_name, h0, upper_rhs, m.digest()),
                                         exact_report(lower_name, lower_lhs, h0, m.digest())};
  };

  auto out = bounds(false, "filtration.h0_upper", "filtration.h0_lower");
  auto sef = bounds(true, "filtration.sef_upper", "filtration.sef_lower");
  out.insert(out.end(), sef.begin(), sef.end());
  return out;
}

std::vector<InequalityReport> check_second_minima(const NormedModule& m, const CheckContext& ctx) {
  const std::size_t r = m.rank();
  const LogValue upper = LogValue::log_of(2, int_rational(r));
  const LogValue lower = upper - log_factorial(r);
  const auto minima = successive_minima(m, ctx.enumeration);
  const auto chi = euler_characteristic(m, ctx.volume);
  if (chi.exact) {
    const LogValue gap = *chi.exact - minima.sum_mus();
    return {exact_report("second_minima.lower", lower, gap, m.digest()),
            exact_report("second_minima.upper", gap, upper, m.digest())};
  }
  const double gap = chi.value - minima.sum_mus().approx();
  return {interval_report("second_minima.lower", lower.approx(), gap, chi.stderr_value, m.digest()),
          interval_report("second_minima.upper", gap, upper.approx(), chi.stderr_value, m.digest())};
}

std::vector<InequalityReport> check_gs_count(const NormedModule& m, const CheckContext& ctx) {
  const std::size_t r = m.rank();
  const Counts c = counts_of(m, ctx.enumeration);
  const LogValue positive = successive_minima(m, ctx.enumeration).sum_positive_mus();
  const LogValue bound = LogValue::log_of(3, int_rational(r)) + n_log_n(r, 2);
  auto one = [&](const char* name, std::uint64_t count) {
    LogValue diff = log_count(count) - positive;
    if (diff.sign() < 0) diff = -diff;
    return exact_report(name, diff, bound, m.digest());
  };
  return {one("gs_count.h0", c.closed), one("gs_count.sef", c.open)};
}

InequalityReport check_minkowski_count(const NormedModule& m, const CheckContext& ctx) {
  const auto c = effective_sections(m, ctx.enumeration, false);
  const LogValue rhs = log_count(c.count) + LogValue::log_of(2, int_rational(m.rank()));
  const auto chi = euler_characteristic(m, ctx.volume);
  if (chi.exact) return exact_report("minkowski_count", *chi.exact, rhs, m.digest());
  return interval_report("minkowski_count", chi.value, rhs.approx(), chi.stderr_value, m.digest());
}

NormedModule random_module(std::uint64_t seed, const SuiteConfig& config) {
  config.validate();
  CounterRng rng(CounterRng::derive_key(seed, "random_module"));
  const auto r = static_cast<std::size_t>(
      rng.next_int(static_cast<long long>(config.rank_min), static_cast<long long>(config.rank_max)));
  const NormFamily family =
      config.norm_families[static_cast<std::size_t>(rng.next_int(0, static_cast<long long>(config.norm_families.size()) - 1))];

  NormSpec norm = ellipsoid_norm(identity_matrix(r));
  if (family == NormFamily::Ellipsoid) {
    // gram = (A^T A + I) / s
    std::vector<std::vector<long long>> a(r, std::vector<long long>(r));
    for (auto& row : a)
      for (auto& x : row) x = rng.next_int(-2, 2);
    const long long s = rng.next_int(1, 6);
    RationalMatrix gram(r, std::vector<Rational>(r, Rational(0)));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) {
        long long dot = i == j ? 1 : 0;
        for (std::size_t k = 0; k < r; ++k) dot += a[k][i] * a[k][j];
        gram[i][j] = make_rational(BigInt(static_cast<long>(dot)), BigInt(static_cast<long>(s)));
      }
    norm = ellipsoid_norm(std::move(gram));
  } else {
    const std::size_t extra = static_cast<std::size_t>(rng.next_int(0, 2));
    RationalMatrix rows;
    do {
      rows.assign(r + extra, std::vector<Rational>(r, Rational(0)));
      for (auto& row : rows)
        for (auto& x : row)
          x = make_rational(BigInt(static_cast<long>(rng.next_int(-3, 3))),
                            BigInt(static_cast<long>(rng.next_int(1, 6))));
    } while (matrix_rank(rows) != r);
    norm = polymax_norm(std::move(rows));
  }

  NormedModule m = make_normed_module(r, std::move(norm));
  if (rng.next_int(0, 1) == 1) m = twist(m, random_rational(rng, config.alpha_min, config.alpha_max, 20));
  return m;
}

std::vector<NormedModule> witness_modules() {
  return {
      make_normed_module(1, polymax_norm({{Rational(1)}})),
      make_normed_module(2, polymax_norm({{Rational(1, 4), Rational(0)}, {Rational(0), Rational(1)}})),
      make_normed_module(2, ellipsoid_norm(identity_matrix(2))),
  };
}

void InequalityTally::add(const InequalityReport& r) {
  switch (r.verdict) {
    case Verdict::Holds: ++holds; break;
    case Verdict::Violated: ++violations; break;
    case Verdict::Inconclusive: ++inconclusive; break;
  }
  if (r.mode == CheckMode::Exact) ++exact;
  if (std::fabs(r.slack) < 1e-9) ++tight;
  if (!seen || r.slack < min_slack) min_slack = r.slack;
  seen = true;
}

void InequalityTally::merge(const InequalityTally& o) {
  holds += o.holds;
  violations += o.violations;
  inconclusive += o.inconclusive;
  skips += o.skips;
  exact += o.exact;
  tight += o.tight;
  if (o.seen && (!seen || o.min_slack < min_slack)) min_slack = o.min_slack;
  seen = seen || o.seen;
}

std::uint64_t SuiteSummary::total_violations() const {
  std::uint64_t n = 0;
  for (const auto& [name, t] : tallies) n += t.violations;
  return n;
}

namespace {

struct InstanceOutcome {
  std::map<std::string, InequalityTally> tallies;
  std::vector<Violation> violations;
  bool skipped = false;
};

InstanceOutcome run_instance(const NormedModule& m, CounterRng params_rng, const SuiteConfig& config) {
  InstanceOutcome out;
  CheckContext ctx;
  ctx.enumeration.budget = config.budget;
  ctx.volume.samples = config.samples;
  ctx.volume.seed = config.seed;

  const Rational scaling_alpha = random_rational(params_rng, 0, config.scaling_alpha_max, 30);
  std::vector<Rational> alphas{0};
  const auto len = params_rng.next_int(1, static_cast<long long>(std::max<std::size_t>(1, config.filtration_max_len)));
  for (long long i = 1; i < len; ++i) alphas.push_back(alphas.back() + random_rational(params_rng, 0, 1, 8));

  Json params;
  params["scaling_alpha"] = format_rational(scaling_alpha);
  Json fa = Json::array();
  for (const auto& a : alphas) fa.push_back(format_rational(a));
  params["filtration_alphas"] = fa;

  auto record = [&](const std::vector<InequalityReport>& reports) {
    for (const auto& r : reports) {
      out.tallies[r.name].add(r);
      if (r.verdict == Verdict::Violated) out.violations.push_back({r, module_to_json(m), params});
    }
  };
  auto guarded = [&](std::initializer_list<const char*> names, const std::function<std::vector<InequalityReport>()>& fn) {
    try {
      record(fn());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EnumerationBudgetExceeded && e.code() != ErrorCode::Undecidable) throw;
      for (const char* n : names) ++out.tallies[n].skips;
      out.skipped = true;
    }
  };

  guarded({"norm_scaling.h0_lower", "norm_scaling.h0_upper", "norm_scaling.sef_lower", "norm_scaling.sef_upper"},
          [&] { return check_norm_scaling(m, scaling_alpha, ctx); });
  guarded({"sef_gap.lower", "sef_gap.upper"}, [&] { return check_sef_gap(m, ctx); });
  guarded({"filtration.h0_upper", "filtration.h0_lower", "filtration.sef_upper", "filtration.sef_lower"},
          [&] { return check_filtration(m, alphas, ctx); });
  guarded({"second_minima.lower", "second_minima.upper"}, [&] { return check_second_minima(m, ctx); });
  guarded({"gs_count.h0", "gs_count.sef"}, [&] { return check_gs_count(m, ctx); });
  guarded({"minkowski_count"}, [&] { return std::vector{check_minkowski_count(m, ctx)}; });
  return out;
}

}  // namespace

SuiteSummary run_suite(const SuiteConfig& config) {
  config.validate();
  std::vector<NormedModule> instances;
  if (config.include_witnesses) instances = witness_modules();
  const CounterRng instance_keys(CounterRng::derive_key(config.seed, "suite-instances"));
  for (std::uint64_t t = 0; t < config.trials; ++t)
    instances.push_back(random_module(instance_keys.at(t), config));

  const CounterRng params_root(CounterRng::derive_key(config.seed, "suite-params"));
  std::vector<InstanceOutcome> outcomes(instances.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < instances.size();) {
      try {
        outcomes[i] = run_instance(instances[i], params_root.substream(i), config);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, config.threads);
  run_workers(threads, [&](unsigned) { work(); });
  if (error) std::rethrow_exception(error);

  SuiteSummary summary;
  summary.instances = instances.size();
  for (auto& o : outcomes) {
    if (o.skipped) ++summary.skipped_instances;
    for (const auto& [name, t] : o.tallies) summary.tallies[name].merge(t);
    for (auto& v : o.violations) summary.violations.push_back(std::move(v));
  }
  return summary;
}

Json suite_summary_to_json(const SuiteSummary& s, const SuiteConfig& c) {
  Json j;
  j["suite"] = "sec2";
  j["config"] = suite_config_to_json(c);
  j["instances"] = s.instances;
  j["skipped_instances"] = s.skipped_instances;
  Json ineq = Json::object();
  for (const auto& [name, t] : s.tallies) {
    Json e;
    e["holds"] = t.holds;
    e["violations"] = t.violations;
    e["inconclusive"] = t.inconclusive;
    e["skips"] = t.skips;
    e["exact"] = t.exact;
    e["tight"] = t.tight;
    e["min_slack"] = t.seen ? Json(format_real(t.min_slack)) : Json(nullptr);
    ineq[name] = e;
  }
  j["inequalities"] = ineq;
  j["total_violations"] = s.total_violations();
  Json v = Json::array();
  for (const auto& x : s.violations) {
    Json e;
    e["report"] = report_to_json(x.report);
    e["instance"] = x.instance;
    e["parameters"] = x.parameters;
    v.push_back(e);
  }
  j["violations"] = v;
  return j;
}

}  // namespace latmin
