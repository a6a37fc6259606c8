// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "cli_runner.hpp"
#include "latmin/arakelov_ledger.hpp"
#include "latmin/counter_rng.hpp"
#include "latmin/error.hpp"
#include "latmin/inequality_suite.hpp"
#include "oracle.hpp"

using namespace latmin;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

NormedModule line() { return make_normed_module(1, polymax_norm({{Rational(1)}})); }
NormedModule box4() { return make_normed_module(2, polymax_norm({{Rational(1, 4), Rational(0)}, {Rational(0), Rational(1)}})); }

Rational draw_alpha(CounterRng& rng, const Rational& max, long steps) {
  return max * Rational(big(rng.next_int(0, steps)), big(steps));
}

void criterion_oracle(Outcome& o) {
  const auto start = Clock::now();
  SuiteConfig cfg;
  cfg.rank_max = 3;
  EnumerationOptions opt;
  opt.budget = 10'000'000;
  int matched = 0, skipped = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto m = random_module(CounterRng(CounterRng::derive_key(1, "oracle")).at(seed), cfg);
    try {
      const auto closed = effective_sections(m, opt), open = strictly_effective_sections(m, opt);
      const auto ref = oracle::scan(m);
      const bool same = std::set<IntVector>(closed.vectors.begin(), closed.vectors.end()) == ref.closed &&
                        std::set<IntVector>(open.vectors.begin(), open.vectors.end()) == ref.open &&
                        ref.outside_box == 0;
      if (same) ++matched;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EnumerationBudgetExceeded) throw;
      ++skipped;
    }
  }
  const double t = seconds_since(start);
  o.pass = matched == 200 && t < 60;
  o.detail << matched << "/200 instances match the box-scan oracle, " << skipped << " over budget, " << t << " s";
}

void criterion_norm_scaling(Outcome& o) {
  SuiteConfig cfg;
  cfg.rank_max = 5;
  CheckContext ctx;
  ctx.enumeration.budget = 10'000'000;
  CounterRng params(CounterRng::derive_key(2, "alpha"));
  const CounterRng seeds(CounterRng::derive_key(2, "modules"));
  std::uint64_t reports = 0, violations = 0, skipped = 0;
  std::set<bool> families;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const auto m = random_module(seeds.at(i), cfg);
    families.insert(m.is_ellipsoid());
    const Rational alpha = draw_alpha(params, 3, 60);
    try {
      auto rs = check_norm_scaling(m, alpha, ctx);
      const auto gap = check_sef_gap(m, ctx);
      rs.insert(rs.end(), gap.begin(), gap.end());
      for (const auto& r : rs) {
        ++reports;
        if (!r.holds) ++violations;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EnumerationBudgetExceeded) throw;
      ++skipped;
    }
  }
  const auto tight = check_sef_gap(line())[1];
  o.pass = violations == 0 && families.size() == 2 && tight.holds && tight.slack == 0.0;
  o.detail << reports << " reports on 500 modules, " << violations << " violations, " << skipped
           << " skipped over budget; (Z,|.|) sef gap slack " << tight.slack;
}

void criterion_filtration(Outcome& o) {
  SuiteConfig cfg;
  CheckContext ctx;
  CounterRng params(CounterRng::derive_key(3, "filtration"));
  const CounterRng seeds(CounterRng::derive_key(3, "modules"));
  int ok = 0, skipped = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto m = random_module(seeds.at(i), cfg);
    std::vector<Rational> alphas{0};
    const auto len = params.next_int(1, 6);
    for (long long k = 1; k < len; ++k) alphas.push_back(alphas.back() + draw_alpha(params, 1, 8));
    try {
      bool all = true;
      for (const auto& r : check_filtration(m, alphas, ctx)) all = all && r.holds;
      if (all) ++ok;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EnumerationBudgetExceeded) throw;
      ++skipped;
    }
  }
  o.pass = ok == 200;
  o.detail << ok << "/200 instances satisfy all four filtration bounds, " << skipped << " over budget";
}

struct Corpus {
  std::vector<NormedModule> modules;
};

Corpus exact_corpus() {
  Corpus c;
  c.modules = witness_modules();
  SuiteConfig cfg;
  const CounterRng seeds(CounterRng::derive_key(4, "modules"));
  for (std::uint64_t i = 0; c.modules.size() < 320; ++i) {
    const auto m = random_module(seeds.at(i), cfg);
    if (has_exact_volume(m)) c.modules.push_back(m);
  }
  return c;
}

void criterion_second_minima(Outcome& o, const Corpus& corpus) {
  std::uint64_t violations = 0, checked = 0, skipped = 0;
  for (const auto& m : corpus.modules) {
    try {
      auto rs = check_second_minima(m);
      const auto gs = check_gs_count(m);
      rs.insert(rs.end(), gs.begin(), gs.end());
      for (const auto& r : rs) {
        if (r.mode != CheckMode::Exact || !r.holds) ++violations;
      }
      ++checked;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EnumerationBudgetExceeded) throw;
      ++skipped;
    }
  }
  const auto l = check_second_minima(line());
  const auto b = check_second_minima(box4());
  const bool tight = std::fabs(l[0].slack) < 1e-9 && std::fabs(l[1].slack) < 1e-9 && std::fabs(b[1].slack) < 1e-9;
  o.pass = violations == 0 && checked >= 300 && tight;
  o.detail << checked << " exact-volume instances, " << violations << " violations, " << skipped
           << " over budget; tight slacks (Z): " << l[0].slack << ", " << l[1].slack << "; (Z^2, box): " << b[1].slack;
}

void criterion_minkowski(Outcome& o, const Corpus& corpus) {
  std::uint64_t violated = 0, inconclusive = 0, checked = 0;
  SuiteConfig cfg;
  const CounterRng seeds(CounterRng::derive_key(5, "modules"));
  std::vector<NormedModule> all = corpus.modules;
  // plus instances whose volume needs sampling
  for (std::uint64_t i = 0; i < 400; ++i) {
    const auto m = random_module(seeds.at(i), cfg);
    if (!has_exact_volume(m)) all.push_back(m);
  }
  std::uint64_t sampled = 0;
  for (const auto& m : all) {
    try {
      const auto r = check_minkowski_count(m);
      ++checked;
      if (r.mode == CheckMode::Interval) ++sampled;
      if (r.verdict == Verdict::Violated) ++violated;
      if (r.verdict == Verdict::Inconclusive) ++inconclusive;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EnumerationBudgetExceeded) throw;
    }
  }
  o.pass = violated == 0 && checked >= 300;
  o.detail << checked << " instances (" << sampled << " monte-carlo), " << violated << " violated, " << inconclusive
           << " inconclusive";
}

void criterion_ledgers(Outcome& o) {
  const auto start = Clock::now();
  std::uint64_t failures = 0, ledgers = 0;
  for (auto mode : {LedgerMode::PositiveGenus, LedgerMode::GenusZero, LedgerMode::CliffordHyperelliptic,
                    LedgerMode::CliffordNonhyperelliptic}) {
    SimulationParams p;
    p.mode = mode;
    p.g = 5;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto l = simulate_reduction(seed, p);
      ++ledgers;
      bool ok = true;
      try {
        derived_intersections(l);
        for (std::size_t j = 0; j < l.steps.size(); ++j) ok = ok && onestep_chain(l, j).report.holds;
        ok = ok && sum_ci_bound(l).holds;
        const auto chain = theorem_chain_check(l);
        const long long d_circ = l.steps.front().d / l.kappa;
        double bound = 0;
        if (mode == LedgerMode::PositiveGenus || mode == LedgerMode::GenusZero)
          bound = theorem_b_bound(l.g, d_circ, l.kappa, l.L2_0);
        else
          bound = theorem_c_bound(d_circ, l.kappa, mode == LedgerMode::CliffordHyperelliptic ? 2 : 1, l.L2_0);
        ok = ok && chain.report.holds && chain.value <= bound + kLedgerTolerance;
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) ++failures;
    }
  }
  const double t = seconds_since(start);
  o.pass = failures == 0 && t < 30;
  o.detail << ledgers << " simulated ledgers over 4 modes, " << failures << " failing, " << t << " s";
}

void criterion_constants(Outcome& o) {
  bool coefficients = true;
  for (unsigned g = 2; g <= 40; ++g)
    for (unsigned kappa = 1; kappa <= 4; ++kappa) {
      ArithmeticContext ctx;
      ctx.g = g;
      ctx.kappa = kappa;
      ctx.r1 = kappa;
      ctx.absD = 7;
      const auto e = corollary_e(ctx);
      const long long d = (2LL * g - 2) * kappa;
      const double expected = 2.0 * g * std::log(7.0) + 18.0 * d * std::log(double(d)) + 25.0 * d;
      coefficients = coefficients && e.log_absD_coeff == 2LL * g && e.dlogd_coeff == 18 && e.d_coeff == 25 &&
                     e.d == d && std::fabs(e.constant - expected) <= 1e-9 * expected;
    }
  const auto s = verify_constant_chain(1000, 50);
  const long double margin = 25.0L - 16.0L * std::log(3.0L) - 2.0L * std::log(2.0L * 3.14159265358979323846264338L);
  const bool recorded = std::fabs(static_cast<long double>(s.asymptotic_margin) - margin) < 1e-6L &&
                        std::fabs(s.asymptotic_margin - 3.7464) < 1e-3;
  o.pass = coefficients && s.violations == 0 && s.checks == 3ULL * 999 * 50 && recorded && s.min_margin[1] > 0;
  o.detail << "coefficients " << (coefficients ? "exact" : "wrong") << "; " << s.checks << " chain checks, "
           << s.violations << " violations; asymptotic margin " << s.asymptotic_margin << "; grid minimum margin (ii) "
           << s.min_margin[1];
}

void criterion_stirling(Outcome& o) {
  const auto s = stirling_sweep(200, 20);
  const auto eq = stirling_check(2, 1, 0);
  const bool detected = s.equality_cases.size() == 1 && s.equality_cases[0] == std::array<unsigned, 3>{2, 1, 0};
  o.pass = s.violations == 0 && detected && std::fabs(eq.slack) < 1e-9 && eq.holds;
  o.detail << s.checks << " checks, " << s.violations << " violations, " << s.equality_cases.size()
           << " equality case(s), slack at (2,1,0) = " << eq.slack << ", smallest strict slack " << s.min_strict_slack;
}

void criterion_determinism(Outcome& o) {
  const auto disk = cli::write_temp("acc_disk.json", R"({"rank":2,"norm":{"type":"ellipsoid","gram":[[1,0],[0,1]]}})");
  const auto poly = cli::write_temp(
      "acc_poly.json",
      R"({"rank":3,"norm":{"type":"scaled","alpha":"3/2","inner":{"type":"polymax","functionals":[[1,0,0],[0,1,0],[0,0,1],[1,1,1]]}}})");
  const auto ledger = cli::write_temp(
      "acc_ledger.json",
      R"({"g":2,"kappa":1,"L2_0":20,"steps":[{"d":4,"r":3,"c":1,"slack":2},{"d":2,"r":2,"c":0,"slack":0}]})");
  const std::vector<std::string> commands{
      "count --module " + poly + " --emit-vectors",
      "count --module " + disk + " --strict",
      "minima --module " + poly,
      "chi --module " + poly + " --samples 20000 --seed 3",
      "verify --suite sec2 --trials 10 --seed 7",
      "ledger eval --config " + ledger + " --theorem B",
      "ledger sweep --g-max 100 --kappa-max 10",
      "ledger simulate --seed 5 --mode clifford-nonhyperelliptic --trials 200",
  };
  int identical = 0;
  for (const auto& c : commands) {
    const auto a = cli::run(c), b = cli::run(c), t1 = cli::run(c + " --threads 1"), t4 = cli::run(c + " --threads 4");
    const bool same = a.status == 0 && a.out == b.out && a.out == t1.out && a.out == t4.out &&
                      b.status == 0 && t1.status == 0 && t4.status == 0;
    if (same) ++identical;
    else o.detail << "[differs: " << c << "] ";
  }
  o.pass = identical == static_cast<int>(commands.size());
  o.detail << identical << "/" << commands.size() << " subcommand invocations byte-identical across reruns and --threads 1/4";
}

}  // namespace

int main() {
  const auto corpus = exact_corpus();
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"oracle equivalence", criterion_oracle},
      {"norm scaling and sef gap", criterion_norm_scaling},
      {"filtration bounds", criterion_filtration},
      {"minima window and count bound", [&](Outcome& o) { criterion_second_minima(o, corpus); }},
      {"minkowski count bound", [&](Outcome& o) { criterion_minkowski(o, corpus); }},
      {"ledger feasibility and chaining", criterion_ledgers},
      {"constant reproduction", criterion_constants},
      {"stirling bound", criterion_stirling},
      {"cli determinism", criterion_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
