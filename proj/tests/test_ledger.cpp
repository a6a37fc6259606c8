#include <cmath>

#include "doctest.h"
#include "latmin/arakelov_ledger.hpp"
#include "latmin/error.hpp"

using namespace latmin;

namespace {

ErrorCode error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

Ledger example_ledger() {
  Ledger l;
  l.g = 2;
  l.kappa = 1;
  l.L2_0 = 20;
  l.steps = {{4, 3, 1.0, 2.0}, {2, 2, 0.0, 0.0}};
  return l;
}

const double log3 = std::log(3.0);
const double log2pi = std::log(2 * M_PI);

}  // namespace

TEST_CASE("derived intersections") {
  Ledger single;
  single.g = 2;
  single.L2_0 = 10;
  single.steps = {{2, 2, 0.0, 0.0}};
  CHECK(derived_intersections(single).L2_prime == std::vector<double>{10});

  const auto d = derived_intersections(example_ledger());
  CHECK(d.L2 == std::vector<double>{20, 10});
  CHECK(d.L2_prime == std::vector<double>{12, 10});

  Ledger bad = single;
  bad.L2_0 = 20;
  bad.steps = {{4, 4, 3.0, 0.0}};
  CHECK(error_of([&] { derived_intersections(bad); }) == ErrorCode::InfeasibleLedger);
}

TEST_CASE("ledger validation") {
  auto l = example_ledger();
  l.steps[1].d = 5;
  CHECK(error_of([&] { l.validate(); }) == ErrorCode::SchemaViolation);
  l = example_ledger();
  l.steps[0].r = 5;
  CHECK(error_of([&] { l.validate(); }) == ErrorCode::InfeasibleLedger);
  l = example_ledger();
  l.steps[1].slack = 1;
  CHECK(error_of([&] { l.validate(); }) == ErrorCode::SchemaViolation);
  l = example_ledger();
  l.mode = LedgerMode::GenusZero;
  CHECK(error_of([&] { l.validate(); }) == ErrorCode::InfeasibleLedger);
  l.g = 0;
  l.steps[0].r = 5;
  l.steps[1].r = 3;
  CHECK_NOTHROW(l.validate());

  const auto j = ledger_to_json(example_ledger());
  CHECK(ledger_digest(ledger_from_json(j)) == ledger_digest(example_ledger()));
  Json broken = j;
  broken.erase("steps");
  CHECK(error_of([&] { ledger_from_json(broken); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("one-step chain and the sum of minima") {
  const auto l = example_ledger();
  const auto c = onestep_chain(l, 1);
  CHECK(c.report.holds);
  CHECK(c.report.lhs == 18);
  CHECK(c.report.slack == 2);
  CHECK(c.count_increment == doctest::Approx(3 + 12 * log3 + 6 * log3));
  CHECK(error_of([&] { onestep_chain(l, 2); }) == ErrorCode::PreconditionViolated);

  Ledger flat = l;
  for (auto& s : flat.steps) s.c = s.slack = 0;
  for (std::size_t j = 0; j < 2; ++j) CHECK(onestep_chain(flat, j).report.slack == 0);

  const auto s = sum_ci_bound(l);
  CHECK(s.lhs == 2);
  CHECK(s.rhs == 5);
  CHECK(s.holds);
  CHECK(sum_ci_bound(flat).lhs == 0);
}

TEST_CASE("closed-form bounds") {
  CHECK(trivial_bound(1, 2, 10) == doctest::Approx(5 + log3));
  CHECK(trivial_bound(3, 7, 0) == doctest::Approx(3 * log3));
  CHECK(trivial_bound(2, 4, 8) == doctest::Approx(4 + 2 * log3));

  CHECK(theorem_b_bound(2, 2, 1, 10) == doctest::Approx(5 + 8 * std::log(6.0)));
  CHECK(theorem_b_bound(2, 2, 1, 10) == doctest::Approx(19.334).epsilon(1e-4));
  CHECK(theorem_b_bound(0, 1, 1, 0) == doctest::Approx(8 * std::log(6.0)));
  CHECK(error_of([] { theorem_b_bound(1, 1, 1, 0); }) == ErrorCode::PreconditionViolated);

  CHECK(theorem_d_bound(2, 1, 2, 12) == doctest::Approx(9 + 8 * std::log(6.0)));
  CHECK(theorem_c_bound(2, 1, 2, 0) == doctest::Approx(8 * std::log(6.0)));
  CHECK(theorem_d_bound(3, 2, 1, 20) == theorem_c_bound(4, 2, 1, 20));
  for (unsigned g = 2; g < 40; ++g)
    for (unsigned k = 1; k < 5; ++k)
      for (int eps : {1, 2}) CHECK(theorem_d_bound(g, k, eps, 7.25) == theorem_c_bound(2 * g - 2, k, eps, 7.25));
  CHECK(error_of([] { theorem_c_bound(1, 1, 1, 0); }) == ErrorCode::PreconditionViolated);
  CHECK(error_of([] { theorem_c_bound(2, 1, 3, 0); }) == ErrorCode::PreconditionViolated);
  CHECK(error_of([] { theorem_d_bound(1, 1, 1, 0); }) == ErrorCode::PreconditionViolated);

  CHECK(deg_one_bound(1, 1, 4) == doctest::Approx(4 + log3));
  CHECK(deg_one_bound(0, 1, 0) == doctest::Approx(5 * log3));
  CHECK(deg_one_bound(1, 6, 0) == doctest::Approx(6 * log3));
}

TEST_CASE("chi of the ring of integers") {
  CHECK(chi_ok(2, 1, 0, 1) == doctest::Approx(std::log(M_PI)).epsilon(1e-12));
  CHECK(chi_ok(2, 0, 1, 1) == doctest::Approx(std::log(M_PI * M_PI / 2)).epsilon(1e-12));
  CHECK(chi_ok(3, 2, 1, std::exp(2.0)) == doctest::Approx(chi_ok(3, 2, 1, 1) - 3).epsilon(1e-12));
  CHECK(log_ball_volume(3) == doctest::Approx(std::log(4 * M_PI / 3)).epsilon(1e-12));
}

TEST_CASE("stirling") {
  const auto eq = stirling_check(2, 1, 0);
  CHECK(eq.holds);
  CHECK(std::fabs(eq.slack) < 1e-9);
  const auto s = stirling_check(3, 1, 0);
  CHECK(s.rhs == doctest::Approx(std::log(4 * M_PI / 3)));
  CHECK(s.lhs == doctest::Approx(1.5 * log2pi - 1.5 * std::log(3.0)));
  CHECK(s.slack > 0.3);
  const auto sweep = stirling_sweep(30, 6);
  CHECK(sweep.violations == 0);
  REQUIRE(sweep.equality_cases.size() == 1);
  CHECK(sweep.equality_cases[0] == std::array<unsigned, 3>{2, 1, 0});
  CHECK(sweep.min_strict_slack > 1e-3);
}

TEST_CASE("noether formula") {
  CHECK(noether_chi_fal(12, 0, 2, 1) == doctest::Approx(1 - 2.0 / 3 * log2pi));
  CHECK(noether_chi_fal(0, 0, 5, 3) == doctest::Approx(-5.0 * log2pi));
  CHECK(noether_chi_fal(0, 12, 2, 1) == noether_chi_fal(12, 0, 2, 1));
}

TEST_CASE("corollary constants") {
  ArithmeticContext ctx;
  ctx.omega2 = 12;
  const auto e = corollary_e(ctx);
  CHECK(e.log_absD_coeff == 4);
  CHECK(e.dlogd_coeff == 18);
  CHECK(e.d_coeff == 25);
  CHECK(e.constant == doctest::Approx(36 * std::log(2.0) + 50));
  CHECK(e.rhs_omega == doctest::Approx(60 + 3 * e.constant));
  CHECK(e.rhs_omega == doctest::Approx(284.86).epsilon(1e-4));

  // monotone in omega^2, gamma, |D_K| and eps
  auto base = ctx;
  for (int field = 0; field < 4; ++field) {
    auto up = base;
    if (field == 0) up.omega2 += 1;
    if (field == 1) up.gamma += 1;
    if (field == 2) up.absD += 5;
    if (field == 3) up.eps = 2;
    const auto a = corollary_e(base), b = corollary_e(up);
    CHECK(b.rhs_omega >= a.rhs_omega);
    if (field == 1 || field == 2) CHECK(b.rhs_chi >= a.rhs_chi);
  }
  auto bad = ctx;
  bad.r1 = 2;
  CHECK(error_of([&] { corollary_e(bad); }) == ErrorCode::PreconditionViolated);
  bad = ctx;
  bad.g = 1;
  CHECK(error_of([&] { corollary_e(bad); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("constant chain") {
  const auto rs = constant_chain_reports(2, 1);
  REQUIRE(rs.size() == 3);
  for (const auto& r : rs) CHECK(r.holds);
  CHECK(rs[0].rhs == doctest::Approx(108 * std::log(2.0) + 122));
  CHECK(rs[0].rhs == doctest::Approx(196.86).epsilon(1e-4));
  CHECK(rs[1].slack / 2 == doctest::Approx(25 - 16 * log3 - 4 * log2pi));

  const auto s = verify_constant_chain(60, 8, 2);
  CHECK(s.violations == 0);
  CHECK(s.points == 59 * 8);
  CHECK(s.min_margin[1] == doctest::Approx(25 - 16 * log3 - 4 * log2pi));
  CHECK(s.asymptotic_margin == doctest::Approx(25 - 16 * log3 - 2 * log2pi).epsilon(1e-12));
  const auto t = verify_constant_chain(60, 8, 1);
  CHECK(t.min_margin == s.min_margin);
  CHECK(t.argmin == s.argmin);
}

TEST_CASE("simulated ledgers are admissible and chain correctly") {
  for (auto mode : {LedgerMode::PositiveGenus, LedgerMode::GenusZero, LedgerMode::CliffordHyperelliptic,
                    LedgerMode::CliffordNonhyperelliptic}) {
    SimulationParams p;
    p.mode = mode;
    p.g = 4;
    p.kappa = 2;
    CHECK(ledger_digest(simulate_reduction(9, p)) == ledger_digest(simulate_reduction(9, p)));
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto l = simulate_reduction(seed, p);
      CHECK_NOTHROW(derived_intersections(l));
      for (std::size_t j = 0; j < l.steps.size(); ++j) CHECK(onestep_chain(l, j).report.holds);
      CHECK(sum_ci_bound(l).holds);
      CHECK(theorem_chain_check(l).report.holds);
      CHECK(ledger_from_json(ledger_to_json(l)).steps.size() == l.steps.size());
    }
  }
}

TEST_CASE("theorem chain on the example ledger") {
  const auto c = theorem_chain_check(example_ledger());
  CHECK(c.theorem == "B");
  CHECK(c.value == doctest::Approx(3 + 18 * log3));
  CHECK(c.bound == doctest::Approx(theorem_b_bound(2, 4, 1, 20)));
  CHECK(c.report.holds);

  Ledger zero = example_ledger();
  for (auto& s : zero.steps) s.c = s.slack = 0;
  CHECK(theorem_chain_check(zero).report.holds);
}
