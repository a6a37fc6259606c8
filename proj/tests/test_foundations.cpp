#include <cmath>
#include <set>

#include "doctest.h"
#include "latmin/counter_rng.hpp"
#include "latmin/digest.hpp"
#include "latmin/error.hpp"
#include "latmin/exact_linalg.hpp"
#include "latmin/json_io.hpp"
#include "latmin/log_value.hpp"
#include "latmin/rational.hpp"

using namespace latmin;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("rational parsing and formatting") {
  CHECK(format_rational(parse_rational("3")) == "3/1");
  CHECK(format_rational(parse_rational("-6/4")) == "-3/2");
  CHECK(format_rational(parse_rational("0.75")) == "3/4");
  CHECK(format_rational(parse_rational("-1.5")) == "-3/2");
  CHECK(format_rational(parse_rational("0")) == "0/1");
  CHECK(code_of([] { parse_rational("1/0"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_rational("abc"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_rational(""); }) == ErrorCode::ParseError);
}

TEST_CASE("floor, ceil and floor_sqrt") {
  CHECK(floor_rational(Rational(-3, 2)) == -2);
  CHECK(ceil_rational(Rational(-3, 2)) == -1);
  CHECK(floor_rational(Rational(7)) == 7);
  CHECK(floor_sqrt(Rational(9)) == 3);
  CHECK(floor_sqrt(Rational(8)) == 2);
  CHECK(floor_sqrt(Rational(99, 10)) == 3);
  CHECK(floor_sqrt(Rational(1, 4)) == 0);
}

TEST_CASE("log values decide signs exactly") {
  const auto l2 = LogValue::log_of(2), l3 = LogValue::log_of(3), l6 = LogValue::log_of(6);
  CHECK((l2 + l3 - l6).sign() == 0);
  CHECK((LogValue::log_of(4) - 2 * l2).sign() == 0);
  CHECK((l3 - l2).sign() == 1);
  CHECK(LogValue::log_pi().sign() == 1);
  // pi^2 / 2 vs 5: log(pi^2/2) = 1.596..., log 5 = 1.609...
  CHECK((LogValue::log_pi(2) - l2 - LogValue::log_of(5)).sign() == -1);
  CHECK((LogValue::rational(Rational(1, 3)) - LogValue::log_of(Rational(4, 3))).sign() == 1);
  CHECK(std::fabs((l2 + LogValue::log_pi()).approx() - std::log(2 * M_PI)) < 1e-15);
  CHECK(code_of([] { LogValue::log_of(0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("log values with huge exponents fall back to interval sums") {
  // 10^6 * log(3) - 10^6 * log(3 - 10^-12)
  const Rational x = Rational(3) - Rational(1, BigInt("1000000000000"));
  const Rational n("1000000");
  const auto v = LogValue::log_of(3, n) - LogValue::log_of(x, n);
  CHECK(v.sign() == 1);
}

TEST_CASE("exp enclosure brackets e") {
  const auto [lo, hi] = exp_enclosure(1);
  CHECK(lo < hi);
  CHECK(lo.get_d() <= std::exp(1.0));
  CHECK(hi.get_d() >= std::exp(1.0));
  CHECK(Rational(hi - lo).get_d() < 1e-30);
}

TEST_CASE("exact linear algebra") {
  RationalMatrix a{{2, 1}, {1, 1}};
  CHECK(determinant(a) == 1);
  CHECK(matrix_rank(a) == 2);
  auto inv = inverse(a);
  REQUIRE(inv);
  CHECK((*inv)[0][0] == 1);
  CHECK((*inv)[0][1] == -1);
  CHECK((*inv)[1][1] == 2);
  CHECK(!inverse(RationalMatrix{{1, 2}, {2, 4}}));
  auto minors = leading_minors(a);
  CHECK(minors == std::vector<Rational>{2, 1});
  CHECK(independent_rows({{1, 0}, {2, 0}, {0, 1}}) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("lll reduction of a skewed form") {
  // x^2 + (x*100 - y)^2-ish: the reduced basis is short and unimodular
  const RationalMatrix g{{10001, -100}, {-100, 1}};
  const auto b = lll_reduce(g);
  REQUIRE(b.size() == 2);
  RationalMatrix m{{Rational(b[0][0]), Rational(b[0][1])}, {Rational(b[1][0]), Rational(b[1][1])}};
  CHECK(abs_rational(determinant(m)) == 1);
  for (const auto& v : b) {
    const Rational q = g[0][0] * v[0] * v[0] + 2 * g[0][1] * v[0] * v[1] + g[1][1] * v[1] * v[1];
    CHECK(q <= 1);
  }
  CHECK(lll_reduce(identity_matrix(3)) == std::vector<std::vector<BigInt>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}

TEST_CASE("span rank") {
  CHECK(span_rank({}) == 0);
  CHECK(span_rank({{0, 0}}) == 0);
  CHECK(span_rank({{1, 0}, {0, 1}, {1, 1}}) == 2);
  CHECK(span_rank({{2, 4, 6}, {1, 2, 3}, {-3, -6, -9}}) == 1);
  SpanTracker t(3);
  CHECK(t.add({1, 1, 0}));
  CHECK(!t.add({2, 2, 0}));
  CHECK(t.in_span({-3, -3, 0}));
  CHECK(!t.in_span({0, 0, 1}));
  CHECK(t.add({1, 0, 0}));
  CHECK(t.rank() == 2);
  // large entries stay exact
  CHECK(t.add({0, 3037000499LL, 3037000493LL}));
  CHECK(t.rank() == 3);
}

TEST_CASE("counter rng is a pure function of key and counter") {
  CounterRng a(CounterRng::derive_key(7, "x")), b(CounterRng::derive_key(7, "x"));
  CHECK(a.at(12345) == b.at(12345));
  CHECK(CounterRng::derive_key(7, "x") != CounterRng::derive_key(7, "y"));
  CHECK(CounterRng::derive_key(7, "x") != CounterRng::derive_key(8, "x"));
  std::set<long long> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = a.next_int(-2, 2);
    CHECK(v >= -2);
    CHECK(v <= 2);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) sum += b.uniform_at(i);
  CHECK(std::fabs(sum / 100000 - 0.5) < 0.01);
  CHECK(a.substream(1).at(0) != a.substream(2).at(0));
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("json rationals and reals") {
  CHECK(rational_from_json(Json(3)) == 3);
  CHECK(rational_from_json(Json("1/3")) == Rational(1, 3));
  CHECK(rational_from_json(Json("0.25")) == Rational(1, 4));
  CHECK(real_from_json(Json(0.5)) == 0.5);
  CHECK(format_real(1.0 / 3.0) == "0.333333333333");
  CHECK(code_of([] { rational_from_json(Json(0.5)); }) == ErrorCode::SchemaViolation);
}
