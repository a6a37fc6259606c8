#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "latmin/error.hpp"
#include "latmin/json_io.hpp"
#include "latmin/lattice_core.hpp"

using namespace latmin;

namespace {

ErrorCode construction_error(std::size_t rank, NormSpec norm) {
  try {
    make_normed_module(rank, std::move(norm));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("module was accepted");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("norm evaluation") {
  const auto disk = fixtures::disk();
  auto v = norm_eval(disk, {3, 4});
  CHECK(v.squared);
  CHECK(v.raw == 25);
  CHECK(v.approx() == doctest::Approx(5.0));
  CHECK(v.compare_to(5) == 0);
  CHECK(v.compare_to(Rational(49, 10)) == 1);

  const auto box = fixtures::box4();
  CHECK(norm_eval(box, {4, 1}).raw == 1);
  CHECK(norm_eval(box, {1, 0}).raw == Rational(1, 4));
  CHECK(norm_eval(box, {0, 0}).is_zero());
}

TEST_CASE("validation errors") {
  CHECK(construction_error(2, ellipsoid_norm({{1, 2}, {2, 1}})) == ErrorCode::InvalidNorm);
  CHECK(construction_error(2, ellipsoid_norm({{1, 1}, {0, 1}})) == ErrorCode::InvalidNorm);
  CHECK(construction_error(2, ellipsoid_norm({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})) ==
        ErrorCode::DimensionMismatch);
  CHECK(construction_error(2, polymax_norm({{1, 1}, {2, 2}})) == ErrorCode::UnboundedBall);
  CHECK(construction_error(2, polymax_norm({{1, 1, 0}})) == ErrorCode::DimensionMismatch);
  CHECK_THROWS_AS(norm_eval(fixtures::disk(), {1, 2, 3}), Error);
}

TEST_CASE("twists merge and scale the norm") {
  const auto line = fixtures::line();
  const auto t = twist(twist(line, Rational(1, 2)), Rational(1, 3));
  CHECK(t.alpha() == Rational(5, 6));
  CHECK(t.digest() == twist(line, Rational(5, 6)).digest());
  CHECK(twist(t, Rational(-5, 6)).digest() == line.digest());
  CHECK(twist(line, 0).digest() == line.digest());
  const auto v = norm_eval(twist(line, -1), {1});
  CHECK(v.approx() == doctest::Approx(std::exp(1.0)));
  CHECK(v.compare_to(1) == 1);
  CHECK(v.compare_to(3) == -1);
}

TEST_CASE("norm symmetry and homogeneity") {
  const auto m = make_normed_module(3, ellipsoid_norm({{2, 1, 0}, {1, 3, 1}, {0, 1, 4}}));
  const auto p = make_normed_module(3, polymax_norm({{1, 2, 0}, {0, Rational(1, 3), 1}, {1, 0, -1}, {2, 2, 2}}));
  for (const auto* mod : {&m, &p})
    for (IntVector v : {IntVector{1, -2, 3}, IntVector{0, 5, -1}, IntVector{7, 7, 0}}) {
      IntVector neg = v, triple = v;
      for (auto& x : neg) x = -x;
      for (auto& x : triple) x *= 3;
      const auto a = norm_eval(*mod, v);
      CHECK(compare(a, norm_eval(*mod, neg)) == 0);
      const auto b = norm_eval(*mod, triple);
      CHECK(b.approx() == doctest::Approx(3 * a.approx()));
    }
}

TEST_CASE("module json round trip") {
  const auto m = twist(make_normed_module(2, polymax_norm({{Rational(1, 3), 1}, {0, 2}})), Rational(-3, 4));
  const auto j = module_to_json(m);
  const auto back = module_from_json(j);
  CHECK(back.digest() == m.digest());
  CHECK(module_to_json(back).dump() == j.dump());
  CHECK(module_from_json_text(R"({"rank":2,"norm":{"type":"ellipsoid","gram":[[1,0],[0,1]]}})").digest() ==
        fixtures::disk().digest());
  CHECK_THROWS_AS(module_from_json_text("{not json"), Error);
  try {
    module_from_json_text(R"({"rank":2,"norm":{"type":"sphere"}})");
    FAIL("accepted unknown norm");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
  }
}
