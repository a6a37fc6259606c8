// Independent reference implementations for the tests: brute-force box
// scans with norms evaluated directly from the matrices.
#pragma once

#include <mpfr.h>

#include <functional>
#include <set>
#include <vector>

#include "latmin/enumeration.hpp"
#include "latmin/lattice_core.hpp"

namespace oracle {

using latmin::IntVector;
using latmin::Rational;

// Squared base norm for an ellipsoid, plain base norm for a polymax.
inline Rational base_value(const latmin::NormSpec& base, const IntVector& v) {
  Rational acc = 0;
  if (base.is_ellipsoid()) {
    const auto& g = base.ellipsoid().gram;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) acc += g[i][j] * latmin::big(v[i]) * latmin::big(v[j]);
  } else {
    for (const auto& a : base.polymax().functionals) {
      Rational s = 0;
      for (std::size_t j = 0; j < v.size(); ++j) s += a[j] * latmin::big(v[j]);
      if (s < 0) s = -s;
      if (s > acc) acc = s;
    }
  }
  return acc;
}

// Sign of log(x) - y at 512 bits; x > 0. Zero only when x = 1 and y = 0.
inline int sign_log_minus(const Rational& x, const Rational& y) {
  if (sgn(y) == 0) return x > 1 ? 1 : (x < 1 ? -1 : 0);
  mpfr_t a, b;
  mpfr_init2(a, 512);
  mpfr_init2(b, 512);
  mpfr_set_q(a, x.get_mpq_t(), MPFR_RNDN);
  mpfr_log(a, a, MPFR_RNDN);
  mpfr_set_q(b, y.get_mpq_t(), MPFR_RNDN);
  const int s = mpfr_cmp(a, b);
  mpfr_clear(a);
  mpfr_clear(b);
  return s > 0 ? 1 : (s < 0 ? -1 : 0);
}

// Sign of ||v|| - 1 for the module (twist included).
inline int compare_to_one(const latmin::NormedModule& m, const IntVector& v) {
  const Rational value = base_value(m.norm().base(), v);
  if (sgn(value) == 0) return -1;
  // ||v|| = e^-alpha * value^(1/2 or 1) <= 1  <=>  log(value) <= k * alpha
  const Rational bound = m.is_ellipsoid() ? Rational(2 * m.alpha()) : m.alpha();
  return sign_log_minus(value, bound);
}

inline void for_each_in_box(const std::vector<long long>& box, const std::function<void(const IntVector&)>& f) {
  IntVector v(box.size());
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == box.size()) {
      f(v);
      return;
    }
    for (long long x = -box[k]; x <= box[k]; ++x) {
      v[k] = x;
      rec(k + 1);
    }
  };
  rec(0);
}

// Scan of the library's enclosing box grown by one in every coordinate.
// `outside_box` counts qualifying points the library box would have missed.
struct ScanResult {
  std::set<IntVector> closed, open;
  std::size_t outside_box = 0;
};

inline ScanResult scan(const latmin::NormedModule& m) {
  auto box = latmin::enclosing_box(m, latmin::BallQuery{1, m.alpha(), latmin::ThresholdKind::Closed});
  const auto inner = box;
  for (auto& b : box) ++b;
  ScanResult out;
  for_each_in_box(box, [&](const IntVector& v) {
    const int c = compare_to_one(m, v);
    if (c > 0) return;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] > inner[k] || -v[k] > inner[k]) {
        ++out.outside_box;
        break;
      }
    out.closed.insert(v);
    if (c < 0) out.open.insert(v);
  });
  return out;
}

}  // namespace oracle
