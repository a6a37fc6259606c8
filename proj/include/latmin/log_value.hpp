#pragma once

#include <string>
#include <utility>
#include <vector>

#include "latmin/rational.hpp"

namespace latmin {

/// A real number of the form
///
///   constant + pi_coeff * log(pi) + sum_k coeff_k * log(arg_k)
///
/// with rational constant, coefficients and positive rational arguments.
/// Every quantity compared by the inequality checks (log-counts, twists,
/// logarithmic minima, exact ball volumes) lives in this family, so signs can
/// be decided exactly: rational identities are settled by exact arithmetic,
/// everything else by MPFR interval refinement.
class LogValue {
 public:
  struct Term {
    Rational coeff;
    Rational arg;
  };

  LogValue() = default;

  static LogValue rational(const Rational& value);
  /// coeff * log(arg); arg must be positive.
  static LogValue log_of(const Rational& arg, const Rational& coeff = 1);
  static LogValue log_pi(const Rational& coeff = 1);

  LogValue& operator+=(const LogValue& other);
  LogValue& operator-=(const LogValue& other);
  LogValue& operator*=(const Rational& factor);
  LogValue operator-() const;

  friend LogValue operator+(LogValue a, const LogValue& b) { return a += b; }
  friend LogValue operator-(LogValue a, const LogValue& b) { return a -= b; }
  friend LogValue operator*(LogValue a, const Rational& f) { return a *= f; }
  friend LogValue operator*(const Rational& f, LogValue a) { return a *= f; }

  /// Exact sign in {-1, 0, 1}. Throws Undecidable if the enclosing interval
  /// shrinks below 2^-200 without excluding zero.
  int sign() const;

  double approx() const;

  const Rational& constant() const { return constant_; }
  const Rational& pi_coeff() const { return pi_coeff_; }
  const std::vector<Term>& terms() const { return terms_; }

  std::string to_string() const;

 private:
  void normalize();

  Rational constant_{0};
  Rational pi_coeff_{0};
  std::vector<Term> terms_;  // sorted by arg, merged, nonzero coefficients
};

int compare(const LogValue& a, const LogValue& b);

/// Certified enclosure [lo, hi] of exp(x) as rationals, at `bits` precision.
std::pair<Rational, Rational> exp_enclosure(const Rational& x, long bits = 128);

}  // namespace latmin
