#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace latmin {

using Rational = mpq_class;
using BigInt = mpz_class;
using IntVector = std::vector<long long>;

/// Parses "p", "p/q" or a finite decimal such as "-0.75". Throws ParseError.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form (q >= 1, reduced).
std::string format_rational(const Rational& value);

/// Largest integer <= value.
BigInt floor_rational(const Rational& value);
BigInt ceil_rational(const Rational& value);

/// floor(sqrt(value)) for value >= 0, exact.
BigInt floor_sqrt(const Rational& value);

Rational abs_rational(const Rational& value);

/// num/den in canonical form.
/// gmpxx has no long long constructor; long is 64-bit on the supported targets.
inline BigInt big(long long x) { return BigInt(static_cast<long>(x)); }

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace latmin
