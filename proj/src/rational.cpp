#include "latmin/rational.hpp"

#include <cctype>

#include "latmin/error.hpp"

namespace latmin {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

BigInt parse_integer(std::string_view s) {
  std::string digits(s);
  if (!digits.empty() && digits[0] == '+') digits.erase(0, 1);
  return BigInt(digits, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto bad = [&]() -> Rational {
    fail(ErrorCode::ParseError, "not a rational literal: '" + std::string(text) + "'");
  };
  if (text.empty()) return bad();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den)) return bad();
    BigInt d = parse_integer(den);
    if (d == 0) fail(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    Rational q(parse_integer(num), d);
    q.canonicalize();
    return q;
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.remove_prefix(1);
    if (whole.empty() && frac.empty()) return bad();
    for (char c : whole)
      if (!std::isdigit(static_cast<unsigned char>(c))) return bad();
    for (char c : frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) return bad();
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt w = whole.empty() ? BigInt(0) : parse_integer(whole);
    BigInt f = frac.empty() ? BigInt(0) : parse_integer(frac);
    Rational q(w * scale + f, scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }

  if (!is_integer_literal(text)) return bad();
  return Rational(parse_integer(text));
}

std::string format_rational(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

BigInt floor_rational(const Rational& value) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

BigInt ceil_rational(const Rational& value) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

BigInt floor_sqrt(const Rational& value) {
  if (sgn(value) < 0) fail(ErrorCode::InvalidArgument, "floor_sqrt of a negative value");
  BigInt f = floor_rational(value);
  BigInt root;
  mpz_sqrt(root.get_mpz_t(), f.get_mpz_t());
  return root;
}

Rational abs_rational(const Rational& value) { return sgn(value) < 0 ? Rational(-value) : value; }

}  // namespace latmin
