#include "latmin/log_value.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "latmin/error.hpp"

namespace latmin {

namespace {

constexpr long kMinPrecision = 64;
constexpr long kMaxPrecision = 4096;
constexpr long kWidthFloorExponent = -200;

class Mpfr {
 public:
  explicit Mpfr(long bits) { mpfr_init2(v_, bits); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

BigInt lcm_of_denominators(const LogValue& v) {
  BigInt l = v.pi_coeff().get_den();
  for (const auto& t : v.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
  return l;
}

Rational pow_rational(const Rational& base, const BigInt& exponent) {
  if (!exponent.fits_slong_p())
    fail(ErrorCode::Undecidable, "exponent too large for exact log comparison");
  long e = exponent.get_si();
  unsigned long ue = static_cast<unsigned long>(e < 0 ? -e : e);
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), ue);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), ue);
  Rational r = e < 0 ? Rational(den, num) : Rational(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

LogValue LogValue::rational(const Rational& value) {
  LogValue v;
  v.constant_ = value;
  return v;
}

LogValue LogValue::log_of(const Rational& arg, const Rational& coeff) {
  if (sgn(arg) <= 0) fail(ErrorCode::InvalidArgument, "log of a nonpositive rational");
  LogValue v;
  if (arg != 1 && sgn(coeff) != 0) v.terms_.push_back({coeff, arg});
  return v;
}

LogValue LogValue::log_pi(const Rational& coeff) {
  LogValue v;
  v.pi_coeff_ = coeff;
  return v;
}

void LogValue::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.arg < b.arg; });
  std::vector<Term> merged;
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().arg == t.arg)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(t);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Term& t) { return sgn(t.coeff) == 0 || t.arg == 1; }),
               merged.end());
  terms_ = std::move(merged);
}

LogValue& LogValue::operator+=(const LogValue& other) {
  constant_ += other.constant_;
  pi_coeff_ += other.pi_coeff_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

LogValue& LogValue::operator-=(const LogValue& other) { return *this += -other; }

LogValue& LogValue::operator*=(const Rational& factor) {
  constant_ *= factor;
  pi_coeff_ *= factor;
  for (auto& t : terms_) t.coeff *= factor;
  normalize();
  return *this;
}

LogValue LogValue::operator-() const {
  LogValue v = *this;
  v.constant_ = -v.constant_;
  v.pi_coeff_ = -v.pi_coeff_;
  for (auto& t : v.terms_) t.coeff = -t.coeff;
  return v;
}

namespace {

// Adds an enclosure of n * log(x) to [lo, hi]; x > 0.
void add_scaled_log(Mpfr& lo, Mpfr& hi, const Rational& x, const BigInt& n, long bits) {
  Mpfr l(bits), h(bits), tmp(bits);
  mpfr_set_q(l.get(), x.get_mpq_t(), MPFR_RNDD);
  mpfr_log(l.get(), l.get(), MPFR_RNDD);
  mpfr_set_q(h.get(), x.get_mpq_t(), MPFR_RNDU);
  mpfr_log(h.get(), h.get(), MPFR_RNDU);
  const bool positive = sgn(n) > 0;
  mpfr_mul_z(tmp.get(), positive ? l.get() : h.get(), n.get_mpz_t(), MPFR_RNDD);
  mpfr_add(lo.get(), lo.get(), tmp.get(), MPFR_RNDD);
  mpfr_mul_z(tmp.get(), positive ? h.get() : l.get(), n.get_mpz_t(), MPFR_RNDU);
  mpfr_add(hi.get(), hi.get(), tmp.get(), MPFR_RNDU);
}

// Folding the logs into one exact product is only worth it while the
// product stays small.
constexpr double kMaxFoldBits = 1 << 20;

}  // namespace

int LogValue::sign() const {
  // Scale by D so every log coefficient is an integer:
  //   D*v = sum n_k log(a_k) + C + K*log(pi).
  const BigInt scale = lcm_of_denominators(*this);
  std::vector<std::pair<Rational, BigInt>> logs;
  double fold_bits = 0;
  for (const auto& t : terms_) {
    const BigInt n = Rational(t.coeff * scale).get_num();
    fold_bits += std::abs(n.get_d()) *
                 static_cast<double>(mpz_sizeinbase(t.arg.get_num_mpz_t(), 2) +
                                     mpz_sizeinbase(t.arg.get_den_mpz_t(), 2));
    logs.emplace_back(t.arg, n);
  }
  const Rational c = constant_ * scale;
  const BigInt k = Rational(pi_coeff_ * scale).get_num();

  if (fold_bits <= kMaxFoldBits) {
    // Exact product P of the log arguments, so log terms cancel exactly.
    Rational product = 1;
    for (const auto& [arg, n] : logs) product *= pow_rational(arg, n);
    if (sgn(c) == 0 && sgn(k) == 0) return product > 1 ? 1 : (product < 1 ? -1 : 0);
    if (product == 1 && sgn(k) == 0) return sgn(c);
    if (product == 1 && sgn(c) == 0) return sgn(k);
    logs.clear();
    if (product != 1) logs.emplace_back(product, BigInt(1));
  } else if (logs.empty() && sgn(k) == 0) {
    return sgn(c);
  }

  for (long bits = kMinPrecision; bits <= kMaxPrecision; bits *= 2) {
    Mpfr lo(bits), hi(bits), tmp(bits);
    mpfr_set_q(lo.get(), c.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi.get(), c.get_mpq_t(), MPFR_RNDU);
    for (const auto& [arg, n] : logs) add_scaled_log(lo, hi, arg, n, bits);
    if (sgn(k) != 0) {
      Mpfr pi_lo(bits), pi_hi(bits);
      mpfr_const_pi(pi_lo.get(), MPFR_RNDD);
      mpfr_log(pi_lo.get(), pi_lo.get(), MPFR_RNDD);
      mpfr_const_pi(pi_hi.get(), MPFR_RNDU);
      mpfr_log(pi_hi.get(), pi_hi.get(), MPFR_RNDU);
      const bool positive = sgn(k) > 0;
      mpfr_mul_z(tmp.get(), positive ? pi_lo.get() : pi_hi.get(), k.get_mpz_t(), MPFR_RNDD);
      mpfr_add(lo.get(), lo.get(), tmp.get(), MPFR_RNDD);
      mpfr_mul_z(tmp.get(), positive ? pi_hi.get() : pi_lo.get(), k.get_mpz_t(), MPFR_RNDU);
      mpfr_add(hi.get(), hi.get(), tmp.get(), MPFR_RNDU);
    }

    if (mpfr_sgn(lo.get()) > 0) return 1;
    if (mpfr_sgn(hi.get()) < 0) return -1;

    mpfr_sub(tmp.get(), hi.get(), lo.get(), MPFR_RNDU);
    if (mpfr_zero_p(tmp.get()) || mpfr_get_exp(tmp.get()) < kWidthFloorExponent) break;
  }
  fail(ErrorCode::Undecidable, "sign of " + to_string() + " not resolved above 2^-200");
}

double LogValue::approx() const {
  Mpfr acc(128), tmp(128);
  mpfr_set_q(acc.get(), constant_.get_mpq_t(), MPFR_RNDN);
  if (sgn(pi_coeff_) != 0) {
    mpfr_const_pi(tmp.get(), MPFR_RNDN);
    mpfr_log(tmp.get(), tmp.get(), MPFR_RNDN);
    Mpfr c(128);
    mpfr_set_q(c.get(), pi_coeff_.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(tmp.get(), tmp.get(), c.get(), MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), tmp.get(), MPFR_RNDN);
  }
  for (const auto& t : terms_) {
    mpfr_set_q(tmp.get(), t.arg.get_mpq_t(), MPFR_RNDN);
    mpfr_log(tmp.get(), tmp.get(), MPFR_RNDN);
    Mpfr c(128);
    mpfr_set_q(c.get(), t.coeff.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(tmp.get(), tmp.get(), c.get(), MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), tmp.get(), MPFR_RNDN);
  }
  return mpfr_get_d(acc.get(), MPFR_RNDN);
}

std::string LogValue::to_string() const {
  std::ostringstream out;
  out << format_rational(constant_);
  if (sgn(pi_coeff_) != 0) out << " + " << format_rational(pi_coeff_) << "*log(pi)";
  for (const auto& t : terms_)
    out << " + " << format_rational(t.coeff) << "*log(" << format_rational(t.arg) << ")";
  return out.str();
}

int compare(const LogValue& a, const LogValue& b) { return (a - b).sign(); }

std::pair<Rational, Rational> exp_enclosure(const Rational& x, long bits) {
  Mpfr lo(bits), hi(bits);
  mpfr_set_q(lo.get(), x.get_mpq_t(), MPFR_RNDD);
  mpfr_exp(lo.get(), lo.get(), MPFR_RNDD);
  mpfr_set_q(hi.get(), x.get_mpq_t(), MPFR_RNDU);
  mpfr_exp(hi.get(), hi.get(), MPFR_RNDU);
  Rational qlo, qhi;
  mpfr_get_q(qlo.get_mpq_t(), lo.get());
  mpfr_get_q(qhi.get_mpq_t(), hi.get());
  return {qlo, qhi};
}

}  // namespace latmin
