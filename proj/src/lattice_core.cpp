#include "latmin/lattice_core.hpp"

#include <cmath>

#include "latmin/digest.hpp"
#include "latmin/error.hpp"
#include "latmin/json_io.hpp"

namespace latmin {

namespace {

void validate(std::size_t rank, const NormSpec& norm, int depth) {
  if (depth > 64) fail(ErrorCode::InvalidNorm, "scaled nesting deeper than 64 levels");
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Ellipsoid>) {
          if (n.gram.size() != rank)
            fail(ErrorCode::DimensionMismatch, "gram has " + std::to_string(n.gram.size()) +
                                                   " rows, rank is " + std::to_string(rank));
          for (const auto& row : n.gram)
            if (row.size() != rank) fail(ErrorCode::DimensionMismatch, "gram is not square");
          for (std::size_t i = 0; i < rank; ++i)
            for (std::size_t j = i + 1; j < rank; ++j)
              if (n.gram[i][j] != n.gram[j][i])
                fail(ErrorCode::InvalidNorm, "gram is not symmetric");
          auto minors = leading_minors(n.gram);
          for (std::size_t k = 0; k < minors.size(); ++k)
            if (sgn(minors[k]) <= 0)
              fail(ErrorCode::InvalidNorm, "gram is not positive definite (leading minor " +
                                               std::to_string(k + 1) + " is " +
                                               format_rational(minors[k]) + ")");
        } else if constexpr (std::is_same_v<T, PolyMax>) {
          for (const auto& row : n.functionals)
            if (row.size() != rank)
              fail(ErrorCode::DimensionMismatch, "functional length differs from rank");
          if (matrix_rank(n.functionals) != rank)
            fail(ErrorCode::UnboundedBall, "functionals do not span R^" + std::to_string(rank));
        } else {
          if (!n.inner) fail(ErrorCode::InvalidNorm, "scaled norm without inner norm");
          validate(rank, *n.inner, depth + 1);
        }
      },
      norm.variant());
}

}  // namespace

const NormSpec& NormSpec::base() const {
  const NormSpec* n = this;
  while (const auto* s = std::get_if<Scaled>(&n->v_)) n = s->inner.get();
  return *n;
}

Rational NormSpec::total_alpha() const {
  Rational a = 0;
  const NormSpec* n = this;
  while (const auto* s = std::get_if<Scaled>(&n->v_)) {
    a += s->alpha;
    n = s->inner.get();
  }
  return a;
}

LogValue NormValue::log() const {
  return LogValue::log_of(raw, squared ? Rational(1, 2) : Rational(1)) - LogValue::rational(alpha);
}

double NormValue::approx() const {
  if (is_zero()) return 0.0;
  return std::exp(log().approx());
}

int NormValue::compare_to(const Rational& threshold) const {
  if (is_zero()) return sgn(threshold) == 0 ? 0 : -1;
  if (sgn(threshold) == 0) return 1;
  if (sgn(alpha) == 0) {
    int c = squared ? cmp(raw, threshold * threshold) : cmp(raw, threshold);
    return c > 0 ? 1 : (c < 0 ? -1 : 0);
  }
  return (log() - LogValue::log_of(threshold)).sign();
}

int compare(const NormValue& a, const NormValue& b) {
  if (a.is_zero() || b.is_zero()) return (a.is_zero() ? 0 : 1) - (b.is_zero() ? 0 : 1);
  return (a.log() - b.log()).sign();
}

NormValue NormedModule::base_norm(const IntVector& v) const {
  if (v.size() != rank_)
    fail(ErrorCode::DimensionMismatch, "vector of length " + std::to_string(v.size()) +
                                           " for a module of rank " + std::to_string(rank_));
  NormValue out;
  if (is_ellipsoid()) {
    const auto& g = norm_->ellipsoid().gram;
    Rational q = 0;
    for (std::size_t i = 0; i < rank_; ++i) {
      if (v[i] == 0) continue;
      Rational row = 0;
      for (std::size_t j = 0; j < rank_; ++j)
        if (v[j] != 0) row += g[i][j] * big(v[j]);
      q += row * big(v[i]);
    }
    out.raw = q;
    out.squared = true;
  } else {
    Rational best = 0;
    for (const auto& a : norm_->polymax().functionals) {
      Rational s = 0;
      for (std::size_t j = 0; j < rank_; ++j)
        if (v[j] != 0) s += a[j] * big(v[j]);
      s = abs_rational(s);
      if (s > best) best = s;
    }
    out.raw = best;
  }
  return out;
}

NormedModule make_normed_module(std::size_t rank, std::shared_ptr<const NormSpec> norm) {
  if (!norm) fail(ErrorCode::InvalidNorm, "null norm");
  validate(rank, *norm, 0);
  NormedModule m;
  m.rank_ = rank;
  m.norm_ = std::move(norm);
  m.alpha_ = m.norm_->total_alpha();
  m.digest_ = sha256_hex(module_to_json(m).dump());
  return m;
}

NormedModule make_normed_module(std::size_t rank, NormSpec norm) {
  return make_normed_module(rank, std::make_shared<const NormSpec>(std::move(norm)));
}

NormValue norm_eval(const NormedModule& module, const IntVector& v) {
  NormValue out = module.base_norm(v);
  out.alpha = module.alpha();
  return out;
}

NormedModule twist(const NormedModule& module, const Rational& alpha) {
  if (sgn(alpha) == 0) return module;
  if (const auto* s = std::get_if<Scaled>(&module.norm().variant())) {
    Rational total = s->alpha + alpha;
    if (sgn(total) == 0) return make_normed_module(module.rank(), s->inner);
    return make_normed_module(module.rank(), NormSpec(Scaled{s->inner, total}));
  }
  return make_normed_module(module.rank(), NormSpec(Scaled{module.norm_ptr(), alpha}));
}

NormSpec ellipsoid_norm(RationalMatrix gram) { return Ellipsoid{std::move(gram)}; }
NormSpec polymax_norm(RationalMatrix functionals) { return PolyMax{std::move(functionals)}; }
NormSpec scaled_norm(NormSpec inner, Rational alpha) {
  return Scaled{std::make_shared<const NormSpec>(std::move(inner)), std::move(alpha)};
}

RationalMatrix identity_matrix(std::size_t n) {
  RationalMatrix m(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

}  // namespace latmin
