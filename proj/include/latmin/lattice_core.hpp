#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "latmin/exact_linalg.hpp"
#include "latmin/log_value.hpp"
#include "latmin/rational.hpp"

namespace latmin {

class NormSpec;

/// norm(x) = sqrt(x^T gram x)
struct Ellipsoid {
  RationalMatrix gram;
};

/// norm(x) = max_j |<a_j, x>|
struct PolyMax {
  RationalMatrix functionals;
};

/// norm(x) = exp(-alpha) * inner(x)
struct Scaled {
  std::shared_ptr<const NormSpec> inner;
  Rational alpha;
};

class NormSpec {
 public:
  using Variant = std::variant<Ellipsoid, PolyMax, Scaled>;

  NormSpec(Ellipsoid e) : v_(std::move(e)) {}
  NormSpec(PolyMax p) : v_(std::move(p)) {}
  NormSpec(Scaled s) : v_(std::move(s)) {}

  const Variant& variant() const { return v_; }

  /// The Ellipsoid or PolyMax at the bottom of any Scaled chain.
  const NormSpec& base() const;
  /// Sum of all Scaled alphas along the chain.
  Rational total_alpha() const;

  bool is_ellipsoid() const { return std::holds_alternative<Ellipsoid>(base().v_); }
  bool is_polymax() const { return std::holds_alternative<PolyMax>(base().v_); }
  const Ellipsoid& ellipsoid() const { return std::get<Ellipsoid>(base().v_); }
  const PolyMax& polymax() const { return std::get<PolyMax>(base().v_); }

 private:
  Variant v_;
};

/// Exact norm value  exp(-alpha) * (squared ? sqrt(raw) : raw).
struct NormValue {
  Rational raw;
  bool squared = false;
  Rational alpha;

  bool is_zero() const { return sgn(raw) == 0; }
  /// log of the value; requires !is_zero().
  LogValue log() const;
  double approx() const;
  /// Sign of (value - threshold) for a rational threshold >= 0.
  int compare_to(const Rational& threshold) const;
};

int compare(const NormValue& a, const NormValue& b);

/// (Z^r, norm), validated at construction and immutable afterwards.
class NormedModule {
 public:
  std::size_t rank() const { return rank_; }
  const NormSpec& norm() const { return *norm_; }
  std::shared_ptr<const NormSpec> norm_ptr() const { return norm_; }

  const Rational& alpha() const { return alpha_; }
  bool is_ellipsoid() const { return norm_->is_ellipsoid(); }
  bool is_polymax() const { return norm_->is_polymax(); }

  /// Value of the untwisted base norm (alpha ignored).
  NormValue base_norm(const IntVector& v) const;

  /// Hex SHA-256 of the canonical JSON form.
  const std::string& digest() const { return digest_; }

 private:
  friend NormedModule make_normed_module(std::size_t, std::shared_ptr<const NormSpec>);
  NormedModule() = default;

  std::size_t rank_ = 0;
  std::shared_ptr<const NormSpec> norm_;
  Rational alpha_;
  std::string digest_;
};

/// Validates `norm` for Z^rank. Throws InvalidNorm, UnboundedBall or
/// DimensionMismatch.
NormedModule make_normed_module(std::size_t rank, std::shared_ptr<const NormSpec> norm);
NormedModule make_normed_module(std::size_t rank, NormSpec norm);

NormValue norm_eval(const NormedModule& module, const IntVector& v);

/// M(alpha) = (M, exp(-alpha) * norm). Consecutive twists merge into one
/// Scaled layer; twist(M, 0) returns M unchanged.
NormedModule twist(const NormedModule& module, const Rational& alpha);

// Convenience constructors used throughout tests and the CLI.
NormSpec ellipsoid_norm(RationalMatrix gram);
NormSpec polymax_norm(RationalMatrix functionals);
NormSpec scaled_norm(NormSpec inner, Rational alpha);
RationalMatrix identity_matrix(std::size_t n);

}  // namespace latmin
