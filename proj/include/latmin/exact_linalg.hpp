#pragma once

#include <optional>
#include <vector>

#include "latmin/rational.hpp"

namespace latmin {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Rank over Q by Gaussian elimination.
std::size_t matrix_rank(RationalMatrix rows);

/// Inverse of a square matrix; nullopt if singular.
std::optional<RationalMatrix> inverse(const RationalMatrix& a);

Rational determinant(RationalMatrix a);

/// Leading principal minors det(A[0..k, 0..k]) for k = 1..n.
std::vector<Rational> leading_minors(const RationalMatrix& a);

/// Row indices of a maximal linearly independent subset, greedy in order.
std::vector<std::size_t> independent_rows(const RationalMatrix& rows);

/// LLL reduction (delta = 3/4) of the standard basis under the positive
/// definite form `gram`. Returns the reduced basis vectors b_0..b_{n-1}; they
/// generate Z^n.
std::vector<std::vector<BigInt>> lll_reduce(const RationalMatrix& gram);

/// The same form or functionals in the coordinates z of x = sum_i z_i basis[i].
RationalMatrix gram_in_basis(const RationalMatrix& gram, const std::vector<std::vector<BigInt>>& basis);
RationalMatrix functionals_in_basis(const RationalMatrix& functionals,
                                    const std::vector<std::vector<BigInt>>& basis);

/// max |x_k| over {x : |<f_j, x>| <= 1 for all j}; nullopt if unbounded.
/// Inputs with more than 4096 square subsystems get a valid but looser bound.
std::optional<std::vector<Rational>> polytope_half_widths(const RationalMatrix& functionals);

/// Q-dimension of the span of integer vectors (fraction-free elimination).
std::size_t span_rank(const std::vector<IntVector>& vectors);

/// Incremental version of span_rank. Rows are kept primitive and in echelon
/// form; entries stay in machine integers until they would overflow.
class SpanTracker {
 public:
  explicit SpanTracker(std::size_t dim) : dim_(dim) {}

  /// Adds v; returns true if it increased the rank.
  bool add(const IntVector& v);
  bool in_span(const IntVector& v) const;

  std::size_t rank() const { return rows_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::vector<BigInt>>& basis() const { return rows_; }

 private:
  std::vector<BigInt> reduce(const IntVector& v) const;

  std::size_t dim_;
  std::vector<std::vector<BigInt>> rows_;  // echelon, pivot = first nonzero
  std::vector<std::size_t> pivots_;
};

}  // namespace latmin
