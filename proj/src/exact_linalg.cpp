#include "latmin/exact_linalg.hpp"

#include <algorithm>
#include <utility>

namespace latmin {

std::size_t matrix_rank(RationalMatrix rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && sgn(rows[pivot][c]) == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t i = rank + 1; i < rows.size(); ++i) {
      if (sgn(rows[i][c]) == 0) continue;
      Rational f = rows[i][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[i][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
  const std::size_t n = a.size();
  RationalMatrix aug(n, std::vector<Rational>(2 * n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && sgn(aug[pivot][c]) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(aug[c], aug[pivot]);
    Rational p = aug[c][c];
    for (auto& x : aug[c]) x /= p;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || sgn(aug[i][c]) == 0) continue;
      Rational f = aug[i][c];
      for (std::size_t k = 0; k < 2 * n; ++k) aug[i][k] -= f * aug[c][k];
    }
  }
  RationalMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i].assign(aug[i].begin() + n, aug[i].end());
  return inv;
}

Rational determinant(RationalMatrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && sgn(a[pivot][c]) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != c) {
      std::swap(a[c], a[pivot]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sgn(a[i][c]) == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[i][k] -= f * a[c][k];
    }
  }
  return det;
}

std::vector<Rational> leading_minors(const RationalMatrix& a) {
  std::vector<Rational> minors;
  for (std::size_t k = 1; k <= a.size(); ++k) {
    RationalMatrix sub(k);
    for (std::size_t i = 0; i < k; ++i) sub[i].assign(a[i].begin(), a[i].begin() + k);
    minors.push_back(determinant(std::move(sub)));
  }
  return minors;
}

std::vector<std::size_t> independent_rows(const RationalMatrix& rows) {
  std::vector<std::size_t> chosen;
  RationalMatrix kept;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    kept.push_back(rows[i]);
    if (matrix_rank(kept) == kept.size())
      chosen.push_back(i);
    else
      kept.pop_back();
  }
  return chosen;
}

std::size_t span_rank(const std::vector<IntVector>& vectors) {
  if (vectors.empty()) return 0;
  SpanTracker tracker(vectors.front().size());
  for (const auto& v : vectors) {
    tracker.add(v);
    if (tracker.rank() == tracker.dim()) break;
  }
  return tracker.rank();
}

std::vector<BigInt> SpanTracker::reduce(const IntVector& v) const {
  std::vector<BigInt> w;
  w.reserve(v.size());
  for (long long x : v) w.push_back(big(x));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const std::size_t p = pivots_[r];
    if (sgn(w[p]) == 0) continue;
    // w <- row[p] * w - w[p] * row, then strip the content.
    BigInt a = rows_[r][p];
    BigInt b = w[p];
    BigInt g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    a /= g;
    b /= g;
    for (std::size_t k = 0; k < dim_; ++k) w[k] = a * w[k] - b * rows_[r][k];
    BigInt content = 0;
    for (const auto& x : w) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), x.get_mpz_t());
    if (content > 1)
      for (auto& x : w) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), content.get_mpz_t());
  }
  return w;
}

bool SpanTracker::in_span(const IntVector& v) const {
  for (const auto& x : reduce(v))
    if (sgn(x) != 0) return false;
  return true;
}

bool SpanTracker::add(const IntVector& v) {
  if (rows_.size() == dim_) return false;
  auto w = reduce(v);
  std::size_t p = 0;
  while (p < dim_ && sgn(w[p]) == 0) ++p;
  if (p == dim_) return false;
  // Keep rows sorted by pivot so later reductions see earlier pivots first.
  std::size_t pos = 0;
  while (pos < pivots_.size() && pivots_[pos] < p) ++pos;
  rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(w));
  pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), p);
  return true;
}

namespace {

Rational form(const RationalMatrix& g, const std::vector<BigInt>& u, const std::vector<BigInt>& v) {
  Rational s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (sgn(u[i]) == 0) continue;
    Rational row = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (sgn(v[j]) != 0) row += g[i][j] * v[j];
    s += row * u[i];
  }
  return s;
}

BigInt round_rational(const Rational& x) { return floor_rational(x + Rational(1, 2)); }

}  // namespace

std::vector<std::vector<BigInt>> lll_reduce(const RationalMatrix& gram) {
  const std::size_t n = gram.size();
  std::vector<std::vector<BigInt>> b(n, std::vector<BigInt>(n, BigInt(0)));
  for (std::size_t i = 0; i < n; ++i) b[i][i] = 1;
  if (n < 2) return b;

  std::vector<Rational> norms(n);  // |b*_i|^2
  RationalMatrix mu(n, std::vector<Rational>(n, Rational(0)));
  auto orthogonalize = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        Rational s = form(gram, b[i], b[j]);
        for (std::size_t k = 0; k < j; ++k) s -= mu[j][k] * mu[i][k] * norms[k];
        mu[i][j] = s / norms[j];
      }
      Rational s = form(gram, b[i], b[i]);
      for (std::size_t k = 0; k < i; ++k) s -= mu[i][k] * mu[i][k] * norms[k];
      norms[i] = s;
    }
  };
  orthogonalize();
  const Rational delta(3, 4);
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t jj = k; jj-- > 0;) {
      const BigInt q = round_rational(mu[k][jj]);
      if (sgn(q) == 0) continue;
      for (std::size_t t = 0; t < n; ++t) b[k][t] -= q * b[jj][t];
      for (std::size_t t = 0; t < jj; ++t) mu[k][t] -= q * mu[jj][t];
      mu[k][jj] -= q;
    }
    if (norms[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1]) {
      std::swap(b[k], b[k - 1]);
      orthogonalize();
      k = std::max<std::size_t>(k - 1, 1);
    } else {
      ++k;
    }
  }
  return b;
}

namespace {

Rational dot(const std::vector<Rational>& row, const std::vector<BigInt>& v) {
  Rational s = 0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (sgn(v[k]) != 0) s += row[k] * v[k];
  return s;
}

}  // namespace

RationalMatrix gram_in_basis(const RationalMatrix& gram, const std::vector<std::vector<BigInt>>& basis) {
  const std::size_t r = basis.size();
  RationalMatrix gb(r, std::vector<Rational>(r));  // gb[k][j] = (G b_j)_k
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t j = 0; j < r; ++j) gb[k][j] = dot(gram[k], basis[j]);
  RationalMatrix out(r, std::vector<Rational>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      Rational s = 0;
      for (std::size_t k = 0; k < r; ++k)
        if (sgn(basis[i][k]) != 0) s += gb[k][j] * basis[i][k];
      out[i][j] = s;
    }
  return out;
}

RationalMatrix functionals_in_basis(const RationalMatrix& functionals,
                                    const std::vector<std::vector<BigInt>>& basis) {
  RationalMatrix out;
  for (const auto& row : functionals) {
    std::vector<Rational> t;
    for (const auto& b : basis) t.push_back(dot(row, b));
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<std::vector<Rational>> polytope_half_widths(const RationalMatrix& f) {
  const std::size_t r = f.empty() ? 0 : f.front().size();
  if (independent_rows(f).size() != r) return std::nullopt;
  // By LP duality the maximum of x_k is the minimum over invertible r-row
  // subsets S of sum_j |F_S^-1[k][j]|.
  constexpr std::size_t kMaxSubsets = 4096;
  std::vector<std::optional<Rational>> best(r);
  std::vector<std::size_t> pick(r);
  for (std::size_t i = 0; i < r; ++i) pick[i] = i;
  for (std::size_t tried = 0; tried < kMaxSubsets; ++tried) {
    RationalMatrix a;
    for (auto i : pick) a.push_back(f[i]);
    if (auto inv = inverse(a)) {
      for (std::size_t k = 0; k < r; ++k) {
        Rational s = 0;
        for (std::size_t j = 0; j < r; ++j) s += abs_rational((*inv)[k][j]);
        if (!best[k] || s < *best[k]) best[k] = s;
      }
    }
    std::size_t i = r;
    while (i > 0 && pick[i - 1] == f.size() - r + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < r; ++j) pick[j] = pick[j - 1] + 1;
  }
  std::vector<Rational> out;
  for (auto& b : best) out.push_back(*b);
  return out;
}

}  // namespace latmin
