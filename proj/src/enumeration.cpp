#include "latmin/enumeration.hpp"

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <optional>

#include "latmin/error.hpp"
#include "workers.hpp"

namespace latmin {

namespace {

using i128 = __int128;

constexpr double kFilterMargin = 1e-10;

BigInt lcm_of_row_denominators(const std::vector<Rational>& row) {
  BigInt l = 1;
  for (const auto& x : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

Rational upper_threshold(const BallQuery& q) {
  if (sgn(q.shift) == 0) return q.scale;
  return q.scale * exp_enclosure(q.shift).second;
}

// Everything the inner loop needs, prepared once per query.
struct Plan {
  std::size_t rank = 0;
  bool ellipsoid = false;
  ThresholdKind kind = ThresholdKind::Closed;
  Rational scale;
  Rational shift;
  std::vector<long long> box;  // in z coordinates
  // x = sum_i z_i * basis[i]; empty when z = x.
  std::vector<std::vector<long long>> basis;

  // Machine-integer fast path, in z coordinates.
  bool fast = false;
  std::vector<std::vector<long long>> int_rows;  // gram * den, or functionals * den_j
  std::vector<double> row_limits;                // polymax: den_j * theta
  double quad_limit = 0.0;                       // ellipsoid: den * theta^2
  BigInt gram_den;
  std::vector<BigInt> row_dens;

  // Fincke-Pohst data (ellipsoid only).
  bool prune = false;
  std::vector<long double> diag;
  std::vector<std::vector<long double>> mu;  // mu[j][i], j > i
  long double prune_limit = 0.0L;

  const NormedModule* module = nullptr;

  // Sign of base_norm - theta, decided exactly.
  int exact_compare(const Rational& raw) const {
    if (sgn(raw) == 0) return -1;
    if (sgn(shift) == 0) {
      int c = ellipsoid ? cmp(raw, scale * scale) : cmp(raw, scale);
      return c > 0 ? 1 : (c < 0 ? -1 : 0);
    }
    LogValue v = LogValue::log_of(raw, ellipsoid ? Rational(1, 2) : Rational(1)) -
                 LogValue::log_of(scale) - LogValue::rational(shift);
    return v.sign();
  }

  bool accept(int sign) const { return kind == ThresholdKind::Closed ? sign <= 0 : sign < 0; }

  // z and its image x.
  bool contains(const IntVector& z, const IntVector& x) const {
    if (!fast) return accept(exact_compare(module->base_norm(x).raw));
    if (ellipsoid) {
      i128 q = 0;
      for (std::size_t i = 0; i < rank; ++i) {
        if (z[i] == 0) continue;
        i128 row = 0;
        for (std::size_t j = 0; j < rank; ++j) row += static_cast<i128>(int_rows[i][j]) * z[j];
        q += row * z[i];
      }
      const double qd = static_cast<double>(q);
      if (qd < quad_limit * (1.0 - kFilterMargin)) return true;
      if (qd > quad_limit * (1.0 + kFilterMargin)) return false;
      return accept(exact_compare(make_rational(to_big(q), gram_den)));
    }
    bool ambiguous = false;
    for (std::size_t j = 0; j < int_rows.size(); ++j) {
      i128 s = 0;
      for (std::size_t k = 0; k < rank; ++k) s += static_cast<i128>(int_rows[j][k]) * z[k];
      const double sd = static_cast<double>(s < 0 ? -s : s);
      if (sd > row_limits[j] * (1.0 + kFilterMargin)) return false;
      if (sd >= row_limits[j] * (1.0 - kFilterMargin)) ambiguous = true;
    }
    if (!ambiguous) return true;
    return accept(exact_compare(module->base_norm(x).raw));
  }

  static BigInt to_big(i128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    BigInt hi = static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64));
    BigInt lo = static_cast<unsigned long>(static_cast<std::uint64_t>(u));
    BigInt r = (hi << 64) + lo;
    return neg ? BigInt(-r) : r;
  }
};

long long to_ll(const BigInt& b) {
  if (!b.fits_slong_p()) fail(ErrorCode::EnumerationBudgetExceeded, "enclosing box overflows");
  return static_cast<long long>(b.get_si());
}

// |x_k| bounds on {x : x^T G x <= theta^2}.
std::vector<long long> ellipsoid_box(const RationalMatrix& g, const Rational& theta_hi) {
  auto inv = inverse(g);
  if (!inv) fail(ErrorCode::InvalidNorm, "gram is singular");
  const Rational t2 = theta_hi * theta_hi;
  std::vector<long long> box;
  for (std::size_t k = 0; k < g.size(); ++k) box.push_back(to_ll(floor_sqrt((*inv)[k][k] * t2)));
  return box;
}

// |x_k| bounds on {x : |Fx| <= theta}.
std::vector<long long> polymax_box(const RationalMatrix& f, const Rational& theta_hi) {
  auto half = polytope_half_widths(f);
  if (!half) fail(ErrorCode::UnboundedBall, "functionals are rank-deficient");
  std::vector<long long> box;
  for (const auto& h : *half) box.push_back(to_ll(floor_rational(theta_hi * h)));
  return box;
}

std::vector<long long> box_for(const NormSpec& norm, const Rational& theta_hi) {
  return norm.is_ellipsoid() ? ellipsoid_box(norm.ellipsoid().gram, theta_hi)
                             : polymax_box(norm.polymax().functionals, theta_hi);
}

BigInt box_volume(const std::vector<long long>& box) {
  BigInt v = 1;
  for (auto b : box) v *= big(2 * b + 1);
  return v;
}

Plan make_plan(const NormedModule& module, const BallQuery& query, const EnumerationOptions& opts) {
  if (sgn(query.scale) <= 0) fail(ErrorCode::InvalidArgument, "ball radius must be positive");
  Plan p;
  p.module = &module;
  p.rank = module.rank();
  p.ellipsoid = module.is_ellipsoid();
  p.kind = query.kind;
  p.scale = query.scale;
  p.shift = query.shift;

  const Rational theta_hi = upper_threshold(query);
  RationalMatrix work =
      p.ellipsoid ? module.norm().base().ellipsoid().gram : module.norm().base().polymax().functionals;
  auto box_of = [&](const RationalMatrix& data) {
    return p.ellipsoid ? ellipsoid_box(data, theta_hi) : polymax_box(data, theta_hi);
  };
  p.box = box_of(work);
  BigInt volume = box_volume(p.box);

  // Skewed balls get a much smaller box in an LLL-reduced basis.
  if (p.rank >= 2 && volume > 1) {
    RationalMatrix form = work;
    if (!p.ellipsoid) {
      form.assign(p.rank, std::vector<Rational>(p.rank, Rational(0)));
      for (const auto& row : work)
        for (std::size_t i = 0; i < p.rank; ++i)
          for (std::size_t j = 0; j < p.rank; ++j) form[i][j] += row[i] * row[j];
    }
    const auto basis = lll_reduce(form);
    bool identity = true;
    for (std::size_t i = 0; i < p.rank; ++i)
      for (std::size_t j = 0; j < p.rank; ++j) identity = identity && basis[i][j] == (i == j ? 1 : 0);
    if (!identity) {
      RationalMatrix reduced = p.ellipsoid ? gram_in_basis(work, basis) : functionals_in_basis(work, basis);
      std::optional<std::vector<long long>> box;
      try {
        box = box_of(reduced);
      } catch (const Error&) {
      }
      if (box && box_volume(*box) < volume) {
        // x = B z must stay well inside machine integers.
        BigInt reach = 0;
        for (std::size_t k = 0; k < p.rank; ++k) {
          BigInt s = 0;
          for (std::size_t i = 0; i < p.rank; ++i) s += abs(basis[i][k]) * big((*box)[i]);
          if (s > reach) reach = s;
        }
        if (reach < (BigInt(1) << 62)) {
          p.box = *box;
          volume = box_volume(p.box);
          work = std::move(reduced);
          for (const auto& v : basis) {
            std::vector<long long> row;
            for (const auto& x : v) row.push_back(x.get_si());
            p.basis.push_back(std::move(row));
          }
        }
      }
    }
  }

  if (volume > BigInt(std::to_string(opts.budget)))
    fail(ErrorCode::EnumerationBudgetExceeded,
         "enclosing box holds " + volume.get_str() + " candidates, budget is " +
             std::to_string(opts.budget));

  const double theta = std::exp(std::log(query.scale.get_d()) + query.shift.get_d());
  const BigInt limit = BigInt(1) << 120;
  BigInt box_sum = 0;
  for (auto b : p.box) box_sum += big(b);

  p.fast = true;
  if (p.ellipsoid) {
    const auto& g = work;
    p.gram_den = 1;
    for (const auto& row : g)
      mpz_lcm(p.gram_den.get_mpz_t(), p.gram_den.get_mpz_t(), lcm_of_row_denominators(row).get_mpz_t());
    BigInt max_entry = 0;
    for (const auto& row : g) {
      std::vector<long long> ir;
      for (const auto& x : row) {
        Rational scaled = x * p.gram_den;
        BigInt n = scaled.get_num();
        if (!n.fits_slong_p()) p.fast = false;
        if (abs(n) > max_entry) max_entry = abs(n);
        ir.push_back(n.fits_slong_p() ? n.get_si() : 0);
      }
      p.int_rows.push_back(std::move(ir));
    }
    if (max_entry * box_sum * box_sum >= limit) p.fast = false;
    p.quad_limit = p.gram_den.get_d() * theta * theta;

    // LDL^T in long double for pruning; disabled if it degenerates.
    const std::size_t r = p.rank;
    std::vector<std::vector<long double>> a(r, std::vector<long double>(r));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) a[i][j] = static_cast<long double>(g[i][j].get_d());
    p.diag.assign(r, 0.0L);
    p.mu.assign(r, std::vector<long double>(r, 0.0L));
    p.prune = true;
    for (std::size_t i = 0; i < r && p.prune; ++i) {
      long double d = a[i][i];
      for (std::size_t k = 0; k < i; ++k) d -= p.mu[i][k] * p.mu[i][k] * p.diag[k];
      if (!(d > 0.0L)) {
        p.prune = false;
        break;
      }
      p.diag[i] = d;
      for (std::size_t j = i + 1; j < r; ++j) {
        long double s = a[j][i];
        for (std::size_t k = 0; k < i; ++k) s -= p.mu[j][k] * p.mu[i][k] * p.diag[k];
        p.mu[j][i] = s / d;
      }
    }
    const long double th = static_cast<long double>(theta_hi.get_d());
    p.prune_limit = th * th * (1.0L + 1e-9L) + 1e-9L;
  } else {
    for (const auto& row : work) {
      BigInt den = lcm_of_row_denominators(row);
      std::vector<long long> ir;
      BigInt row_bound = 0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        BigInt n = Rational(row[k] * den).get_num();
        if (!n.fits_slong_p()) p.fast = false;
        row_bound += abs(n) * big(p.box[k]);
        ir.push_back(n.fits_slong_p() ? n.get_si() : 0);
      }
      if (row_bound >= limit) p.fast = false;
      p.int_rows.push_back(std::move(ir));
      p.row_dens.push_back(den);
      p.row_limits.push_back(den.get_d() * theta);
    }
  }
  return p;
}

struct ChunkResult {
  std::uint64_t count = 0;
  std::vector<IntVector> vectors;
  std::vector<IntVector> rank_witnesses;
};

class Walker {
 public:
  Walker(const Plan& plan, bool collect)
      : plan_(plan), collect_(collect), x_(plan.rank, 0), image_(plan.rank, 0), tracker_(plan.rank) {}

  ChunkResult run(long long outer_lo, long long outer_hi) {
    result_ = {};
    if (plan_.rank == 0) {
      leaf();
      return std::move(result_);
    }
    const std::size_t top = plan_.rank - 1;
    for (long long v = outer_lo; v <= outer_hi; ++v) {
      x_[top] = v;
      long double partial = 0.0L;
      if (plan_.prune) {
        long double t = static_cast<long double>(v);
        partial = plan_.diag[top] * t * t;
        if (partial > plan_.prune_limit) continue;
      }
      if (top == 0)
        leaf();
      else
        descend(top - 1, partial);
    }
    return std::move(result_);
  }

  // Range of the outermost coordinate.
  static std::pair<long long, long long> outer_range(const Plan& plan) {
    const std::size_t top = plan.rank - 1;
    long long lo = -plan.box[top], hi = plan.box[top];
    if (plan.prune) {
      long double w = std::sqrt(plan.prune_limit / plan.diag[top]) + 1e-7L;
      lo = std::max(lo, static_cast<long long>(std::ceil(-w)));
      hi = std::min(hi, static_cast<long long>(std::floor(w)));
    }
    return {lo, hi};
  }

 private:
  void descend(std::size_t level, long double partial) {
    long long lo = -plan_.box[level], hi = plan_.box[level];
    long double center = 0.0L;
    if (plan_.prune) {
      for (std::size_t j = level + 1; j < plan_.rank; ++j)
        center -= plan_.mu[j][level] * static_cast<long double>(x_[j]);
      const long double rem = plan_.prune_limit - partial;
      if (rem < 0.0L) return;
      const long double w = std::sqrt(rem / plan_.diag[level]) + 1e-7L;
      lo = std::max(lo, static_cast<long long>(std::ceil(center - w)));
      hi = std::min(hi, static_cast<long long>(std::floor(center + w)));
    }
    for (long long v = lo; v <= hi; ++v) {
      x_[level] = v;
      long double next = partial;
      if (plan_.prune) {
        const long double t = static_cast<long double>(v) - center;
        next += plan_.diag[level] * t * t;
        if (next > plan_.prune_limit) continue;
      }
      if (level == 0)
        leaf();
      else
        descend(level - 1, next);
    }
  }

  void leaf() {
    const IntVector& x = plan_.basis.empty() ? x_ : image();
    if (!plan_.contains(x_, x)) return;
    ++result_.count;
    if (collect_) result_.vectors.push_back(x);
    if (tracker_.rank() < plan_.rank && tracker_.add(x)) result_.rank_witnesses.push_back(x);
  }

  const IntVector& image() {
    std::fill(image_.begin(), image_.end(), 0);
    for (std::size_t i = 0; i < plan_.rank; ++i)
      if (x_[i] != 0)
        for (std::size_t k = 0; k < plan_.rank; ++k) image_[k] += x_[i] * plan_.basis[i][k];
    return image_;
  }

  const Plan& plan_;
  bool collect_;
  IntVector x_;  // z coordinates
  IntVector image_;
  SpanTracker tracker_;
  ChunkResult result_;
};

}  // namespace

std::uint64_t default_budget() {
  if (const char* env = std::getenv("LATMIN_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 100'000'000ULL;
}

LogValue SectionSet::log_count_exact() const {
  return LogValue::log_of(Rational(BigInt(std::to_string(count))));
}

std::vector<long long> enclosing_box(const NormSpec& norm) {
  BallQuery q;
  q.shift = norm.total_alpha();
  return box_for(norm.base(), upper_threshold(q));
}

std::vector<long long> enclosing_box(const NormedModule& module, const BallQuery& query) {
  return box_for(module.norm().base(), upper_threshold(query));
}

SectionSet enumerate_ball(const NormedModule& module, const BallQuery& query, bool collect,
                          const EnumerationOptions& options) {
  const Plan plan = make_plan(module, query, options);
  SectionSet out;
  out.kind = query.kind;

  std::vector<ChunkResult> chunks;
  if (plan.rank == 0) {
    chunks.push_back(Walker(plan, collect).run(0, 0));
  } else {
    auto [lo, hi] = Walker::outer_range(plan);
    if (lo <= hi) {
      const unsigned threads = std::max(1u, options.threads);
      const long long span = hi - lo + 1;
      const long long pieces = std::min<long long>(span, threads == 1 ? 1 : 8LL * threads);
      chunks.resize(static_cast<std::size_t>(pieces));
      auto bounds = [&](long long i) {
        long long a = lo + span * i / pieces;
        long long b = lo + span * (i + 1) / pieces - 1;
        return std::pair{a, b};
      };
      std::atomic<long long> next{0};
      std::atomic<bool> failed{false};
      std::exception_ptr error;
      std::mutex error_mutex;
      auto work = [&] {
        Walker walker(plan, collect);
        for (long long i; (i = next.fetch_add(1)) < pieces;) {
          if (failed) return;
          try {
            auto [a, b] = bounds(i);
            chunks[static_cast<std::size_t>(i)] = walker.run(a, b);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      };
      run_workers(threads, [&](unsigned) { work(); });
      if (error) std::rethrow_exception(error);
    }
  }

  SpanTracker tracker(plan.rank);
  for (auto& c : chunks) {
    out.count += c.count;
    for (auto& v : c.vectors) out.vectors.push_back(std::move(v));
    for (const auto& w : c.rank_witnesses) tracker.add(w);
  }
  std::sort(out.vectors.begin(), out.vectors.end());
  out.span_rank = tracker.rank();
  out.log_count = std::log(static_cast<double>(out.count));
  return out;
}

SectionSet effective_sections(const NormedModule& module, const EnumerationOptions& options,
                              bool collect) {
  return enumerate_ball(module, {1, module.alpha(), ThresholdKind::Closed}, collect, options);
}

SectionSet strictly_effective_sections(const NormedModule& module,
                                       const EnumerationOptions& options, bool collect) {
  return enumerate_ball(module, {1, module.alpha(), ThresholdKind::Open}, collect, options);
}

double h0_hat(const NormedModule& module, const EnumerationOptions& options) {
  return effective_sections(module, options, false).log_count;
}

double h0_hat_sef(const NormedModule& module, const EnumerationOptions& options) {
  return strictly_effective_sections(module, options, false).log_count;
}

Rational sef_limit_epsilon(const NormedModule& module, const EnumerationOptions& options) {
  const auto open = strictly_effective_sections(module, options, true);
  const NormValue* largest = nullptr;
  std::vector<NormValue> values;
  values.reserve(open.vectors.size());
  for (const auto& v : open.vectors) values.push_back(norm_eval(module, v));
  for (const auto& nv : values)
    if (!nv.is_zero() && (!largest || compare(nv, *largest) > 0)) largest = &nv;
  if (!largest) return Rational(1, 2);

  // Rational upper bound m_hi of the largest norm below 1, then (1 - m_hi)/2
  // rounded down to a dyadic with 32 fractional bits.
  for (long bits = 128; bits <= 4096; bits *= 2) {
    mpfr_t m, t;
    mpfr_init2(m, bits);
    mpfr_init2(t, bits);
    mpfr_set_q(m, largest->raw.get_mpq_t(), MPFR_RNDU);
    if (largest->squared) mpfr_sqrt(m, m, MPFR_RNDU);
    mpfr_set_q(t, Rational(-largest->alpha).get_mpq_t(), MPFR_RNDU);
    mpfr_exp(t, t, MPFR_RNDU);
    mpfr_mul(m, m, t, MPFR_RNDU);
    Rational m_hi;
    mpfr_get_q(m_hi.get_mpq_t(), m);
    mpfr_clear(m);
    mpfr_clear(t);
    Rational gap = (Rational(1) - m_hi) / 2;
    if (sgn(gap) > 0) {
      const BigInt scale = BigInt(1) << 32;
      BigInt n = floor_rational(gap * scale);
      if (sgn(n) > 0) return make_rational(n, scale);
      return gap;
    }
  }
  fail(ErrorCode::Undecidable, "largest strictly effective norm too close to 1");
}

}  // namespace latmin
