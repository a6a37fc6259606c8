#include "latmin/minima_volume.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "latmin/counter_rng.hpp"
#include "latmin/error.hpp"
#include "workers.hpp"

namespace latmin {

namespace {

IntVector sign_normalized(const IntVector& v) {
  for (auto x : v) {
    if (x > 0) return v;
    if (x < 0) {
      IntVector w(v.size());
      std::transform(v.begin(), v.end(), w.begin(), [](long long c) { return -c; });
      return w;
    }
  }
  return v;
}

// Rational upper bound for sqrt(q), q >= 0.
Rational sqrt_upper(const Rational& q) {
  const BigInt& den = q.get_den();
  BigInt prod = q.get_num() * den;
  BigInt root;
  mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
  if (root * root != prod) root += 1;
  return make_rational(root, den);
}

BigInt factorial(unsigned long n) {
  BigInt f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

// Radius (on the base norm) of a ball containing every standard basis vector.
Rational basis_radius(const NormedModule& m, bool largest) {
  std::optional<Rational> best;
  for (std::size_t k = 0; k < m.rank(); ++k) {
    IntVector e(m.rank(), 0);
    e[k] = 1;
    Rational raw = m.base_norm(e).raw;
    if (!best || (largest ? raw > *best : raw < *best)) best = raw;
  }
  return m.is_ellipsoid() ? sqrt_upper(*best) : *best;
}

struct Candidate {
  Rational raw;
  IntVector canon;
};

}  // namespace

LogValue MinimaReport::sum_mus() const {
  LogValue s;
  for (const auto& m : mus) s += m;
  return s;
}

LogValue MinimaReport::sum_positive_mus() const {
  LogValue s;
  for (const auto& m : mus)
    if (m.sign() > 0) s += m;
  return s;
}

MinimaReport successive_minima(const NormedModule& module, const EnumerationOptions& options) {
  MinimaReport report;
  const std::size_t r = module.rank();
  if (r == 0) return report;

  const Rational r_max = basis_radius(module, true);
  Rational radius = basis_radius(module, false);
  SectionSet ball;
  for (;;) {
    if (radius >= r_max) radius = r_max;
    ball = enumerate_ball(module, {radius, 0, ThresholdKind::Closed}, true, options);
    if (ball.span_rank == r) break;
    radius *= 2;
  }

  std::vector<Candidate> cands;
  cands.reserve(ball.vectors.size());
  for (const auto& v : ball.vectors) {
    auto canon = sign_normalized(v);
    if (canon != v) continue;  // keep one of +-v
    Rational raw = module.base_norm(v).raw;
    if (sgn(raw) == 0) continue;
    cands.push_back({std::move(raw), std::move(canon)});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.raw != b.raw) return a.raw < b.raw;
    return a.canon > b.canon;
  });

  SpanTracker tracker(r);
  for (const auto& c : cands) {
    if (!tracker.add(c.canon)) continue;
    NormValue lambda{c.raw, module.is_ellipsoid(), module.alpha()};
    report.mus.push_back(-lambda.log());
    report.lambdas.push_back(std::move(lambda));
    report.witnesses.push_back(c.canon);
    if (tracker.rank() == r) break;
  }
  return report;
}

const char* volume_method_name(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::ExactEllipsoid: return "exact-ellipsoid";
    case VolumeMethod::ExactParallelepiped: return "exact-parallelepiped";
    case VolumeMethod::ExactPolygon: return "exact-polygon";
    case VolumeMethod::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

LogValue log_unit_ball_volume(std::size_t r) {
  const unsigned long n = r / 2;
  if (r % 2 == 0) return LogValue::log_pi(Rational(BigInt(n))) - LogValue::log_of(Rational(factorial(n)));
  // Gamma(n + 3/2) = (2n+2)! / (4^(n+1) (n+1)!) * sqrt(pi)
  BigInt four_pow;
  mpz_ui_pow_ui(four_pow.get_mpz_t(), 4, n + 1);
  Rational coeff = make_rational(four_pow * factorial(n + 1), factorial(2 * n + 2));
  return LogValue::log_pi(Rational(BigInt(n))) + LogValue::log_of(coeff);
}

Rational polygon_area(const RationalMatrix& functionals) {
  using Point = std::pair<Rational, Rational>;
  auto idx = independent_rows(functionals);
  if (idx.size() != 2) fail(ErrorCode::UnboundedBall, "functionals do not span R^2");
  RationalMatrix a{functionals[idx[0]], functionals[idx[1]]};
  auto inv = *inverse(a);
  Rational bx = abs_rational(inv[0][0]) + abs_rational(inv[0][1]);
  Rational by = abs_rational(inv[1][0]) + abs_rational(inv[1][1]);
  std::vector<Point> poly{{-bx, -by}, {bx, -by}, {bx, by}, {-bx, by}};

  auto clip = [&](const Rational& p, const Rational& q) {
    // keep p*x + q*y <= 1
    std::vector<Point> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& cur = poly[i];
      const Point& nxt = poly[(i + 1) % n];
      Rational fc = p * cur.first + q * cur.second - 1;
      Rational fn = p * nxt.first + q * nxt.second - 1;
      if (sgn(fc) <= 0) out.push_back(cur);
      if ((sgn(fc) < 0 && sgn(fn) > 0) || (sgn(fc) > 0 && sgn(fn) < 0)) {
        Rational t = fc / (fc - fn);
        out.push_back({cur.first + t * (nxt.first - cur.first),
                       cur.second + t * (nxt.second - cur.second)});
      }
    }
    poly = std::move(out);
  };
  for (const auto& f : functionals) {
    clip(f[0], f[1]);
    clip(-f[0], -f[1]);
  }
  Rational twice = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& u = poly[i];
    const Point& w = poly[(i + 1) % poly.size()];
    twice += u.first * w.second - w.first * u.second;
  }
  return abs_rational(twice) / 2;
}

bool has_exact_volume(const NormedModule& module) {
  if (module.is_ellipsoid()) return true;
  const auto r = module.rank();
  const auto m = module.norm().polymax().functionals.size();
  return m == r || r <= 1 || r == 2;
}

namespace {

VolumeReport monte_carlo_volume(const NormedModule& module, const VolumeOptions& opt) {
  if (opt.samples < 10'000) fail(ErrorCode::InvalidArgument, "monte-carlo volume needs >= 10^4 samples");
  const std::size_t r = module.rank();
  // Sample in an LLL-reduced basis: the change of basis is unimodular, so the
  // volume is unchanged and the enclosing box is far tighter for skewed balls.
  const NormSpec& base = module.norm().base();
  RationalMatrix data = module.is_ellipsoid() ? base.ellipsoid().gram : base.polymax().functionals;
  RationalMatrix form = data;
  if (!module.is_ellipsoid()) {
    form.assign(r, std::vector<Rational>(r, Rational(0)));
    for (const auto& row : data)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) form[i][j] += row[i] * row[j];
  }
  const auto basis = lll_reduce(form);
  data = module.is_ellipsoid() ? gram_in_basis(data, basis) : functionals_in_basis(data, basis);

  std::vector<double> half;  // real half-widths of a box around the base ball
  std::vector<std::vector<double>> rows;
  if (module.is_ellipsoid()) {
    auto inv = *inverse(data);
    for (std::size_t k = 0; k < r; ++k) half.push_back(std::sqrt(inv[k][k].get_d()) * (1 + 1e-12));
  } else {
    const auto widths = polytope_half_widths(data);
    for (const auto& h : *widths) half.push_back(h.get_d() * (1 + 1e-12));
  }
  for (const auto& row : data) {
    std::vector<double> d;
    for (const auto& x : row) d.push_back(x.get_d());
    rows.push_back(std::move(d));
  }

  const CounterRng rng(CounterRng::derive_key(opt.seed, module.digest()));
  const bool ellipsoid = module.is_ellipsoid();
  auto inside = [&](std::uint64_t i, std::vector<double>& x) {
    for (std::size_t k = 0; k < r; ++k)
      x[k] = half[k] * (2.0 * rng.uniform_at(i * r + k) - 1.0);
    if (ellipsoid) {
      double q = 0;
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) q += rows[a][b] * x[a] * x[b];
      return q <= 1.0;
    }
    for (const auto& row : rows) {
      double s = 0;
      for (std::size_t k = 0; k < r; ++k) s += row[k] * x[k];
      if (std::fabs(s) > 1.0) return false;
    }
    return true;
  };

  const unsigned threads = std::max(1u, opt.threads);
  std::vector<std::uint64_t> hits(threads, 0);
  auto work = [&](unsigned t) {
    std::vector<double> x(r);
    const std::uint64_t lo = opt.samples * t / threads, hi = opt.samples * (t + 1) / threads;
    for (std::uint64_t i = lo; i < hi; ++i) hits[t] += inside(i, x) ? 1 : 0;
  };
  run_workers(threads, work);
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  if (total == 0) fail(ErrorCode::Undecidable, "no monte-carlo sample landed in the ball");

  double box = 1.0;
  for (auto h : half) box *= 2.0 * h;
  const double n = static_cast<double>(opt.samples);
  const double p = static_cast<double>(total) / n;
  const double scale = std::exp(static_cast<double>(r) * module.alpha().get_d());
  VolumeReport rep;
  rep.method = VolumeMethod::MonteCarlo;
  rep.value = p * box * scale;
  rep.stderr_value = box * scale * std::sqrt(p * (1.0 - p) / n);
  rep.samples = opt.samples;
  return rep;
}

}  // namespace

VolumeReport ball_volume(const NormedModule& module, const VolumeOptions& options) {
  if (options.force_monte_carlo || !has_exact_volume(module)) return monte_carlo_volume(module, options);

  const std::size_t r = module.rank();
  const LogValue twist_term = LogValue::rational(module.alpha() * Rational(BigInt(r)));
  VolumeReport rep;
  LogValue log_vol;
  if (module.is_ellipsoid()) {
    rep.method = VolumeMethod::ExactEllipsoid;
    log_vol = log_unit_ball_volume(r) - LogValue::log_of(determinant(module.norm().ellipsoid().gram), Rational(1, 2));
  } else {
    const auto& f = module.norm().polymax().functionals;
    if (r == 0) {
      rep.method = VolumeMethod::ExactParallelepiped;
    } else if (r == 1) {
      rep.method = VolumeMethod::ExactParallelepiped;
      Rational widest = 0;
      for (const auto& row : f) widest = std::max(widest, abs_rational(row[0]));
      log_vol = LogValue::log_of(Rational(2) / widest);
    } else if (f.size() == r) {
      rep.method = VolumeMethod::ExactParallelepiped;
      BigInt two_pow = BigInt(1) << static_cast<unsigned>(r);
      log_vol = LogValue::log_of(Rational(two_pow) / abs_rational(determinant(f)));
    } else {
      rep.method = VolumeMethod::ExactPolygon;
      log_vol = LogValue::log_of(polygon_area(f));
    }
  }
  log_vol += twist_term;
  rep.value = std::exp(log_vol.approx());
  rep.exact_log = log_vol;
  return rep;
}

EulerCharacteristic euler_characteristic(const NormedModule& module, const VolumeOptions& options) {
  const VolumeReport vol = ball_volume(module, options);
  EulerCharacteristic chi;
  chi.method = vol.method;
  if (vol.exact_log) {
    chi.exact = vol.exact_log;
    chi.value = vol.exact_log->approx();
  } else {
    chi.value = std::log(vol.value);
    chi.stderr_value = vol.stderr_value / vol.value;
  }
  return chi;
}

}  // namespace latmin
