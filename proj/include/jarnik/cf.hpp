#pragma once

// Continued fractions: exact rationals and quadratic irrationals, the
// approximation constant c(x), the Cantor sets M_N of bounded quotients and
// an independent dimension oracle for them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "jarnik/common.hpp"

namespace jarnik::cf {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// "JARNIK1" read as a big-endian 7-byte integer.
inline constexpr std::uint64_t kDefaultSeed = 20900970033138481ULL;

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline BigInt floor_of(const Rational& r) {
  return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1) os << '/' << boost::multiprecision::denominator(r);
  return os.str();
}

/// Exact binary64 value as a rational.
inline Rational exact_rational(double x) {
  require(std::isfinite(x), "exact_rational: value must be finite");
  int e = 0;
  const double m = std::frexp(x, &e);
  const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  Rational r{BigInt(mant)};
  e -= 53;
  if (e >= 0) r *= Rational(BigInt(1) << e);
  else r /= Rational(BigInt(1) << -e);
  return r;
}

inline bool is_square(const BigInt& n) {
  if (n < 0) return false;
  const BigInt r = boost::multiprecision::sqrt(n);
  return r * r == n;
}

/// (a + b sqrt(d)) / c with c > 0 and d > 1 not a perfect square (square
/// factors up to 1000^2 are moved into b). Values
/// with b = 0 appear as intermediates and are exact rationals.
struct Quadratic {
  BigInt a, b, c{1}, d{2};

  Quadratic() = default;
  Quadratic(BigInt a_, BigInt b_, BigInt d_, BigInt c_)
      : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
    require(c != 0, "Quadratic: zero denominator");
    require(d > 1 && !is_square(d), "Quadratic: radicand must be a non-square integer > 1");
    // pull small square factors out of the radicand
    for (unsigned p = 2; p <= 1000 && BigInt(p * p) <= d; ++p)
      while (d % (p * p) == 0) {
        d /= p * p;
        b *= p;
      }
    normalize();
  }

  /// sqrt(d) shifted and scaled: (a + b sqrt d) / c.
  static Quadratic make(long long a_, long long b_, long long d_, long long c_) {
    return Quadratic(BigInt(a_), BigInt(b_), BigInt(d_), BigInt(c_));
  }

  void normalize() {
    if (c < 0) {
      a = -a;
      b = -b;
      c = -c;
    }
    BigInt g = boost::multiprecision::gcd(boost::multiprecision::gcd(a, b), c);
    if (g > 1) {
      a /= g;
      b /= g;
      c /= g;
    }
  }

  bool irrational() const { return b != 0; }

  /// Sign of the value.
  int sign() const {
    const int sa = a.sign(), sb = b.sign();
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    const BigInt lhs = a * a, rhs = b * b * d;
    if (lhs == rhs) return 0;
    return lhs > rhs ? sa : sb;
  }

  long double to_long_double() const {
    const long double sd = std::sqrt(static_cast<long double>(d));
    const long double la = static_cast<long double>(a), lb = static_cast<long double>(b),
                      lc = static_cast<long double>(c);
    if (a.sign() * b.sign() < 0) {
      // cancellation: (a^2 - b^2 d) / (a - b sqrt d)
      const long double num = static_cast<long double>(a * a - b * b * d);
      return num / ((la - lb * sd) * lc);
    }
    return (la + lb * sd) / lc;
  }
  double to_double() const { return static_cast<double>(to_long_double()); }

  Quadratic& operator+=(const Rational& r) {
    const auto& n = boost::multiprecision::numerator(r);
    const auto& m = boost::multiprecision::denominator(r);
    a = a * m + n * c;
    b *= m;
    c *= m;
    normalize();
    return *this;
  }
  Quadratic& operator-=(const Rational& r) { return *this += Rational(-r); }
  Quadratic& operator*=(const Rational& r) {
    a *= boost::multiprecision::numerator(r);
    b *= boost::multiprecision::numerator(r);
    c *= boost::multiprecision::denominator(r);
    require(c != 0, "Quadratic: zero denominator");
    normalize();
    return *this;
  }

  Quadratic reciprocal() const {
    Quadratic r = *this;
    r.a = c * a;
    r.b = -c * b;
    r.c = a * a - b * b * d;
    require(r.c != 0, "Quadratic: reciprocal of zero");
    r.normalize();
    return r;
  }

  Quadratic operator-(const Quadratic& o) const {
    require(d == o.d, "Quadratic: mismatched radicands");
    Quadratic r = *this;
    r.a = a * o.c - o.a * c;
    r.b = b * o.c - o.b * c;
    r.c = c * o.c;
    r.normalize();
    return r;
  }
  Quadratic operator+(const Rational& q) const {
    Quadratic r = *this;
    r += q;
    return r;
  }
  Quadratic operator-(const Rational& q) const {
    Quadratic r = *this;
    r -= q;
    return r;
  }
  Quadratic operator*(const Rational& q) const {
    Quadratic r = *this;
    r *= q;
    return r;
  }

  /// Sign of (this - r).
  int compare(const Rational& r) const { return (*this - r).sign(); }
  int compare(const Quadratic& o) const { return (*this - o).sign(); }

  BigInt floor() const {
    long double approx = std::floor(to_long_double());
    BigInt f(static_cast<long long>(approx));
    while (compare(Rational(f)) < 0) --f;
    while (compare(Rational(f + 1)) >= 0) ++f;
    return f;
  }

  bool operator==(const Quadratic& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
  bool operator<(const Quadratic& o) const {
    return std::tie(a, b, c, d) < std::tie(o.a, o.b, o.c, o.d);
  }

  std::string str() const {
    std::ostringstream os;
    os << '(' << a << (b < 0 ? " - " : " + ") << boost::multiprecision::abs(b) << "*sqrt(" << d
       << "))/" << c;
    return os.str();
  }
};

/// (sqrt 5 - 1) / 2 = [0; 1, 1, 1, ...].
inline Quadratic golden_conjugate() { return Quadratic::make(-1, 1, 5, 2); }

struct CfExpansion {
  BigInt a0;
  std::vector<BigInt> quotients;  ///< a_1 .. a_K
  bool exact = false;             ///< expansion of a rational that terminated

  std::size_t size() const { return quotients.size(); }
};

struct Convergent {
  BigInt p, q;
};

/// p_k / q_k for k = 0..K from the standard recurrence.
inline std::vector<Convergent> convergents(const CfExpansion& e) {
  std::vector<Convergent> out;
  BigInt pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
  auto push = [&](const BigInt& a) {
    BigInt p = a * pm1 + pm2, q = a * qm1 + qm2;
    pm2 = pm1;
    pm1 = p;
    qm2 = qm1;
    qm1 = q;
    out.push_back({p, q});
  };
  push(e.a0);
  for (const auto& a : e.quotients) push(a);
  return out;
}

/// Exact expansion of a rational; the final quotient is >= 2 unless x is an integer.
inline CfExpansion cf_expand(const Rational& x) {
  CfExpansion e;
  e.exact = true;
  e.a0 = floor_of(x);
  Rational y = x - Rational(e.a0);
  while (y != 0) {
    y = Rational(1) / y;
    const BigInt a = floor_of(y);
    e.quotients.push_back(a);
    y -= Rational(a);
  }
  return e;
}

/// First K quotients of the exact binary64 value (K <= 30).
inline CfExpansion cf_expand(double x, std::size_t K) {
  require(K <= 30, "cf_expand: binary64 input supports at most 30 quotients");
  const Rational r = exact_rational(x);
  CfExpansion full = cf_expand(r);
  if (full.quotients.size() > K) {
    full.quotients.resize(K);
    full.exact = false;
  } else {
    full.exact = false;  // binary64 stands in for a real number; the expansion is a prefix
  }
  return full;
}

/// First K quotients of a quadratic irrational, exact.
inline CfExpansion cf_expand(const Quadratic& x, std::size_t K) {
  require(x.irrational(), "cf_expand: quadratic input must be irrational");
  CfExpansion e;
  e.a0 = x.floor();
  Quadratic y = x - Rational(e.a0);
  for (std::size_t i = 0; i < K; ++i) {
    y = y.reciprocal();
    const BigInt a = y.floor();
    e.quotients.push_back(a);
    y -= Rational(a);
  }
  return e;
}

/// Complete quotients x_0, x_1, ... with their partial quotients, plus the
/// eventual period (start s, length P with x_{n+P} = x_n for n >= s).
struct QuadraticOrbit {
  std::vector<Quadratic> complete;  ///< x_n = [a_n; a_{n+1}, ...]
  std::vector<BigInt> a;            ///< a_n = floor(x_n)
  std::size_t period_start = 0;
  std::size_t period = 0;           ///< 0 when not detected within the cap
};

inline QuadraticOrbit quadratic_orbit(const Quadratic& x, std::size_t cap = 20000) {
  require(x.irrational(), "quadratic_orbit: input must be irrational");
  QuadraticOrbit o;
  std::map<Quadratic, std::size_t> seen;
  Quadratic y = x;
  for (std::size_t n = 0; n < cap; ++n) {
    if (n > 0) {
      auto it = seen.find(y);
      if (it != seen.end()) {
        o.period_start = it->second;
        o.period = n - it->second;
        return o;
      }
      seen.emplace(y, n);
    }
    o.complete.push_back(y);
    o.a.push_back(y.floor());
    y = (y - Rational(o.a.back())).reciprocal();
  }
  return o;
}

/// Purely periodic [0; block, block, ...] with quotients >= 1.
inline Quadratic periodic_quadratic(const std::vector<int>& block) {
  require(!block.empty(), "periodic_quadratic: empty block");
  for (int v : block) require(v >= 1, "periodic_quadratic: quotients must be positive");
  // y = [block; y] solves q_L y^2 + (q_{L-1} - p_L) y - p_{L-1} = 0
  BigInt pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
  for (int v : block) {
    BigInt p = v * pm1 + pm2, q = v * qm1 + qm2;
    pm2 = pm1;
    pm1 = p;
    qm2 = qm1;
    qm1 = q;
  }
  const BigInt pL = pm1, pL1 = pm2, qL = qm1, qL1 = qm2;
  const BigInt disc = (qL1 - pL) * (qL1 - pL) + 4 * qL * pL1;
  const Quadratic y(pL - qL1, BigInt(1), disc, 2 * qL);
  return y.reciprocal();
}

struct MembershipVerdict {
  bool member = false;
  bool prefix_only = false;  ///< verdict covers only the available prefix
};

inline MembershipVerdict mn_membership(const CfExpansion& e, long long N) {
  require(N >= 1, "mn_membership: N must be positive");
  require(!e.quotients.empty() || e.exact, "mn_membership: empty expansion");
  MembershipVerdict v{true, !e.exact};
  for (const auto& a : e.quotients)
    if (a > N) v.member = false;
  return v;
}

struct ApproxConstant {
  double value = 0.0;           ///< q^2 |x - p/q| at the witness
  Rational witness;             ///< p/q
  long long q_max_searched = 0;
  bool tail_bound_valid = false;
  double lower_bound = 0.0;     ///< certified lower bound on c(x); 0 when unknown
};

inline ApproxConstant approx_constant(const Rational& x, long long q_max) {
  require(q_max >= 1, "approx_constant: q_max must be positive");
  ApproxConstant r;
  r.witness = x;
  r.q_max_searched = q_max;
  r.tail_bound_valid = true;
  return r;
}

/// Brute force over q <= q_max in long double; no tail certificate.
inline ApproxConstant approx_constant(double x, long long q_max) {
  require(q_max >= 1, "approx_constant: q_max must be positive");
  require(std::isfinite(x), "approx_constant: x must be finite");
  const long double lx = x;
  long double best = std::numeric_limits<long double>::infinity();
  long long bp = 0, bq = 1;
  for (long long q = 1; q <= q_max; ++q) {
    const long double v = lx * q;
    const long double p = std::nearbyint(v);
    const long double val = q * std::fabs(v - p);
    if (val < best) {
      best = val;
      bp = static_cast<long long>(p);
      bq = q;
    }
  }
  ApproxConstant r;
  r.value = static_cast<double>(best);
  r.witness = Rational(BigInt(bp), BigInt(bq));
  r.q_max_searched = q_max;
  return r;
}

/// q^2 |x - p/q| as an exact quadratic.
inline Quadratic scaled_error(const Quadratic& x, const BigInt& p, const BigInt& q) {
  Quadratic v = (x * Rational(q) - Rational(p)) * Rational(q);
  if (v.sign() < 0) v *= Rational(-1);
  return v;
}

namespace detail {

/// [0; b_1, ..., b_m] as a rational.
inline Rational finite_cf_tail(const std::vector<BigInt>& b) {
  Rational v = 0;
  for (std::size_t i = b.size(); i-- > 0;) v = Rational(1) / (Rational(b[i]) + v);
  return v;
}

}  // namespace detail

/// Exact search: brute force over q <= q_max (long double screening, exact
/// comparison of the near-minimal candidates), then every convergent up to
/// the periodic regime exactly, then a per-period-class lower bound
/// 1 / (x_{n+1} + U) with U >= q_{n-1}/q_n for the remaining convergents.
/// Any p/q beating a value below 1/2 is a convergent, so the bound certifies
/// the infimum whenever it is not smaller than the best value found.
inline ApproxConstant approx_constant(const Quadratic& x, long long q_max) {
  require(q_max >= 1, "approx_constant: q_max must be positive");
  require(x.irrational(), "approx_constant: quadratic input must be irrational");
  const long double lx = x.to_long_double();
  std::vector<std::pair<long double, std::pair<long long, long long>>> screen;
  long double best_ld = std::numeric_limits<long double>::infinity();
  for (long long q = 1; q <= q_max; ++q) {
    const long double v = lx * q;
    const long double fl = std::floor(v);
    for (long double p : {fl, fl + 1}) {
      const long double val = q * std::fabs(v - p);
      if (val < best_ld + 1e-9L) {
        best_ld = std::min(best_ld, val);
        screen.push_back({val, {static_cast<long long>(p), q}});
      }
    }
  }
  std::optional<Quadratic> best;
  BigInt bp, bq;
  auto consider = [&](const BigInt& p, const BigInt& q) {
    const Quadratic v = scaled_error(x, p, q);
    if (!best || v.compare(*best) < 0 || (v.compare(*best) == 0 && q < bq)) {
      best = v;
      bp = p;
      bq = q;
    }
  };
  for (const auto& [val, pq] : screen)
    if (val <= best_ld + 1e-9L) consider(BigInt(pq.first), BigInt(pq.second));

  ApproxConstant r;
  r.q_max_searched = q_max;
  const auto orbit = quadratic_orbit(x);
  if (orbit.period > 0) {
    const std::size_t s = orbit.period_start, P = orbit.period;
    auto a_at = [&](std::size_t n) -> const BigInt& {
      return n < orbit.a.size() ? orbit.a[n] : orbit.a[s + (n - s) % P];
    };
    auto x_at = [&](std::size_t n) -> const Quadratic& {
      return n < orbit.complete.size() ? orbit.complete[n] : orbit.complete[s + (n - s) % P];
    };
    // convergents with running p_n, q_n
    std::vector<BigInt> ps, qs;
    BigInt pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
    auto extend_to = [&](std::size_t n) {
      while (ps.size() <= n) {
        const BigInt& an = a_at(ps.size());
        BigInt p = an * pm1 + pm2, q = an * qm1 + qm2;
        pm2 = pm1;
        pm1 = p;
        qm2 = qm1;
        qm1 = q;
        ps.push_back(p);
        qs.push_back(q);
      }
    };
    std::size_t explicit_upto = 0;
    for (std::size_t m = 1; m <= 4 * P + 9; m += 2) {
      const std::size_t n0 = std::max<std::size_t>(s + m - 1, 1);
      extend_to(n0 + P);
      for (; explicit_upto < n0; ++explicit_upto)
        if (qs[explicit_upto] > q_max) consider(ps[explicit_upto], qs[explicit_upto]);
      std::optional<Quadratic> tail;
      for (std::size_t n = n0; n < n0 + P; ++n) {
        std::vector<BigInt> rev;
        for (std::size_t i = 0; i < m; ++i) rev.push_back(a_at(n - i));
        const Quadratic bound = (x_at(n + 1) + detail::finite_cf_tail(rev)).reciprocal();
        if (!tail || bound.compare(*tail) < 0) tail = bound;
      }
      const Quadratic lb = (tail->compare(*best) < 0) ? *tail : *best;
      r.lower_bound = lb.to_double();
      if (tail->compare(*best) >= 0) {
        r.tail_bound_valid = true;
        break;
      }
    }
  }
  r.value = best->to_double();
  r.witness = Rational(bp, bq);
  return r;
}

/// Checks 1/((a_{n+1}+2) q_n^2) < |x - p_n/q_n| < 1/(a_{n+1} q_n^2) exactly
/// for n = 0..count-1; returns the number of violations.
inline std::size_t convergent_sandwich_violations(const Quadratic& x, std::size_t count) {
  const auto e = cf_expand(x, count + 1);
  const auto conv = convergents(e);
  std::size_t bad = 0;
  for (std::size_t n = 0; n < count; ++n) {
    const Quadratic v = scaled_error(x, conv[n].p, conv[n].q);
    const BigInt& next = e.quotients[n];
    if (!(v.compare(Rational(BigInt(1), next + 2)) > 0)) ++bad;
    if (!(v.compare(Rational(BigInt(1), next)) < 0)) ++bad;
  }
  return bad;
}

// ------------------------------------------------------------- dim M_N oracle

struct MnDimension {
  double value = 0.0;     ///< s_k at the requested depth
  double lower = 0.0;     ///< min(s_{k-1}, s_k)
  double upper = 0.0;     ///< max(s_{k-1}, s_k)
  double residual = 0.0;  ///< |Z_k(s)/Z_{k-1}(s) - 1| at the returned s
  unsigned depth = 0;
  double width() const { return upper - lower; }
};

inline constexpr double kMnCylinderBudget = 1e7;

/// Largest depth with N^depth <= 1e7.
inline unsigned default_mn_depth(long long N) {
  require(N >= 1, "default_mn_depth: N must be positive");
  if (N == 1) return 24;
  unsigned k = 0;
  double c = 1.0;
  while (c * static_cast<double>(N) <= kMnCylinderBudget) {
    c *= static_cast<double>(N);
    ++k;
  }
  return k;
}

namespace detail {

struct MnSums {
  double zk = 0.0, zk1 = 0.0;    ///< Z_k(s), Z_{k-1}(s)
  double dk = 0.0, dk1 = 0.0;    ///< their derivatives in s
};

/// Z_k(s) and Z_{k-1}(s) over cylinders [a_1..a_k] with a_i <= N, where
/// |I_w| = 1 / (q_k (q_k + q_{k-1})). Summed per first quotient, then in order.
inline MnSums mn_sums(long long N, unsigned k, double s, unsigned workers) {
  std::vector<MnSums> part(static_cast<std::size_t>(N));
  parallel_for(static_cast<std::size_t>(N), workers, [&](std::size_t i) {
    struct Frame {
      double q, qprev;
      unsigned level;
    };
    MnSums m;
    std::vector<Frame> stack;
    stack.push_back({static_cast<double>(i + 1), 1.0, 1});
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      if (f.level + 1 < k) {
        for (long long a = N; a >= 1; --a) stack.push_back({a * f.q + f.qprev, f.q, f.level + 1});
        continue;
      }
      const double len_log = std::log(f.q * (f.q + f.qprev));
      const double w = std::exp(-s * len_log);
      if (f.level == k) {
        m.zk += w;
        m.dk -= len_log * w;
        continue;
      }
      // level k-1: record it and expand its children inline
      m.zk1 += w;
      m.dk1 -= len_log * w;
      for (long long a = 1; a <= N; ++a) {
        const double q = a * f.q + f.qprev;
        const double l = std::log(q * (q + f.q));
        const double v = std::exp(-s * l);
        m.zk += v;
        m.dk -= l * v;
      }
    }
    part[i] = m;
  });
  MnSums out;
  for (const auto& m : part) {
    out.zk += m.zk;
    out.dk += m.dk;
    out.zk1 += m.zk1;
    out.dk1 += m.dk1;
  }
  if (k == 1) {  // Z_0 = |[0,1]|^s
    out.zk1 = 1.0;
    out.dk1 = 0.0;
  }
  return out;
}

/// Root of log Z_k(s) - log Z_{k-1}(s) on [0, 1]: Newton steps kept inside a
/// shrinking bisection bracket.
inline std::pair<double, double> mn_solve(long long N, unsigned k, unsigned workers) {
  double lo = 0.0, hi = 1.0;
  {
    const auto m = mn_sums(N, k, 0.0, workers);
    if (std::log(m.zk) - std::log(m.zk1) <= 0.0) return {0.0, 0.0};
  }
  double s = 0.9;
  for (int it = 0; it < 200; ++it) {
    const auto m = mn_sums(N, k, s, workers);
    const double f = std::log(m.zk) - std::log(m.zk1);
    const double fp = m.dk / m.zk - m.dk1 / m.zk1;
    if (std::fabs(m.zk / m.zk1 - 1.0) <= 1e-13 || hi - lo <= 1e-15) break;
    (f > 0.0 ? lo : hi) = s;
    double next = (fp < 0.0) ? s - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == s) break;
    s = next;
  }
  const auto m = mn_sums(N, k, s, workers);
  return {s, std::fabs(m.zk / m.zk1 - 1.0)};
}

}  // namespace detail

/// dim(M_N) from the pressure ratio Z_k(s) = Z_{k-1}(s), bracketed by the
/// solutions at depths k-1 and k.
inline MnDimension dim_mn_oracle(long long N, unsigned depth, unsigned workers = 1) {
  require(N >= 1, "dim_mn_oracle: N must be positive");
  require(depth >= 2, "dim_mn_oracle: depth must be at least 2");
  require(std::pow(static_cast<double>(N), depth) <= kMnCylinderBudget,
          "dim_mn_oracle: N^depth exceeds the cylinder budget 1e7");
  MnDimension out;
  out.depth = depth;
  if (N == 1) return out;
  const auto [sk, res] = detail::mn_solve(N, depth, workers);
  const auto [sk1, res1] = detail::mn_solve(N, depth - 1, workers);
  (void)res1;
  out.value = sk;
  out.residual = res;
  out.lower = std::min(sk, sk1);
  out.upper = std::max(sk, sk1);
  return out;
}

inline MnDimension dim_mn_oracle(long long N) { return dim_mn_oracle(N, default_mn_depth(N)); }

// ------------------------------------------------------------- Jarnik bounds

enum class LogBase { Natural, Two };

struct JarnikBounds {
  double lower, upper;
};

/// 1 - 4/(N log 2) <= dim M_N <= 1 - 1/(8 N log N), for N > 8.
inline JarnikBounds jarnik_bounds_thm11(long long N, LogBase base = LogBase::Natural) {
  require(N > 8, "jarnik_bounds: N must exceed 8");
  const double n = static_cast<double>(N);
  const double log2v = base == LogBase::Natural ? std::log(2.0) : 1.0;
  const double logn = base == LogBase::Natural ? std::log(n) : std::log2(n);
  return {1.0 - 4.0 / (n * log2v), 1.0 - 1.0 / (8.0 * n * logn)};
}

// ------------------------------------------------------- M_N bracket samples

struct BracketRow {
  std::string description;
  std::vector<int> block;
  double value = 0.0;
  double lower_bound = 0.0;
  bool certified = false;
  bool in_mn = false;
  bool ok = true;
};

struct BracketReport {
  long long N = 0;
  std::vector<BracketRow> rows;
  std::size_t violations = 0;
  std::size_t certified_rows = 0;
};

inline std::string block_description(const std::vector<int>& block) {
  std::string s = "[0; (";
  for (std::size_t i = 0; i < block.size(); ++i) s += (i ? "," : "") + std::to_string(block[i]);
  return s + ")^inf]";
}

/// Sampled check of M_N in Bad(1/(N+2)) in M_{N+2}: quadratic irrationals
/// with uniform periodic quotients in {1..N} must have c(x) >= 1/(N+2);
/// those with quotients up to N+4 and certified c(x) >= 1/(N+2) must lie in
/// M_{N+2}.
inline BracketReport footnote1_bracket(long long N, std::size_t samples = 100,
                                       std::size_t period = 25, long long q_max = 1000,
                                       std::uint64_t seed = kDefaultSeed) {
  require(N >= 1, "footnote1_bracket: N must be positive");
  require(period >= 1, "footnote1_bracket: period must be positive");
  BracketReport rep;
  rep.N = N;
  std::mt19937_64 rng(seed);
  const Rational kappa(BigInt(1), BigInt(N + 2));
  auto run = [&](long long top, bool forward) {
    std::uniform_int_distribution<int> digit(1, static_cast<int>(top));
    for (std::size_t i = 0; i < samples; ++i) {
      BracketRow row;
      const std::size_t len = forward ? period : 1 + i % 4;
      for (std::size_t j = 0; j < len; ++j) row.block.push_back(digit(rng));
      row.description = block_description(row.block);
      const auto x = periodic_quadratic(row.block);
      const auto ac = approx_constant(x, q_max);
      row.value = ac.value;
      row.lower_bound = ac.lower_bound;
      row.certified = ac.tail_bound_valid;
      row.in_mn = *std::max_element(row.block.begin(), row.block.end()) <= N + 2;
      if (forward) {
        row.ok = ac.lower_bound >= 1.0 / static_cast<double>(N + 2) - 1e-12;
      } else {
        const bool certified_bad = ac.tail_bound_valid &&
                                   ac.lower_bound >= 1.0 / static_cast<double>(N + 2);
        if (certified_bad) ++rep.certified_rows;
        row.ok = !certified_bad || row.in_mn;
      }
      if (!row.ok) ++rep.violations;
      rep.rows.push_back(std::move(row));
    }
  };
  run(N, true);
  run(N + 4, false);
  return rep;
}

// -------------------------------------------------------------- spectrum

enum class SpectrumSource { Random, Quadratic };

struct SpectrumSample {
  std::string description;
  double value = 0.0;
  Rational witness;
  bool certified = false;
  bool in_unit_half = true;  ///< value within [0, 1/2]; a flag, not an assertion
};

inline std::vector<SpectrumSample> sample_spectrum(std::size_t num_points, long long q_max,
                                                   SpectrumSource source,
                                                   std::uint64_t seed = kDefaultSeed) {
  require(q_max >= 1, "sample_spectrum: q_max must be positive");
  std::vector<SpectrumSample> out;
  std::mt19937_64 rng(seed);
  auto push = [&](std::string desc, const ApproxConstant& ac) {
    SpectrumSample s{std::move(desc), ac.value, ac.witness, ac.tail_bound_valid, true};
    s.in_unit_half = s.value >= 0.0 && s.value <= 0.5;
    out.push_back(std::move(s));
  };
  if (source == SpectrumSource::Random) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < num_points; ++i) {
      const double x = u(rng);
      std::ostringstream os;
      os << std::setprecision(17) << x;
      push(os.str(), approx_constant(x, q_max));
    }
    return out;
  }
  const std::vector<std::vector<int>> fixed{{1}, {2}};
  for (std::size_t i = 0; i < num_points; ++i) {
    std::vector<int> block;
    if (i < fixed.size()) {
      block = fixed[i];
    } else {
      std::uniform_int_distribution<int> len(1, 4), digit(1, 6);
      const int L = len(rng);
      for (int j = 0; j < L; ++j) block.push_back(digit(rng));
    }
    push(block_description(block), approx_constant(periodic_quadratic(block), q_max));
  }
  return out;
}

inline void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumSample>& samples) {
  os << "x_description,c_value,witness_p,witness_q\n";
  for (const auto& s : samples)
    os << '"' << s.description << "\"," << std::setprecision(9) << s.value << ','
       << boost::multiprecision::numerator(s.witness) << ','
       << boost::multiprecision::denominator(s.witness) << '\n';
}

}  // namespace jarnik::cf
