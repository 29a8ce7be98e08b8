#pragma once

// Weighted badly approximable vectors: rational resonant points with
// rectangle neighbourhoods, the Dirichlet and Simplex lemmas as exact
// checks, the explicit-constant dimension bounds and two cover instances.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "jarnik/cf.hpp"
#include "jarnik/common.hpp"
#include "jarnik/cover_engine.hpp"
#include "jarnik/framework.hpp"

namespace jarnik::euclid {

using cf::BigInt;
using cf::Rational;

namespace detail {

inline Rational rpow(Rational base, unsigned e) {
  Rational out = 1;
  while (e) {
    if (e & 1U) out *= base;
    base *= base;
    e >>= 1U;
  }
  return out;
}

inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      if (s.find_first_of(".eE") != std::string::npos) return cf::exact_rational(std::stod(s));
      return Rational(BigInt(s));
    }
    const BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
    require(den != 0, "parse_rational: zero denominator");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw domain_error("parse_rational: cannot parse '" + s + "'");
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const domain_error*>(&e)) throw;
    throw domain_error("parse_rational: cannot parse '" + s + "'");
  }
}

inline long double to_ld(const Rational& r) {
  return static_cast<long double>(boost::multiprecision::numerator(r)) /
         static_cast<long double>(boost::multiprecision::denominator(r));
}

}  // namespace detail

/// Weights r_1..r_n > 0 with sum exactly 1.
struct WeightVector {
  std::vector<Rational> r;

  WeightVector() = default;
  explicit WeightVector(std::vector<Rational> w) : r(std::move(w)) { validate(); }

  static WeightVector uniform(std::size_t n) {
    require(n >= 1, "WeightVector: dimension must be positive");
    return WeightVector(std::vector<Rational>(n, Rational(1, static_cast<long long>(n))));
  }

  /// Comma-separated list of "a/b" or decimal entries.
  static WeightVector parse(const std::string& s) {
    std::vector<Rational> w;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(detail::parse_rational(item));
    return WeightVector(std::move(w));
  }

  void validate() const {
    require(!r.empty(), "WeightVector: dimension must be positive");
    Rational sum = 0;
    for (const auto& v : r) {
      require(v > 0, "WeightVector: weights must be positive");
      sum += v;
    }
    require(sum == 1, "WeightVector: weights must sum to 1");
  }

  std::size_t n() const { return r.size(); }
  double value(std::size_t i) const { return static_cast<double>(detail::to_ld(r[i])); }
  double r_plus() const { return static_cast<double>(detail::to_ld(*std::max_element(r.begin(), r.end()))); }
  double r_minus() const { return static_cast<double>(detail::to_ld(*std::min_element(r.begin(), r.end()))); }
  std::vector<double> sigma() const {
    std::vector<double> s;
    for (std::size_t i = 0; i < n(); ++i) s.push_back(1.0 + value(i));
    return s;
  }
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < n(); ++i) s += (i ? "," : "") + cf::to_string(r[i]);
    return s;
  }
};

/// p/q with size s = log(q + 1).
struct RationalPoint {
  std::vector<std::int64_t> p;
  std::int64_t q = 1;

  double size() const { return std::log(static_cast<double>(q) + 1.0); }
  Rational coord(std::size_t i) const { return Rational(p[i], q); }
  bool operator<(const RationalPoint& o) const { return std::tie(q, p) < std::tie(o.q, o.p); }
  bool operator==(const RationalPoint& o) const { return q == o.q && p == o.p; }
  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
    return s + ")/" + std::to_string(q);
  }
};

/// Lowest-terms representative of a rational vector.
inline RationalPoint reduced(RationalPoint x) {
  std::int64_t g = x.q;
  for (auto v : x.p) g = std::gcd(g, v);
  if (g > 1) {
    x.q /= g;
    for (auto& v : x.p) v /= g;
  }
  return x;
}

// ------------------------------------------------------------ constants

struct Thm31Constants {
  std::size_t n = 1;
  double r_plus = 1.0;
  double r_minus = 1.0;
  double d_star = 0.0;
  double l_star = 0.0;
  double u_star = 0.0;  ///< u_c = c / r_minus + u_star
  double c_n = 4.0;
  double delta = 2.0;

  double u_c(double c) const { return c / r_minus + u_star; }
};

/// Default hyperplane-decay constant for Lebesgue measure.
inline double default_c_n(std::size_t n) { return std::pow(4.0, static_cast<double>(n)); }

inline Thm31Constants thm31_constants(const WeightVector& r, std::optional<double> c_n = {}) {
  r.validate();
  Thm31Constants k;
  k.n = r.n();
  k.r_plus = r.r_plus();
  k.r_minus = r.r_minus();
  const double nd = static_cast<double>(k.n);
  k.d_star = std::log(3.0) / (1.0 + k.r_minus);
  k.l_star = std::lgamma(nd + 1.0) / (nd + 1.0) + nd * std::log(2.0) / (nd + 1.0) + k.d_star;
  k.u_star = (1.0 + k.r_plus) * 2.0 * std::log(2.0) / k.r_minus;
  k.c_n = c_n.value_or(default_c_n(k.n));
  require(k.c_n > 0.0, "thm31_constants: c_n must be positive");
  k.delta = 1.0 + k.r_minus;
  return k;
}

/// A bound together with the approximation radius it describes.
struct Bound {
  double value = 0.0;
  double deficit = 0.0;  ///< n (or d_mu) minus value
  double applicable_radius = 0.0;
  double c0 = 0.0;  ///< bound requires c > c0
  double c_n = 0.0;
  std::string label;
};

/// n - |log(1 - 18 c_n e^{-(1+r_-)c})| / ((1+r_-) c), describing Bad(e^{-(2c+l_*+d_*)}/2).
inline Bound thm31_lower(const WeightVector& r, double c, std::optional<double> c_n = {}) {
  const auto k = thm31_constants(r, c_n);
  Bound b;
  b.label = "lebesgue-18cn";
  b.c_n = k.c_n;
  b.c0 = std::log(18.0 * k.c_n) / k.delta;
  require(c > b.c0, "thm31_lower: need c > c0 = " + std::to_string(b.c0));
  const double a = 18.0 * k.c_n * std::exp(-k.delta * c);
  b.deficit = -std::log1p(-a) / (k.delta * c);
  b.value = static_cast<double>(k.n) - b.deficit;
  b.applicable_radius = 0.5 * std::exp(-(2.0 * c + k.l_star + k.d_star));
  return b;
}

/// Same shape with the decay constant from the proof, c_n e^{2(1+r_-)d_*}.
inline Bound thm31_lower_proof_constant(const WeightVector& r, double c,
                                        std::optional<double> c_n = {}) {
  const auto k = thm31_constants(r, c_n);
  Bound b;
  b.label = "lebesgue-proof-display";
  b.c_n = k.c_n;
  const double pre = k.c_n * std::exp(2.0 * k.delta * k.d_star);
  b.c0 = std::log(pre) / k.delta;
  require(c > b.c0, "thm31_lower_proof_constant: need c > c0 = " + std::to_string(b.c0));
  b.deficit = -std::log1p(-pre * std::exp(-k.delta * c)) / (k.delta * c);
  b.value = static_cast<double>(k.n) - b.deficit;
  b.applicable_radius = 0.5 * std::exp(-(2.0 * c + k.l_star + k.d_star));
  return b;
}

/// n - |log(1 - 3^{-(n+1)(1+r_-)} e^{-(n+1)(c+u_c)} / 8)| / ((1+r_+)(c+u_c+2d_*)), describing Bad(e^{-c}).
inline Bound thm31_upper(const WeightVector& r, double c) {
  const auto k = thm31_constants(r);
  Bound b;
  b.label = "lebesgue-upper";
  b.c_n = k.c_n;
  b.c0 = 0.0;
  require(c > b.c0, "thm31_upper: need c > 0");
  const double np1 = static_cast<double>(k.n) + 1.0;
  const double uc = k.u_c(c);
  const double log_a = -std::log(8.0) - np1 * k.delta * std::log(3.0) - np1 * (c + uc);
  b.deficit = -std::log1p(-std::exp(log_a)) / ((1.0 + k.r_plus) * (c + uc + 2.0 * k.d_star));
  b.value = static_cast<double>(k.n) - b.deficit;
  b.applicable_radius = std::exp(-c);
  return b;
}

/// d_mu - (log 2 + 2 log(c2/c1) + 2 tau d_* + |log(1 - c_delta e^{2 delta d_*} e^{-delta c})|) / ((1+r_-) c),
/// describing Bad(e^{-(2c+l_*)}/2) intersected with the support.
inline Bound general_lower_thm31(double d_mu, const framework::PowerLaw& pl, double delta,
                                 double c_delta, const WeightVector& r, double c) {
  pl.validate();
  require(delta > 0.0 && c_delta > 0.0, "general_lower_thm31: delta and c_delta must be positive");
  const auto k = thm31_constants(r);
  Bound b;
  b.label = "general-support";
  b.c0 = std::log(c_delta) / delta + 2.0 * k.d_star;
  require(c > b.c0, "general_lower_thm31: need c > log(c_delta)/delta + 2 d_* = " + std::to_string(b.c0));
  const double inner = -std::log1p(-c_delta * std::exp(2.0 * delta * k.d_star - delta * c));
  b.deficit = (std::log(2.0) + 2.0 * std::log(pl.c2 / pl.c1) + 2.0 * pl.tau * k.d_star + inner) /
              (k.delta * c);
  b.value = d_mu - b.deficit;
  b.applicable_radius = 0.5 * std::exp(-(2.0 * c + k.l_star));
  return b;
}

// -------------------------------------------------------- Dirichlet lemma

/// |q x - p| <= N^{-r} exactly, as |q x - p|^b N^a <= 1 for r = a/b.
inline bool dirichlet_holds(const Rational& x, std::int64_t p, std::int64_t q, std::int64_t N,
                            const Rational& r) {
  Rational e = x * q - p;
  if (e < 0) e = -e;
  const auto a = static_cast<unsigned>(boost::multiprecision::numerator(r));
  const auto b = static_cast<unsigned>(boost::multiprecision::denominator(r));
  return detail::rpow(e, b) * detail::rpow(Rational(N), a) <= 1;
}

struct DirichletWitness {
  RationalPoint point;
  std::vector<long double> errors;  ///< |x_i - p_i/q|
  long double score = 0.0L;         ///< max_i q N^{r_i} |x_i - p_i/q|
  std::size_t candidates = 0;       ///< q values satisfying the inequality
};

/// Exhaustive search over q <= N; among all q that work, the one with the
/// smallest normalised error, ties to the smaller q.
inline DirichletWitness dirichlet_witness_lem35(const std::vector<Rational>& x, const WeightVector& r,
                                                std::int64_t N) {
  require(N >= 1, "dirichlet_witness: N must be positive");
  require(x.size() == r.n(), "dirichlet_witness: dimension mismatch");
  std::optional<DirichletWitness> best;
  std::size_t good = 0;
  for (std::int64_t q = 1; q <= N; ++q) {
    RationalPoint pt;
    pt.q = q;
    bool ok = true;
    long double score = 0.0L;
    std::vector<long double> errs;
    for (std::size_t i = 0; i < x.size() && ok; ++i) {
      const Rational qx = x[i] * q;
      const BigInt p = cf::floor_of(qx + Rational(1, 2));
      const auto pi = static_cast<std::int64_t>(p);
      pt.p.push_back(pi);
      ok = dirichlet_holds(x[i], pi, q, N, r.r[i]);
      const long double e = fabsl(detail::to_ld(qx - pi));
      errs.push_back(e / static_cast<long double>(q));
      score = std::max(score, e * std::pow(static_cast<long double>(N), static_cast<long double>(r.value(i))));
    }
    if (!ok) continue;
    ++good;
    if (!best || score < best->score) best = DirichletWitness{pt, errs, score, 0};
  }
  if (!best) throw std::logic_error("dirichlet_witness: no q <= N satisfies the inequality");
  best->candidates = good;
  return *best;
}

// ---------------------------------------------------------- Simplex lemma

struct SimplexResult {
  std::vector<std::vector<Rational>> points;  ///< distinct rationals with q <= k in the box
  std::size_t affine_rank = 0;
  bool on_hyperplane = true;
  std::vector<Rational> normal;  ///< normal . x = offset holds for every point
  Rational offset = 0;
  std::vector<std::vector<Rational>> counterexample;  ///< n+1 affinely independent points
};

inline Rational simplex_volume_bound(std::size_t n, std::int64_t k) {
  BigInt den = 1;
  for (std::size_t i = 2; i <= n; ++i) den *= static_cast<long long>(i);
  for (std::size_t i = 0; i <= n; ++i) den *= (k + 1);
  return Rational(BigInt(1), den);
}

/// All rationals p/q (q <= k) in the closed box [lo, hi] lie on one affine hyperplane.
inline SimplexResult simplex_check_lem33(const std::vector<Rational>& lo, const std::vector<Rational>& hi,
                                         std::int64_t k) {
  const std::size_t n = lo.size();
  require(n >= 1 && hi.size() == n, "simplex_check: dimension mismatch");
  require(k >= 1, "simplex_check: k must be positive");
  Rational vol = 1;
  for (std::size_t i = 0; i < n; ++i) {
    require(lo[i] <= hi[i], "simplex_check: empty box");
    vol *= hi[i] - lo[i];
  }
  require(vol < simplex_volume_bound(n, k), "simplex_check: box violates rho_1...rho_n < 1/(n!(k+1)^(n+1))");

  std::set<std::vector<Rational>> found;
  for (std::int64_t q = 1; q <= k; ++q) {
    std::vector<std::pair<BigInt, BigInt>> range(n);
    bool empty = false;
    for (std::size_t i = 0; i < n; ++i) {
      range[i] = {-cf::floor_of(-lo[i] * q), cf::floor_of(hi[i] * q)};
      empty = empty || range[i].first > range[i].second;
    }
    if (empty) continue;
    std::vector<BigInt> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = range[i].first;
    while (true) {
      std::vector<Rational> pt(n);
      for (std::size_t i = 0; i < n; ++i) pt[i] = Rational(p[i], BigInt(q));
      found.insert(pt);
      std::size_t i = n;
      while (i-- > 0) {
        if (++p[i] <= range[i].second) break;
        p[i] = range[i].first;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }

  SimplexResult res;
  res.points.assign(found.begin(), found.end());
  res.normal.assign(n, Rational(0));
  if (res.points.empty()) {
    res.normal[0] = 1;
    res.offset = lo[0];
    return res;
  }
  // row-reduce the differences P_j - P_0
  const auto& p0 = res.points[0];
  std::vector<std::vector<Rational>> rows;
  std::vector<std::size_t> origin;
  for (std::size_t j = 1; j < res.points.size(); ++j) {
    std::vector<Rational> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = res.points[j][i] - p0[i];
    rows.push_back(d);
    origin.push_back(j);
  }
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    std::swap(origin[piv], origin[rank]);
    const Rational inv = 1 / rows[rank][col];
    for (auto& v : rows[rank]) v *= inv;
    for (std::size_t r2 = 0; r2 < rows.size(); ++r2) {
      if (r2 == rank || rows[r2][col] == 0) continue;
      const Rational f = rows[r2][col];
      for (std::size_t i = 0; i < n; ++i) rows[r2][i] -= f * rows[rank][i];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  res.affine_rank = rank;
  if (rank >= n) {
    res.on_hyperplane = false;
    res.counterexample.push_back(p0);
    for (std::size_t j = 0; j < n; ++j) res.counterexample.push_back(res.points[origin[j]]);
    return res;
  }
  std::size_t free_col = 0;
  while (std::find(pivot_col.begin(), pivot_col.end(), free_col) != pivot_col.end()) ++free_col;
  res.normal[free_col] = 1;
  for (std::size_t r2 = 0; r2 < rank; ++r2) res.normal[pivot_col[r2]] = -rows[r2][free_col];
  for (std::size_t i = 0; i < n; ++i) res.offset += res.normal[i] * p0[i];
  return res;
}

// ------------------------------------------------------------- membership

/// Coordinate value: exact rational or quadratic irrational.
using Real = std::variant<Rational, cf::Quadratic>;

namespace detail {

inline long double real_ld(const Real& x) {
  return std::visit([](const auto& v) -> long double {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Rational>) return to_ld(v);
    else return v.to_long_double();
  }, x);
}

inline BigInt real_floor(const Real& x) {
  return std::visit([](const auto& v) -> BigInt {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Rational>) return cf::floor_of(v);
    else return v.floor();
  }, x);
}

inline cf::Quadratic qmul(const cf::Quadratic& x, const cf::Quadratic& y) {
  cf::Quadratic r = x;
  r.a = x.a * y.a + x.b * y.b * x.d;
  r.b = x.a * y.b + x.b * y.a;
  r.c = x.c * y.c;
  r.normalize();
  return r;
}

/// sign(|x - p/q|^b - rhs) exactly.
inline int abs_pow_compare(const Real& x, const BigInt& p, std::int64_t q, unsigned b, const Rational& rhs) {
  const Rational pq(p, BigInt(q));
  if (const auto* r = std::get_if<Rational>(&x)) {
    Rational e = *r - pq;
    if (e < 0) e = -e;
    const Rational lhs = rpow(e, b);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  cf::Quadratic e = std::get<cf::Quadratic>(x) - pq;
  if (e.sign() < 0) e *= Rational(-1);
  cf::Quadratic pw = e;
  for (unsigned i = 1; i < b; ++i) pw = qmul(pw, e);
  return pw.compare(rhs);
}

/// sign(|x - p/q| - |x - p'/q|).
inline int distance_compare(const Real& x, const BigInt& p, const BigInt& pp, std::int64_t q) {
  // |x - a| vs |x - b| with a < b: compare x with the midpoint
  if (p == pp) return 0;
  const Rational mid(p + pp, BigInt(2 * q));
  int s = 0;
  if (const auto* r = std::get_if<Rational>(&x)) s = *r < mid ? -1 : (*r > mid ? 1 : 0);
  else s = std::get<cf::Quadratic>(x).compare(mid);
  if (s == 0) return 0;
  const bool x_left = s < 0;
  return (p < pp) == x_left ? -1 : 1;
}

}  // namespace detail

struct MembershipReport {
  bool passes = true;
  bool exact = false;
  long double min_ratio = std::numeric_limits<long double>::infinity();  ///< min over q of max_i dist_i / threshold_i
  RationalPoint tightest;
  std::int64_t q_max = 0;
  std::int64_t first_failure_q = 0;
};

/// For every q <= q_max and every p: some i has |x_i - p_i/q| >= e^{-(1+r_i)(s_q + c)}.
/// With kappa = e^{-c} rational the verdict is exact.
inline MembershipReport bad_membership_test(const std::vector<Real>& x, const WeightVector& r,
                                            const Rational& kappa, std::int64_t q_max) {
  require(q_max >= 1, "bad_membership_test: q_max must be positive");
  require(x.size() == r.n(), "bad_membership_test: dimension mismatch");
  require(kappa > 0 && kappa <= 1, "bad_membership_test: need 0 < e^{-c} <= 1");
  MembershipReport rep;
  rep.exact = true;
  rep.q_max = q_max;
  const long double lk = detail::to_ld(kappa);
  for (std::int64_t q = 1; q <= q_max; ++q) {
    RationalPoint pt;
    pt.q = q;
    bool all_close = true;
    long double ratio = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
      // nearest p among floor(qx)-1 .. floor(qx)+2
      Real qx;
      if (const auto* v = std::get_if<Rational>(&x[i])) qx = *v * q;
      else qx = std::get<cf::Quadratic>(x[i]) * Rational(q);
      const BigInt f = detail::real_floor(qx);
      BigInt best = f - 1;
      for (BigInt cand = f; cand <= f + 2; ++cand)
        if (detail::distance_compare(x[i], cand, best, q) < 0) best = cand;
      require(best == f || best == f + 1, "bad_membership_test: nearest numerator outside the search range");
      pt.p.push_back(static_cast<std::int64_t>(best));
      const auto a = static_cast<unsigned>(boost::multiprecision::numerator(r.r[i]));
      const auto b = static_cast<unsigned>(boost::multiprecision::denominator(r.r[i]));
      // |x - p/q|^b >= (kappa/(q+1))^{a+b}
      const Rational rhs = detail::rpow(kappa / (q + 1), a + b);
      const int cmp = detail::abs_pow_compare(x[i], best, q, b, rhs);
      all_close = all_close && cmp < 0;
      const long double dist = fabsl(detail::real_ld(x[i]) - static_cast<long double>(best) / q);
      const long double thr = std::pow(lk / (q + 1), 1.0L + static_cast<long double>(r.value(i)));
      ratio = std::max(ratio, dist / thr);
    }
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.tightest = pt;
    }
    if (all_close && rep.passes) {
      rep.passes = false;
      rep.first_failure_q = q;
    }
  }
  return rep;
}

/// Binary64 threshold variant for irrational e^{-c}.
inline MembershipReport bad_membership_test(const std::vector<Real>& x, const WeightVector& r, double c,
                                            std::int64_t q_max) {
  require(q_max >= 1, "bad_membership_test: q_max must be positive");
  require(x.size() == r.n(), "bad_membership_test: dimension mismatch");
  require(c >= 0.0, "bad_membership_test: c must be nonnegative");
  MembershipReport rep;
  rep.q_max = q_max;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    RationalPoint pt;
    pt.q = q;
    long double ratio = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double xv = detail::real_ld(x[i]);
      const long double p = std::nearbyint(xv * q);
      pt.p.push_back(static_cast<std::int64_t>(p));
      const long double thr = std::exp(-(1.0L + r.value(i)) * (std::log(q + 1.0L) + c));
      ratio = std::max(ratio, fabsl(xv - p / q) / thr);
    }
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.tightest = pt;
    }
    if (ratio < 1.0L && rep.passes) {
      rep.passes = false;
      rep.first_failure_q = q;
    }
  }
  return rep;
}

// --------------------------------------------------------- resonant query

inline constexpr double kDenominatorBudget = 1e6;

/// Largest q with log(q + 1) <= t (q >= 0).
inline std::int64_t max_q_for_size(double t) {
  if (t < std::log(2.0)) return 0;
  const double e = std::exp(t);
  if (e - 1.0 > kDenominatorBudget + 1.0) throw budget_error("resonant query: e^{t_max} exceeds the denominator budget");
  auto q = static_cast<std::int64_t>(std::floor(e - 1.0));
  while (q > 0 && std::log(static_cast<double>(q) + 1.0) > t + 1e-12) --q;
  while (std::log(static_cast<double>(q) + 2.0) <= t + 1e-12) ++q;
  return q;
}

/// Rational points p/q (lowest terms) with log(q+1) <= t_max whose rectangle
/// of scale s_q + c_window meets the closed box [lo, hi].
inline std::vector<RationalPoint> resonant_query_euclid(const std::vector<Rational>& lo,
                                                        const std::vector<Rational>& hi, double t_max,
                                                        const WeightVector& r, double c_window) {
  const std::size_t n = r.n();
  require(lo.size() == n && hi.size() == n, "resonant_query_euclid: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (hi[i] < lo[i]) return {};
  const std::int64_t qmax = max_q_for_size(t_max);
  std::set<RationalPoint> out;
  for (std::int64_t q = 1; q <= qmax; ++q) {
    const double s = std::log(static_cast<double>(q) + 1.0);
    std::vector<std::pair<std::int64_t, std::int64_t>> range(n);
    bool empty = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Rational rad = cf::exact_rational(
          cover::rounded_radius(std::exp(-(1.0 + r.value(i)) * (s + c_window)), cover::Rounding::Outward));
      range[i] = {static_cast<std::int64_t>(-cf::floor_of(-(lo[i] - rad) * q)),
                  static_cast<std::int64_t>(cf::floor_of((hi[i] + rad) * q))};
      empty = empty || range[i].first > range[i].second;
    }
    if (empty) continue;
    RationalPoint pt;
    pt.q = q;
    pt.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) pt.p[i] = range[i].first;
    while (true) {
      out.insert(reduced(pt));
      std::size_t i = n;
      while (i-- > 0) {
        if (++pt.p[i] <= range[i].second) break;
        pt.p[i] = range[i].first;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  return {out.begin(), out.end()};
}

// -------------------------------------------------------- cover instances

/// Weighted rationals on [0,1]^D with s_q = log(q+1) and rectangle
/// neighbourhoods of half-widths e^{-(1+r_i) T}. Axis i is split by m_i per
/// grid level; log(m_i)/(1+r_i) must agree across axes.
template <std::size_t D>
class WeightedRationals {
 public:
  using scalar_type = cover::Exact;
  static constexpr std::size_t dimension = D;

  WeightedRationals(WeightVector r, std::array<std::uint64_t, D> splits) : r_(std::move(r)), splits_(splits) {
    require(r_.n() == D, "WeightedRationals: weight dimension mismatch");
    step_ = std::log(static_cast<double>(splits_[0])) / (1.0 + r_.value(0));
    for (std::size_t i = 0; i < D; ++i) {
      require(splits_[i] >= 2, "WeightedRationals: splits must be at least 2");
      const double s = std::log(static_cast<double>(splits_[i])) / (1.0 + r_.value(i));
      require(std::fabs(s - step_) <= 1e-9 * step_, "WeightedRationals: log(m_i)/(1+r_i) must agree");
    }
  }

  const WeightVector& weights() const { return r_; }
  std::array<std::uint64_t, D> splits() const { return splits_; }
  double root_scale() const { return 0.0; }
  double level_step() const { return step_; }
  double sigma() const { return 1.0 + r_.r_minus(); }
  double c_sigma() const { return 1.0; }

  cover::Box<scalar_type, D> region(unsigned level, const cover::Index<D>& idx) const {
    cover::Box<scalar_type, D> root;
    for (std::size_t i = 0; i < D; ++i) {
      root.lo[i] = scalar_type(0);
      root.hi[i] = scalar_type(1);
    }
    return cover::uniform_cell(root, splits_, level, idx);
  }

  void neighborhoods(const cover::Box<scalar_type, D>& reg, const cover::NeighborhoodQuery& q,
                     std::vector<cover::Box<scalar_type, D>>& out) const {
    const std::int64_t qmax = max_q_for_size(q.t_max);
    for (std::int64_t d = 1; d <= qmax; ++d) {
      const double s = std::log(static_cast<double>(d) + 1.0);
      if (!(s > q.t_min)) continue;
      std::array<scalar_type, D> rad;
      std::array<std::pair<std::int64_t, std::int64_t>, D> range;
      bool empty = false;
      for (std::size_t i = 0; i < D; ++i) {
        const double rr = cover::rounded_radius(std::exp(-(1.0 + r_.value(i)) * q.scale_for(s)), q.rounding);
        rad[i] = cover::dyadic_bound(rr, q.rounding == cover::Rounding::Outward);
        const scalar_type a = (reg.lo[i] - rad[i]) * scalar_type(d), b = (reg.hi[i] + rad[i]) * scalar_type(d);
        range[i] = {ceil_of(a), floor_of(b)};
        empty = empty || range[i].first > range[i].second;
      }
      if (empty) continue;
      std::array<std::int64_t, D> p;
      for (std::size_t i = 0; i < D; ++i) p[i] = range[i].first;
      while (true) {
        cover::Box<scalar_type, D> b;
        for (std::size_t i = 0; i < D; ++i) {
          b.lo[i] = scalar_type(p[i], d) - rad[i];
          b.hi[i] = scalar_type(p[i], d) + rad[i];
        }
        out.push_back(b);
        std::size_t i = D;
        while (i-- > 0) {
          if (++p[i] <= range[i].second) break;
          p[i] = range[i].first;
        }
        if (i == static_cast<std::size_t>(-1)) break;
      }
    }
  }

 private:
  static std::int64_t floor_of(const scalar_type& v) {
    std::int64_t f = v.numerator() / v.denominator();
    if (v.numerator() % v.denominator() != 0 && v.numerator() < 0) --f;
    return f;
  }
  static std::int64_t ceil_of(const scalar_type& v) { return -floor_of(-v); }

  WeightVector r_;
  std::array<std::uint64_t, D> splits_;
  double step_ = 0.0;
};

/// Classical Bad(kappa) on [0,1]: the excluded sets are [p/q - kappa/q^2, p/q + kappa/q^2]
/// with s_q = log q and sigma = 2, so the offset c = -log(kappa)/2. Dyadic cells,
/// level k at scale (k+1) log(2)/2.
class ClassicalBad {
 public:
  using scalar_type = cover::Exact;
  static constexpr std::size_t dimension = 1;

  explicit ClassicalBad(std::int64_t kappa_den) : kappa_den_(kappa_den) {
    require(kappa_den >= 2, "ClassicalBad: kappa = 1/m needs m >= 2");
  }

  /// Bad(1/(N+2)), whose dimension sits between dim M_N and dim M_{N+2}.
  static ClassicalBad from_N(std::int64_t N) {
    require(N >= 1, "ClassicalBad: N must be positive");
    return ClassicalBad(N + 2);
  }

  double kappa() const { return 1.0 / static_cast<double>(kappa_den_); }
  double c() const { return 0.5 * std::log(static_cast<double>(kappa_den_)); }
  std::array<std::uint64_t, 1> splits() const { return {2}; }
  double root_scale() const { return 0.5 * std::log(2.0); }
  double level_step() const { return 0.5 * std::log(2.0); }
  double sigma() const { return 2.0; }
  double c_sigma() const { return 2.0; }

  cover::Box<scalar_type, 1> region(unsigned level, const cover::Index<1>& idx) const {
    return cover::uniform_cell(cover::Box<scalar_type, 1>{{scalar_type(0)}, {scalar_type(1)}}, splits(), level, idx);
  }

  void neighborhoods(const cover::Box<scalar_type, 1>& reg, const cover::NeighborhoodQuery& q,
                     std::vector<cover::Box<scalar_type, 1>>& out) const {
    const double e = std::exp(q.t_max);
    if (e > kDenominatorBudget) throw budget_error("ClassicalBad: e^{t_max} exceeds the denominator budget");
    auto dmax = static_cast<std::int64_t>(std::floor(e));
    while (dmax > 0 && std::log(static_cast<double>(dmax)) > q.t_max + 1e-12) --dmax;
    while (std::log(static_cast<double>(dmax + 1)) <= q.t_max + 1e-12) ++dmax;
    const bool exact = q.rule == cover::ScaleRule::Relative && std::fabs(q.scale - c()) <= 1e-12;
    for (std::int64_t d = 1; d <= dmax; ++d) {
      const double s = std::log(static_cast<double>(d));
      if (!(s > q.t_min)) continue;
      scalar_type rad;
      if (exact) {
        rad = scalar_type(1, kappa_den_ * d * d);
      } else {
        const double rr = cover::rounded_radius(std::exp(-2.0 * q.scale_for(s)), q.rounding);
        rad = cover::dyadic_bound(rr, q.rounding == cover::Rounding::Outward);
      }
      const scalar_type a = (reg.lo[0] - rad) * scalar_type(d), b = (reg.hi[0] + rad) * scalar_type(d);
      std::int64_t p0 = a.numerator() / a.denominator();
      if (scalar_type(p0) < a) ++p0;
      while (scalar_type(p0 - 1) >= a) --p0;
      for (std::int64_t p = p0; scalar_type(p) <= b; ++p) {
        if (std::gcd(p, d) != 1) continue;
        out.push_back({{scalar_type(p, d) - rad}, {scalar_type(p, d) + rad}});
      }
    }
  }

 private:
  std::int64_t kappa_den_;
};

/// Box-count upper estimate for Bad(1/(N+2)) with lookahead u_c.
struct BadCoverResult {
  std::int64_t N = 0;
  double c = 0.0;
  unsigned depth = 0;
  cover::UpperEstimate estimate;
  std::vector<std::uint64_t> counts;
  bool truncated = false;
};

inline BadCoverResult bad1_boxcount(std::int64_t N, unsigned depth, const cover::Limits& limits,
                                    double u_c = 2.0) {
  const auto inst = ClassicalBad::from_N(N);
  cover::Limits lim = limits;
  lim.max_levels = std::max(lim.max_levels, depth);
  const auto stats = cover::refine_upper_cover(inst, inst.c(), u_c, depth, lim);
  BadCoverResult res;
  res.N = N;
  res.c = inst.c();
  res.depth = depth;
  res.estimate = cover::estimate_upper_dim(stats, inst.sigma());
  for (const auto& l : stats.levels) res.counts.push_back(l.count);
  res.truncated = stats.truncated;
  return res;
}

}  // namespace jarnik::euclid
