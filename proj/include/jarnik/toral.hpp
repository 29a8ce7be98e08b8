#pragma once

// Avoidance sets of toral endomorphism orbits: points x whose orbit M^k x
// stays e^{-c} tau_k away from the separated sets Z_k. Bound formulas for
// general sequences, and for diagonal integer matrices with Z = Z^n an exact
// oracle, a cover instance and an orbit checker.
//
// Distances to Z^n are taken per axis, so the survivor set of a diagonal
// system is the product of one-dimensional digit shifts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jarnik/automaton.hpp"
#include "jarnik/cf.hpp"
#include "jarnik/common.hpp"
#include "jarnik/cover_engine.hpp"
#include "jarnik/framework.hpp"

namespace jarnik::toral {

using cf::BigInt;
using cf::Rational;

struct ToralSystem {
  enum class Mode { Diagonal, General };
  Mode mode = Mode::Diagonal;
  std::vector<std::int64_t> lambdas;  ///< diagonal entries of M
  std::vector<double> t;              ///< operator norms t_k, k = 1, 2, ...
  std::vector<double> tau;            ///< separations tau_k

  static ToralSystem diagonal(std::vector<std::int64_t> lambdas) {
    ToralSystem s;
    s.mode = Mode::Diagonal;
    s.lambdas = std::move(lambdas);
    s.validate();
    return s;
  }

  static ToralSystem general(std::vector<double> t, std::vector<double> tau) {
    ToralSystem s;
    s.mode = Mode::General;
    s.t = std::move(t);
    s.tau = std::move(tau);
    s.validate();
    return s;
  }

  void validate() const {
    if (mode == Mode::Diagonal) {
      require(!lambdas.empty(), "ToralSystem: need at least one axis");
      for (auto l : lambdas)
        require(l >= 2, "ToralSystem: diagonal entries must be integers >= 2 (beta = 1 leaves invariant strips)");
    } else {
      require(!t.empty() && t.size() == tau.size(), "ToralSystem: t and tau must have equal nonzero length");
      for (std::size_t i = 0; i < t.size(); ++i)
        require(t[i] > 0.0 && tau[i] > 0.0, "ToralSystem: t_k and tau_k must be positive");
    }
  }

  std::size_t n() const { return lambdas.size(); }

  std::int64_t lambda_max() const {
    require(mode == Mode::Diagonal, "ToralSystem: lambda_max needs a diagonal system");
    return *std::max_element(lambdas.begin(), lambdas.end());
  }

  /// Index of the first axis with the largest eigenvalue (direction v_k).
  std::size_t lead_axis() const {
    return static_cast<std::size_t>(std::max_element(lambdas.begin(), lambdas.end()) - lambdas.begin());
  }
};

/// Upper bound for the number of k with log(t_k/tau_k) in (t - c, t].
inline double phi_bound(const ToralSystem& sys, double c) {
  require(c > 0.0, "phi_bound: c must be positive");
  sys.validate();
  if (sys.mode == ToralSystem::Mode::Diagonal)
    return c / std::log(static_cast<double>(sys.lambda_max()));
  std::vector<double> s;
  for (std::size_t i = 0; i < sys.t.size(); ++i) s.push_back(std::log(sys.t[i] / sys.tau[i]));
  std::sort(s.begin(), s.end());
  // the count over (t - c, t] only changes at t = s_j
  std::size_t best = 0, lo = 0;
  for (std::size_t hi = 0; hi < s.size(); ++hi) {
    while (s[lo] <= s[hi] - c) ++lo;
    best = std::max(best, hi - lo + 1);
  }
  return static_cast<double>(best);
}

// ---------------------------------------------------------------- bounds

inline double thm320_c0(double tau, double c_tau, double tau_bar) {
  require(tau > 0.0 && c_tau > 0.0, "thm320: tau and c_tau must be positive");
  require(tau_bar > 0.0 && tau_bar < tau, "thm320: need 0 < tau_bar < tau");
  return std::log(c_tau * std::pow(2.0, tau)) / (tau - tau_bar);
}

/// Lower bound for dim(E(e^{-(2c + log 12)}) cap X) for a tau-decaying
/// measure with a delta power law. The power-law term is log 2 + 2 log(c2/c1).
inline double thm320_lower(double d_mu, const framework::PowerLaw& pl, double tau, double c_tau,
                           double phi_c, double c, double tau_bar) {
  pl.validate();
  require(d_mu > 0.0, "thm320_lower: delta must be positive");
  require(phi_c >= 0.0, "thm320_lower: phi(c) must be nonnegative");
  const double c0 = thm320_c0(tau, c_tau, tau_bar);
  require(c > c0, "thm320_lower: c must exceed c0 = " + std::to_string(c0));
  const double inner = c_tau * std::pow(2.0, tau) * phi_c * std::exp(-tau * c);
  require(inner < 1.0, "thm320_lower: 1 - c_tau 2^tau phi(c) e^{-tau c} must be positive (c0 = " +
                           std::to_string(c0) + ")");
  return d_mu - (std::log(2.0) + 2.0 * std::log(pl.c2 / pl.c1) + 2.0 * d_mu * std::log(2.0) +
                 std::fabs(std::log1p(-inner))) /
                    c;
}

/// Radius e^{-(2c + log 12)} at which thm320_lower applies.
inline double thm320_radius(double c) { return std::exp(-(2.0 * c + std::log(12.0))); }

/// Lebesgue form n - |log(1 - kbar_l phi(c/2) e^{-c/2})| / (c/2 - k_l) for E(e^{-c}).
inline double thm320_lower_lebesgue(double n, double k_l, double kbar_l, double phi_half, double c) {
  require(n > 0.0, "thm320_lower_lebesgue: n must be positive");
  require(k_l >= 0.0 && kbar_l > 0.0, "thm320_lower_lebesgue: need k_l >= 0 and kbar_l > 0");
  require(c / 2.0 > k_l, "thm320_lower_lebesgue: need c/2 > k_l");
  const double inner = kbar_l * phi_half * std::exp(-c / 2.0);
  require(inner < 1.0, "thm320_lower_lebesgue: kbar_l phi(c/2) e^{-c/2} must be below 1");
  return n - std::fabs(std::log1p(-inner)) / (c / 2.0 - k_l);
}

struct Eq37Constants {
  double k_u;
  double kbar_u;
};

/// Constants traced through the rectangle argument: kbar_u from the measure
/// ratio of the inner rectangle, k_u from cbar <= c/sigma2 + log 6/sigma2 + 2.
inline Eq37Constants eq37_default_constants(std::int64_t lambda, std::int64_t beta) {
  require(beta != 1, "eq37_upper: beta = 1 admits invariant strips, the bound fails");
  require(beta >= 2 && lambda >= beta, "eq37: need integers lambda >= beta >= 2");
  const double s1 = std::log(static_cast<double>(lambda)), s2 = std::log(static_cast<double>(beta));
  return {std::log(6.0) + 2.0 * s2,
          std::pow(6.0, -(s1 + s2) / s2) / static_cast<double>(lambda * beta)};
}

/// Smallest c with kbar_u (lambda beta)^{-c/log beta} < 1.
inline double eq37_c0(std::int64_t lambda, std::int64_t beta, double kbar_u) {
  require(beta >= 2 && lambda >= beta, "eq37: need integers lambda >= beta >= 2");
  const double lb = static_cast<double>(lambda) * static_cast<double>(beta);
  return std::max(0.0, std::log(kbar_u) * std::log(static_cast<double>(beta)) / std::log(lb));
}

/// 2 minus the upper bound; kept separate since it underflows against 2.
inline double eq37_deficit(std::int64_t lambda, std::int64_t beta, double c, double k_u, double kbar_u) {
  require(beta != 1, "eq37_upper: beta = 1 admits invariant strips, the bound fails");
  require(beta >= 2 && lambda >= beta, "eq37_upper: need integers lambda >= beta >= 2");
  require(k_u >= 0.0 && kbar_u > 0.0, "eq37_upper: need k_u >= 0 and kbar_u > 0");
  const double c0 = eq37_c0(lambda, beta, kbar_u);
  require(c > c0, "eq37_upper: c must exceed c0 = " + std::to_string(c0));
  const double lb = std::log(static_cast<double>(beta));
  const double ll = std::log(static_cast<double>(lambda));
  const double inner = kbar_u * std::exp(-(ll + lb) * c / lb);
  return (lb / ll) * std::fabs(std::log1p(-inner)) / (c + k_u);
}

/// Upper bound for dim(E(e^{-c}) cap [-1,1]^2) with M = diag(lambda, beta).
inline double eq37_upper(std::int64_t lambda, std::int64_t beta, double c, double k_u, double kbar_u) {
  return 2.0 - eq37_deficit(lambda, beta, c, k_u, kbar_u);
}

inline double eq37_upper(std::int64_t lambda, std::int64_t beta, double c) {
  const auto k = eq37_default_constants(lambda, beta);
  return eq37_upper(lambda, beta, c, k.k_u, k.kbar_u);
}

/// kbar_l making the Lebesgue lower form equal `target` at c (k_l fixed).
inline double fit_kbar_l(double n, double target, double k_l, double phi_half, double c) {
  require(target < n, "fit_kbar_l: target must be below n");
  require(c / 2.0 > k_l, "fit_kbar_l: need c/2 > k_l");
  const double a = -std::expm1(-(n - target) * (c / 2.0 - k_l));
  return a / (phi_half * std::exp(-c / 2.0));
}

/// kbar_u making eq37_upper equal `target` at c (k_u fixed).
inline double fit_kbar_u(std::int64_t lambda, std::int64_t beta, double target, double k_u, double c) {
  require(beta >= 2 && lambda >= beta, "fit_kbar_u: need integers lambda >= beta >= 2");
  require(target < 2.0, "fit_kbar_u: target must be below 2");
  const double lb = std::log(static_cast<double>(beta)), ll = std::log(static_cast<double>(lambda));
  const double a = -std::expm1(-(2.0 - target) * (c + k_u) * ll / lb);
  return a * std::exp((ll + lb) * c / lb);
}

// ---------------------------------------------------------------- oracle

/// Perron root of base-lambda digit sequences avoiding 0^m and (lambda-1)^m.
inline double digit_shift_root(std::int64_t lambda, int m) {
  require(lambda >= 2, "digit_shift_root: lambda must be >= 2");
  require(m >= 2, "digit_shift_root: m must be >= 2 (m = 1 leaves an empty or degenerate set)");
  const auto a = automata::build_avoidance_automaton(
      {std::vector<int>(static_cast<std::size_t>(m), 0),
       std::vector<int>(static_cast<std::size_t>(m), static_cast<int>(lambda - 1))},
      static_cast<int>(lambda));
  return automata::perron_root(a.transition_matrix());
}

/// Dimension of the survivor set with threshold lambda_i^{-m_i} on axis i.
inline double exact_dim_oracle_diag(const std::vector<int>& m, const std::vector<std::int64_t>& lambdas) {
  require(!m.empty() && m.size() == lambdas.size(), "exact_dim_oracle_diag: need one m per axis");
  double d = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    d += std::log(digit_shift_root(lambdas[i], m[i])) / std::log(static_cast<double>(lambdas[i]));
  return d;
}

// ---------------------------------------------------------------- resonant slabs

/// Y_k(z) for a diagonal system: the hyperplane x_a = z_a / lambda_a^k cut
/// by M^{-k} B(z, 1/4), stored as the bounding box of that section.
struct ToralSlab {
  unsigned k = 0;
  std::vector<BigInt> z;
  std::size_t axis = 0;
  std::vector<Rational> center;
  std::vector<Rational> half_width;  ///< zero on `axis`
  double size = 0.0;                 ///< s_k = log(t_k / tau_k)
};

inline constexpr unsigned kToralMaxK = 40;
inline constexpr std::size_t kToralSlabBudget = 2'000'000;

inline std::vector<ToralSlab> resonant_query_toral(const std::vector<Rational>& lo,
                                                   const std::vector<Rational>& hi, double t_max,
                                                   const ToralSystem& sys) {
  require(sys.mode == ToralSystem::Mode::Diagonal,
          "resonant_query_toral: slabs are enumerated for diagonal systems only");
  sys.validate();
  const std::size_t n = sys.n();
  require(lo.size() == n && hi.size() == n, "resonant_query_toral: region dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    require(lo[i] <= hi[i] && lo[i] >= -1 && hi[i] <= 1, "resonant_query_toral: region must lie in [-1,1]^n");
  const double step = std::log(static_cast<double>(sys.lambda_max()));
  std::vector<ToralSlab> out;
  if (t_max < step) return out;
  const double kk = std::floor(t_max / step + 1e-12);
  if (kk > kToralMaxK) throw budget_error("resonant_query_toral: k exceeds the budget of 40");
  const auto K = static_cast<unsigned>(kk);
  const std::size_t a = sys.lead_axis();
  for (unsigned k = 1; k <= K; ++k) {
    std::vector<BigInt> pw(n);
    std::vector<Rational> hw(n);
    std::vector<BigInt> zlo(n), zhi(n);
    for (std::size_t i = 0; i < n; ++i) {
      pw[i] = boost::multiprecision::pow(BigInt(sys.lambdas[i]), static_cast<unsigned>(k));
      hw[i] = i == a ? Rational(0) : Rational(1) / (4 * pw[i]);
      // z_i / pw - hw <= hi and z_i / pw + hw >= lo
      zhi[i] = cf::floor_of((hi[i] + hw[i]) * pw[i]);
      zlo[i] = -cf::floor_of(-(lo[i] - hw[i]) * pw[i]);
    }
    BigInt total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= (zhi[i] >= zlo[i] ? zhi[i] - zlo[i] + 1 : BigInt(0));
    if (total + out.size() > kToralSlabBudget)
      throw budget_error("resonant_query_toral: slab count exceeds the budget");
    if (total == 0) continue;
    std::vector<BigInt> z = zlo;
    while (true) {
      ToralSlab s;
      s.k = k;
      s.z = z;
      s.axis = a;
      s.size = k * step;
      for (std::size_t i = 0; i < n; ++i) {
        s.center.push_back(Rational(z[i]) / pw[i]);
        s.half_width.push_back(hw[i]);
      }
      out.push_back(std::move(s));
      std::size_t i = n;
      while (i-- > 0) {
        if (++z[i] <= zhi[i]) break;
        z[i] = zlo[i];
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  return out;
}

/// Smallest sup-norm gap between bounding boxes of distinct same-k slabs
/// divided by e^{-s_k}; a value >= 1/2 certifies the separation property.
inline Rational min_separation_ratio(const std::vector<ToralSlab>& slabs, const ToralSystem& sys) {
  Rational best = -1;
  for (std::size_t u = 0; u < slabs.size(); ++u)
    for (std::size_t v = u + 1; v < slabs.size(); ++v) {
      if (slabs[u].k != slabs[v].k) continue;
      Rational gap = 0;
      for (std::size_t i = 0; i < slabs[u].center.size(); ++i) {
        Rational d = slabs[u].center[i] - slabs[v].center[i];
        if (d < 0) d = -d;
        d -= slabs[u].half_width[i] + slabs[v].half_width[i];
        gap = std::max(gap, d);
      }
      const Rational ratio = gap * Rational(boost::multiprecision::pow(BigInt(sys.lambda_max()), slabs[u].k));
      if (best < 0 || ratio < best) best = ratio;
    }
  return best;
}

// ---------------------------------------------------------------- cover instance

/// Upper-path instance on [0,1]^D with base-lambda_i digit cells. Sizes are
/// in level units: the slabs of M^k have size k and level L has tbar = L.
/// Cells inside the union of axis-i slabs {x : |lambda_i^k x_i - z| <= e^{-c}}
/// are dropped.
template <std::size_t D>
class DiagonalToral {
 public:
  using scalar_type = double;
  static constexpr std::size_t dimension = D;

  DiagonalToral(std::array<std::int64_t, D> lambdas, double c) : lambdas_(lambdas), c_(c) {
    require(c > 0.0, "DiagonalToral: c must be positive");
    for (std::size_t i = 0; i < D; ++i) {
      require(lambdas[i] >= 2, "DiagonalToral: lambdas must be >= 2");
      const double m = c / std::log(static_cast<double>(lambdas[i]));
      const double r = std::round(m);
      m_[i] = (r >= 1.0 && std::fabs(m - r) <= 1e-9) ? static_cast<int>(r) : 0;
    }
  }

  double c() const { return c_; }
  std::array<std::uint64_t, D> splits() const {
    std::array<std::uint64_t, D> s{};
    for (std::size_t i = 0; i < D; ++i) s[i] = static_cast<std::uint64_t>(lambdas_[i]);
    return s;
  }
  double root_scale() const { return 0.0; }
  double level_step() const { return 1.0; }
  double sigma() const {
    return std::log(static_cast<double>(*std::max_element(lambdas_.begin(), lambdas_.end())));
  }
  double c_sigma() const { return std::sqrt(static_cast<double>(D)); }
  bool exact_axis(std::size_t i) const { return m_[i] > 0; }

  cover::Box<double, D> region(unsigned level, const cover::Index<D>& idx) const {
    cover::Box<double, D> root;
    for (std::size_t i = 0; i < D; ++i) {
      root.lo[i] = 0.0;
      root.hi[i] = 1.0;
    }
    return cover::uniform_cell(root, splits(), level, idx);
  }

  void neighborhoods(const cover::Box<double, D>&, const cover::NeighborhoodQuery&,
                     std::vector<cover::Box<double, D>>&) const {
    throw domain_error("DiagonalToral: only the covered() upper path is supported");
  }

  void prepare_level(unsigned level, const cover::NeighborhoodQuery& q) const {
    require(q.rule == cover::ScaleRule::Relative && std::fabs(q.scale - c_) <= 1e-12,
            "DiagonalToral: query scale must be the instance's c");
    const double kk = std::floor(q.t_max + 1e-9);
    const int kmax = kk < 0 ? -1 : static_cast<int>(kk);
    const int kmin = std::isfinite(q.t_min) ? static_cast<int>(std::floor(q.t_min + 1e-9)) + 1 : 0;
    for (std::size_t i = 0; i < D; ++i)
      excluded_[i] = m_[i] > 0 ? exact_bitmap(i, level, kmin, kmax) : float_bitmap(i, level, kmin, kmax);
  }

  bool covered(unsigned, const cover::Index<D>& idx, const cover::NeighborhoodQuery&) const {
    for (std::size_t i = 0; i < D; ++i)
      if (excluded_[i][idx[i]]) return true;
    return false;
  }

 private:
  using I128 = __int128;

  static I128 ipow(std::int64_t b, int e) {
    I128 r = 1;
    for (int i = 0; i < e; ++i) {
      require(r <= std::numeric_limits<I128>::max() / b / 4, "DiagonalToral: grid too fine");
      r *= b;
    }
    return r;
  }

  std::uint64_t cells(std::size_t i, unsigned level) const {
    const I128 n = ipow(lambdas_[i], static_cast<int>(level));
    if (n > static_cast<I128>(kToralSlabBudget) * 64)
      throw budget_error("DiagonalToral: per-axis grid exceeds the budget");
    return static_cast<std::uint64_t>(n);
  }

  template <class T>
  static void mark(std::vector<std::pair<T, T>>& iv, std::vector<char>& bm, T width) {
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<T, T>> merged;
    for (const auto& p : iv) {
      if (!merged.empty() && p.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, p.second);
      else
        merged.push_back(p);
    }
    const auto n = static_cast<T>(bm.size());
    for (const auto& [a, b] : merged) {
      // cells j with [j w, (j+1) w] inside [a, b]
      T j0, j1;
      if constexpr (std::is_floating_point_v<T>) {
        j0 = std::ceil(a / width);
        j1 = std::floor(b / width) - 1;
      } else {
        j0 = a >= 0 ? (a + width - 1) / width : -((-a) / width);
        j1 = (b >= 0 ? b / width : -((-b + width - 1) / width)) - 1;
      }
      for (T j = std::max<T>(j0, 0); j <= j1 && j < n; ++j) bm[static_cast<std::size_t>(j)] = 1;
    }
  }

  std::vector<char> exact_bitmap(std::size_t i, unsigned level, int kmin, int kmax) const {
    std::vector<char> bm(cells(i, level), 0);
    if (kmax < kmin) return bm;
    const int m = m_[i];
    const int K = std::max(static_cast<int>(level), kmax + m);
    const I128 width = ipow(lambdas_[i], K - static_cast<int>(level));
    std::vector<std::pair<I128, I128>> iv;
    for (int k = kmin; k <= kmax; ++k) {
      const I128 spacing = ipow(lambdas_[i], K - k), h = ipow(lambdas_[i], K - k - m);
      const I128 zmax = ipow(lambdas_[i], k);
      if (zmax + 1 + static_cast<I128>(iv.size()) > static_cast<I128>(kToralSlabBudget) * 32)
        throw budget_error("DiagonalToral: slab count exceeds the budget");
      for (I128 z = 0; z <= zmax; ++z) iv.emplace_back(z * spacing - h, z * spacing + h);
    }
    mark(iv, bm, width);
    return bm;
  }

  std::vector<char> float_bitmap(std::size_t i, unsigned level, int kmin, int kmax) const {
    std::vector<char> bm(cells(i, level), 0);
    if (kmax < kmin) return bm;
    const long double lam = static_cast<long double>(lambdas_[i]);
    // cell units; half-widths shrink so dropped cells are truly inside a slab
    const long double eps = std::exp(-static_cast<long double>(c_)) * (1.0L - 1e-12L);
    std::vector<std::pair<long double, long double>> iv;
    for (int k = kmin; k <= kmax; ++k) {
      const long double spacing = std::pow(lam, static_cast<long double>(static_cast<int>(level) - k));
      const long double h = spacing * eps;
      const auto zmax = static_cast<std::int64_t>(std::llround(std::pow(lam, static_cast<long double>(k))));
      if (static_cast<std::size_t>(zmax) + iv.size() > kToralSlabBudget * 32)
        throw budget_error("DiagonalToral: slab count exceeds the budget");
      for (std::int64_t z = 0; z <= zmax; ++z)
        iv.emplace_back(static_cast<long double>(z) * spacing - h, static_cast<long double>(z) * spacing + h);
    }
    mark(iv, bm, 1.0L);
    return bm;
  }

  std::array<std::int64_t, D> lambdas_;
  double c_;
  std::array<int, D> m_{};
  mutable std::array<std::vector<char>, D> excluded_;
};

struct ToralBoxcount {
  std::vector<std::int64_t> lambdas;
  double c = 0.0;
  unsigned depth = 0;
  std::vector<std::uint64_t> counts;
  double slope = 0.0;  ///< box-counting slope in squares of side lambda_max^{-L}
  bool truncated = false;
  bool exact = false;
};

namespace detail {

template <std::size_t D>
ToralBoxcount boxcount_impl(const std::vector<std::int64_t>& lambdas, double c, unsigned depth,
                            const cover::Limits& limits, unsigned window) {
  std::array<std::int64_t, D> l{};
  for (std::size_t i = 0; i < D; ++i) l[i] = lambdas[i];
  const DiagonalToral<D> inst(l, c);
  cover::Limits lim = limits;
  lim.max_levels = std::max(lim.max_levels, depth);
  const auto stats = cover::refine_upper_cover(inst, c, 0.0, depth, lim);
  ToralBoxcount r;
  r.lambdas = lambdas;
  r.c = c;
  r.depth = depth;
  r.truncated = stats.truncated;
  r.exact = true;
  for (std::size_t i = 0; i < D; ++i) r.exact = r.exact && inst.exact_axis(i);
  for (const auto& s : stats.levels) r.counts.push_back(s.count);
  const double lmax = static_cast<double>(*std::max_element(lambdas.begin(), lambdas.end()));
  double aniso = 0.0;  // squares of side lmax^{-1} per cell, per level
  for (auto v : lambdas) aniso += std::log(lmax / static_cast<double>(v));
  std::vector<double> x, y;
  const std::size_t n = r.counts.size();
  require(n >= 3, "toral_boxcount: need at least two refined levels");
  if (r.counts.back() == 0) return r;
  for (std::size_t L = n > window ? n - window : 1; L < n; ++L) {
    x.push_back(static_cast<double>(L) * std::log(lmax));
    y.push_back(std::log(static_cast<double>(r.counts[L])) + static_cast<double>(L) * aniso);
  }
  r.slope = least_squares_slope(x, y);
  return r;
}

}  // namespace detail

/// Box-count estimate for the survivor set of diag(lambdas) at threshold e^{-c}.
inline ToralBoxcount toral_boxcount(const std::vector<std::int64_t>& lambdas, double c, unsigned depth,
                                    const cover::Limits& limits = {}, unsigned window = 4) {
  require(depth >= 2, "toral_boxcount: depth must be at least 2");
  require(window >= 2, "toral_boxcount: window must be at least 2");
  if (lambdas.size() == 1) return detail::boxcount_impl<1>(lambdas, c, depth, limits, window);
  if (lambdas.size() == 2) return detail::boxcount_impl<2>(lambdas, c, depth, limits, window);
  throw domain_error("toral_boxcount: supports one or two axes");
}

// ---------------------------------------------------------------- orbit checks

/// x_i = numer[i] / lambda_i^digits.
struct DigitPoint {
  std::vector<BigInt> numer;
  unsigned digits = 0;
};

/// Random point of the depth-`digits` oracle cylinders: each axis is a
/// uniform walk over digit words with no run of m zeros or m top digits.
inline DigitPoint sample_cylinder_point(const std::vector<std::int64_t>& lambdas, const std::vector<int>& m,
                                        unsigned digits, std::mt19937_64& rng) {
  require(lambdas.size() == m.size() && !m.empty(), "sample_cylinder_point: need one m per axis");
  DigitPoint p;
  p.digits = digits;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(lambdas[i] >= 2 && m[i] >= 2, "sample_cylinder_point: need lambda >= 2 and m >= 2");
    BigInt x = 0;
    int last = -1, run = 0;
    for (unsigned d = 0; d < digits; ++d) {
      std::vector<int> allowed;
      for (int a = 0; a < lambdas[i]; ++a) {
        const bool extreme = a == 0 || a == lambdas[i] - 1;
        if (extreme && a == last && run + 1 >= m[i]) continue;
        allowed.push_back(a);
      }
      std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
      const int a = allowed[pick(rng)];
      run = a == last ? run + 1 : 1;
      last = a;
      x = x * lambdas[i] + a;
    }
    p.numer.push_back(x);
  }
  return p;
}

/// True iff dist(lambda_i^k x_i, Z) >= lambda_i^{-m_i} on every axis for k <= k_max.
inline bool orbit_avoids(const DigitPoint& p, const std::vector<std::int64_t>& lambdas, const std::vector<int>& m,
                         unsigned k_max) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(k_max + static_cast<unsigned>(m[i]) <= p.digits, "orbit_avoids: k_max + m exceeds the sampled digits");
    const BigInt den = boost::multiprecision::pow(BigInt(lambdas[i]), p.digits);
    const BigInt eps = boost::multiprecision::pow(BigInt(lambdas[i]), p.digits - static_cast<unsigned>(m[i]));
    BigInt r = p.numer[i] % den;
    for (unsigned k = 0; k <= k_max; ++k) {
      if (r < eps || den - r < eps) return false;
      r = (r * lambdas[i]) % den;
    }
  }
  return true;
}

struct MembershipSummary {
  std::size_t samples = 0;
  std::size_t failures = 0;
};

inline MembershipSummary membership_consistency(const std::vector<std::int64_t>& lambdas, const std::vector<int>& m,
                                                std::size_t samples, std::uint64_t seed, unsigned k_max = 60,
                                                unsigned digits = 80, unsigned workers = 1) {
  std::vector<DigitPoint> pts;
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) pts.push_back(sample_cylinder_point(lambdas, m, digits, rng));
  std::vector<char> ok(samples, 0);
  parallel_for(samples, workers, [&](std::size_t s) { ok[s] = orbit_avoids(pts[s], lambdas, m, k_max) ? 1 : 0; });
  MembershipSummary out;
  out.samples = samples;
  for (char v : ok) out.failures += v ? 0 : 1;
  return out;
}

}  // namespace jarnik::toral
