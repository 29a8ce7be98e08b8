#pragma once

// Closed-form dimension bounds and parameter converters for the abstract
// (Omega, psi, mu, F) setting. Everything here is a pure binary64 formula.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "jarnik/common.hpp"

namespace jarnik::framework {

/// A point together with its logarithmic scale t.
template <class Coord = double>
struct FormalBall {
  std::vector<Coord> center;
  double scale = 0.0;
};

struct BallShape {
  double sigma;
};
struct CubeShape {
  double sigma;
};
struct RectangleShape {
  std::vector<double> sigma;
};

/// Ball(sigma) | Cube(sigma) | Rectangle(sigma vector).
using PsiShape = std::variant<BallShape, CubeShape, RectangleShape>;

inline void validate(const PsiShape& shape, std::size_t ambient_dim) {
  if (auto* b = std::get_if<BallShape>(&shape)) {
    require(b->sigma > 0.0, "PsiShape: sigma must be positive");
  } else if (auto* c = std::get_if<CubeShape>(&shape)) {
    require(c->sigma > 0.0, "PsiShape: sigma must be positive");
  } else {
    const auto& r = std::get<RectangleShape>(shape);
    require(r.sigma.size() == ambient_dim,
            "PsiShape: rectangle dimension must match the ambient dimension");
    for (double s : r.sigma) require(s > 0.0, "PsiShape: sigma components must be positive");
  }
}

/// Smallest exponent: diam psi(x, t) <= c_sigma e^{-sigma t}.
inline double diameter_exponent(const PsiShape& shape) {
  if (auto* b = std::get_if<BallShape>(&shape)) return b->sigma;
  if (auto* c = std::get_if<CubeShape>(&shape)) return c->sigma;
  const auto& r = std::get<RectangleShape>(shape).sigma;
  return *std::min_element(r.begin(), r.end());
}

/// mu(psi(x, t)) comparable to e^{-tau t} with constants c1 <= c2.
struct PowerLaw {
  double tau = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;

  void validate() const {
    require(tau > 0.0, "PowerLaw: tau must be positive");
    require(c1 > 0.0 && c1 <= c2, "PowerLaw: need 0 < c1 <= c2");
  }
};

struct BoundInputs {
  double c = 1.0;
  double d_star = 0.0;
  double l_c = 0.0;
  double u_c = 0.0;
  double sigma = 1.0;
  double c_sigma = 1.0;
  std::optional<double> tau_l;
  std::optional<double> tau_u;
  std::optional<double> k_c;
  std::optional<double> kbar_c;
  std::optional<double> K_c;
  double d_mu = 0.0;

  void validate() const {
    require(c > 0.0, "BoundInputs: c must be positive");
    require(d_star >= 0.0 && l_c >= 0.0 && u_c >= 0.0,
            "BoundInputs: d_star, l_c, u_c must be nonnegative");
    require(sigma > 0.0 && c_sigma > 0.0, "BoundInputs: sigma and c_sigma must be positive");
    require(d_mu >= 0.0, "BoundInputs: d_mu must be nonnegative");
    if (tau_l) require(*tau_l > 0.0 && *tau_l < 1.0, "BoundInputs: tau_l must lie in (0,1)");
    if (tau_u) require(*tau_u > 0.0 && *tau_u < 1.0, "BoundInputs: tau_u must lie in (0,1)");
    for (const auto& k : {k_c, kbar_c, K_c})
      if (k) require(*k > 0.0, "BoundInputs: k_c, kbar_c, K_c must be positive");
  }
};

/// Lower/upper bound pair, each clipped into [0, trivial_upper].
struct DimensionBound {
  std::optional<double> lower;
  std::optional<double> upper;
  double trivial_upper = 1.0;

  static DimensionBound clipped(std::optional<double> lo, std::optional<double> hi,
                                double ambient) {
    require(ambient >= 0.0, "DimensionBound: ambient dimension must be nonnegative");
    auto clip = [ambient](std::optional<double> v) -> std::optional<double> {
      if (!v) return std::nullopt;
      return std::clamp(*v, 0.0, ambient);
    };
    return DimensionBound{clip(lo), clip(hi), ambient};
  }
};

/// (t_k, tbar_k) = (s1 + k c + l_c, s1 + k (c + u_c) - u_c).
inline std::pair<double, double> schedule_times(double c, double l_c, double u_c, double s1,
                                                std::uint64_t k) {
  require(c > 0.0, "schedule_times: c must be positive");
  const double kk = static_cast<double>(k);
  return {s1 + kk * c + l_c, s1 + kk * (c + u_c) - u_c};
}

/// Unclipped d_mu - |log tau(c)| / (sigma c).
inline double lower_bound_thm21_raw(const BoundInputs& in, double tau_of_c) {
  require(tau_of_c > 0.0 && tau_of_c < 1.0, "lower_bound: tau(c) must lie in (0,1)");
  require(in.sigma > 0.0 && in.c > 0.0, "lower_bound: sigma and c must be positive");
  return in.d_mu - std::fabs(std::log(tau_of_c)) / (in.sigma * in.c);
}

inline double lower_bound_thm21(const BoundInputs& in, double tau_of_c) {
  return std::max(0.0, lower_bound_thm21_raw(in, tau_of_c));
}

/// log N(c) / (sigma (c + u_c)).
inline double upper_bound_thm21(const BoundInputs& in, double N_of_c) {
  require(N_of_c >= 1.0, "upper_bound: N(c) must be at least 1");
  require(in.sigma > 0.0 && in.c > 0.0, "upper_bound: sigma and c must be positive");
  return std::log(N_of_c) / (in.sigma * (in.c + in.u_c));
}

/// tau(c) = (1 - tau_l) k_c / (2 kbar_c).
inline double tau_from_decay_prop24(double tau_l, double k_c, double kbar_c) {
  require(tau_l >= 0.0 && tau_l < 1.0, "tau_from_decay: tau_l must lie in [0,1)");
  require(k_c > 0.0 && k_c <= kbar_c, "tau_from_decay: need 0 < k_c <= kbar_c");
  return (1.0 - tau_l) * k_c / (2.0 * kbar_c);
}

/// N(c) = (1 - tau_u) / K_c.
inline double N_from_dirichlet_prop24(double tau_u, double K_c) {
  require(tau_u >= 0.0 && tau_u < 1.0, "N_from_dirichlet: tau_u must lie in [0,1)");
  require(K_c > 0.0, "N_from_dirichlet: K_c must be positive");
  return (1.0 - tau_u) / K_c;
}

struct PowerLawConstants {
  double k_c;
  double kbar_c;
  double K_c;
};

inline PowerLawConstants powerlaw_constants_ex3(const PowerLaw& pl, double c, double u_c,
                                                double d_star) {
  pl.validate();
  require(c >= 0.0, "powerlaw_constants: c must be nonnegative");
  return {pl.c1 / pl.c2 * std::exp(-pl.tau * c),
          pl.c2 / pl.c1 * std::exp(-pl.tau * (c - 2.0 * d_star)),
          pl.c1 / pl.c2 * std::exp(-pl.tau * (c + u_c + 2.0 * d_star))};
}

enum class GridKind { Cube, Rectangle };
enum class RoundDirection { Down, Up };

struct GridPoint {
  double value;
  std::uint64_t m;
};

inline double grid_value(GridKind kind, double sigma, std::uint64_t q, std::uint64_t m) {
  const double lm = std::log(static_cast<double>(m));
  return kind == GridKind::Cube ? lm / sigma : static_cast<double>(q) * lm;
}

/// Nearest grid point log(m)/sigma (Cube) or q log(m) (Rectangle), m >= 2,
/// below c (Down) or above c (Up). Values within 1e-12 relative of c count
/// as on the grid.
inline GridPoint round_to_grid(double c, double sigma, std::uint64_t q_denominator,
                               GridKind kind = GridKind::Cube,
                               RoundDirection dir = RoundDirection::Down) {
  require(c > 0.0, "round_to_grid: c must be positive");
  require(sigma > 0.0 && q_denominator >= 1, "round_to_grid: need sigma > 0 and q >= 1");
  const double slack = 1e-12 * std::fabs(c);
  const double scaled =
      kind == GridKind::Cube ? sigma * c : c / static_cast<double>(q_denominator);
  require(scaled < 43.0, "round_to_grid: c too large for a 64-bit grid index");
  auto val = [&](std::uint64_t m) { return grid_value(kind, sigma, q_denominator, m); };
  std::uint64_t m = static_cast<std::uint64_t>(std::llround(std::exp(scaled)));
  m = std::max<std::uint64_t>(m, 2);
  if (dir == RoundDirection::Down) {
    while (m > 2 && val(m) > c) --m;
    while (val(m + 1) <= c) ++m;
    // snap to a grid point that misses c only by rounding noise
    if (val(m + 1) - c <= slack && val(m + 1) - val(m) > 2.0 * slack) ++m;
    if (val(m) > c + slack)
      throw domain_error("round_to_grid: no grid point log(m)/sigma <= c with m >= 2");
  } else {
    while (m > 2 && val(m - 1) >= c) --m;
    while (val(m) < c) ++m;
    if (m > 2 && c - val(m - 1) <= slack && val(m) - val(m - 1) > 2.0 * slack) --m;
  }
  return {val(m), m};
}

/// tau(c) = 1 - tau_l for cube functions on the grid.
inline double cube_tau_prop25(double tau_l) {
  require(tau_l >= 0.0 && tau_l < 1.0, "cube_tau: tau_l must lie in [0,1)");
  return 1.0 - tau_l;
}

/// Strict variant: also checks that c = log(m)/sigma for an integer m.
inline double cube_tau_prop25(double tau_l, double c, double sigma) {
  const GridPoint g = round_to_grid(c, sigma, 1);
  require(std::fabs(g.value - c) <= 1e-12 * std::fabs(c),
          "cube_tau: c is not of the form log(m)/sigma");
  return cube_tau_prop25(tau_l);
}

/// N(c) = (1 - tau_u) e^{n sigma (c + u_c)}.
inline double cube_N_prop25(double tau_u, double n, double sigma, double c_plus_u) {
  require(tau_u >= 0.0 && tau_u < 1.0, "cube_N: tau_u must lie in [0,1)");
  require(n > 0.0 && sigma > 0.0, "cube_N: n and sigma must be positive");
  return (1.0 - tau_u) * std::exp(n * sigma * c_plus_u);
}

/// N(c) = (1 - tau_u) e^{(sum sigma_i)(c + u_c)}.
inline double rect_N_prop27(double tau_u, double sigma_sum, double c_plus_u) {
  require(tau_u >= 0.0 && tau_u < 1.0, "rect_N: tau_u must lie in [0,1)");
  require(sigma_sum > 0.0, "rect_N: sigma sum must be positive");
  return (1.0 - tau_u) * std::exp(sigma_sum * c_plus_u);
}

struct DecayResult {
  double tau_l;
  double l_c;
  bool active;  ///< false when tau_l >= 1: increase c
};

/// tau_l = n_* c_delta e^{-delta (c - 2 d_*)}, l_c = l_* + d_*.
inline DecayResult decay_from_hyperplanes_prop28(double c_delta, double delta, double n_star,
                                                 double d_star, double c, double l_star = 0.0) {
  require(c_delta > 0.0 && delta > 0.0 && n_star > 0.0, "decay_from_hyperplanes: positive inputs");
  require(c >= 2.0 * d_star, "decay_from_hyperplanes: need c >= 2 d_*");
  const double tau = n_star * c_delta * std::exp(-delta * (c - 2.0 * d_star));
  return {tau, l_star + d_star, tau < 1.0};
}

/// tau_l = (c2/c1) e^{-tau (c - 2 d_*)}, l_c = -log(cbar)/sigma + d_* + log 2.
inline DecayResult decay_from_separation_lem29(const PowerLaw& pl, double c, double d_star,
                                               double cbar, double sigma) {
  pl.validate();
  require(cbar > 0.0, "decay_from_separation: cbar must be positive");
  require(sigma > 0.0, "decay_from_separation: sigma must be positive");
  require(c >= 2.0 * d_star, "decay_from_separation: need c >= 2 d_*");
  const double tau = pl.c2 / pl.c1 * std::exp(-pl.tau * (c - 2.0 * d_star));
  return {tau, -std::log(cbar) / sigma + d_star + std::log(2.0), tau < 1.0};
}

/// tau_u = (c1/c2) e^{-tau (c + 2 d_* + u_*)}.
inline double dirichlet_from_powerlaw_prop210(const PowerLaw& pl, double c, double d_star,
                                              double u_star) {
  pl.validate();
  require(c >= 0.0, "dirichlet_from_powerlaw: c must be nonnegative");
  return pl.c1 / pl.c2 * std::exp(-pl.tau * (c + 2.0 * d_star + u_star));
}

/// Number of cubes covering a sigma-rectangle: 2 e^{(n max sigma - sum sigma) t}.
inline double cube_cover_count_lem215(const std::vector<double>& sigma_vec, double t) {
  require(!sigma_vec.empty(), "cube_cover_count: empty sigma vector");
  require(t >= 0.0, "cube_cover_count: t must be nonnegative");
  const double hat = *std::max_element(sigma_vec.begin(), sigma_vec.end());
  const double sum = std::accumulate(sigma_vec.begin(), sigma_vec.end(), 0.0);
  return 2.0 * std::exp((static_cast<double>(sigma_vec.size()) * hat - sum) * t);
}

/// theta/sigma_hat + log N(c) / (sigma_hat (c + u_c)).
inline double upper_bound_with_cube_cover_lem214(double theta, double sigma_hat,
                                                 double c_plus_u, double N_of_c) {
  require(N_of_c >= 1.0, "upper_bound_with_cube_cover: N(c) must be at least 1");
  require(sigma_hat > 0.0 && c_plus_u > 0.0, "upper_bound_with_cube_cover: positive scales");
  return theta / sigma_hat + std::log(N_of_c) / (sigma_hat * c_plus_u);
}

enum class TransferDirection { Decay, Dirichlet };

struct TransferResult {
  double adjusted;  ///< the transferred tau
  double shift;     ///< added to l_c (decay) or u_c (Dirichlet)
  double a;
};

/// Moves a decay or Dirichlet constant between psi-shapes, a = 2 sqrt(n)/sigma + 3 d_*.
inline TransferResult lem26_transfer(double tau, double n, double sigma, double d_star,
                                     TransferDirection direction) {
  require(tau >= 0.0 && n > 0.0 && sigma > 0.0 && d_star >= 0.0,
          "lem26_transfer: inputs must be nonnegative with n, sigma > 0");
  const double a = 2.0 * std::sqrt(n) / sigma + 3.0 * d_star;
  if (direction == TransferDirection::Decay)
    return {std::exp(n * sigma * (a - d_star)) * tau, a, a};
  return {std::exp(-n * sigma * (a + 2.0 * d_star + std::sqrt(n) / sigma)) * tau, 2.0 * a, a};
}

}  // namespace jarnik::framework
