#pragma once

// One-sided Bernoulli shift on {1..n}: sequences whose orbit avoids a small
// neighbourhood of a periodic word. Exact dimensions come from forbidden-word
// automata; the resonant family w_l wbar drives the cover engine.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "jarnik/automaton.hpp"
#include "jarnik/common.hpp"
#include "jarnik/cover_engine.hpp"
#include "jarnik/framework.hpp"

namespace jarnik::shift {

/// The periodic word wbar = block block block ... over {1..n}.
struct PeriodicWord {
  int n = 2;
  std::vector<int> block;

  PeriodicWord() = default;
  PeriodicWord(int alphabet, std::vector<int> b) : n(alphabet), block(std::move(b)) { validate(); }

  /// Parses "121" style digit strings (symbols 1..9).
  static PeriodicWord parse(int alphabet, const std::string& digits) {
    std::vector<int> b;
    for (char ch : digits) {
      require(ch >= '1' && ch <= '9', "PeriodicWord: symbols are digits 1..9");
      b.push_back(ch - '0');
    }
    return PeriodicWord(alphabet, std::move(b));
  }

  std::size_t period() const { return block.size(); }
  int at(std::size_t i) const { return block[i % block.size()]; }  // 0-based position

  void validate() const {
    require(n >= 2, "PeriodicWord: alphabet size must be at least 2");
    require(!block.empty(), "PeriodicWord: period must be at least 1");
    for (int s : block) require(s >= 1 && s <= n, "PeriodicWord: symbol out of range");
    const std::size_t p = block.size();
    for (std::size_t d = 1; d < p; ++d) {
      if (p % d) continue;
      bool periodic = true;
      for (std::size_t i = 0; i < p && periodic; ++i) periodic = block[i] == block[i % d];
      require(!periodic, "PeriodicWord: block is not the minimal period");
    }
  }

  std::string str() const {
    std::string s;
    for (int v : block) s += std::to_string(v);
    return s;
  }
};

/// Window reading of the avoidance condition.
enum class Reading {
  Metric,  ///< block of length c: d+(T^k w, wbar) <= e^{-(c+1)}
  Literal  ///< block of length c+1, as printed in the displayed equivalence
};

inline std::vector<int> forbidden_block(const PeriodicWord& w, int c,
                                        Reading reading = Reading::Metric) {
  require(c >= 1, "forbidden_block: c must be at least 1");
  const std::size_t len = static_cast<std::size_t>(c) + (reading == Reading::Literal ? 1 : 0);
  std::vector<int> out(len);
  for (std::size_t i = 0; i < len; ++i) out[i] = w.at(i);
  return out;
}

/// Single-pattern avoidance automaton over {1..n}.
inline automata::Automaton build_automaton(const std::vector<int>& block, int n) {
  require(n >= 1, "build_automaton: alphabet must be nonempty");
  std::vector<int> zero;
  for (int s : block) {
    require(s >= 1 && s <= n, "build_automaton: symbol out of range");
    zero.push_back(s - 1);
  }
  return automata::build_avoidance_automaton({zero}, n);
}

/// Exact Hausdorff dimension (nats) of the set of sequences avoiding the block.
inline double sft_dimension(const PeriodicWord& w, int c, Reading reading = Reading::Metric) {
  const auto a = build_automaton(forbidden_block(w, c, reading), w.n);
  const double rho = automata::perron_root(a.transition_matrix());
  return rho > 0.0 ? std::log(rho) : 0.0;
}

/// V(n, c) = log n - |log(1 - n^{-c})| / c.
inline double thm37_bound(int n, int c) {
  require(n >= 2 && c >= 1, "thm37_bound: need n >= 2 and c >= 1");
  const double nd = static_cast<double>(n);
  return std::log(nd) + std::log1p(-std::pow(nd, -c)) / c;
}

/// The same value through the general machinery: (log n, n, n) power law,
/// tau_l = n^{-c} from the separation lemma and the cube-partition tau(c).
inline double thm37_bound_via_framework(int n, int c, std::size_t p) {
  require(n >= 2 && c >= 1, "thm37_bound_via_framework: need n >= 2 and c >= 1");
  const double nd = static_cast<double>(n);
  const framework::PowerLaw pl{std::log(nd), nd, nd};
  const auto decay = framework::decay_from_separation_lem29(pl, c, 0.0,
                                                             std::exp(-static_cast<double>(p)), 1.0);
  framework::BoundInputs in;
  in.c = c;
  in.sigma = 1.0;
  in.d_mu = pl.tau;
  in.l_c = decay.l_c;
  return framework::lower_bound_thm21_raw(in, framework::cube_tau_prop25(decay.tau_l));
}

/// True iff no window of w equals the forbidden block (w is any finite word).
inline bool orbit_avoidance_check(const std::vector<int>& w, const PeriodicWord& wbar, int c,
                                  Reading reading = Reading::Metric) {
  const auto block = forbidden_block(wbar, c, reading);
  require(w.size() >= block.size(), "orbit_avoidance_check: word shorter than the block");
  for (std::size_t k = 0; k + block.size() <= w.size(); ++k) {
    bool eq = true;
    for (std::size_t i = 0; i < block.size() && eq; ++i) eq = w[k + i] == block[i];
    if (eq) return false;
  }
  return true;
}

/// Thue-Morse prefix over {1, 2}.
inline std::vector<int> thue_morse(std::size_t length) {
  std::vector<int> w(length);
  for (std::size_t k = 0; k < length; ++k) w[k] = 1 + (__builtin_popcountll(k) & 1);
  return w;
}

struct SweepRow {
  int n;
  std::size_t p;
  std::string word;
  int c;
  Reading reading;
  double exact_dim_at_c;
  double exact_dim_at_shifted;  ///< at 2c + p + 1
  double bound_V;
  bool upper_ok;
  bool lower_ok;
};

/// All primitive words of period p over {1..n}, in lexicographic order.
inline std::vector<PeriodicWord> primitive_words(int n, std::size_t p) {
  std::vector<PeriodicWord> out;
  std::vector<int> b(p, 1);
  while (true) {
    try {
      out.emplace_back(n, b);
    } catch (const domain_error&) {
    }
    std::size_t i = p;
    while (i-- > 0) {
      if (++b[i] <= n) break;
      b[i] = 1;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

/// Both sides of the sandwich for every primitive word; tolerance `tol`.
inline std::vector<SweepRow> sandwich_sweep(const std::vector<int>& ns,
                                            const std::vector<std::size_t>& ps,
                                            const std::vector<int>& cs, Reading reading,
                                            double tol = 1e-9) {
  std::vector<SweepRow> rows;
  for (int n : ns)
    for (std::size_t p : ps)
      for (const auto& w : primitive_words(n, p))
        for (int c : cs) {
          SweepRow r{n, p, w.str(), c, reading, 0, 0, 0, false, false};
          r.exact_dim_at_c = sft_dimension(w, c, reading);
          r.exact_dim_at_shifted = sft_dimension(w, 2 * c + static_cast<int>(p) + 1, reading);
          r.bound_V = thm37_bound(n, c);
          r.upper_ok = r.exact_dim_at_c <= r.bound_V + tol;
          r.lower_ok = r.exact_dim_at_shifted >= r.bound_V - tol;
          rows.push_back(r);
        }
  return rows;
}

/// Cover-engine instance: level-k cells are cylinders of length k (scale
/// k + 1), resonant points are w_l wbar with size l + 1, and the closed ball
/// of scale T around y is the cylinder of its first ceil(T - 1) symbols.
class ShiftInstance {
 public:
  using scalar_type = cover::Exact;
  static constexpr std::size_t dimension = 1;

  explicit ShiftInstance(PeriodicWord w, unsigned max_recursion = 24)
      : w_(std::move(w)), max_recursion_(max_recursion) {}

  const PeriodicWord& word() const { return w_; }
  std::array<std::uint64_t, 1> splits() const { return {static_cast<std::uint64_t>(w_.n)}; }
  double root_scale() const { return 1.0; }
  double level_step() const { return 1.0; }
  double sigma() const { return 1.0; }
  double c_sigma() const { return 1.0; }

  /// Symbols (1..n) of the cylinder with the given index at the given level.
  std::vector<int> word_of(unsigned level, std::uint64_t idx) const {
    std::vector<int> u(level);
    for (unsigned i = level; i-- > 0;) {
      u[i] = static_cast<int>(idx % static_cast<std::uint64_t>(w_.n)) + 1;
      idx /= static_cast<std::uint64_t>(w_.n);
    }
    return u;
  }

  cover::Box<scalar_type, 1> region(unsigned level, const cover::Index<1>& idx) const {
    std::int64_t den = 1;
    for (unsigned i = 0; i < level; ++i) den *= w_.n;
    const auto i = static_cast<std::int64_t>(idx[0]);
    return {{cover::Exact(i, den)}, {cover::Exact(i + 1, den)}};
  }

  /// Cylinder intervals; adjacent cylinders share endpoints in this picture,
  /// so the engine uses covered()/meets() instead.
  void neighborhoods(const cover::Box<scalar_type, 1>&, const cover::NeighborhoodQuery&,
                     std::vector<cover::Box<scalar_type, 1>>&) const {}

  bool covered(unsigned level, const cover::Index<1>& idx, const cover::NeighborhoodQuery& q) const {
    return covered_word(word_of(level, idx[0]), q, 0);
  }

  bool meets(unsigned level, const cover::Index<1>& idx, const cover::NeighborhoodQuery& q) const {
    const auto u = word_of(level, idx[0]);
    const auto [lmin, lmax] = prefix_range(q);
    for (long l = lmin; l <= lmax; ++l) {
      if (l > static_cast<long>(u.size())) return true;  // some u v wbar lies in [u]
      const long a = agreement(l, q);
      if (matches(u, static_cast<std::size_t>(l), std::min<long>(a, static_cast<long>(u.size()))))
        return true;
    }
    return false;
  }

 private:
  /// Range of l with t_min < l + 1 <= t_max.
  std::pair<long, long> prefix_range(const cover::NeighborhoodQuery& q) const {
    const long lmax = static_cast<long>(std::floor(q.t_max - 1.0 + 1e-9));
    long lmin = 0;
    if (std::isfinite(q.t_min)) lmin = std::max(0L, static_cast<long>(std::floor(q.t_min + 1e-9)));
    return {lmin, lmax};
  }

  long agreement(long l, const cover::NeighborhoodQuery& q) const {
    return std::max(0L, static_cast<long>(std::ceil(q.scale_for(l + 1.0) - 1.0 - 1e-9)));
  }

  /// u[l..end) agrees with wbar on the first (end - l) symbols.
  bool matches(const std::vector<int>& u, std::size_t l, long end) const {
    for (long i = static_cast<long>(l); i < end; ++i)
      if (u[static_cast<std::size_t>(i)] != w_.at(static_cast<std::size_t>(i) - l)) return false;
    return true;
  }

  bool covered_word(std::vector<int> u, const cover::NeighborhoodQuery& q, unsigned depth) const {
    const auto [lmin, lmax] = prefix_range(q);
    const long len = static_cast<long>(u.size());
    bool inside = lmax > len;
    for (long l = lmin; l <= std::min(lmax, len); ++l) {
      const long a = agreement(l, q);
      if (a <= len) {
        if (matches(u, static_cast<std::size_t>(l), a)) return true;
      } else if (matches(u, static_cast<std::size_t>(l), len)) {
        inside = true;
      }
    }
    if (!inside || depth >= max_recursion_) return false;
    for (int s = 1; s <= w_.n; ++s) {
      auto v = u;
      v.push_back(s);
      if (!covered_word(std::move(v), q, depth + 1)) return false;
    }
    return true;
  }

  PeriodicWord w_;
  unsigned max_recursion_;
};

}  // namespace jarnik::shift
