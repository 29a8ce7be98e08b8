#pragma once

// Forbidden-word automata (Aho-Corasick) and Perron roots of nonnegative
// matrices. Symbols are 0-based here; callers translate their alphabets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "jarnik/common.hpp"

namespace jarnik::automata {

using Matrix = std::vector<std::vector<double>>;

/// Deterministic automaton over {0..alphabet-1} whose states are the
/// proper prefixes of the forbidden patterns that contain no pattern.
struct Automaton {
  int alphabet = 0;
  /// next[state][symbol], or -1 when the move completes a forbidden pattern.
  std::vector<std::vector<int>> next;
  /// Prefix spelled by each state (state 0 is the empty prefix).
  std::vector<std::vector<int>> prefix;

  std::size_t size() const { return next.size(); }

  std::vector<std::vector<int>> transition_matrix() const {
    std::vector<std::vector<int>> m(size(), std::vector<int>(size(), 0));
    for (std::size_t s = 0; s < size(); ++s)
      for (int a = 0; a < alphabet; ++a)
        if (next[s][a] >= 0) ++m[s][static_cast<std::size_t>(next[s][a])];
    return m;
  }

  /// True iff the finite word contains no forbidden pattern.
  bool accepts(const std::vector<int>& word) const {
    int s = 0;
    for (int a : word) {
      require(a >= 0 && a < alphabet, "Automaton::accepts: symbol out of range");
      s = next[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      if (s < 0) return false;
    }
    return true;
  }
};

inline Automaton build_avoidance_automaton(const std::vector<std::vector<int>>& patterns,
                                           int alphabet) {
  require(alphabet >= 1, "build_automaton: alphabet must be nonempty");
  require(!patterns.empty(), "build_automaton: need at least one pattern");
  // trie
  std::vector<std::vector<int>> go(1, std::vector<int>(alphabet, -1));
  std::vector<char> terminal(1, 0);
  std::vector<std::vector<int>> label(1);
  for (const auto& p : patterns) {
    require(!p.empty(), "build_automaton: patterns must be nonempty");
    int s = 0;
    for (int a : p) {
      require(a >= 0 && a < alphabet, "build_automaton: symbol out of range");
      if (go[s][a] < 0) {
        go[s][a] = static_cast<int>(go.size());
        go.emplace_back(alphabet, -1);
        terminal.push_back(0);
        auto l = label[s];
        l.push_back(a);
        label.push_back(std::move(l));
      }
      s = go[s][a];
    }
    terminal[s] = 1;
  }
  // failure links in BFS order; a node is dead if its suffix chain hits a pattern
  const std::size_t n = go.size();
  std::vector<int> fail(n, 0), order;
  std::vector<std::vector<int>> delta(n, std::vector<int>(alphabet, 0));
  std::queue<int> bfs;
  for (int a = 0; a < alphabet; ++a) {
    if (go[0][a] >= 0) {
      fail[go[0][a]] = 0;
      delta[0][a] = go[0][a];
      bfs.push(go[0][a]);
    } else {
      delta[0][a] = 0;
    }
  }
  order.push_back(0);
  while (!bfs.empty()) {
    const int s = bfs.front();
    bfs.pop();
    order.push_back(s);
    if (terminal[fail[s]]) terminal[s] = 1;
    for (int a = 0; a < alphabet; ++a) {
      const int t = go[s][a];
      if (t >= 0) {
        fail[t] = delta[fail[s]][a];
        delta[s][a] = t;
        bfs.push(t);
      } else {
        delta[s][a] = delta[fail[s]][a];
      }
    }
  }
  std::vector<int> index(n, -1);
  Automaton out;
  out.alphabet = alphabet;
  for (int s : order)
    if (!terminal[s]) {
      index[s] = static_cast<int>(out.prefix.size());
      out.prefix.push_back(label[s]);
    }
  out.next.assign(out.prefix.size(), std::vector<int>(alphabet, -1));
  for (int s : order) {
    if (terminal[s]) continue;
    for (int a = 0; a < alphabet; ++a) out.next[index[s]][a] = index[delta[s][a]];
  }
  return out;
}

namespace detail {

/// Strongly connected components (Tarjan), iterative.
inline std::vector<std::vector<std::size_t>> strong_components(const Matrix& m) {
  const std::size_t n = m.size();
  std::vector<int> idx(n, -1), low(n, 0);
  std::vector<char> on(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> comps;
  int counter = 0;
  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < n) {
        const std::size_t w = f.next++;
        if (m[f.v][w] <= 0.0) continue;
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      if (low[v] == idx[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return comps;
}

}  // namespace detail

struct PerronResult {
  double root;
  double lower;  ///< Collatz-Wielandt lower bound
  double upper;  ///< Collatz-Wielandt upper bound
  int iterations;
};

/// Spectral radius of a nonnegative matrix: maximum over strongly connected
/// components of a power iteration on (A_C + I) started from the all-ones
/// vector, stopped once the Collatz-Wielandt bracket is narrower than `tol`.
inline PerronResult perron_root_bracket(const Matrix& m, double tol = 1e-10,
                                        int max_iterations = 10000) {
  const std::size_t n = m.size();
  for (const auto& row : m) {
    require(row.size() == n, "perron_root: matrix must be square");
    for (double v : row) require(v >= 0.0 && std::isfinite(v), "perron_root: negative entry");
  }
  PerronResult best{0.0, 0.0, 0.0, 0};
  if (n == 0) return best;
  for (const auto& comp : detail::strong_components(m)) {
    const std::size_t k = comp.size();
    if (k == 1) {
      const double v = m[comp[0]][comp[0]];
      if (v > best.root) best = {v, v, v, 0};
      continue;
    }
    std::vector<long double> x(k, 1.0L), y(k);
    long double lo = 0, hi = 0;
    int it = 0;
    for (; it < max_iterations; ++it) {
      for (std::size_t i = 0; i < k; ++i) {
        long double s = x[i];
        for (std::size_t j = 0; j < k; ++j) s += m[comp[i]][comp[j]] * x[j];
        y[i] = s;
      }
      lo = y[0] / x[0];
      hi = lo;
      long double norm = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const long double r = y[i] / x[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        norm = std::max(norm, y[i]);
      }
      for (std::size_t i = 0; i < k; ++i) x[i] = y[i] / norm;
      if (hi - lo <= tol) break;
    }
    const double root = static_cast<double>((lo + hi) / 2 - 1);
    if (root > best.root)
      best = {root, static_cast<double>(lo - 1), static_cast<double>(hi - 1), it + 1};
  }
  return best;
}

inline double perron_root(const Matrix& m) { return perron_root_bracket(m).root; }

inline double perron_root(const std::vector<std::vector<int>>& m) {
  Matrix d(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) d[i].assign(m[i].begin(), m[i].end());
  return perron_root(d);
}

}  // namespace jarnik::automata
