#pragma once

// The two inductive constructions over a pluggable instance: a subcover tree
// that avoids resonant neighbourhoods (lower path) and a refining cover of
// the avoidance set (upper path).
//
// A cell instance provides
//   using scalar_type;                       exact rational or double
//   static constexpr std::size_t dimension;
//   Box<scalar_type, dimension> region(unsigned level, const Index<dimension>&) const;
//   std::array<std::uint64_t, dimension> splits() const;   per grid level
//   double root_scale() const;   scale of the level-0 cell
//   double level_step() const;   scale increment per grid level
//   double sigma() const;        diameter exponent
//   double c_sigma() const;
//   void neighborhoods(const Box&, const NeighborhoodQuery&, std::vector<Box>&) const;
// and optionally
//   void prepare_level(unsigned level, const NeighborhoodQuery&) const;
//   bool covered(unsigned level, const Index&, const NeighborhoodQuery&) const;
//   bool meets(unsigned level, const Index&, const NeighborhoodQuery&) const;
// which replace the generic box geometry when present.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <type_traits>
#include <vector>

#include <boost/rational.hpp>

#include "jarnik/common.hpp"

namespace jarnik::cover {

using Exact = boost::rational<std::int64_t>;

inline double to_double(double v) { return v; }
inline double to_double(const Exact& v) {
  return static_cast<double>(v.numerator()) / static_cast<double>(v.denominator());
}

/// Rational with denominator 2^40 rounded towards -inf (down) or +inf (up).
inline Exact dyadic_bound(double v, bool up) {
  constexpr double scale = 1099511627776.0;  // 2^40
  const double s = v * scale;
  require(std::fabs(s) < 9.0e18, "dyadic_bound: value out of range");
  const double r = up ? std::ceil(s) : std::floor(s);
  return Exact(static_cast<std::int64_t>(r), static_cast<std::int64_t>(scale));
}

template <std::size_t D>
using Index = std::array<std::uint64_t, D>;

template <class S, std::size_t D>
struct Box {
  std::array<S, D> lo;
  std::array<S, D> hi;
};

/// Closed boxes intersect.
template <class S, std::size_t D>
bool boxes_meet(const Box<S, D>& a, const Box<S, D>& b) {
  for (std::size_t i = 0; i < D; ++i)
    if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
  return true;
}

template <class S, std::size_t D>
bool box_contains(const Box<S, D>& outer, const Box<S, D>& inner) {
  for (std::size_t i = 0; i < D; ++i)
    if (inner.lo[i] < outer.lo[i] || outer.hi[i] < inner.hi[i]) return false;
  return true;
}

namespace detail {

template <class S>
bool interval_covered(S lo, const S& hi, std::vector<std::pair<S, S>> parts) {
  std::sort(parts.begin(), parts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [a, b] : parts) {
    if (lo < a) return false;
    if (lo < b) lo = b;
    if (!(lo < hi)) return true;
  }
  return !(lo < hi);
}

template <class S>
struct DynBox {
  std::vector<S> lo, hi;
};

/// Is the closed box `t` (restricted to axes >= axis) covered by the union?
template <class S>
bool covered_rec(const DynBox<S>& t, const std::vector<const DynBox<S>*>& boxes,
                 std::size_t axis) {
  const std::size_t dim = t.lo.size();
  if (boxes.empty()) return false;
  if (axis + 1 == dim) {
    std::vector<std::pair<S, S>> parts;
    parts.reserve(boxes.size());
    for (const auto* b : boxes) parts.emplace_back(b->lo[axis], b->hi[axis]);
    return interval_covered(t.lo[axis], t.hi[axis], std::move(parts));
  }
  std::vector<S> cuts{t.lo[axis], t.hi[axis]};
  for (const auto* b : boxes) {
    if (t.lo[axis] < b->lo[axis] && b->lo[axis] < t.hi[axis]) cuts.push_back(b->lo[axis]);
    if (t.lo[axis] < b->hi[axis] && b->hi[axis] < t.hi[axis]) cuts.push_back(b->hi[axis]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<const DynBox<S>*> sub;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    sub.clear();
    for (const auto* b : boxes)
      if (!(cuts[j] < b->lo[axis]) && !(b->hi[axis] < cuts[j + 1])) sub.push_back(b);
    if (!covered_rec(t, sub, axis + 1)) return false;
  }
  return true;
}

}  // namespace detail

/// Exact test that a closed box lies inside a finite union of closed boxes.
/// Boxes spanning the target in every axis but one (slabs) take a 1-D fast
/// path; the general case sweeps axis by axis.
template <class S, std::size_t D>
bool box_covered(const Box<S, D>& target, const std::vector<Box<S, D>>& boxes) {
  std::vector<const Box<S, D>*> near;
  for (const auto& b : boxes)
    if (boxes_meet(target, b)) {
      if (box_contains(b, target)) return true;
      near.push_back(&b);
    }
  if (near.empty()) return false;
  std::array<std::vector<std::pair<S, S>>, D> slabs;
  for (const auto* b : near) {
    int free_axis = -1;
    int narrow = 0;
    for (std::size_t i = 0; i < D; ++i)
      if (target.lo[i] < b->lo[i] || b->hi[i] < target.hi[i]) {
        ++narrow;
        free_axis = static_cast<int>(i);
      }
    if (narrow == 1) {
      slabs[static_cast<std::size_t>(free_axis)].emplace_back(
          b->lo[static_cast<std::size_t>(free_axis)], b->hi[static_cast<std::size_t>(free_axis)]);
    }
  }
  for (std::size_t i = 0; i < D; ++i)
    if (!slabs[i].empty() && detail::interval_covered(target.lo[i], target.hi[i], slabs[i]))
      return true;
  if (D == 1) return false;
  detail::DynBox<S> t{{target.lo.begin(), target.lo.end()}, {target.hi.begin(), target.hi.end()}};
  std::vector<detail::DynBox<S>> store;
  store.reserve(near.size());
  for (const auto* b : near) store.push_back({{b->lo.begin(), b->lo.end()}, {b->hi.begin(), b->hi.end()}});
  std::vector<const detail::DynBox<S>*> ptrs;
  for (const auto& b : store) ptrs.push_back(&b);
  return detail::covered_rec(t, ptrs, 0);
}

enum class ScaleRule { Relative, Absolute };
enum class Rounding { Outward, Inward };

/// Selects resonant points y with t_min < s(y) <= t_max and asks for their
/// closed neighbourhoods at scale s(y) + scale (Relative) or scale (Absolute).
/// Outward rounding may only enlarge neighbourhoods, Inward only shrink them.
struct NeighborhoodQuery {
  double t_max = 0.0;
  double t_min = -std::numeric_limits<double>::infinity();
  ScaleRule rule = ScaleRule::Relative;
  double scale = 0.0;
  Rounding rounding = Rounding::Inward;

  double scale_for(double size) const { return rule == ScaleRule::Relative ? size + scale : scale; }
};

/// Relative inflation for binary64 radii.
inline double rounded_radius(double r, Rounding rounding) {
  return rounding == Rounding::Outward ? r * (1.0 + 1e-12) : r * (1.0 - 1e-12);
}

struct Limits {
  unsigned max_levels = 16;
  std::uint64_t max_cells = 10'000'000;
  unsigned workers = 1;
};

template <class I>
concept HasCovered = requires(const I& inst, unsigned lvl, const Index<I::dimension>& idx,
                              const NeighborhoodQuery& q) {
  { inst.covered(lvl, idx, q) } -> std::convertible_to<bool>;
};

template <class I>
concept HasMeets = requires(const I& inst, unsigned lvl, const Index<I::dimension>& idx,
                            const NeighborhoodQuery& q) {
  { inst.meets(lvl, idx, q) } -> std::convertible_to<bool>;
};

template <class I>
concept HasPrepare = requires(const I& inst, unsigned lvl, const NeighborhoodQuery& q) {
  inst.prepare_level(lvl, q);
};

/// Region of a cell from the root box and per-axis split factors.
template <class S, std::size_t D>
Box<S, D> uniform_cell(const Box<S, D>& root, const std::array<std::uint64_t, D>& splits,
                       unsigned level, const Index<D>& idx) {
  Box<S, D> b;
  for (std::size_t i = 0; i < D; ++i) {
    std::uint64_t den = 1;
    for (unsigned l = 0; l < level; ++l) {
      require(den <= std::numeric_limits<std::uint64_t>::max() / splits[i],
              "uniform_cell: grid too fine for 64-bit indices");
      den *= splits[i];
    }
    const S w = root.hi[i] - root.lo[i];
    if constexpr (std::is_same_v<S, Exact>) {
      b.lo[i] = root.lo[i] + w * Exact(static_cast<std::int64_t>(idx[i]), static_cast<std::int64_t>(den));
      b.hi[i] = root.lo[i] + w * Exact(static_cast<std::int64_t>(idx[i] + 1), static_cast<std::int64_t>(den));
    } else {
      b.lo[i] = root.lo[i] + w * static_cast<double>(idx[i]) / static_cast<double>(den);
      b.hi[i] = root.lo[i] + w * static_cast<double>(idx[i] + 1) / static_cast<double>(den);
    }
  }
  return b;
}

namespace detail {

template <std::size_t D>
std::vector<Index<D>> children_of(const Index<D>& parent, const std::array<std::uint64_t, D>& factor) {
  std::uint64_t total = 1;
  for (auto f : factor) total *= f;
  std::vector<Index<D>> out;
  out.reserve(total);
  Index<D> off{};
  for (std::uint64_t c = 0; c < total; ++c) {
    Index<D> child;
    for (std::size_t i = 0; i < D; ++i) child[i] = parent[i] * factor[i] + off[i];
    out.push_back(child);
    for (std::size_t i = D; i-- > 0;) {  // lexicographic: last axis fastest
      if (++off[i] < factor[i]) break;
      off[i] = 0;
    }
  }
  return out;
}

template <class I>
bool child_covered(const I& inst, unsigned level, const Index<I::dimension>& idx,
                   const NeighborhoodQuery& q,
                   const std::vector<Box<typename I::scalar_type, I::dimension>>& parent_boxes) {
  if constexpr (HasCovered<I>) {
    (void)parent_boxes;
    return inst.covered(level, idx, q);
  } else {
    return box_covered(inst.region(level, idx), parent_boxes);
  }
}

template <class I>
bool child_meets(const I& inst, unsigned level, const Index<I::dimension>& idx,
                 const NeighborhoodQuery& q,
                 const std::vector<Box<typename I::scalar_type, I::dimension>>& parent_boxes) {
  if constexpr (HasMeets<I>) {
    (void)parent_boxes;
    return inst.meets(level, idx, q);
  } else {
    const auto r = inst.region(level, idx);
    for (const auto& b : parent_boxes)
      if (boxes_meet(r, b)) return true;
    return false;
  }
}

}  // namespace detail

// ---------------------------------------------------------------- lower path

template <std::size_t D>
struct TreeNode {
  Index<D> idx;
  unsigned depth = 0;
  std::uint32_t parent = 0;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;
};

template <std::size_t D>
struct CoverTree {
  std::vector<TreeNode<D>> nodes;
  std::vector<std::size_t> level_begin;     ///< nodes of depth k: [level_begin[k], level_begin[k+1])
  std::vector<double> density;              ///< Delta_k for k = 0..depth-1
  std::vector<std::uint64_t> level_counts;  ///< nodes per depth
  std::array<std::uint64_t, D> factor{};    ///< split per axis per tree step
  unsigned grid_levels_per_step = 1;
  double t0 = 0.0;
  double c = 0.0;
  double l_c = 0.0;
  double d_star = 0.0;
  bool extinct = false;
  unsigned extinct_depth = 0;
  bool truncated = false;

  unsigned depth() const { return static_cast<unsigned>(level_counts.size()) - 1; }
  double scale(unsigned k) const { return t0 + c * k; }
  unsigned grid_level(unsigned k) const { return k * grid_levels_per_step; }
};

/// Number of grid levels making up one step of size c; c must be a multiple
/// of the instance's level step within 1e-9.
inline unsigned steps_for(double c, double level_step) {
  require(c > 0.0 && level_step > 0.0, "cover: c and the level step must be positive");
  const double r = c / level_step;
  const double j = std::round(r);
  require(j >= 1.0 && std::fabs(r - j) <= 1e-9 * std::max(1.0, r),
          "cover: c must be a positive multiple of the instance grid step");
  return static_cast<unsigned>(j);
}

/// Children of a depth-k node at scale t_{k+1} = t_k + c are the grid cells
/// of the node that avoid N(R(t_k - l_c), t_k + c - 2 d_*).
template <class I>
CoverTree<I::dimension> build_subcover_tree(const I& inst, double c, double l_c, double d_star,
                                            unsigned depth, const Limits& limits = {}) {
  constexpr std::size_t D = I::dimension;
  require(c >= d_star, "build_subcover_tree: need c >= d_*");
  require(depth >= 1, "build_subcover_tree: depth must be positive");
  CoverTree<D> tree;
  tree.grid_levels_per_step = steps_for(c, inst.level_step());
  tree.t0 = inst.root_scale();
  tree.c = c;
  tree.l_c = l_c;
  tree.d_star = d_star;
  const auto splits = inst.splits();
  std::uint64_t per_node = 1;
  for (std::size_t i = 0; i < D; ++i) {
    std::uint64_t f = 1;
    for (unsigned j = 0; j < tree.grid_levels_per_step; ++j) f *= splits[i];
    tree.factor[i] = f;
    per_node *= f;
  }
  tree.nodes.push_back(TreeNode<D>{Index<D>{}, 0, 0, 0, 0});
  tree.level_begin = {0, 1};
  tree.level_counts = {1};
  for (unsigned k = 0; k < depth && k < limits.max_levels; ++k) {
    const std::size_t b = tree.level_begin[k], e = tree.level_begin[k + 1];
    if (tree.nodes.size() + (e - b) * per_node > limits.max_cells) {
      tree.truncated = true;
      break;
    }
    const double tk = tree.scale(k);
    NeighborhoodQuery q;
    q.t_max = tk - l_c;
    q.rule = ScaleRule::Absolute;
    q.scale = tk + c - 2.0 * d_star;
    q.rounding = Rounding::Outward;
    const unsigned child_level = tree.grid_level(k + 1);
    if constexpr (HasPrepare<I>) inst.prepare_level(child_level, q);
    std::vector<std::vector<Index<D>>> kept(e - b);
    parallel_for(e - b, limits.workers, [&](std::size_t i) {
      const auto& node = tree.nodes[b + i];
      std::vector<Box<typename I::scalar_type, D>> boxes;
      if constexpr (!HasMeets<I>) inst.neighborhoods(inst.region(tree.grid_level(k), node.idx), q, boxes);
      for (const auto& ch : detail::children_of<D>(node.idx, tree.factor))
        if (!detail::child_meets(inst, child_level, ch, q, boxes)) kept[i].push_back(ch);
    });
    double delta = 1.0;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      auto& node = tree.nodes[b + i];
      node.first_child = static_cast<std::uint32_t>(tree.nodes.size());
      node.child_count = static_cast<std::uint32_t>(kept[i].size());
      delta = std::min(delta, static_cast<double>(kept[i].size()) / static_cast<double>(per_node));
      if (kept[i].empty() && !tree.extinct) {
        tree.extinct = true;
        tree.extinct_depth = k;
      }
      for (const auto& ch : kept[i])
        tree.nodes.push_back(TreeNode<D>{ch, k + 1, static_cast<std::uint32_t>(b + i), 0, 0});
      count += kept[i].size();
    }
    tree.density.push_back(delta);
    tree.level_counts.push_back(count);
    tree.level_begin.push_back(tree.nodes.size());
    if (tree.extinct) break;
  }
  return tree;
}

/// d_mu - |log min_k Delta_k| / (sigma c), clipped at 0.
template <std::size_t D>
double estimate_lower_dim(const CoverTree<D>& tree, double d_mu, double sigma, double c) {
  require(!tree.extinct, "estimate_lower_dim: tree has an extinct branch");
  require(!tree.density.empty(), "estimate_lower_dim: tree needs at least two levels");
  require(sigma > 0.0 && c > 0.0, "estimate_lower_dim: sigma and c must be positive");
  const double m = *std::min_element(tree.density.begin(), tree.density.end());
  require(m > 0.0, "estimate_lower_dim: zero density");
  return std::max(0.0, d_mu - std::fabs(std::log(m)) / (sigma * c));
}

// ------------------------------------------------------- lower path, balls
//
// A ball instance provides
//   static constexpr std::size_t dimension;
//   std::array<double, dimension> root_center() const;
//   double root_scale() const;
//   double radius(double t) const;    radius of psi(x, t)
//   void neighborhood_balls(const std::array<double, dimension>& center, double reach,
//                           const NeighborhoodQuery&, std::vector<Ball<dimension>>&) const;
//     closed neighbourhood balls meeting B(center, reach)

template <std::size_t D>
struct Ball {
  std::array<double, D> center;
  double radius;
};

template <std::size_t D>
double distance(const std::array<double, D>& a, const std::array<double, D>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < D; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

template <std::size_t D>
struct BallNode {
  std::array<double, D> center;
  unsigned depth = 0;
  std::uint32_t parent = 0;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;
};

template <std::size_t D>
struct BallTree {
  std::vector<BallNode<D>> nodes;
  std::vector<std::size_t> level_begin;
  std::vector<double> density;
  std::vector<std::uint64_t> level_counts;
  std::vector<double> radii;  ///< radius of psi at depth k
  double t0 = 0.0;
  double c = 0.0;
  bool extinct = false;
  unsigned extinct_depth = 0;
  bool truncated = false;

  unsigned depth() const { return static_cast<unsigned>(level_counts.size()) - 1; }
};

/// First-fit packing: candidate centres on a grid of pitch r_{k+1}/8 around
/// the parent centre, in lexicographic order. A candidate is accepted when its
/// ball stays inside the parent, misses N(R(t_k - l_c), t_k + c - 2 d_*), and
/// psi(x', t_{k+1} - d_*) is disjoint from those of earlier siblings.
template <class I>
BallTree<I::dimension> build_subcover_tree_balls(const I& inst, double c, double l_c,
                                                 double d_star, unsigned depth,
                                                 const Limits& limits = {}) {
  constexpr std::size_t D = I::dimension;
  require(c > 0.0 && c >= d_star, "build_subcover_tree_balls: need c >= d_* and c > 0");
  require(depth >= 1, "build_subcover_tree_balls: depth must be positive");
  BallTree<D> tree;
  tree.t0 = inst.root_scale();
  tree.c = c;
  tree.nodes.push_back(BallNode<D>{inst.root_center(), 0, 0, 0, 0});
  tree.level_begin = {0, 1};
  tree.level_counts = {1};
  tree.radii.push_back(inst.radius(tree.t0));
  for (unsigned k = 0; k < depth && k < limits.max_levels; ++k) {
    const double tk = tree.t0 + c * k;
    const double rk = inst.radius(tk);
    const double rc = inst.radius(tk + c);
    const double sep = 2.0 * inst.radius(tk + c - d_star);
    const double pitch = rc / 8.0;
    const long half = static_cast<long>(std::floor((rk - rc) / pitch));
    require(half >= 0, "build_subcover_tree_balls: child radius exceeds parent radius");
    double per = 1.0;
    for (std::size_t i = 0; i < D; ++i) per *= static_cast<double>(2 * half + 1);
    const std::size_t b = tree.level_begin[k], e = tree.level_begin[k + 1];
    if (static_cast<double>(tree.nodes.size()) + static_cast<double>(e - b) * per >
        static_cast<double>(limits.max_cells)) {
      tree.truncated = true;
      break;
    }
    NeighborhoodQuery q;
    q.t_max = tk - l_c;
    q.rule = ScaleRule::Absolute;
    q.scale = tk + c - 2.0 * d_star;
    q.rounding = Rounding::Outward;
    std::vector<std::vector<std::array<double, D>>> kept(e - b);
    parallel_for(e - b, limits.workers, [&](std::size_t i) {
      const auto x = tree.nodes[b + i].center;
      std::vector<Ball<D>> excl;
      inst.neighborhood_balls(x, rk, q, excl);
      std::array<long, D> z;
      z.fill(-half);
      while (true) {
        std::array<double, D> cand;
        for (std::size_t a = 0; a < D; ++a) cand[a] = x[a] + pitch * static_cast<double>(z[a]);
        bool ok = distance(cand, x) + rc <= rk;
        for (std::size_t j = 0; ok && j < excl.size(); ++j)
          if (distance(cand, excl[j].center) <= rc + excl[j].radius) ok = false;
        for (std::size_t j = 0; ok && j < kept[i].size(); ++j)
          if (distance(cand, kept[i][j]) < sep) ok = false;
        if (ok) kept[i].push_back(cand);
        std::size_t a = D;
        while (a-- > 0) {
          if (++z[a] <= half) break;
          z[a] = -half;
        }
        if (a == static_cast<std::size_t>(-1)) break;
      }
    });
    const double ratio = std::pow(rc / rk, static_cast<double>(D));
    double delta = std::numeric_limits<double>::infinity();
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      auto& node = tree.nodes[b + i];
      node.first_child = static_cast<std::uint32_t>(tree.nodes.size());
      node.child_count = static_cast<std::uint32_t>(kept[i].size());
      delta = std::min(delta, static_cast<double>(kept[i].size()) * ratio);
      if (kept[i].empty() && !tree.extinct) {
        tree.extinct = true;
        tree.extinct_depth = k;
      }
      for (const auto& ch : kept[i])
        tree.nodes.push_back(BallNode<D>{ch, k + 1, static_cast<std::uint32_t>(b + i), 0, 0});
      count += kept[i].size();
    }
    tree.density.push_back(delta);
    tree.level_counts.push_back(count);
    tree.level_begin.push_back(tree.nodes.size());
    tree.radii.push_back(rc);
    if (tree.extinct) break;
  }
  return tree;
}

template <std::size_t D>
double estimate_lower_dim(const BallTree<D>& tree, double d_mu, double sigma, double c) {
  require(!tree.extinct, "estimate_lower_dim: tree has an extinct branch");
  require(!tree.density.empty(), "estimate_lower_dim: tree needs at least two levels");
  const double m = *std::min_element(tree.density.begin(), tree.density.end());
  require(m > 0.0, "estimate_lower_dim: zero density");
  return std::max(0.0, d_mu - std::fabs(std::log(m)) / (sigma * c));
}

// ---------------------------------------------------------------- upper path

struct LevelStats {
  unsigned k = 0;
  double t_bar = 0.0;
  std::uint64_t count = 0;
  double diameter = 0.0;
  double density = 1.0;  ///< count / (previous count * cells per split)
  double estimate = 0.0; ///< log N_k / (sigma tbar_k)
};

template <std::size_t D>
struct CoverStats {
  std::vector<LevelStats> levels;
  std::vector<Index<D>> final_cells;  ///< filled when requested
  double sigma = 1.0;
  bool truncated = false;
  bool empty = false;  ///< some N_k = 0: the avoidance set misses the root
};

/// Level k+1 keeps the grid children of level-k cells that are not covered
/// by the union of closed neighbourhoods psi(y, s(y) + c) over s(y) <= tbar_k + u_c.
template <class I>
CoverStats<I::dimension> refine_upper_cover(const I& inst, double c, double u_c, unsigned depth,
                                            const Limits& limits = {}, bool keep_final = false) {
  constexpr std::size_t D = I::dimension;
  require(depth >= 1, "refine_upper_cover: depth must be positive");
  require(u_c >= 0.0, "refine_upper_cover: u_c must be nonnegative");
  CoverStats<D> stats;
  stats.sigma = inst.sigma();
  const auto splits = inst.splits();
  std::uint64_t per_cell = 1;
  for (auto s : splits) per_cell *= s;
  auto record = [&](unsigned k, std::uint64_t count, double density) {
    LevelStats ls;
    ls.k = k;
    ls.t_bar = inst.root_scale() + inst.level_step() * k;
    ls.count = count;
    ls.diameter = inst.c_sigma() * std::exp(-inst.sigma() * ls.t_bar);
    ls.density = density;
    ls.estimate = (count > 0 && ls.t_bar > 0.0)
                      ? std::log(static_cast<double>(count)) / (inst.sigma() * ls.t_bar)
                      : 0.0;
    stats.levels.push_back(ls);
  };
  std::vector<Index<D>> current{Index<D>{}};
  record(0, 1, 1.0);
  std::uint64_t total = 1;
  for (unsigned k = 0; k < depth && k < limits.max_levels; ++k) {
    if (total + current.size() * per_cell > limits.max_cells) {
      stats.truncated = true;
      break;
    }
    NeighborhoodQuery q;
    q.t_max = stats.levels.back().t_bar + u_c;
    q.rule = ScaleRule::Relative;
    q.scale = c;
    q.rounding = Rounding::Inward;
    if constexpr (HasPrepare<I>) inst.prepare_level(k + 1, q);
    std::vector<std::vector<Index<D>>> kept(current.size());
    parallel_for(current.size(), limits.workers, [&](std::size_t i) {
      std::vector<Box<typename I::scalar_type, D>> boxes;
      if constexpr (!HasCovered<I>) inst.neighborhoods(inst.region(k, current[i]), q, boxes);
      for (const auto& ch : detail::children_of<D>(current[i], splits))
        if (!detail::child_covered(inst, k + 1, ch, q, boxes)) kept[i].push_back(ch);
    });
    std::vector<Index<D>> next;
    for (auto& v : kept) next.insert(next.end(), v.begin(), v.end());
    total += next.size();
    const double density = current.empty() ? 0.0
                                           : static_cast<double>(next.size()) /
                                                 (static_cast<double>(current.size()) * per_cell);
    record(k + 1, next.size(), density);
    current.swap(next);
    if (current.empty()) {
      stats.empty = true;
      break;
    }
  }
  if (keep_final) stats.final_cells = current;
  return stats;
}

struct UpperEstimate {
  double ratio = 0.0;  ///< log N_K / (sigma tbar_K) at the final level
  double slope = 0.0;  ///< least-squares slope of log N_k against sigma tbar_k
  std::vector<double> sequence;
  bool empty_certificate = false;
};

/// Final-level ratio plus a box-counting slope over the last `window` levels.
template <std::size_t D>
UpperEstimate estimate_upper_dim(const CoverStats<D>& stats, double sigma, unsigned window = 4) {
  require(stats.levels.size() >= 2, "estimate_upper_dim: need at least two levels");
  require(sigma > 0.0, "estimate_upper_dim: sigma must be positive");
  require(window >= 2, "estimate_upper_dim: window must be at least 2");
  UpperEstimate out;
  for (const auto& l : stats.levels) {
    if (l.count == 0) {
      out.empty_certificate = true;
      out.sequence.assign(stats.levels.size(), 0.0);
      return out;
    }
    out.sequence.push_back(l.t_bar > 0.0 ? std::log(static_cast<double>(l.count)) / (sigma * l.t_bar)
                                         : 0.0);
  }
  out.ratio = out.sequence.back();
  const std::size_t n = stats.levels.size();
  const std::size_t first = n > window ? n - window : 1;
  std::vector<double> x, y;
  for (std::size_t i = (n - first >= 2 ? first : 0); i < n; ++i) {
    x.push_back(sigma * stats.levels[i].t_bar);
    y.push_back(std::log(static_cast<double>(stats.levels[i].count)));
  }
  out.slope = least_squares_slope(x, y);
  return out;
}

}  // namespace jarnik::cover
