#pragma once

// Command-line runner: parses argv, runs one experiment and renders a table
// as CSV or schema-versioned JSON. Exit 0 on success, 2 on a configuration
// error, 3 when a checked inequality fails.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jarnik/cf.hpp"
#include "jarnik/common.hpp"
#include "jarnik/cover_engine.hpp"
#include "jarnik/euclid.hpp"
#include "jarnik/framework.hpp"
#include "jarnik/shift.hpp"
#include "jarnik/toral.hpp"

namespace jarnik::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kFalsified = 3 };

// ---------------------------------------------------------------- tables

using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

inline std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(9) << v;
  return os.str();
}

inline nlohmann::json num9(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(fmt9(v));
}

inline nlohmann::json to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<T, double>) return num9(v);
        else return v;
      },
      c);
}

inline std::string to_csv(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, double>) return fmt9(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        }
      },
      c);
}

struct Report {
  Report() = default;
  Report(std::string cmd, std::vector<std::string> cols) : command(std::move(cmd)), columns(std::move(cols)) {}

  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json meta = nlohmann::json::object();
  bool falsified = false;
  std::string failure;

  void add(std::vector<Cell> row) {
    require(row.size() == columns.size(), "Report: row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline std::string render(const Report& r, const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << '\n';
    for (const auto& row : r.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << to_csv(row[i]);
      os << '\n';
    }
    return os.str();
  }
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["command"] = r.command;
  for (auto it = r.meta.begin(); it != r.meta.end(); ++it) j[it.key()] = it.value();
  j["ok"] = !r.falsified;
  if (r.falsified) j["failure"] = r.failure;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = to_json(row[i]);
    j["rows"].push_back(o);
  }
  os << j.dump(2) << '\n';
  return os.str();
}

// ---------------------------------------------------------------- parsing

/// "9..16", "2,3,4" or mixtures such as "1..3,7".
inline std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string part;
  auto to_int = [](const std::string& t) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &pos);
    } catch (const std::exception&) {
      throw domain_error("bad integer '" + t + "'");
    }
    require(pos == t.size(), "bad integer '" + t + "'");
    return static_cast<std::int64_t>(v);
  };
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(part));
      continue;
    }
    const auto a = to_int(part.substr(0, dots)), b = to_int(part.substr(dots + 2));
    require(a <= b && b - a <= 100000, "bad range '" + part + "'");
    for (auto v = a; v <= b; ++v) out.push_back(v);
  }
  require(!out.empty(), "empty list");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(part, &pos);
    } catch (const std::exception&) {
      throw domain_error("bad number '" + part + "'");
    }
    require(pos == part.size() && std::isfinite(v), "bad number '" + part + "'");
    out.push_back(v);
  }
  require(!out.empty(), "empty list");
  return out;
}

inline std::uint64_t cell_budget(std::uint64_t fallback) {
  if (const char* env = std::getenv("JARNIK_BUDGET_CELLS")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    require(end && *end == '\0' && v > 0, "JARNIK_BUDGET_CELLS must be a positive integer");
    return v;
  }
  return fallback;
}

inline nlohmann::json levels_json(const std::vector<cover::LevelStats>& levels) {
  auto a = nlohmann::json::array();
  for (const auto& l : levels)
    a.push_back({{"k", l.k}, {"t_k", num9(l.t_bar)}, {"count", l.count}, {"density", num9(l.density)},
                 {"estimate", num9(l.estimate)}});
  return a;
}

// ---------------------------------------------------------------- experiments

struct Options {
  std::string format;
  std::string output;
  std::uint64_t seed = cf::kDefaultSeed;
  unsigned threads = 1;
  std::uint64_t max_cells = 10'000'000;
  unsigned depth = 0;  ///< 0: command default

  // instance parameters
  std::string N_list = "9..16";
  std::string n_list = "2,3,4";
  std::string p_list = "1,2";
  std::string c_list = "1..6";
  std::string m_list = "3..8";
  std::string lambda_list = "2,2";
  std::string reading = "metric";
  std::string instance = "bad1";
  std::string word = "1";
  std::string x;
  std::string periodic;
  std::string source = "random";
  std::string weights;
  std::string formula;
  long long q_max = 1000;
  long long N = 10;
  long long n = 1;
  long long k_max = 10;
  long long N_max = 500;
  long long lambda = 2, beta = 2;
  long long splits = 36;
  long long points = 20;
  long long trials = 1000;
  long long anchor_m = 0;
  double c = 1.0;
  double u_c = -1.0;
  std::optional<double> c_n, k_u, kbar_u;
  double d_mu = 1.0, sigma = 1.0, tau = 1.0, tau_l = 0.5, N_c = 2.0, c_tau = 4.0, tau_bar = 0.5;
  double phi = -1.0, c1 = 1.0, c2 = 1.0, k_l = 0.0, kbar_l = 1.0, phi_half = -1.0;
};

inline cover::Limits limits_of(const Options& o) {
  cover::Limits lim;
  lim.workers = std::max(1u, o.threads);
  lim.max_cells = cell_budget(o.max_cells);
  lim.max_levels = std::max(16u, o.depth);
  return lim;
}

inline Report verify_jarnik(const Options& o) {
  Report r{"verify-jarnik", {"N", "lower", "oracle", "oracle_low", "oracle_high", "upper", "ok"}};
  for (auto N : parse_int_list(o.N_list)) {
    const auto b = cf::jarnik_bounds_thm11(N);
    const auto d = o.depth ? cf::dim_mn_oracle(N, o.depth, o.threads) : cf::dim_mn_oracle(N, cf::default_mn_depth(N), o.threads);
    const bool ok = b.lower < d.lower && d.upper < b.upper;
    if (!ok && !r.falsified) {
      r.falsified = true;
      r.failure = "dim M_" + std::to_string(N) + " leaves the Jarnik interval";
    }
    r.add({std::int64_t(N), b.lower, d.value, d.lower, d.upper, b.upper, ok});
  }
  return r;
}

inline Report cf_dim(const Options& o) {
  Report r{"cf-dim", {"N", "dim", "low", "high", "depth", "residual"}};
  for (auto N : parse_int_list(o.N_list)) {
    const auto d = o.depth ? cf::dim_mn_oracle(N, o.depth, o.threads) : cf::dim_mn_oracle(N, cf::default_mn_depth(N), o.threads);
    r.add({std::int64_t(N), d.value, d.lower, d.upper, std::int64_t(d.depth), d.residual});
  }
  return r;
}

inline Report approx_constant(const Options& o) {
  Report r{"approx-constant", {"x", "c_value", "witness_p", "witness_q", "lower_bound", "certified"}};
  require(o.x.empty() != o.periodic.empty(), "approx-constant: give exactly one of --x or --periodic");
  cf::ApproxConstant ac;
  std::string desc;
  if (!o.periodic.empty()) {
    std::vector<int> block;
    for (auto v : parse_int_list(o.periodic)) {
      require(v >= 1 && v <= 1000000, "approx-constant: partial quotients must be positive");
      block.push_back(static_cast<int>(v));
    }
    desc = cf::block_description(block);
    ac = cf::approx_constant(cf::periodic_quadratic(block), o.q_max);
  } else if (o.x.find('/') != std::string::npos) {
    const auto x = euclid::detail::parse_rational(o.x);
    desc = cf::to_string(x);
    ac = cf::approx_constant(x, o.q_max);
  } else {
    desc = o.x;
    ac = cf::approx_constant(parse_double_list(o.x).at(0), o.q_max);
  }
  r.add({desc, ac.value, boost::multiprecision::numerator(ac.witness).str(),
         boost::multiprecision::denominator(ac.witness).str(), ac.lower_bound, ac.tail_bound_valid});
  return r;
}

inline Report spectrum(const Options& o) {
  Report r{"spectrum", {"x_description", "c_value", "witness_p", "witness_q"}};
  require(o.points >= 1, "spectrum: --points must be positive");
  require(o.source == "random" || o.source == "quadratic", "spectrum: --source is random or quadratic");
  const auto src = o.source == "random" ? cf::SpectrumSource::Random : cf::SpectrumSource::Quadratic;
  for (const auto& s : cf::sample_spectrum(static_cast<std::size_t>(o.points), o.q_max, src, o.seed))
    r.add({s.description, s.value, boost::multiprecision::numerator(s.witness).str(),
           boost::multiprecision::denominator(s.witness).str()});
  return r;
}

inline std::vector<shift::Reading> readings_of(const std::string& s) {
  if (s == "metric") return {shift::Reading::Metric};
  if (s == "literal") return {shift::Reading::Literal};
  if (s == "both") return {shift::Reading::Metric, shift::Reading::Literal};
  throw domain_error("--reading must be metric, literal or both");
}

inline const char* reading_name(shift::Reading r) { return r == shift::Reading::Metric ? "metric" : "literal"; }

inline Report sft_dim(const Options& o) {
  Report r{"sft-dim", {"n", "word", "c", "reading", "dim", "bound_V"}};
  const auto w = shift::PeriodicWord::parse(static_cast<int>(o.n), o.word);
  for (auto c : parse_int_list(o.c_list))
    for (auto rd : readings_of(o.reading)) {
      require(c >= 1 && c <= 64, "sft-dim: c must lie in 1..64");
      r.add({std::int64_t(o.n), w.str(), std::int64_t(c), std::string(reading_name(rd)),
             shift::sft_dimension(w, static_cast<int>(c), rd), shift::thm37_bound(w.n, static_cast<int>(c))});
    }
  return r;
}

inline Report sft_sweep(const Options& o) {
  Report r{"sft-sweep",
           {"n", "p", "word", "c", "reading", "exact_dim_at_c", "exact_dim_at_shifted", "bound_V", "upper_ok", "lower_ok"}};
  std::vector<int> ns, cs;
  std::vector<std::size_t> ps;
  for (auto v : parse_int_list(o.n_list)) {
    require(v >= 2 && v <= 9, "sft-sweep: n must lie in 2..9");
    ns.push_back(static_cast<int>(v));
  }
  for (auto v : parse_int_list(o.p_list)) {
    require(v >= 1 && v <= 8, "sft-sweep: p must lie in 1..8");
    ps.push_back(static_cast<std::size_t>(v));
  }
  for (auto v : parse_int_list(o.c_list)) {
    require(v >= 1 && v <= 20, "sft-sweep: c must lie in 1..20");
    cs.push_back(static_cast<int>(v));
  }
  for (auto rd : readings_of(o.reading))
    for (const auto& row : shift::sandwich_sweep(ns, ps, cs, rd)) {
      // the upper inequality is stated for the length-c block; the literal
      // reading is checked on the lower side only
      const bool ok = row.lower_ok && (rd == shift::Reading::Literal || row.upper_ok);
      if (!ok && !r.falsified) {
        r.falsified = true;
        r.failure = "sandwich fails for word " + row.word + " at c = " + std::to_string(row.c);
      }
      r.add({std::int64_t(row.n), std::int64_t(row.p), row.word, std::int64_t(row.c), std::string(reading_name(rd)),
             row.exact_dim_at_c, row.exact_dim_at_shifted, row.bound_V, row.upper_ok, row.lower_ok});
    }
  return r;
}

inline euclid::WeightVector weights_of(const Options& o) {
  if (!o.weights.empty()) return euclid::WeightVector::parse(o.weights);
  require(o.n >= 1 && o.n <= 16, "--n must lie in 1..16");
  return euclid::WeightVector::uniform(static_cast<std::size_t>(o.n));
}

inline Report thm31_table(const Options& o) {
  Report r{"bounds",
           {"n", "r", "c", "bound_lower", "bound_upper", "applicable_radius", "boxcount_estimate", "oracle_low",
            "oracle_high"}};
  const auto w = weights_of(o);
  for (double c : parse_double_list(o.c_list)) {
    // below c0 the lower bound is not available; its radius still is
    const auto k = euclid::thm31_constants(w, o.c_n);
    const double radius = 0.5 * std::exp(-(2.0 * c + k.l_star + k.d_star));
    Cell lower = std::monostate{};
    if (c > std::log(18.0 * k.c_n) / k.delta) lower = euclid::thm31_lower(w, c, o.c_n).value;
    const auto hi = euclid::thm31_upper(w, c);
    std::vector<Cell> row{std::int64_t(w.n()), w.str(), c, lower, hi.value, radius,
                          std::monostate{}, std::monostate{}, std::monostate{}};
    // for n = 1 the lower bound describes Bad(kappa) with kappa the applicable
    // radius; Bad(1/m), m = ceil(1/kappa), contains it and sits inside M_m
    const double m = std::ceil(1.0 / radius);
    if (w.n() == 1 && m <= 64) {
      const auto N = static_cast<std::int64_t>(m) - 2;
      if (N >= 1) {
        const auto box = euclid::bad1_boxcount(N, o.depth ? o.depth : 14, limits_of(o));
        row[6] = box.estimate.slope;
        row[7] = cf::dim_mn_oracle(N).lower;
        row[8] = cf::dim_mn_oracle(N + 2).upper;
      }
    }
    r.add(std::move(row));
  }
  return r;
}

inline Report bounds(const Options& o) {
  const std::string& f = o.formula;
  if (f == "thm31-table") return thm31_table(o);
  Report r{"bounds", {"formula", "c", "value", "deficit", "c0", "applicable_radius", "label"}};
  auto add = [&](double value, double deficit, double c0, double radius, const std::string& label) {
    r.add({f, o.c, value, deficit, c0, radius, label});
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (f == "thm21-lower") {
    framework::BoundInputs in;
    in.c = o.c;
    in.sigma = o.sigma;
    in.d_mu = o.d_mu;
    const double v = framework::lower_bound_thm21(in, o.tau_l);
    add(v, o.d_mu - v, nan, nan, "d_mu - |log tau(c)|/(sigma c)");
  } else if (f == "thm21-upper") {
    framework::BoundInputs in;
    in.c = o.c;
    in.sigma = o.sigma;
    in.u_c = std::max(0.0, o.u_c);
    const double v = framework::upper_bound_thm21(in, o.N_c);
    add(v, nan, nan, nan, "log N(c)/(sigma (c + u_c))");
  } else if (f == "thm37") {
    require(o.c == std::round(o.c), "thm37: c must be an integer");
    const double v = shift::thm37_bound(static_cast<int>(o.n), static_cast<int>(o.c));
    add(v, std::log(static_cast<double>(o.n)) - v, nan, nan, "log n - |log(1 - n^-c)|/c");
  } else if (f == "thm31-lower" || f == "thm31-lower-proof" || f == "thm31-upper") {
    const auto w = weights_of(o);
    const auto b = f == "thm31-upper" ? euclid::thm31_upper(w, o.c)
                   : f == "thm31-lower" ? euclid::thm31_lower(w, o.c, o.c_n)
                                         : euclid::thm31_lower_proof_constant(w, o.c, o.c_n);
    add(b.value, b.deficit, b.c0, b.applicable_radius, b.label);
  } else if (f == "thm320-lower") {
    require(o.phi >= 0.0, "thm320-lower: --phi is required");
    const framework::PowerLaw pl{o.d_mu, o.c1, o.c2};
    const double v = toral::thm320_lower(o.d_mu, pl, o.tau, o.c_tau, o.phi, o.c, o.tau_bar);
    add(v, o.d_mu - v, toral::thm320_c0(o.tau, o.c_tau, o.tau_bar), toral::thm320_radius(o.c), "power-law measure");
  } else if (f == "thm320-lebesgue") {
    const double phi_half = o.phi_half >= 0.0 ? o.phi_half : o.c / 2.0 / std::log(static_cast<double>(o.lambda));
    const double v = toral::thm320_lower_lebesgue(static_cast<double>(o.n), o.k_l, o.kbar_l, phi_half, o.c);
    add(v, static_cast<double>(o.n) - v, nan, std::exp(-o.c), "lebesgue");
  } else if (f == "eq37-upper") {
    const auto d = toral::eq37_default_constants(o.lambda, o.beta);
    const double ku = o.k_u.value_or(d.k_u), kbu = o.kbar_u.value_or(d.kbar_u);
    const double def = toral::eq37_deficit(o.lambda, o.beta, o.c, ku, kbu);
    add(2.0 - def, def, toral::eq37_c0(o.lambda, o.beta, kbu), std::exp(-o.c),
        o.k_u || o.kbar_u ? "supplied constants" : "default constants");
  } else if (f == "jarnik") {
    const auto b = cf::jarnik_bounds_thm11(o.N);
    r.columns = {"formula", "N", "lower", "upper"};
    r.add({f, std::int64_t(o.N), b.lower, b.upper});
  } else if (f == "phi") {
    const auto l = parse_int_list(o.lambda_list);
    add(toral::phi_bound(toral::ToralSystem::diagonal(l), o.c), nan, nan, nan, "c/log lambda_max");
  } else {
    throw domain_error("bounds: unknown --formula '" + f + "'");
  }
  return r;
}

inline Report boxcount(const Options& o) {
  const auto lim = limits_of(o);
  if (o.instance == "bad1") {
    Report r{"boxcount", {"N", "c", "depth", "ratio", "slope", "oracle_low", "oracle_high", "ok"}};
    const unsigned depth = o.depth ? o.depth : 14;
    const auto res = euclid::bad1_boxcount(o.N, depth, lim, o.u_c >= 0.0 ? o.u_c : 2.0);
    const double lo = cf::dim_mn_oracle(o.N).lower - 0.05;
    const double hi = cf::dim_mn_oracle(o.N + 2).upper + 0.05;
    const bool ok = !res.truncated && res.estimate.slope >= lo && res.estimate.slope <= hi;
    if (!ok) {
      r.falsified = true;
      r.failure = res.truncated ? "cover truncated by the cell budget" : "estimate leaves the bracket";
    }
    r.add({std::int64_t(o.N), res.c, std::int64_t(depth), res.estimate.ratio, res.estimate.slope, lo, hi, ok});
    nlohmann::json lv = nlohmann::json::array();
    for (std::size_t k = 0; k < res.counts.size(); ++k) lv.push_back({{"k", k}, {"count", res.counts[k]}});
    r.meta["levels"] = lv;
    r.meta["truncated"] = res.truncated;
    return r;
  }
  if (o.instance == "toral") {
    Report r{"boxcount", {"lambdas", "c", "depth", "slope", "oracle_dim", "exact"}};
    const auto l = parse_int_list(o.lambda_list);
    const unsigned depth = o.depth ? o.depth : 12;
    const auto res = toral::toral_boxcount(l, o.c, depth, lim);
    std::string ls;
    for (std::size_t i = 0; i < l.size(); ++i) ls += (i ? "," : "") + std::to_string(l[i]);
    Cell oracle = std::monostate{};
    if (res.exact) {
      std::vector<int> ms;
      for (auto v : l) ms.push_back(static_cast<int>(std::lround(o.c / std::log(static_cast<double>(v)))));
      bool valid = true;
      for (int m : ms) valid = valid && m >= 2;
      if (valid) oracle = toral::exact_dim_oracle_diag(ms, l);
    }
    r.add({ls, o.c, std::int64_t(depth), res.slope, oracle, res.exact});
    nlohmann::json lv = nlohmann::json::array();
    for (std::size_t k = 0; k < res.counts.size(); ++k) lv.push_back({{"k", k}, {"count", res.counts[k]}});
    r.meta["levels"] = lv;
    r.meta["truncated"] = res.truncated;
    return r;
  }
  if (o.instance == "sft") {
    Report r{"boxcount", {"n", "word", "c", "depth", "ratio", "slope", "exact_dim"}};
    const auto w = shift::PeriodicWord::parse(static_cast<int>(o.n), o.word);
    const unsigned depth = o.depth ? o.depth : 16;
    const shift::ShiftInstance inst(w);
    const auto stats = cover::refine_upper_cover(inst, o.c, o.u_c >= 0.0 ? o.u_c : 0.0, depth, lim);
    const auto est = cover::estimate_upper_dim(stats, inst.sigma());
    Cell exact = std::monostate{};
    if (o.c == std::round(o.c) && o.c >= 1.0) exact = shift::sft_dimension(w, static_cast<int>(o.c));
    r.add({std::int64_t(o.n), w.str(), o.c, std::int64_t(depth), est.ratio, est.slope, exact});
    r.meta["levels"] = levels_json(stats.levels);
    r.meta["truncated"] = stats.truncated;
    return r;
  }
  throw domain_error("boxcount: --instance must be bad1, toral or sft");
}

inline Report subcover(const Options& o) {
  const auto lim = limits_of(o);
  Report r{"subcover", {"k", "t_k", "count", "density", "estimate"}};
  auto emit = [&](const auto& tree, double d_mu, double sigma) {
    for (unsigned k = 0; k <= tree.depth(); ++k) {
      const double dens = k < tree.density.size() ? tree.density[k] : std::numeric_limits<double>::quiet_NaN();
      // running estimate from the densities seen so far
      double est = std::numeric_limits<double>::quiet_NaN();
      if (k >= 1) {
        double m = 1.0;
        for (unsigned j = 0; j < k; ++j) m = std::min(m, tree.density[j]);
        if (m > 0.0) est = std::max(0.0, d_mu - std::fabs(std::log(m)) / (sigma * tree.c));
      }
      r.add({std::int64_t(k), tree.scale(k), std::int64_t(tree.level_counts[k]), dens, est});
    }
    r.meta["extinct"] = tree.extinct;
    r.meta["truncated"] = tree.truncated;
    if (!tree.extinct && !tree.density.empty())
      r.meta["estimate"] = num9(cover::estimate_lower_dim(tree, d_mu, sigma, tree.c));
  };
  if (o.instance == "euclid1") {
    const auto w = euclid::WeightVector::uniform(1);
    const auto k = euclid::thm31_constants(w, o.c_n);
    const euclid::WeightedRationals<1> inst(w, {static_cast<std::uint64_t>(o.splits)});
    const double c = o.c;
    const auto tree = cover::build_subcover_tree(inst, c, k.l_star, k.d_star, o.depth ? o.depth : 3, lim);
    emit(tree, 1.0, inst.sigma());
    return r;
  }
  if (o.instance == "sft") {
    const auto w = shift::PeriodicWord::parse(static_cast<int>(o.n), o.word);
    const shift::ShiftInstance inst(w);
    const auto tree = cover::build_subcover_tree(inst, o.c, 0.0, 0.0, o.depth ? o.depth : 10, lim);
    emit(tree, std::log(static_cast<double>(w.n)), inst.sigma());
    return r;
  }
  throw domain_error("subcover: --instance must be euclid1 or sft");
}

struct ToralSweepRow {
  std::int64_t m;
  double c, oracle, lower, upper, boxcount;
};

/// Oracle, fitted bounds and box-count over c = m log lambda. The bound
/// constants are fitted at the anchor m (k_l = 0, k_u at its default) and
/// then held fixed.
inline Report toral_sweep(const Options& o) {
  Report r{"toral-sweep", {"lambda", "beta", "m", "c", "oracle_dim", "lower_bound", "upper_bound", "boxcount"}};
  const auto ms = parse_int_list(o.m_list);
  require(o.lambda >= o.beta && o.beta >= 2, "toral-sweep: need lambda >= beta >= 2");
  const double ll = std::log(static_cast<double>(o.lambda)), lb = std::log(static_cast<double>(o.beta));
  auto axis_m = [&](std::int64_t m) {
    const double c = static_cast<double>(m) * ll;
    const double mb = c / lb;
    require(std::fabs(mb - std::round(mb)) <= 1e-9, "toral-sweep: c = m log lambda must be a multiple of log beta");
    return std::vector<int>{static_cast<int>(m), static_cast<int>(std::lround(mb))};
  };
  const std::vector<std::int64_t> lam{o.lambda, o.beta};
  const std::int64_t anchor = o.anchor_m ? o.anchor_m : ms.front();
  require(anchor >= 2, "toral-sweep: anchor m must be at least 2");
  const double ca = static_cast<double>(anchor) * ll;
  const double oa = toral::exact_dim_oracle_diag(axis_m(anchor), lam);
  const double kbar_l = toral::fit_kbar_l(2.0, oa, 0.0, ca / 2.0 / ll, ca);
  const auto defaults = toral::eq37_default_constants(o.lambda, o.beta);
  const double kbar_u = toral::fit_kbar_u(o.lambda, o.beta, oa, defaults.k_u, ca);
  r.meta["anchor_m"] = anchor;
  r.meta["kbar_l"] = num9(kbar_l);
  r.meta["k_l"] = 0;
  r.meta["kbar_u"] = num9(kbar_u);
  r.meta["k_u"] = num9(defaults.k_u);
  auto lim = limits_of(o);
  const unsigned depth = o.depth ? o.depth : 10;
  for (auto m : ms) {
    require(m >= 2 && m <= 40, "toral-sweep: m must lie in 2..40");
    const double c = static_cast<double>(m) * ll;
    const double oracle = toral::exact_dim_oracle_diag(axis_m(m), lam);
    double lower = std::numeric_limits<double>::quiet_NaN(), upper = lower;
    try {
      lower = toral::thm320_lower_lebesgue(2.0, 0.0, kbar_l, c / 2.0 / ll, c);
    } catch (const domain_error&) {
    }
    try {
      upper = toral::eq37_upper(o.lambda, o.beta, c, defaults.k_u, kbar_u);
    } catch (const domain_error&) {
    }
    const auto box = toral::toral_boxcount(lam, c, depth, lim);
    const double tol = 1e-9;
    const bool ok = (std::isnan(lower) || lower <= oracle + tol) && (std::isnan(upper) || upper >= oracle - tol);
    if (!ok && !r.falsified) {
      r.falsified = true;
      r.failure = "fitted bracket fails at m = " + std::to_string(m);
    }
    r.add({o.lambda, o.beta, m, c, oracle, lower, upper, box.slope});
  }
  return r;
}

inline std::vector<euclid::Rational> random_rationals(std::size_t n, std::mt19937_64& rng) {
  std::vector<euclid::Rational> x;
  std::uniform_int_distribution<std::int64_t> den(1, 1'000'000);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = den(rng);
    std::uniform_int_distribution<std::int64_t> num(-5 * q, 5 * q);
    x.emplace_back(num(rng), q);
  }
  return x;
}

struct CheckSummary {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t nontrivial = 0;  ///< Dirichlet: witnesses with q > 1; simplex: boxes with >= 2 points
};

inline CheckSummary dirichlet_trials(const euclid::WeightVector& w, std::size_t trials, std::int64_t N_max,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckSummary s;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto x = random_rationals(w.n(), rng);
    const std::int64_t N = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(N_max));
    ++s.trials;
    try {
      const auto wit = euclid::dirichlet_witness_lem35(x, w, N);
      bool ok = wit.point.q >= 1 && wit.point.q <= N;
      for (std::size_t i = 0; i < w.n() && ok; ++i)
        ok = euclid::dirichlet_holds(x[i], wit.point.p[i], wit.point.q, N, w.r[i]);
      if (!ok) ++s.violations;
      if (wit.point.q > 1) ++s.nontrivial;
    } catch (const std::logic_error&) {
      ++s.violations;
    }
  }
  return s;
}

/// Random closed boxes with volume a random fraction of the simplex bound,
/// centred near rationals of small denominator.
inline CheckSummary simplex_trials(std::size_t n, std::size_t trials, std::int64_t k_max, std::uint64_t seed) {
  using euclid::Rational;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CheckSummary s;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(k_max));
    const Rational bound = euclid::simplex_volume_bound(n, k);
    const std::int64_t q0 = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(k));
    std::vector<Rational> side(n), lo(n), hi(n);
    Rational vol = 1;
    for (std::size_t i = 0; i < n; ++i) {
      side[i] = cf::exact_rational(std::pow(10.0, -3.0 * u(rng)));
      vol *= side[i];
    }
    const Rational target = bound * cf::exact_rational(0.05 + 0.9 * u(rng));
    const double scale =
        std::pow(static_cast<double>(euclid::detail::to_ld(target / vol)), 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      side[i] *= cf::exact_rational(scale * (1.0 - 1e-9));
      const Rational centre = Rational(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q0 + 1)), q0) +
                              cf::exact_rational((u(rng) - 0.5) * 1e-3);
      lo[i] = centre - side[i] * cf::exact_rational(u(rng));
      hi[i] = lo[i] + side[i];
    }
    Rational v = 1;
    for (std::size_t i = 0; i < n; ++i) v *= hi[i] - lo[i];
    require(v < bound, "simplex_trials: generated box exceeds the volume bound");
    const auto res = euclid::simplex_check_lem33(lo, hi, k);
    ++s.trials;
    if (!res.on_hyperplane) ++s.violations;
    if (res.points.size() >= 2) ++s.nontrivial;
  }
  return s;
}

inline Report dirichlet_check(const Options& o) {
  Report r{"dirichlet-check", {"n", "r", "trials", "N_max", "violations", "nontrivial"}};
  require(o.trials >= 1 && o.N_max >= 1, "dirichlet-check: --trials and --N-max must be positive");
  const auto w = weights_of(o);
  const auto s = dirichlet_trials(w, static_cast<std::size_t>(o.trials), o.N_max, o.seed);
  if (s.violations) {
    r.falsified = true;
    r.failure = std::to_string(s.violations) + " instances without a Dirichlet witness";
  }
  r.add({std::int64_t(w.n()), w.str(), std::int64_t(s.trials), std::int64_t(o.N_max), std::int64_t(s.violations),
         std::int64_t(s.nontrivial)});
  return r;
}

inline Report simplex_check(const Options& o) {
  Report r{"simplex-check", {"n", "trials", "k_max", "violations", "multi_point_boxes"}};
  require(o.n >= 1 && o.n <= 4, "simplex-check: n must lie in 1..4");
  require(o.trials >= 1 && o.k_max >= 1 && o.k_max <= 30, "simplex-check: need trials >= 1 and 1 <= k_max <= 30");
  const auto s = simplex_trials(static_cast<std::size_t>(o.n), static_cast<std::size_t>(o.trials), o.k_max, o.seed);
  if (s.violations) {
    r.falsified = true;
    r.failure = std::to_string(s.violations) + " boxes whose rationals span the space";
  }
  r.add({std::int64_t(o.n), std::int64_t(s.trials), std::int64_t(o.k_max), std::int64_t(s.violations),
         std::int64_t(s.nontrivial)});
  return r;
}

// ---------------------------------------------------------------- runner

/// Runs one command line (args exclude the program name). Output goes to
/// `out` unless --output names a file.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dimension bounds and covers for badly approximable sets", "jarnik"};
  app.require_subcommand(1);
  Options o;
  std::string c_text;

  auto common = [&](CLI::App* s) {
    s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--output,-o", o.output, "write here instead of stdout");
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));
    s->add_option("--depth", o.depth, "depth cap (0: command default)")->check(CLI::Range(0u, 64u));
    s->add_option("--max-cells", o.max_cells, "cell cap (JARNIK_BUDGET_CELLS overrides)");
  };

  std::vector<CLI::App*> subs;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    subs.push_back(s);
    return s;
  };

  auto* s_verify = sub("verify-jarnik", "dim M_N against the Jarnik interval");
  s_verify->add_option("--N", o.N_list, "N values, e.g. 9..16");
  auto* s_cfdim = sub("cf-dim", "dimension of M_N by the pressure equation");
  s_cfdim->add_option("--N", o.N_list, "N values");
  auto* s_approx = sub("approx-constant", "approximation constant of one number");
  s_approx->add_option("--x", o.x, "p/q or a decimal");
  s_approx->add_option("--periodic", o.periodic, "purely periodic partial quotients, e.g. 1,2");
  s_approx->add_option("--qmax", o.q_max, "denominator cap")->check(CLI::Range(1LL, 100000000LL));
  auto* s_spec = sub("spectrum", "sampled approximation constants");
  s_spec->add_option("--points", o.points, "number of samples");
  s_spec->add_option("--qmax", o.q_max, "denominator cap")->check(CLI::Range(1LL, 100000000LL));
  s_spec->add_option("--source", o.source, "random or quadratic");
  auto* s_sftdim = sub("sft-dim", "dimension of sequences avoiding a periodic word");
  s_sftdim->add_option("--n", o.n, "alphabet size")->check(CLI::Range(2LL, 9LL));
  s_sftdim->add_option("--word", o.word, "period block, e.g. 12");
  s_sftdim->add_option("--c", o.c_list, "c values");
  s_sftdim->add_option("--reading", o.reading, "metric, literal or both");
  auto* s_sweep = sub("sft-sweep", "sandwich check over all primitive words");
  s_sweep->add_option("--n", o.n_list, "alphabet sizes");
  s_sweep->add_option("--p", o.p_list, "periods");
  s_sweep->add_option("--c", o.c_list, "c values");
  s_sweep->add_option("--reading", o.reading, "metric, literal or both (default both)");
  auto* s_bounds = sub("bounds", "evaluate a named bound formula");
  s_bounds->add_option("--formula", o.formula,
                       "thm21-lower, thm21-upper, thm37, thm31-lower, thm31-lower-proof, thm31-upper, "
                       "thm31-table, thm320-lower, thm320-lebesgue, eq37-upper, jarnik, phi")
      ->required();
  s_bounds->add_option("--c", c_text, "c (a list for thm31-table)");
  s_bounds->add_option("--n", o.n, "dimension or alphabet size");
  s_bounds->add_option("--r", o.weights, "weights, e.g. 1/3,2/3");
  s_bounds->add_option("--c-n", o.c_n, "hyperplane decay constant");
  s_bounds->add_option("--d-mu", o.d_mu, "measure exponent");
  s_bounds->add_option("--sigma", o.sigma, "diameter exponent");
  s_bounds->add_option("--tau-c", o.tau_l, "tau(c) for thm21-lower");
  s_bounds->add_option("--N-c", o.N_c, "N(c) for thm21-upper");
  s_bounds->add_option("--u-c", o.u_c, "u_c for thm21-upper");
  s_bounds->add_option("--tau", o.tau, "decay exponent");
  s_bounds->add_option("--c-tau", o.c_tau, "decay constant");
  s_bounds->add_option("--tau-bar", o.tau_bar, "growth exponent of phi");
  s_bounds->add_option("--phi", o.phi, "phi(c)");
  s_bounds->add_option("--c1", o.c1, "power-law constant c1");
  s_bounds->add_option("--c2", o.c2, "power-law constant c2");
  s_bounds->add_option("--k-l", o.k_l, "k_l");
  s_bounds->add_option("--kbar-l", o.kbar_l, "kbar_l");
  s_bounds->add_option("--phi-half", o.phi_half, "phi(c/2); default c/(2 log lambda)");
  s_bounds->add_option("--lambda", o.lambda, "lambda");
  s_bounds->add_option("--beta", o.beta, "beta");
  s_bounds->add_option("--lambdas", o.lambda_list, "diagonal entries for phi");
  s_bounds->add_option("--k-u", o.k_u, "k_u");
  s_bounds->add_option("--kbar-u", o.kbar_u, "kbar_u");
  s_bounds->add_option("--N", o.N, "N for the Jarnik interval");
  auto* s_box = sub("boxcount", "upper-cover box-counting estimate");
  s_box->add_option("--instance", o.instance, "bad1, toral or sft");
  s_box->add_option("--c-from-N", o.N, "Bad(1/(N+2)) for bad1");
  s_box->add_option("--u-c", o.u_c, "lookahead u_c");
  s_box->add_option("--lambdas", o.lambda_list, "diagonal entries for toral");
  s_box->add_option("--c", o.c, "c");
  s_box->add_option("--n", o.n, "alphabet size for sft");
  s_box->add_option("--word", o.word, "period block for sft");
  auto* s_sub = sub("subcover", "lower-path subcover tree statistics");
  s_sub->add_option("--instance", o.instance, "euclid1 (default) or sft");
  s_sub->add_option("--c", o.c, "c (default log 6 for euclid1)");
  s_sub->add_option("--splits", o.splits, "cells per step for euclid1")->check(CLI::Range(2LL, 4096LL));
  s_sub->add_option("--c-n", o.c_n, "hyperplane decay constant");
  s_sub->add_option("--n", o.n, "alphabet size for sft");
  s_sub->add_option("--word", o.word, "period block for sft");
  auto* s_toral = sub("toral-sweep", "oracle, fitted bounds and box-count over m");
  s_toral->add_option("--lambda", o.lambda, "lambda");
  s_toral->add_option("--beta", o.beta, "beta");
  s_toral->add_option("--m", o.m_list, "m values; c = m log lambda");
  s_toral->add_option("--anchor-m", o.anchor_m, "m used to fit the constants (default: first)");
  auto* s_dir = sub("dirichlet-check", "exhaustive Dirichlet witnesses for random instances");
  s_dir->add_option("--n", o.n, "dimension")->check(CLI::Range(1LL, 4LL));
  s_dir->add_option("--r", o.weights, "weights");
  s_dir->add_option("--trials", o.trials, "instances");
  s_dir->add_option("--N-max", o.N_max, "largest N")->check(CLI::Range(1LL, 100000LL));
  auto* s_simp = sub("simplex-check", "hyperplane check for random admissible boxes");
  s_simp->add_option("--n", o.n, "dimension");
  s_simp->add_option("--trials", o.trials, "boxes");
  s_simp->add_option("--k-max", o.k_max, "largest denominator bound");

  const std::string fmt_default[] = {"json", "json", "json", "csv", "json", "json", "json",
                                     "json", "json", "csv", "json", "json"};
  for (auto* s : subs) common(s);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n' << "run 'jarnik --help' for usage\n";
    return kConfigError;
  }
  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  auto given = [&](const std::string& opt) { return chosen->get_option(opt)->count() > 0; };
  if (!given("--format"))
    o.format = fmt_default[static_cast<std::size_t>(std::find(subs.begin(), subs.end(), chosen) - subs.begin())];
  if (name == "sft-sweep" && !given("--reading")) o.reading = "both";
  if (name == "subcover" && !given("--instance")) o.instance = "euclid1";
  if (name == "subcover" && !given("--c")) o.c = o.instance == "euclid1" ? std::log(6.0) : 1.0;
  if (name == "boxcount" && !given("--c") && o.instance == "toral") o.c = 3.0 * std::log(2.0);
  if (name == "boxcount" && !given("--c") && o.instance == "sft") o.c = 3.0;
  if ((name == "sft-dim" || o.instance == "sft") && chosen->get_option_no_throw("--n") && !given("--n")) o.n = 2;

  try {
    if (!c_text.empty()) {
      o.c_list = c_text;
      o.c = parse_double_list(c_text).front();
    }
    Report rep;
    if (name == "verify-jarnik") rep = verify_jarnik(o);
    else if (name == "cf-dim") rep = cf_dim(o);
    else if (name == "approx-constant") rep = approx_constant(o);
    else if (name == "spectrum") rep = spectrum(o);
    else if (name == "sft-dim") rep = sft_dim(o);
    else if (name == "sft-sweep") rep = sft_sweep(o);
    else if (name == "bounds") rep = bounds(o);
    else if (name == "boxcount") rep = boxcount(o);
    else if (name == "subcover") rep = subcover(o);
    else if (name == "toral-sweep") rep = toral_sweep(o);
    else if (name == "dirichlet-check") rep = dirichlet_check(o);
    else rep = simplex_check(o);
    rep.meta["seed"] = o.seed;
    const std::string text = render(rep, o.format);
    if (o.output.empty()) {
      out << text;
    } else {
      std::ofstream f(o.output, std::ios::binary);
      if (!f) {
        err << "error: cannot open " << o.output << '\n';
        return kConfigError;
      }
      f << text;
    }
    if (rep.falsified) {
      err << "FALSIFIED: " << rep.failure << '\n';
      return kFalsified;
    }
    return kOk;
  } catch (const domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const budget_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace jarnik::cli
