#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jarnik/euclid.hpp"

using namespace jarnik;
using namespace jarnik::euclid;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

cf::Quadratic sqrt_minus_one(long long d) { return cf::Quadratic::make(-1, 1, d, 1); }

Rational random_unit(std::mt19937_64& rng) {
  return cf::exact_rational(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
}

}  // namespace

TEST(WeightVector, ValidatesAndParses) {
  EXPECT_THROW(WeightVector({Rational(1, 2), Rational(1, 3)}), domain_error);
  EXPECT_THROW(WeightVector({Rational(0), Rational(1)}), domain_error);
  const auto w = WeightVector::parse("1/3,2/3");
  EXPECT_DOUBLE_EQ(w.r_minus(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(w.r_plus(), 2.0 / 3.0);
  EXPECT_EQ(w.str(), "1/3,2/3");
  EXPECT_EQ(WeightVector::parse("0.5,0.5").str(), "1/2,1/2");
  EXPECT_THROW(WeightVector::parse("a,b"), domain_error);
}

TEST(BadConstants, Examples) {
  const auto k1 = thm31_constants(WeightVector::uniform(1));
  EXPECT_NEAR(k1.d_star, 0.549306, 1e-6);
  EXPECT_NEAR(k1.l_star, 0.895880, 1e-6);
  EXPECT_NEAR(k1.u_c(0.0), 2.772589, 1e-6);
  EXPECT_NEAR(k1.u_c(3.0), 5.772589, 1e-6);
  EXPECT_DOUBLE_EQ(k1.c_n, 4.0);
  const auto k2 = thm31_constants(WeightVector::uniform(2));
  EXPECT_NEAR(k2.d_star, kLog3 / 1.5, 1e-12);
  EXPECT_NEAR(k2.d_star, 0.732408, 1e-6);
  EXPECT_NEAR(k2.l_star, kLog2 + kLog3 / 1.5, 1e-12);
  EXPECT_NEAR(k2.l_star, 1.425556, 1e-6);
  EXPECT_DOUBLE_EQ(k2.c_n, 16.0);
}

TEST(BadConstants, UcAffineAndBlowsUpForSmallWeight) {
  const auto w = WeightVector::parse("1/3,2/3");
  const auto k = thm31_constants(w);
  EXPECT_NEAR(k.u_c(5.0) - k.u_c(2.0), 3.0 * 3.0, 1e-12);
  EXPECT_NEAR(k.u_star, (1.0 + 2.0 / 3.0) * 2.0 * kLog2 * 3.0, 1e-12);
  double prev = 0.0;
  for (long long m : {10, 100, 1000, 10000}) {
    const auto kk = thm31_constants(WeightVector({Rational(1, m), Rational(m - 1, m)}));
    EXPECT_GT(kk.u_c(1.0), prev);
    prev = kk.u_c(1.0);
  }
  EXPECT_GT(prev, 1e4);
}

TEST(BadBounds, LowerMatchesDirectEvaluation) {
  const auto r = WeightVector::uniform(1);
  const auto b = thm31_lower(r, 5.0);
  EXPECT_NEAR(b.value, 1.0 - std::fabs(std::log(1.0 - 18.0 * 4.0 * std::exp(-10.0))) / 10.0, 1e-15);
  EXPECT_NEAR(b.applicable_radius, 0.5 * std::exp(-(10.0 + 0.895880 + 0.549306)), 1e-9);
  EXPECT_NEAR(b.c0, std::log(72.0) / 2.0, 1e-12);
  EXPECT_EQ(b.label, "lebesgue-18cn");
  EXPECT_THROW(thm31_lower(r, b.c0), domain_error);
  EXPECT_THROW(thm31_lower(r, 1.0), domain_error);
  const auto b2 = thm31_lower(r, 5.0, 1.0);
  EXPECT_NEAR(b2.value, 1.0 - std::fabs(std::log(1.0 - 18.0 * std::exp(-10.0))) / 10.0, 1e-15);
  EXPECT_DOUBLE_EQ(b2.c_n, 1.0);
}

TEST(BadBounds, ProofDisplayUsesNineCn) {
  const auto r = WeightVector::uniform(1);
  const auto b = thm31_lower_proof_constant(r, 5.0);
  // c_n e^{2 (1+r_-) d_*} = 4 * 9
  EXPECT_NEAR(b.value, 1.0 - std::fabs(std::log(1.0 - 36.0 * std::exp(-10.0))) / 10.0, 1e-15);
  EXPECT_GT(b.value, thm31_lower(r, 5.0).value);
}

TEST(BadBounds, UpperMatchesDirectEvaluation) {
  const auto b = thm31_upper(WeightVector::uniform(1), 3.0);
  // 3^{-4}/8 = 0.00154321, (n+1)(c+u_c) = 17.545177, (1+r_+)(c+u_c+2d_*) = 19.742402
  const double a = (1.0 / 648.0) * std::exp(-2.0 * (3.0 + 3.0 + 4.0 * kLog2));
  const double den = 2.0 * (3.0 + 3.0 + 4.0 * kLog2 + kLog3);
  EXPECT_NEAR(den, 19.742402, 1e-6);
  EXPECT_NEAR(b.deficit / (a / den), 1.0, 1e-9);
  EXPECT_NEAR(b.deficit, 1.87608e-12, 1e-16);
  EXPECT_DOUBLE_EQ(b.applicable_radius, std::exp(-3.0));
}

TEST(BadBounds, ApproachNAsCGrows) {
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto r = WeightVector::uniform(n);
    double prev_lo = 1e9, prev_up = 1e9;
    for (double c : {8.0, 12.0, 20.0, 40.0}) {
      const double lo = thm31_lower(r, c).deficit, up = thm31_upper(r, c).deficit;
      EXPECT_LT(lo, prev_lo);
      EXPECT_LT(up, prev_up);
      EXPECT_GT(lo, 0.0);
      EXPECT_GT(up, 0.0);
      prev_lo = lo;
      prev_up = up;
    }
    EXPECT_NEAR(thm31_lower(r, 60.0).value, static_cast<double>(n), 1e-20 + 1e-12);
  }
}

TEST(BadBounds, GeneralSupport) {
  const framework::PowerLaw pl{2.0 * std::log(4.0) / kLog3, 1.0, 1.0};
  const double d_mu = std::log(4.0) / kLog3, d_star = kLog3 / 2.0;
  const auto r = WeightVector::uniform(1);
  const auto b = general_lower_thm31(d_mu, pl, 2.0, 1.0, r, 5.0);
  const double expect =
      d_mu - (kLog2 + 2.0 * pl.tau * d_star + std::fabs(std::log(1.0 - std::exp(4.0 * d_star) * std::exp(-10.0)))) / 10.0;
  EXPECT_NEAR(b.value, expect, 1e-14);
  EXPECT_NEAR(b.c0, 2.0 * d_star, 1e-15);
  EXPECT_THROW(general_lower_thm31(d_mu, pl, 2.0, 1.0, r, b.c0), domain_error);
  // just above the threshold the logarithm blows up
  EXPECT_GT(general_lower_thm31(d_mu, pl, 2.0, 1.0, r, b.c0 + 1e-9).deficit, 1.0);
  EXPECT_NEAR(general_lower_thm31(d_mu, pl, 2.0, 1.0, r, 1e7).value, d_mu, 1e-6);
  const framework::PowerLaw skew{pl.tau, 1.0, 3.0};
  EXPECT_NEAR(b.value - general_lower_thm31(d_mu, skew, 2.0, 1.0, r, 5.0).value, 2.0 * std::log(3.0) / 10.0, 1e-14);
}

TEST(Dirichlet, Examples) {
  const auto r1 = WeightVector::uniform(1);
  const auto w = dirichlet_witness_lem35({cf::exact_rational(std::sqrt(2.0) - 1.0)}, r1, 12);
  EXPECT_EQ(w.point.q, 12);
  EXPECT_EQ(w.point.p[0], 5);
  EXPECT_NEAR(static_cast<double>(w.errors[0]), 0.002453, 1e-6);
  EXPECT_LE(w.errors[0], 1.0L / 144.0L);
  for (std::int64_t N = 2; N <= 20; ++N) {
    const auto h = dirichlet_witness_lem35({Rational(1, 2)}, r1, N);
    EXPECT_EQ(h.point.q, 2);
    EXPECT_EQ(h.point.p[0], 1);
    EXPECT_EQ(h.errors[0], 0.0L);
  }
  const auto w2 = dirichlet_witness_lem35(
      {cf::exact_rational(std::sqrt(2.0) - 1.0), cf::exact_rational(std::sqrt(3.0) - 1.0)},
      WeightVector::uniform(2), 100);
  EXPECT_EQ(w2.point.q, 41);
  EXPECT_EQ(w2.point.p, (std::vector<std::int64_t>{17, 30}));
  EXPECT_LE(w2.errors[0], 1.0L / 410.0L);
  EXPECT_LE(w2.errors[1], 1.0L / 410.0L);
}

TEST(Dirichlet, ExhaustiveRandomInstances) {
  std::mt19937_64 rng(35);
  const WeightVector weights[] = {WeightVector::uniform(1), WeightVector::uniform(2),
                                  WeightVector::parse("1/3,2/3")};
  std::size_t checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto& r = weights[trial % 3];
    std::vector<Rational> x;
    for (std::size_t i = 0; i < r.n(); ++i) x.push_back(random_unit(rng) * 10 - 5);
    const std::int64_t N = 1 + static_cast<std::int64_t>(rng() % 500);
    const auto w = dirichlet_witness_lem35(x, r, N);
    ASSERT_GE(w.point.q, 1);
    ASSERT_LE(w.point.q, N);
    for (std::size_t i = 0; i < r.n(); ++i) ASSERT_TRUE(dirichlet_holds(x[i], w.point.p[i], w.point.q, N, r.r[i]));
    ++checked;
  }
  EXPECT_EQ(checked, 3000u);
}

TEST(Dirichlet, ExactPredicate) {
  // |3 * 0.34 - 1| = 0.02 <= 10^{-1/2}: 0.02^2 * 10 <= 1
  EXPECT_TRUE(dirichlet_holds(Rational(34, 100), 1, 3, 10, Rational(1, 2)));
  // |1 * 0.5 - 0| = 0.5 <= 4^{-1/2} = 0.5, boundary case included
  EXPECT_TRUE(dirichlet_holds(Rational(1, 2), 0, 1, 4, Rational(1, 2)));
  EXPECT_FALSE(dirichlet_holds(Rational(1, 2), 0, 1, 5, Rational(1, 2)));
}

TEST(Simplex, Examples) {
  const auto a = simplex_check_lem33({Rational(0)}, {Rational(1, 33)}, 3);
  ASSERT_EQ(a.points.size(), 1u);
  EXPECT_EQ(a.points[0][0], 0);
  EXPECT_TRUE(a.on_hyperplane);
  const auto b = simplex_check_lem33({Rational(0), Rational(0)}, {Rational(1, 25), Rational(1, 25)}, 2);
  ASSERT_EQ(b.points.size(), 1u);
  EXPECT_TRUE(b.on_hyperplane);
  EXPECT_EQ(b.affine_rank, 0u);
  // 1/(1! 4^2) = 1/16: [0, 1/17] fine, [0, 1/16] rejected
  EXPECT_NO_THROW(simplex_check_lem33({Rational(0)}, {Rational(1, 17)}, 3));
  EXPECT_THROW(simplex_check_lem33({Rational(0)}, {Rational(1, 16)}, 3), domain_error);
  EXPECT_THROW(simplex_check_lem33({Rational(1)}, {Rational(0)}, 3), domain_error);
}

TEST(Simplex, LineOfRationalsGivesHyperplane) {
  // a thin horizontal box containing (0,0), (1/2,0), (1,0), (1/3,0), ...
  const auto s = simplex_check_lem33({Rational(0), Rational(-1, 100000)}, {Rational(1), Rational(1, 100000)}, 3);
  EXPECT_EQ(s.points.size(), 5u);
  EXPECT_EQ(s.affine_rank, 1u);
  ASSERT_TRUE(s.on_hyperplane);
  for (const auto& p : s.points) EXPECT_EQ(s.normal[0] * p[0] + s.normal[1] * p[1], s.offset);
  EXPECT_EQ(s.normal[0], 0);
}

TEST(Simplex, RandomValidBoxesNeverFail) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 1; n <= 3; ++n) {
    std::size_t nonempty = 0, multi = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 10);
      const Rational bound = simplex_volume_bound(n, k);
      // centre near a rational with small denominator, random aspect ratio
      const std::int64_t q0 = 1 + static_cast<std::int64_t>(rng() % k);
      std::vector<Rational> side(n), lo(n), hi(n);
      Rational vol = 1;
      for (std::size_t i = 0; i < n; ++i) {
        side[i] = cf::exact_rational(std::pow(10.0, -3.0 * u(rng)));
        vol *= side[i];
      }
      // rescale so that the volume is a random fraction of the bound
      const Rational target = bound * cf::exact_rational(0.05 + 0.9 * u(rng));
      const double scale = std::pow(static_cast<double>(detail::to_ld(target / vol)), 1.0 / n);
      for (std::size_t i = 0; i < n; ++i) {
        side[i] *= cf::exact_rational(scale * (1.0 - 1e-9));
        const Rational centre = Rational(static_cast<std::int64_t>(rng() % (q0 + 1)), q0) +
                                cf::exact_rational((u(rng) - 0.5) * 1e-3);
        lo[i] = centre - side[i] * cf::exact_rational(u(rng));
        hi[i] = lo[i] + side[i];
      }
      const auto res = simplex_check_lem33(lo, hi, k);
      ASSERT_TRUE(res.on_hyperplane) << "n=" << n << " k=" << k << " trial=" << trial;
      ASSERT_LT(res.affine_rank, n);
      for (const auto& p : res.points) {
        Rational v = 0;
        for (std::size_t i = 0; i < n; ++i) v += res.normal[i] * p[i];
        ASSERT_EQ(v, res.offset);
      }
      nonempty += !res.points.empty();
      multi += res.points.size() >= 2;
    }
    EXPECT_GT(nonempty, 100u) << n;
    if (n > 1) {
      EXPECT_GT(multi, 10u) << n;
    }
  }
}

TEST(Simplex, EnumerationIsComplete) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 6);
    const Rational lo = cf::exact_rational(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
    const Rational hi = lo + simplex_volume_bound(1, k) * Rational(9, 10);
    const auto res = simplex_check_lem33({lo}, {hi}, k);
    std::set<Rational> brute;
    for (std::int64_t q = 1; q <= k; ++q)
      for (std::int64_t p = -2 * q; p <= 2 * q; ++p)
        if (Rational(p, q) >= lo && Rational(p, q) <= hi) brute.insert(Rational(p, q));
    ASSERT_EQ(res.points.size(), brute.size());
    EXPECT_LE(res.points.size(), 1u);
  }
}

TEST(Membership, GoldenRatioPasses) {
  const std::vector<Real> x{cf::Quadratic::make(1, 1, 5, 2)};
  const auto rep = bad_membership_test(x, WeightVector::uniform(1), Rational(1, 3), 10000);
  EXPECT_TRUE(rep.passes);
  EXPECT_TRUE(rep.exact);
  // tightest at the last Fibonacci denominator, ratio 9 (q+1)^2 |phi - p/q| -> 9/sqrt 5
  EXPECT_EQ(rep.tightest.q, 6765);
  EXPECT_EQ(rep.tightest.p[0], 10946);
  const long double phi = (1.0L + std::sqrt(5.0L)) / 2.0L;
  EXPECT_NEAR(static_cast<double>(rep.min_ratio), static_cast<double>(9.0L * 6766.0L * 6766.0L * fabsl(phi - 10946.0L / 6765.0L)), 1e-9);
  EXPECT_NEAR(static_cast<double>(rep.min_ratio), 9.0 / std::sqrt(5.0), 2e-3);
  const auto loose = bad_membership_test(x, WeightVector::uniform(1), std::log(3.0), 10000);
  EXPECT_TRUE(loose.passes);
}

TEST(Membership, RationalFailsAtItsDenominator) {
  const auto r = WeightVector::uniform(1);
  for (auto [p, q] : {std::pair{3, 7}, std::pair{5, 12}, std::pair{1, 1}}) {
    const auto rep = bad_membership_test({Real(Rational(p, q))}, r, Rational(1, 3), 50);
    EXPECT_FALSE(rep.passes);
    EXPECT_EQ(rep.first_failure_q, q);
    EXPECT_EQ(rep.min_ratio, 0.0L);
  }
}

TEST(Membership, PairOfQuadratics) {
  const std::vector<Real> x{sqrt_minus_one(2), sqrt_minus_one(3)};
  const auto r = WeightVector::uniform(2);
  const auto rep = bad_membership_test(x, r, Rational(1, 100), 1000);
  EXPECT_TRUE(rep.passes);
  EXPECT_GE(rep.min_ratio, 1.0L);
  const auto fp = bad_membership_test(x, r, -std::log(0.01), 1000);
  EXPECT_TRUE(fp.passes);
  EXPECT_NEAR(static_cast<double>(fp.min_ratio), static_cast<double>(rep.min_ratio), 1e-9);
}

TEST(Membership, NearestNumeratorWithinRange) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const Rational x = random_unit(rng) * 7 - 3;
    // exact and binary64 variants must agree on the verdict away from ties
    const auto a = bad_membership_test({Real(x)}, WeightVector::uniform(1), Rational(1, 10), 200);
    const auto b = bad_membership_test({Real(x)}, WeightVector::uniform(1), std::log(10.0), 200);
    if (std::fabs(static_cast<double>(a.min_ratio) - 1.0) > 1e-9) {
      EXPECT_EQ(a.passes, b.passes);
    }
    EXPECT_EQ(a.tightest.q, b.tightest.q);
  }
}

// First inclusion: passing the F-test with e^{-c} = kappa means
// |x_i - p_i/q| >= (kappa/2)^{1+r_i} / q^{1+r_i} for some i, i.e. x is in Bad(kappa/2).
TEST(Membership, FirstInclusionHolds) {
  std::mt19937_64 rng(36);
  const WeightVector weights[] = {WeightVector::uniform(1), WeightVector::uniform(2)};
  std::size_t passing = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto& r = weights[trial % 2];
    std::vector<Real> x;
    for (std::size_t i = 0; i < r.n(); ++i) {
      const long long d = 2 + static_cast<long long>(rng() % 60);
      if (cf::is_square(d)) {
        x.push_back(random_unit(rng));
      } else {
        x.push_back(cf::Quadratic::make(static_cast<long long>(rng() % 7) - 3, 1, d, 1 + static_cast<long long>(rng() % 5)));
      }
    }
    const Rational kappa(1, 2 + static_cast<long long>(rng() % 30));
    const std::int64_t qmax = 60;
    const auto rep = bad_membership_test(x, r, kappa, qmax);
    if (!rep.passes) continue;
    ++passing;
    for (std::int64_t q = 1; q <= qmax; ++q) {
      bool some = false;
      for (std::size_t i = 0; i < r.n() && !some; ++i) {
        const BigInt f = detail::real_floor(std::holds_alternative<Rational>(x[i])
                                                ? Real(std::get<Rational>(x[i]) * q)
                                                : Real(std::get<cf::Quadratic>(x[i]) * Rational(q)));
        const auto a = static_cast<unsigned>(boost::multiprecision::numerator(r.r[i]));
        const auto b = static_cast<unsigned>(boost::multiprecision::denominator(r.r[i]));
        bool all_far = true;
        for (BigInt p = f - 1; p <= f + 2; ++p)
          all_far = all_far && detail::abs_pow_compare(x[i], p, q, b, detail::rpow(kappa / 2 / q, a + b)) >= 0;
        some = all_far;
      }
      ASSERT_TRUE(some) << "trial " << trial << " q " << q;
    }
  }
  EXPECT_GT(passing, 50u);
}

// The intermediate display e^{-(1+r)c}/(2 q^{1+r}) is stronger than what
// (q+1)^{1+r} <= 2^{1+r} q^{1+r} gives; x = kappa^2/3 passes the F-test yet
// sits closer than kappa^2/2 to 0/1.
TEST(Membership, IntermediateDisplayNeedsFullPowerOfTwo) {
  const Rational kappa(1, 5);
  const Rational x = kappa * kappa / 3;
  // below q = 75, where x itself is resonant
  const auto rep = bad_membership_test({Real(x)}, WeightVector::uniform(1), kappa, 74);
  EXPECT_TRUE(rep.passes);
  EXPECT_LT(x, kappa * kappa / 2);
  EXPECT_GE(x, kappa * kappa / 4);
}

TEST(ResonantQuery, Examples) {
  const auto r = WeightVector::uniform(1);
  const auto a = resonant_query_euclid({Rational(0)}, {Rational(1)}, std::log(4.0), r, 0.0);
  std::vector<std::string> names;
  for (const auto& p : a) names.push_back(p.str());
  EXPECT_EQ(names, (std::vector<std::string>{"(0)/1", "(1)/1", "(1)/2", "(1)/3", "(2)/3"}));
  // [0.4, 0.45], q <= 2: only 1/2 and only when its neighbourhood reaches 0.45
  EXPECT_TRUE(resonant_query_euclid({Rational(2, 5)}, {Rational(9, 20)}, std::log(3.0), r, 2.0).empty());
  const auto near = resonant_query_euclid({Rational(2, 5)}, {Rational(9, 20)}, std::log(3.0), r, 0.0);
  ASSERT_EQ(near.size(), 1u);
  EXPECT_EQ(near[0].str(), "(1)/2");
  EXPECT_TRUE(resonant_query_euclid({Rational(1)}, {Rational(0)}, 5.0, r, 0.0).empty());
  EXPECT_THROW(resonant_query_euclid({Rational(0)}, {Rational(1)}, 20.0, r, 0.0), budget_error);
}

TEST(ResonantQuery, CompleteAgainstBruteForce) {
  std::mt19937_64 rng(8);
  const auto r = WeightVector::parse("1/3,2/3");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Rational> lo(2), hi(2);
    for (int i = 0; i < 2; ++i) {
      lo[i] = random_unit(rng);
      hi[i] = lo[i] + random_unit(rng) / 20;
    }
    const double t = 1.0 + 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double c = 0.5;
    const auto got = resonant_query_euclid(lo, hi, t, r, c);
    std::set<RationalPoint> want;
    for (std::int64_t q = 1; std::log(q + 1.0) <= t; ++q)
      for (std::int64_t p0 = -1; p0 <= 2 * q + 1; ++p0)
        for (std::int64_t p1 = -1; p1 <= 2 * q + 1; ++p1) {
          const double s = std::log(q + 1.0);
          bool meets = true;
          const std::int64_t p[2] = {p0, p1};
          for (int i = 0; i < 2; ++i) {
            const double rad = std::exp(-(1.0 + r.value(i)) * (s + c));
            const double v = static_cast<double>(p[i]) / static_cast<double>(q);
            meets = meets && v + rad >= static_cast<double>(detail::to_ld(lo[i])) - 1e-12 &&
                    v - rad <= static_cast<double>(detail::to_ld(hi[i])) + 1e-12;
          }
          if (meets) want.insert(reduced(RationalPoint{{p0, p1}, q}));
        }
    std::set<RationalPoint> have(got.begin(), got.end());
    for (const auto& w : want) EXPECT_TRUE(have.count(w)) << w.str();
  }
}

TEST(ClassicalBad, BoxCountSlopesFrozen) {
  const auto a = bad1_boxcount(4, 14, {});
  EXPECT_FALSE(a.truncated);
  EXPECT_EQ(a.counts.size(), 15u);
  EXPECT_EQ(a.counts.back(), 3278u);
  EXPECT_NEAR(a.estimate.slope, 0.81554, 1e-4);
  EXPECT_NEAR(a.c, std::log(6.0) / 2.0, 1e-15);
  cover::Limits four;
  four.workers = 4;
  const auto b = bad1_boxcount(4, 14, four);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.estimate.slope, b.estimate.slope);
}

TEST(ClassicalBad, SurvivingCellsMissExactNeighbourhoods) {
  const auto inst = ClassicalBad::from_N(2);
  const auto stats = cover::refine_upper_cover(inst, inst.c(), 2.0, 8, {}, true);
  const double t = stats.levels[7].t_bar + 2.0;
  ASSERT_FALSE(stats.final_cells.empty());
  for (const auto& cell : stats.final_cells) {
    const auto reg = inst.region(8, cell);
    // sweep the sorted intervals [p/q - 1/(4q^2), p/q + 1/(4q^2)] across the cell
    std::vector<std::pair<cover::Exact, cover::Exact>> iv;
    for (std::int64_t q = 1; std::log(static_cast<double>(q)) <= t; ++q)
      for (std::int64_t p = 0; p <= q; ++p)
        iv.push_back({cover::Exact(p, q) - cover::Exact(1, 4 * q * q), cover::Exact(p, q) + cover::Exact(1, 4 * q * q)});
    std::sort(iv.begin(), iv.end());
    cover::Exact reach = reg.lo[0];
    bool gap = false;
    for (const auto& [a, b] : iv) {
      if (a > reach) {
        gap = true;
        break;
      }
      reach = std::max(reach, b);
      if (reach >= reg.hi[0]) break;
    }
    EXPECT_TRUE(gap || reach < reg.hi[0]);
  }
}

TEST(WeightedRationals, RejectsInconsistentSplits) {
  EXPECT_THROW(WeightedRationals<2>(WeightVector::parse("1/3,2/3"), {2, 2}), domain_error);
  EXPECT_NO_THROW(WeightedRationals<2>(WeightVector::parse("1/3,2/3"), {16, 32}));
  EXPECT_THROW(WeightedRationals<1>(WeightVector::uniform(2), {2}), domain_error);
}

// Lower tree at c = log 6: every node of depth k avoids the excluded
// neighbourhoods of all q with log(q+1) <= t_{k-1} - l_*.
TEST(WeightedRationals, LowerTreeAvoidsNeighbourhoods) {
  const auto r = WeightVector::uniform(1);
  const auto k = thm31_constants(r);
  WeightedRationals<1> inst(r, {36});
  const double c = std::log(6.0);
  const auto tree = cover::build_subcover_tree(inst, c, k.l_star, k.d_star, 4);
  ASSERT_FALSE(tree.extinct);
  EXPECT_EQ(tree.level_counts, (std::vector<std::uint64_t>{1, 36, 1276, 44832, 1570610}));
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    const double tk = tree.scale(node.depth - 1);
    const double rad = std::exp(-2.0 * (tk + c - 2.0 * k.d_star));
    const auto reg = inst.region(node.depth, node.idx);
    const double lo = cover::to_double(reg.lo[0]), hi = cover::to_double(reg.hi[0]);
    for (std::int64_t q = 1; std::log(q + 1.0) <= tk - k.l_star; ++q) {
      const auto p = static_cast<std::int64_t>(std::floor((lo + hi) / 2.0 * static_cast<double>(q) + 0.5));
      const double v = static_cast<double>(p) / static_cast<double>(q);
      ASSERT_TRUE(v + rad < lo || v - rad > hi) << "node " << i << " q " << q;
    }
  }
  const double est = cover::estimate_lower_dim(tree, 1.0, inst.sigma(), c);
  EXPECT_NEAR(est, 0.790621, 1e-5);
}

TEST(WeightedRationals, TwoDimensionalUpperCover) {
  const auto r = WeightVector::uniform(2);
  WeightedRationals<2> inst(r, {2, 2});
  const double c = 1.0;
  const auto stats = cover::refine_upper_cover(inst, c, 1.0, 8);
  ASSERT_FALSE(stats.empty);
  for (std::size_t k = 1; k < stats.levels.size(); ++k) {
    EXPECT_LE(stats.levels[k].count, 4 * stats.levels[k - 1].count);
    EXPECT_GT(stats.levels[k].count, 0u);
  }
  EXPECT_LT(stats.levels.back().count, std::uint64_t{1} << 16);
  const auto wider = cover::refine_upper_cover(inst, c + 1.0, 1.0, 8);
  EXPECT_GE(wider.levels.back().count, stats.levels.back().count);
}

// Asymptotic shapes: log(n - lower) falls like -(1+r_-) c and
// log(n - upper) like -(n+1) t with t = (n+1) c.
TEST(BadBounds, AsymptoticSlopes) {
  for (std::size_t n : {1u, 2u}) {
    const auto r = WeightVector::uniform(n);
    std::vector<double> cs, lo, t, up;
    for (double c = 10.0; c <= 30.0 + 1e-9; c += 0.5) {
      cs.push_back(c);
      lo.push_back(std::log(thm31_lower(r, c).deficit));
      t.push_back((n + 1.0) * c);
      up.push_back(std::log(thm31_upper(r, c).deficit));
    }
    const double sl = -least_squares_slope(cs, lo), su = -least_squares_slope(t, up);
    EXPECT_NEAR(sl / (1.0 + r.r_minus()), 1.0, 0.05) << n;
    EXPECT_NEAR(su / (n + 1.0), 1.0, 0.05) << n;
  }
}
