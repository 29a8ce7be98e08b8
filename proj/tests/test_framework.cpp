#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jarnik/framework.hpp"

namespace fw = jarnik::framework;

namespace {

fw::BoundInputs inputs(double d_mu, double sigma, double c, double u_c = 0.0) {
  fw::BoundInputs in;
  in.d_mu = d_mu;
  in.sigma = sigma;
  in.c = c;
  in.u_c = u_c;
  return in;
}

}  // namespace

TEST(Schedule, MatchesDefinitions) {
  auto [t0, tb0] = fw::schedule_times(1, 0, 0, 0, 0);
  EXPECT_EQ(t0, 0.0);
  EXPECT_EQ(tb0, 0.0);
  auto [t3, tb3] = fw::schedule_times(2, 0.5, 1, 1, 3);
  EXPECT_DOUBLE_EQ(t3, 7.5);
  EXPECT_DOUBLE_EQ(tb3, 9.0);
  auto [t5, tb5] = fw::schedule_times(1, 0, 0, 0, 5);
  EXPECT_DOUBLE_EQ(t5, 5.0);
  EXPECT_DOUBLE_EQ(tb5, 5.0);
  EXPECT_THROW(fw::schedule_times(0, 0, 0, 0, 1), jarnik::domain_error);
}

TEST(Schedule, StepsAreCAndCPlusU) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto [a, b] = fw::schedule_times(0.7, 0.3, 0.4, 1.1, k);
    auto [a1, b1] = fw::schedule_times(0.7, 0.3, 0.4, 1.1, k + 1);
    EXPECT_NEAR(a1 - a, 0.7, 1e-12);
    EXPECT_NEAR(b1 - b, 1.1, 1e-12);
  }
}

TEST(LowerBound, Examples) {
  EXPECT_NEAR(fw::lower_bound_thm21(inputs(1, 2, 10), 1 - std::exp(-10.0)), 0.9999977300, 1e-9);
  EXPECT_NEAR(fw::lower_bound_thm21(inputs(1, 1, 1), std::exp(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(fw::lower_bound_thm21(inputs(std::log(2.0), 1, 2), 0.75), 0.5493061443, 1e-9);
  EXPECT_THROW(fw::lower_bound_thm21(inputs(1, 1, 1), 1.0), jarnik::domain_error);
  EXPECT_THROW(fw::lower_bound_thm21(inputs(1, 1, 1), 0.0), jarnik::domain_error);
  EXPECT_EQ(fw::lower_bound_thm21(inputs(0.1, 1, 1), 0.01), 0.0);
  EXPECT_LT(fw::lower_bound_thm21_raw(inputs(0.1, 1, 1), 0.01), 0.0);
}

TEST(LowerBound, MonotoneInTauAndC) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 0.99), cc(0.1, 20);
  for (int i = 0; i < 1000; ++i) {
    double t1 = u(rng), t2 = u(rng), c1 = cc(rng), c2 = cc(rng);
    if (t1 > t2) std::swap(t1, t2);
    if (c1 > c2) std::swap(c1, c2);
    EXPECT_LE(fw::lower_bound_thm21_raw(inputs(2, 1.5, c1), t1),
              fw::lower_bound_thm21_raw(inputs(2, 1.5, c1), t2));
    EXPECT_LE(fw::lower_bound_thm21_raw(inputs(2, 1.5, c1), t1),
              fw::lower_bound_thm21_raw(inputs(2, 1.5, c2), t1));
  }
}

TEST(UpperBound, Examples) {
  EXPECT_NEAR(fw::upper_bound_thm21(inputs(0, 1, 3), std::exp(3.0)), 1.0, 1e-12);
  EXPECT_NEAR(fw::upper_bound_thm21(inputs(0, 1, 2), 3.0), 0.5493061443, 1e-9);
  EXPECT_EQ(fw::upper_bound_thm21(inputs(0, 2, 5, 5), 1.0), 0.0);
  EXPECT_THROW(fw::upper_bound_thm21(inputs(0, 1, 1), 0.5), jarnik::domain_error);
}

TEST(DecayDirichletConverters, Examples) {
  EXPECT_DOUBLE_EQ(fw::tau_from_decay_prop24(0.5, 1, 1), 0.25);
  EXPECT_DOUBLE_EQ(fw::tau_from_decay_prop24(0.5, 0.1, 0.2), 0.125);
  EXPECT_LT(fw::tau_from_decay_prop24(1 - 1e-12, 1, 1), 1e-11);
  EXPECT_THROW(fw::tau_from_decay_prop24(1.0, 1, 1), jarnik::domain_error);
  EXPECT_THROW(fw::tau_from_decay_prop24(0.5, 2, 1), jarnik::domain_error);
  EXPECT_DOUBLE_EQ(fw::N_from_dirichlet_prop24(0.5, 0.25), 2.0);
  EXPECT_NEAR(fw::N_from_dirichlet_prop24(0.1, 0.01), 90.0, 1e-12);
  EXPECT_LT(fw::N_from_dirichlet_prop24(1 - 1e-12, 1), 1e-11);
  EXPECT_THROW(fw::N_from_dirichlet_prop24(0.5, 0), jarnik::domain_error);
}

TEST(PowerLawConstants, Examples) {
  auto a = fw::powerlaw_constants_ex3({1, 1, 1}, 1, 0, 0);
  EXPECT_DOUBLE_EQ(a.k_c, std::exp(-1.0));
  EXPECT_DOUBLE_EQ(a.kbar_c, std::exp(-1.0));
  EXPECT_DOUBLE_EQ(a.K_c, std::exp(-1.0));
  auto b = fw::powerlaw_constants_ex3({2, 1, 2}, 3, 1, 0.5);
  EXPECT_NEAR(b.k_c, 0.5 * std::exp(-6.0), 1e-15);
  EXPECT_NEAR(b.kbar_c, 2 * std::exp(-4.0), 1e-15);
  EXPECT_NEAR(b.K_c, 0.5 * std::exp(-10.0), 1e-17);
  auto z = fw::powerlaw_constants_ex3({1, 1, 1}, 0, 0, 0.25);
  EXPECT_DOUBLE_EQ(z.k_c, 1.0);
  EXPECT_NEAR(z.kbar_c, std::exp(0.5), 1e-15);
  EXPECT_NEAR(z.K_c, std::exp(-0.5), 1e-15);
  EXPECT_THROW(fw::powerlaw_constants_ex3({1, 2, 1}, 1, 0, 0), jarnik::domain_error);
}

TEST(CubeConverters, Examples) {
  EXPECT_DOUBLE_EQ(fw::cube_tau_prop25(0.25), 0.75);
  EXPECT_NEAR(fw::cube_N_prop25(0.5, 1, 1, std::log(4.0)), 2.0, 1e-12);
  EXPECT_LT(fw::cube_N_prop25(1 - 1e-13, 1, 1, 1), 1e-11);
  EXPECT_DOUBLE_EQ(fw::cube_tau_prop25(0.25, std::log(3.0), 1.0), 0.75);
  EXPECT_THROW(fw::cube_tau_prop25(0.25, 1.5, 1.0), jarnik::domain_error);
  EXPECT_NEAR(fw::rect_N_prop27(0.5, 3, std::log(2.0)), 4.0, 1e-12);
  EXPECT_DOUBLE_EQ(fw::rect_N_prop27(0, 2, 0), 1.0);
  EXPECT_NEAR(fw::rect_N_prop27(0.9, 3, 1), 2.0085536923, 1e-9);
}

TEST(RoundToGrid, Examples) {
  auto g = fw::round_to_grid(1.5, 1, 1);
  EXPECT_EQ(g.m, 4u);
  EXPECT_NEAR(g.value, 1.3862943611, 1e-9);
  EXPECT_EQ(fw::round_to_grid(std::log(3.0), 1, 1).value, std::log(3.0));
  EXPECT_THROW(fw::round_to_grid(0.5, 1, 1), jarnik::domain_error);
  auto up = fw::round_to_grid(1.5, 1, 1, fw::GridKind::Cube, fw::RoundDirection::Up);
  EXPECT_EQ(up.m, 5u);
  auto rect = fw::round_to_grid(2.5, 1, 2, fw::GridKind::Rectangle);
  EXPECT_EQ(rect.m, 3u);
  EXPECT_NEAR(rect.value, 2 * std::log(3.0), 1e-12);
}

TEST(RoundToGrid, BracketAndIdempotence) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> cc(0.8, 12), ss(0.5, 3);
  for (int i = 0; i < 2000; ++i) {
    const double c = cc(rng), s = ss(rng);
    if (std::log(2.0) / s > c) continue;
    auto g = fw::round_to_grid(c, s, 1);
    EXPECT_LE(g.value, c * (1 + 1e-12));
    const double next = std::log(static_cast<double>(g.m + 1)) / s;
    EXPECT_LT(c, next * (1 + 1e-12));
    EXPECT_EQ(fw::round_to_grid(g.value, s, 1).value, g.value);
  }
}

TEST(HyperplaneDecay, Examples) {
  auto a = fw::decay_from_hyperplanes_prop28(1, 1, 1, 0, 2);
  EXPECT_NEAR(a.tau_l, 0.1353352832, 1e-9);
  EXPECT_TRUE(a.active);
  auto b = fw::decay_from_hyperplanes_prop28(3, 2, 2, 0.5, 1.0, 0.25);
  EXPECT_DOUBLE_EQ(b.tau_l, 6.0);
  EXPECT_DOUBLE_EQ(b.l_c, 0.75);
  auto c = fw::decay_from_hyperplanes_prop28(2, 1, 1, 0, 0.5);
  EXPECT_NEAR(c.tau_l, 1.2130613195, 1e-9);
  EXPECT_FALSE(c.active);
  EXPECT_THROW(fw::decay_from_hyperplanes_prop28(1, 1, 1, 1, 1), jarnik::domain_error);
}

TEST(SeparationDecay, Examples) {
  const double l2 = std::log(2.0);
  auto a = fw::decay_from_separation_lem29({l2, 1, 1}, 3, 0, 1, 1);
  EXPECT_NEAR(a.tau_l, 0.125, 1e-15);
  EXPECT_NEAR(a.l_c, l2, 1e-15);
  auto b = fw::decay_from_separation_lem29({1, 1, 1}, 1.0, 0.5, 1, 1);
  EXPECT_DOUBLE_EQ(b.tau_l, 1.0);
  EXPECT_FALSE(b.active);
  EXPECT_THROW(fw::decay_from_separation_lem29({1, 1, 1}, 1, 0, 0, 1), jarnik::domain_error);
}

TEST(DirichletFromPowerLaw, Examples) {
  EXPECT_NEAR(fw::dirichlet_from_powerlaw_prop210({std::log(2.0), 1, 1}, 2, 0, 0), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(fw::dirichlet_from_powerlaw_prop210({1, 1, 1}, 0, 0, 0), 1.0);
  EXPECT_NEAR(fw::dirichlet_from_powerlaw_prop210({1, 1, 2}, 1, 0.5, 1), 0.0248935342, 1e-9);
}

TEST(CubeCoverCount, Examples) {
  EXPECT_DOUBLE_EQ(fw::cube_cover_count_lem215({2, 2}, 5), 2.0);
  EXPECT_NEAR(fw::cube_cover_count_lem215({2, 1}, 1), 2 * std::exp(1.0), 1e-12);
  EXPECT_DOUBLE_EQ(fw::cube_cover_count_lem215({3, 1, 1}, 0), 2.0);
}

TEST(CubeCoverUpperBound, Examples) {
  EXPECT_NEAR(fw::upper_bound_with_cube_cover_lem214(1, 2, std::log(4.0), 4), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(fw::upper_bound_with_cube_cover_lem214(1, 1, 1, 1), 1.0);
  EXPECT_NEAR(fw::upper_bound_with_cube_cover_lem214(0, 1, 2, 3),
              fw::upper_bound_thm21(inputs(0, 1, 2), 3), 1e-15);
  EXPECT_THROW(fw::upper_bound_with_cube_cover_lem214(0, 1, 1, 0.5), jarnik::domain_error);
}

TEST(Transfer, Examples) {
  auto a = fw::lem26_transfer(1.0, 1, 1, 0, fw::TransferDirection::Decay);
  EXPECT_DOUBLE_EQ(a.a, 2.0);
  EXPECT_NEAR(a.adjusted, std::exp(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(a.shift, 2.0);
  EXPECT_EQ(fw::lem26_transfer(0.0, 1, 1, 0, fw::TransferDirection::Decay).adjusted, 0.0);
  auto b = fw::lem26_transfer(0.5, 4, 2, 1, fw::TransferDirection::Dirichlet);
  EXPECT_DOUBLE_EQ(b.a, 5.0);
  EXPECT_DOUBLE_EQ(b.shift, 10.0);
  EXPECT_NEAR(b.adjusted, 0.5 * std::exp(-8.0 * (5 + 2 + 1)), 1e-40);
}

TEST(DimensionBound, ClipsEachSide) {
  auto b = fw::DimensionBound::clipped(-0.3, 2.5, 2.0);
  EXPECT_EQ(*b.lower, 0.0);
  EXPECT_EQ(*b.upper, 2.0);
  auto c = fw::DimensionBound::clipped(std::nullopt, 0.5, 1.0);
  EXPECT_FALSE(c.lower.has_value());
  EXPECT_EQ(*c.upper, 0.5);
}

TEST(PsiShape, Validation) {
  EXPECT_NO_THROW(fw::validate(fw::RectangleShape{{1, 2}}, 2));
  EXPECT_THROW(fw::validate(fw::RectangleShape{{1, 2}}, 3), jarnik::domain_error);
  EXPECT_THROW(fw::validate(fw::CubeShape{0}, 1), jarnik::domain_error);
  EXPECT_EQ(fw::diameter_exponent(fw::RectangleShape{{3, 1.5}}), 1.5);
}
