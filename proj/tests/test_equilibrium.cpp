#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "contest/equilibrium.hpp"

namespace contest {
namespace {

const auto kUniform = make_uniform();

ContestConfig prizes(int n, std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  return {n, static_cast<int>(v.size()), std::move(v), std::max(total, 1.0)};
}

TEST(Posterior, TruncatesAtCutoff) {
  const auto p = posterior_beliefs(ContestConfig::winner_take_all(3, 2), kUniform, 0.5);
  EXPECT_DOUBLE_EQ(p->support_inf(), 0.5);
  EXPECT_NEAR(p->cdf(0.75), 0.5, 1e-15);
}

TEST(Posterior, NoShortlistKeepsPrior) {
  const auto p = posterior_beliefs(ContestConfig::winner_take_all(4, 4), make_power(2.0), 0.0);
  for (double x : {0.1, 0.5, 0.9}) EXPECT_NEAR(p->cdf(x), x * x, 1e-15);
  EXPECT_THROW(posterior_beliefs(ContestConfig::winner_take_all(4, 4), kUniform, 0.3), ConfigError);
}

TEST(Posterior, ExponentialShift) {
  const auto p = posterior_beliefs(ContestConfig::winner_take_all(5, 2), make_exponential(), 1.0);
  for (double t : {0.2, 1.0, 3.0}) EXPECT_NEAR(p->cdf(1.0 + t), -std::expm1(-t), 1e-12);
}

TEST(PrizeGaps, Examples) {
  EXPECT_EQ(prize_gap_decomposition(std::vector<double>{1, 0}).z, (std::vector<double>{1}));
  EXPECT_EQ(prize_gap_decomposition(std::vector<double>{0.5, 0.5, 0}).z, (std::vector<double>{0, 1}));
  const auto z = prize_gap_decomposition(std::vector<double>{0.6, 0.3, 0.1}).z;
  ASSERT_EQ(z.size(), 2u);
  EXPECT_NEAR(z[0], 0.3, 1e-15);
  EXPECT_NEAR(z[1], 0.4, 1e-15);
}

TEST(Bid, UniformWinnerTakeAll) {
  const auto wta = ContestConfig::winner_take_all(2, 2);
  EXPECT_NEAR(bid(1.0, 0.0, wta, kUniform), 0.5, 1e-12);
  EXPECT_NEAR(bid(1.0, 0.5, ContestConfig::winner_take_all(3, 2), kUniform), 0.75, 1e-12);
  // b(x; 0.2) = (x^2 - 0.04) / (2 * 0.8)
  for (double x : {0.2, 0.5, 0.9})
    EXPECT_NEAR(bid(x, 0.2, ContestConfig::winner_take_all(3, 2), kUniform), (x * x - 0.04) / 1.6, 1e-12);
}

TEST(Bid, ZeroAtCutoff) {
  for (const auto& d : {kUniform, make_power(2.0), make_exponential()}) {
    const EquilibriumBid eq(ContestConfig::simple(7, 4, 2), d, d->quantile_of_rank(0.6));
    EXPECT_EQ(eq.bid(eq.cutoff()), 0.0);
  }
}

TEST(Bid, ZeroPrizesGiveZeroBids) {
  const EquilibriumBid eq(prizes(5, {0, 0, 0}), kUniform, 0.3);
  for (double x : {0.3, 0.6, 1.0}) EXPECT_EQ(eq.bid(x), 0.0);
}

TEST(Bid, MatchesDirectIntegral) {
  // m = 3, V = (0.6, 0.3, 0.1), Exp(1) cut at 0.4.
  const auto d = make_exponential();
  const auto cfg = prizes(6, {0.6, 0.3, 0.1});
  const double a = 0.4;
  const EquilibriumBid eq(cfg, d, a);
  auto integrand = [&](double t) {
    const double P = -std::expm1(-(t - a));
    const double p = std::exp(-(t - a));
    const double first = (0.6 - 0.3) * 1 * 2 * P;          // l = 1
    const double second = (0.3 - 0.1) * 2 * 1 * (1 - P);   // l = 2
    return (first + second) * p * t;
  };
  for (double x : {0.5, 1.0, 3.0}) {
    const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, x, 10, 1e-14);
    EXPECT_NEAR(eq.bid(x), ref, 1e-12 * std::max(1.0, ref));
  }
}

TEST(Bid, AdditiveInPrizeGaps) {
  const auto d = make_power(2.0);
  const EquilibriumBid both(prizes(8, {0.7, 0.4, 0}), d, 0.3);
  // V = (0.3, 0, 0) contributes Z_1 = 0.3; V = (0.4, 0.4, 0) contributes Z_2 = 0.8.
  const EquilibriumBid first(prizes(8, {0.3, 0, 0}), d, 0.3);
  const EquilibriumBid second(prizes(8, {0.4, 0.4, 0}), d, 0.3);
  for (double x : {0.35, 0.6, 0.99}) EXPECT_NEAR(both.bid(x), first.bid(x) + second.bid(x), 1e-13);
}

TEST(Bid, EnvelopeRouteAgrees) {
  for (const auto& d : {kUniform, make_power(2.0), make_exponential(), make_skewed_mixture()}) {
    const EquilibriumBid eq(ContestConfig::simple(9, 4, 1), d, d->quantile_of_rank(0.5));
    for (double q : {0.4, 0.2, 0.05, 0.001}) {
      const double x = d->quantile_of_rank(q);
      EXPECT_NEAR(eq.bid_envelope(x), eq.bid(x), 1e-9 * std::max(1.0, eq.bid(x))) << d->spec();
    }
  }
}

TEST(Bid, PowerCostInvertsLinearBid) {
  const auto cfg = ContestConfig::winner_take_all(5, 3);
  const EquilibriumBid lin(cfg, kUniform, 0.2);
  const EquilibriumBid sq(cfg, kUniform, 0.2, CostModel::power(2.0));
  for (double x : {0.3, 0.8}) EXPECT_NEAR(sq.bid(x), std::sqrt(lin.bid(x)), 1e-12);
}

TEST(Bid, RejectsTypesBelowCutoff) {
  const EquilibriumBid eq(ContestConfig::winner_take_all(3, 2), kUniform, 0.5);
  EXPECT_THROW(eq.bid(0.4), DomainError);
}

TEST(Bid, MonotoneAndGapIncentive) {
  const auto d = make_power(2.0);
  const EquilibriumBid base(prizes(6, {0.7, 0.3, 0.0}), d, 0.4);
  const EquilibriumBid raised(prizes(6, {0.7, 0.3, 0.1}), d, 0.4);
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = 0.4 + 0.6 * i / 199.0;
    const double b = base.bid(x);
    EXPECT_GE(b, prev);
    EXPECT_LE(raised.bid(x), b + 1e-15);
    prev = b;
  }
}

TEST(DeviationUtility, Examples) {
  const auto wta = ContestConfig::winner_take_all(2, 2);
  EXPECT_NEAR(deviation_utility(1.0, 1.0, 0.0, wta, kUniform), 0.5, 1e-12);
  EXPECT_NEAR(deviation_utility(0.5, 1.0, 0.0, wta, kUniform), 0.375, 1e-12);
  EXPECT_NEAR(deviation_utility(0.3, 0.7, 0.3, ContestConfig::winner_take_all(4, 2), kUniform), 0.0, 1e-15);
}

TEST(BestResponse, Examples) {
  const auto cost = CostModel::linear();
  auto v = best_response_check(0.8, 0.0, ContestConfig::winner_take_all(2, 2), kUniform, cost, 1000);
  EXPECT_TRUE(v.pass);
  EXPECT_LE(v.max_gain, 1e-6);
  EXPECT_TRUE(best_response_check(0.9, 0.2, prizes(5, {0.5, 0.5, 0}), kUniform, cost, 1000).pass);
  EXPECT_TRUE(best_response_check(0.2, 0.2, ContestConfig::winner_take_all(4, 2), kUniform, cost, 100).pass);
  EXPECT_THROW(best_response_check(0.5, 0.2, ContestConfig::winner_take_all(4, 2), kUniform, cost, 5), ConfigError);
}

TEST(Config, Validation) {
  EXPECT_THROW(ContestConfig::winner_take_all(3, 4).validate(), ConfigError);
  EXPECT_THROW(prizes(4, {0.3, 0.5}).validate(), ConfigError);
  EXPECT_THROW((ContestConfig{4, 2, {0.8, 0.4}, 1.0}).validate(), ConfigError);
  EXPECT_THROW(prizes(4, {-1, 0}).validate(), ConfigError);
  EXPECT_NO_THROW(ContestConfig::simple(5, 3, 2).validate());
}

}  // namespace
}  // namespace contest
