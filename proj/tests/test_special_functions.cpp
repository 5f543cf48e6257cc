#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <gtest/gtest.h>

#include "contest/order_statistics.hpp"
#include "contest/special_functions.hpp"

namespace contest {
namespace {

using boost::math::quadrature::gauss_kronrod;

TEST(LogGamma, KnownValues) {
  EXPECT_DOUBLE_EQ(log_gamma(1.0), 0.0);
  EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-14);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-14);
}

TEST(IncompleteBeta, KnownValues) {
  EXPECT_DOUBLE_EQ(regularized_incomplete_beta(1.0, 2.5, 7.0), 1.0);
  EXPECT_DOUBLE_EQ(regularized_incomplete_beta(0.0, 2.5, 7.0), 0.0);
  EXPECT_NEAR(regularized_incomplete_beta(0.3, 1.0, 1.0), 0.3, 1e-15);
  EXPECT_NEAR(regularized_incomplete_beta(0.5, 3.0, 2.0), 0.3125, 1e-15);
}

TEST(IncompleteBeta, MatchesBoostOracle) {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0, 7.5, 48.0, 495.0}) {
    for (double b : {0.7, 1.0, 3.0, 21.0, 499.0}) {
      for (int i = 0; i <= 100; ++i) {
        const double x = i / 100.0;
        worst = std::max(worst, std::abs(regularized_incomplete_beta(x, a, b) - boost::math::ibeta(a, b, x)));
      }
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(IncompleteBeta, Symmetry) {
  for (double a : {0.5, 2.0, 30.0})
    for (double b : {1.0, 4.0, 200.0})
      for (double x = 0.0; x <= 1.0; x += 0.05)
        EXPECT_NEAR(regularized_incomplete_beta(x, a, b) + regularized_incomplete_beta(1.0 - x, b, a), 1.0,
                    1e-12);
}

TEST(IncompleteBeta, MonotoneInX) {
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = regularized_incomplete_beta(i / 1000.0, 12.0, 3.5);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(IncompleteBeta, StepBoundAtLargeN) {
  // Lower tail of I_x(n-m, m+1) is negligible below 1 - m/(n-1) - delta.
  const int n = 500;
  for (int m = 2; m <= 20; ++m) {
    for (int i = 0; i < 1000; ++i) {
      const double x = i / 999.0;
      const double v = regularized_incomplete_beta(x, n - m, m + 1);
      EXPECT_LE(v, 1.0);
      if (x < 1.0 - m / (n - 1.0) - 0.05) {
        EXPECT_LE(v, 1e-3) << "m=" << m << " x=" << x;
      }
    }
  }
}

TEST(BetaMoment, KnownValues) {
  EXPECT_NEAR(beta_moment_identity(1.0, 1, 1), 1.0, 1e-15);
  EXPECT_NEAR(beta_moment_identity(1.0, 2, 2), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(beta_moment_identity(0.5, 1, 2), 0.125, 1e-15);
}

TEST(BetaMoment, MatchesQuadrature) {
  for (double x : {0.3, 1.0, 2.5})
    for (int a = 1; a <= 6; ++a)
      for (int b = 1; b <= 6; ++b) {
        const double lhs = gauss_kronrod<double, 31>::integrate(
            [&](double t) { return std::pow(t, a - 1) * std::pow(x - t, b - 1); }, 0.0, x, 10, 1e-14);
        EXPECT_NEAR(beta_moment_identity(x, a, b) / lhs, 1.0, 1e-10);
      }
}

TEST(OrderStatPdf, UniformValues) {
  const auto u = make_uniform();
  EXPECT_NEAR(order_stat_pdf({1, 1, u}, 0.4), 1.0, 1e-14);
  EXPECT_NEAR(order_stat_pdf({2, 2, u}, 0.5), 1.0, 1e-14);
  EXPECT_NEAR(order_stat_pdf({3, 3, u}, 1.0), 3.0, 1e-14);
}

TEST(OrderStatPdf, IntegratesToOne) {
  for (const auto& d : {make_uniform(), make_power(2.0), make_exponential()}) {
    for (int n : {1, 3, 8}) {
      for (int k = 1; k <= n; ++k) {
        const double hi = d->bounded() ? d->support_sup() : 60.0;
        const double mass = gauss_kronrod<double, 61>::integrate(
            [&](double x) { return order_stat_pdf({k, n, d}, x); }, d->support_inf(), hi, 15, 1e-12);
        EXPECT_NEAR(mass, 1.0, 1e-8) << d->spec() << " k=" << k << " n=" << n;
      }
    }
  }
}

TEST(OrderStatExpectation, Values) {
  const auto u = make_uniform();
  EXPECT_NEAR(order_stat_expectation({4, 5, u}), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(order_stat_expectation({2, 3, u}), 0.5, 1e-12);
  EXPECT_NEAR(order_stat_expectation({1, 1, make_exponential(2.0)}), 0.5, 1e-10);
  // Exp(1): E[X^(k)] = sum_{j=n-k+1}^{n} 1/j.
  EXPECT_NEAR(order_stat_expectation({4, 5, make_exponential()}), 1.0 / 5 + 1.0 / 4 + 1.0 / 3 + 1.0 / 2, 1e-9);
}

TEST(ConditionalDensitySum, Values) {
  const auto u = make_uniform();
  EXPECT_NEAR(conditional_density_sum(5, 2, 0.5, 0.75, u), 4.0, 1e-9);
  EXPECT_NEAR(conditional_density_sum(5, 2, 0.5, 0.5, u), 0.0, 1e-12);
  EXPECT_NEAR(conditional_density_sum(4, 3, 0.2, 0.6, u), 3.75, 1e-9);
}

TEST(ConditionalDensitySum, EqualsScaledTruncatedPdf) {
  const auto d = make_power(2.0);
  for (int n = 3; n <= 9; ++n)
    for (int m = 2; m < n; ++m)
      for (double x : {0.45, 0.7, 0.95}) {
        const double a = 0.4;
        const double expected = m * d->pdf(x) / d->survival(a);
        EXPECT_NEAR(conditional_density_sum(n, m, a, x, d), expected, 1e-9);
      }
}

}  // namespace
}  // namespace contest
