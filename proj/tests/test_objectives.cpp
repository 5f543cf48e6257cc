#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "contest/objectives.hpp"

namespace contest {
namespace {

using boost::math::quadrature::gauss_kronrod;

const auto kUniform = make_uniform();

double uniform_closed(int m, int n) {
  return (2.0 * m * m * n - m * m - 2.0 * m + 1) / (2.0 * m * (2.0 * m - 1) * (n + 1));
}

TEST(KernelGAtOne, Values) {
  EXPECT_NEAR(kernel_G_at_one(1, 2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(kernel_G_at_one(1, 3), 0.6, 1e-15);
  EXPECT_NEAR(kernel_G_at_one(2, 3), 0.45, 1e-15);
}

TEST(KernelGAtOne, MatchesQuadratureAndDecreasesInL) {
  for (int m = 2; m <= 8; ++m) {
    for (int l = 1; l < m; ++l) {
      const PrizeKernel k(l, m);
      const double quad =
          gauss_kronrod<double, 61>::integrate([&](double t) { return k.density(t); }, 0.0, 1.0, 10, 1e-15);
      EXPECT_NEAR(kernel_G_at_one(l, m), quad, 1e-10);
      if (l + 1 < m) {
        EXPECT_GE(kernel_G_at_one(l, m), kernel_G_at_one(l + 1, m));
      }
    }
  }
}

TEST(PrizeKernel, DominanceAndRatioMonotonicity) {
  for (int m = 3; m <= 8; ++m) {
    for (int l = 1; l + 1 < m; ++l) {
      const PrizeKernel a(l, m), b(l + 1, m);
      double prev_ratio = INFINITY;
      for (int i = 1; i <= 200; ++i) {
        const double q = i / 200.0;
        const double ga = a.cumulative(q), gb = b.cumulative(q);
        EXPECT_GE(ga, gb - 1e-15) << "m=" << m << " l=" << l << " q=" << q;
        if (gb > 1e-9) {
          EXPECT_LE(ga / gb, prev_ratio * (1 + 1e-12));
          prev_ratio = ga / gb;
        }
      }
    }
  }
}

TEST(PrizeKernel, CumulativeMatchesIntegratedDensity) {
  const PrizeKernel k(2, 5);
  for (double q : {0.1, 0.4, 0.9}) {
    const double quad =
        gauss_kronrod<double, 61>::integrate([&](double t) { return k.density(t); }, 0.0, q, 10, 1e-15);
    EXPECT_NEAR(k.cumulative(q), quad, 1e-13);
  }
}

TEST(HpGivenCutoff, UniformOracles) {
  const auto post = truncate_above(kUniform, 0.0);
  EXPECT_NEAR(hp_given_cutoff(std::vector<double>{1, 0}, *post), 0.25, 1e-10);
  // m = 3 WTA: b(x) = 2x^3/3, so E[b(max of 3)] = (2/3) * 3/6.
  EXPECT_NEAR(hp_given_cutoff(std::vector<double>{1, 0, 0}, *post), 1.0 / 3.0, 1e-7);
  EXPECT_EQ(hp_given_cutoff(std::vector<double>{0, 0, 0}, *post), 0.0);
}

TEST(ZCoefficient, UniformQuadratureOracle) {
  const PrizeKernel k(1, 2);
  const double oracle =
      gauss_kronrod<double, 61>::integrate([&](double q) { return k.cumulative(q); }, 0.0, 1.0, 10, 1e-14);
  EXPECT_NEAR(z_coefficient(1, 2, kUniform), oracle, 1e-8);
  double prev = INFINITY;
  for (int l = 1; l <= 4; ++l) {
    const double c = z_coefficient(l, 5, kUniform);
    EXPECT_LE(c, prev);
    prev = c;
  }
}

TEST(KernelH, AtZero) {
  for (int m = 2; m <= 6; ++m) EXPECT_NEAR(kernel_H(m, 10, 0.0), m / (2.0 * m - 1.0), 1e-15);
}

TEST(KernelH, MatchesDirectFormula) {
  // H_m(w) = m/(2m-1) - (m-1) int_0^w I_{(w-z)/(1-z)}(n-m, m+1) (1 - z^m) z^{m-2} dz, via Boost.
  for (auto [m, n] : {std::pair{2, 10}, std::pair{3, 7}, std::pair{5, 12}}) {
    double prev = INFINITY;
    for (double w : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      auto f = [&, m = m, n = n](double z) {
        return boost::math::ibeta(n - m, m + 1.0, (w - z) / (1 - z)) * (1 - std::pow(z, m)) * std::pow(z, m - 2);
      };
      const double direct =
          m / (2.0 * m - 1) - (m - 1) * gauss_kronrod<double, 61>::integrate(f, 0.0, w, 15, 1e-14);
      const double h = kernel_H(m, n, w);
      EXPECT_NEAR(h, direct, 1e-7) << "m=" << m << " n=" << n << " w=" << w;
      EXPECT_LE(h, prev + 1e-15);
      prev = h;
    }
  }
}

TEST(KernelH, NearAsymptoteBelowStep) {
  const int n = 2000;
  for (double w : {0.2, 0.5, 0.9}) EXPECT_NEAR(kernel_H(2, n, w), 2.0 / 3.0, 1e-2);
}

TEST(HpValue, UniformClosedForm) {
  EXPECT_NEAR(hp_value(2, 2, kUniform).value, 0.25, 1e-12);
  EXPECT_NEAR(hp_value(2, 6, kUniform).value, 41.0 / 84.0, 1e-12);
  EXPECT_NEAR(hp_value(3, 4, kUniform).value, 58.0 / 150.0, 1e-12);
  EXPECT_EQ(hp_value(2, 6, kUniform).method, EstimateMethod::closed_form);
  for (int n = 2; n <= 20; ++n)
    for (int m = 2; m <= n; ++m) EXPECT_NEAR(hp_value(m, n, kUniform).value, uniform_closed(m, n), 1e-10);
}

TEST(HpValue, ClosedFormMatchesNestedQuadrature) {
  for (const auto& d : {kUniform, make_power(2.0), make_exponential()}) {
    for (int n : {3, 6, 12}) {
      for (int m : {2, 3, n - 1}) {
        if (m >= n) continue;
        const double closed = hp_value(m, n, d).value;
        const double nested = hp_nested(ContestConfig::winner_take_all(n, m), d).value;
        EXPECT_NEAR(closed, nested, 1e-6) << d->spec() << " m=" << m << " n=" << n;
      }
    }
  }
}

TEST(HpValue, UniformScalesWithSupport) {
  EXPECT_NEAR(hp_value(3, 9, make_uniform(0.0, 2.0)).value, 2.0 * uniform_closed(3, 9), 1e-10);
  EXPECT_NEAR(hp_uniform_closed_form(3, 9, 2.0), 2.0 * uniform_closed(3, 9), 1e-14);
}

TEST(HpValue, IncreasingTowardTwoThirds) {
  double prev = 0.0;
  for (int n = 2; n <= 200; ++n) {
    const double v = hp_value(2, n, kUniform).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(prev, 1593.0 / 2412.0, 1e-10);
  EXPECT_LT(std::abs(prev - 2.0 / 3.0), 0.02);
}

TEST(HpAsymptotic, Values) {
  EXPECT_NEAR(hp_asymptotic(2, 1.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(hp_asymptotic(3, 1.0), 0.6, 1e-15);
  EXPECT_NEAR(hp_asymptotic(100000, 1.0), 0.5, 1e-5);
  EXPECT_TRUE(std::isinf(hp_asymptotic(2, INFINITY)));
}

TEST(TpValue, InvariantAcrossShortlist) {
  for (int m = 2; m <= 5; ++m) {
    EXPECT_NEAR(tp_value(ContestConfig::winner_take_all(5, m), kUniform).value, 2.0 / 3.0, 1e-8);
  }
  EXPECT_NEAR(tp_value(ContestConfig::simple(5, 3, 2), kUniform).value, 0.5, 1e-8);
  EXPECT_EQ(tp_value(ContestConfig{5, 3, {0, 0, 0}, 1.0}, kUniform).value, 0.0);
}

TEST(TpValue, MatchesNestedRoute) {
  for (const auto& d : {make_power(2.0), make_exponential()}) {
    for (int m = 2; m <= 4; ++m) {
      const auto cfg = ContestConfig::winner_take_all(6, m);
      EXPECT_NEAR(tp_value(cfg, d).value, tp_nested(cfg, d).value, 1e-7) << d->spec() << " m=" << m;
    }
  }
}

TEST(TpValue, RejectsNonLinearCost) {
  EXPECT_THROW(tp_value(ContestConfig::winner_take_all(5, 2), kUniform, CostModel::power(2.0)), UnsupportedCost);
}

TEST(PreselectionGain, Uniform) {
  EXPECT_NEAR(preselection_gain(2, kUniform), 1.0, 1e-12);
  EXPECT_NEAR(preselection_gain_uniform(100), (793.0 / 1212.0) / (1989801.0 / 4019800.0), 1e-12);
  EXPECT_NEAR(preselection_gain(100, kUniform), preselection_gain_uniform(100), 1e-9);
  for (int n : {1000, 5000, 100000}) EXPECT_LT(std::abs(preselection_gain_uniform(n) - 4.0 / 3.0), 0.01);
}

TEST(PreselectionGain, OtherDistributionsAtSixtyFour) {
  EXPECT_GT(preselection_gain(64, make_power(2.0)), 1.25);
  EXPECT_GT(preselection_gain(64, make_exponential()), 1.25);
}

}  // namespace
}  // namespace contest
