#pragma once

// Order-statistic densities and expectations, including the conditional law
// of the top order statistics given the (n-m)-th one.

#include <cmath>
#include <string>
#include <vector>

#include "contest/distributions.hpp"
#include "contest/errors.hpp"
#include "contest/quadrature.hpp"
#include "contest/special_functions.hpp"

namespace contest {

// X^{(k)} of n i.i.d. draws; k = 1 is the smallest.
struct OrderStatisticSpec {
  int k = 1;
  int n = 1;
  DistributionPtr dist;

  void validate() const {
    if (n < 1 || k < 1 || k > n) {
      throw DomainError("order statistic: need 1 <= k <= n, got k=" + std::to_string(k) +
                        " n=" + std::to_string(n));
    }
    if (!dist) throw DomainError("order statistic: missing distribution");
  }
};

namespace detail {

// Splits [0, 1] around the bulk of a Beta(alpha, beta) weight so adaptive
// quadrature sees the peak from the start.
inline std::vector<double> beta_breakpoints(double alpha, double beta) {
  const double mean = alpha / (alpha + beta);
  const double sd = std::sqrt(alpha * beta / ((alpha + beta) * (alpha + beta) * (alpha + beta + 1.0)));
  std::vector<double> pts = {0.0, 1.0};
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
    const double p = mean + k * sd;
    if (p > 0.0 && p < 1.0) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// log of x^p with the convention 0^0 = 1.
inline double log_power(double x, double p) {
  if (p == 0.0) return 0.0;
  return x > 0.0 ? p * std::log(x) : -kInfinity;
}

}  // namespace detail

// f_{k,n}(x) = n C(n-1, k-1) F(x)^{k-1} (1 - F(x))^{n-k} f(x).
inline double order_stat_pdf(const OrderStatisticSpec& spec, double x) {
  spec.validate();
  const auto& d = *spec.dist;
  const double density = d.pdf(x);
  if (!(density > 0.0)) return 0.0;
  const double log_value = std::log(static_cast<double>(spec.n)) +
                           log_binomial(spec.n - 1, spec.k - 1) +
                           detail::log_power(d.cdf(x), spec.k - 1) +
                           detail::log_power(d.survival(x), spec.n - spec.k) + std::log(density);
  return std::exp(log_value);
}

// E[X^{(k)}], integrated in rank space where q = 1 - F(X^{(k)}) ~ Beta(n-k+1, k).
inline double order_stat_expectation(const OrderStatisticSpec& spec,
                                     const QuadratureOptions& opts = {}) {
  spec.validate();
  const double alpha = spec.n - spec.k + 1.0;
  const double beta = spec.k;
  const double log_norm = log_beta(alpha, beta);
  const auto& d = *spec.dist;
  auto integrand = [&](double q) {
    const double w = std::exp(detail::log_power(q, alpha - 1.0) +
                              detail::log_power(1.0 - q, beta - 1.0) - log_norm);
    if (w == 0.0) return 0.0;
    return w * d.quantile_of_rank(q);
  };
  const auto pts = detail::beta_breakpoints(alpha, beta);
  return integrate_checked(integrand, std::span<const double>(pts), opts,
                           "order_stat_expectation k=" + std::to_string(spec.k) +
                               " n=" + std::to_string(spec.n) + " (diverged?)");
}

// Joint density of (X^{(r)}, X^{(j)}) at (a, x), r < j.
inline double order_stat_joint_pdf(int r, int j, int n, double a, double x,
                                   const AbilityDistribution& d) {
  if (!(r >= 1 && r < j && j <= n)) throw DomainError("order_stat_joint_pdf: need 1 <= r < j <= n");
  if (!(x > a)) return 0.0;
  const double fa = d.pdf(a);
  const double fx = d.pdf(x);
  if (!(fa > 0.0) || !(fx > 0.0)) return 0.0;
  const double between = d.cdf(x) - d.cdf(a);
  const double log_coeff = log_factorial(n) - log_factorial(r - 1) - log_factorial(j - r - 1) -
                           log_factorial(n - j);
  return std::exp(log_coeff + detail::log_power(d.cdf(a), r - 1) +
                  detail::log_power(between, j - r - 1) +
                  detail::log_power(d.survival(x), n - j) + std::log(fa) + std::log(fx));
}

// Density of X^{(j)} at x conditional on X^{(r)} = a, as the ratio of the
// joint density to the marginal of X^{(r)}.
inline double conditional_order_stat_pdf(int j, int r, int n, double a, double x,
                                         const DistributionPtr& dist) {
  const double marginal = order_stat_pdf({r, n, dist}, a);
  if (!(marginal > 0.0)) {
    throw DomainError("conditional_order_stat_pdf: conditioning value has zero density");
  }
  return order_stat_joint_pdf(r, j, n, a, x, *dist) / marginal;
}

// sum_{i=1}^{m} f(X^{(n-i+1)} = x | X^{(n-m)} = cutoff). Equals m times the
// truncated density above the cutoff.
inline double conditional_density_sum(int n, int m, double cutoff, double x,
                                      const DistributionPtr& dist) {
  if (!(m >= 2 && m < n)) throw DomainError("conditional_density_sum: need 2 <= m < n");
  if (!(dist->survival(cutoff) > 1e-14)) {
    throw DegenerateTruncation("conditional_density_sum: F(cutoff) = 1");
  }
  if (x <= cutoff) return 0.0;
  double total = 0.0;
  for (int i = 1; i <= m; ++i) {
    total += conditional_order_stat_pdf(n - i + 1, n - m, n, cutoff, x, dist);
  }
  return total;
}

}  // namespace contest
