#pragma once

// Beta-family special functions: log-gamma, binomials in log space, the
// regularized incomplete beta function and the integer beta-moment identity.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "contest/errors.hpp"

namespace contest {

inline double log_gamma(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " +
                      std::to_string(z));
  }
  return boost::math::lgamma(z);
}

inline double log_factorial(int k) {
  if (k < 0) throw DomainError("log_factorial: negative argument");
  return k < 2 ? 0.0 : log_gamma(static_cast<double>(k) + 1.0);
}

inline double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(log_binomial(n, k));
}

namespace detail {

inline bool is_small_integer(double v) { return v <= 4096.0 && v == std::floor(v); }

// log of a (a+1) ... (a+count-1), accurate for large a.
inline double log_rising(double a, int count) {
  double acc = count * std::log(a);
  for (int k = 1; k < count; ++k) acc += std::log1p(k / a);
  return acc;
}

}  // namespace detail

// log B(a, b). When one argument is a modest integer the ratio of gammas is
// accumulated as a product, avoiding cancellation between huge lgamma values.
inline double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_beta: parameters must be positive");
  if (detail::is_small_integer(b) && a > b) {
    return log_gamma(b) - detail::log_rising(a, static_cast<int>(b));
  }
  if (detail::is_small_integer(a) && b > a) {
    return log_gamma(a) - detail::log_rising(b, static_cast<int>(a));
  }
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

namespace detail {

// Continued fraction for I_x(a, b) (modified Lentz), valid for
// x < (a + 1) / (a + b + 2).
inline double incomplete_beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const int max_iter = 20000 + static_cast<int>(10.0 * std::sqrt(std::max(a, b)));
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericalError("regularized_incomplete_beta: continued fraction did not converge");
}

// lgamma(z) minus its leading Stirling terms.
inline double stirling_remainder(double z) {
  constexpr double half_log_two_pi = 0.91893853320467274178;
  if (z < 10.0) return log_gamma(z) - ((z - 0.5) * std::log(z) - z + half_log_two_pi);
  const double r = 1.0 / z;
  const double r2 = r * r;
  return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 / 1188))));
}

// x^a (1-x)^b / (a B(a, b)). For a large parameter the naive log form loses
// ~1e-12 to cancellation between lgamma terms, so expand around the mode
// x0 = a / (a + b) where the leading terms cancel exactly.
inline double incomplete_beta_front(double x, double a, double b) {
  if (std::max(a, b) < 10.0) {
    return std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b) - std::log(a));
  }
  constexpr double half_log_two_pi = 0.91893853320467274178;
  const double c = a + b;
  const double e = x - a / c;  // x - x0 = -(y - y0)
  const double tilt = a * std::log1p(e * c / a) + b * std::log1p(-e * c / b);
  const double scale = 0.5 * (std::log(b) - std::log(a) - std::log(c)) - half_log_two_pi -
                       stirling_remainder(a) - stirling_remainder(b) + stirling_remainder(c);
  return std::exp(tilt + scale);
}

}  // namespace detail

// I_x(a, b): the Beta(a, b) CDF at x.
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("regularized_incomplete_beta: x must lie in [0, 1], got " +
                      std::to_string(x));
  }
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("regularized_incomplete_beta: a and b must be positive");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return detail::incomplete_beta_front(x, a, b) * detail::incomplete_beta_cf(x, a, b);
  }
  const double y = 1.0 - x;
  return 1.0 - detail::incomplete_beta_front(y, b, a) * detail::incomplete_beta_cf(y, b, a);
}

// Closed form of  int_0^x t^(a-1) (x-t)^(b-1) dt  for integer a, b >= 1:
// (a-1)! (b-1)! / (a+b-1)! * x^(a+b-1).
inline double beta_moment_identity(double x, int a, int b) {
  if (a < 1 || b < 1) throw DomainError("beta_moment_identity: a and b must be >= 1");
  if (!(x > 0.0)) throw DomainError("beta_moment_identity: x must be positive");
  const double log_coeff = log_factorial(a - 1) + log_factorial(b - 1) - log_factorial(a + b - 1);
  return std::exp(log_coeff + (a + b - 1) * std::log(x));
}

}  // namespace contest
