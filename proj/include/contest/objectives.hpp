#pragma once

// Designer objectives under linear cost: the expected highest performance
// (HP) and the expected total performance (TP).
//
// Both are linear in the prize gaps Z_l = l (V_l - V_{l+1}). Given a cut-off,
// each objective is an integral of the posterior rank quantile x_P(q) against
// a polynomial kernel in q; averaging over the cut-off adds one outer
// integral over the cut-off's tail mass s ~ Beta(m+1, n-m).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "contest/distributions.hpp"
#include "contest/equilibrium.hpp"
#include "contest/errors.hpp"
#include "contest/order_statistics.hpp"
#include "contest/quadrature.hpp"
#include "contest/special_functions.hpp"

namespace contest {

enum class EstimateMethod { closed_form, quadrature, monte_carlo };

inline const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::closed_form: return "closed_form";
    case EstimateMethod::quadrature: return "quadrature";
    case EstimateMethod::monte_carlo: return "monte_carlo";
  }
  return "?";
}

struct ObjectiveEstimate {
  double value = 0.0;
  EstimateMethod method = EstimateMethod::quadrature;
  double std_error = 0.0;
};

enum class ObjectiveKind { hp, tp };

inline const char* to_string(ObjectiveKind k) { return k == ObjectiveKind::hp ? "hp" : "tp"; }

// g_l(t) = C(m-1, l) [1 - (1-t)^m] t^{l-1} (1-t)^{m-l-1} and its running
// integral G_l(q). Both are free of the ability distribution.
class PrizeKernel {
public:
  PrizeKernel(int l, int m) : l_(l), m_(m) {
    if (m < 2 || l < 1 || l > m - 1) {
      throw DomainError("prize kernel: need 1 <= l <= m-1, got l=" + std::to_string(l) +
                        " m=" + std::to_string(m));
    }
    log_c_ = log_binomial(m - 1, l);
    // C(m-1, l) B(l, 2m-l)
    tail_weight_ = std::exp(log_c_ + log_beta(l, 2.0 * m - l));
  }

  int l() const { return l_; }
  int m() const { return m_; }

  double density(double t) const {
    if (t <= 0.0 || t > 1.0) return 0.0;
    const double head = -std::expm1(m_ * std::log1p(-t));
    double v = std::exp(log_c_) * head * std::pow(t, l_ - 1);
    if (m_ - l_ - 1 > 0) v *= std::pow(1.0 - t, m_ - l_ - 1);
    return v;
  }

  // G_l(q) = (1/l) I_q(l, m-l) - C(m-1, l) B(l, 2m-l) I_q(l, 2m-l).
  double cumulative(double q) const {
    if (q <= 0.0) return 0.0;
    q = std::min(q, 1.0);
    return regularized_incomplete_beta(q, l_, m_ - l_) / l_ -
           tail_weight_ * regularized_incomplete_beta(q, l_, 2.0 * m_ - l_);
  }

private:
  int l_;
  int m_;
  double log_c_ = 0.0;
  double tail_weight_ = 0.0;
};

// G_l(1) = (1/l) (1 - (m-1)! (2m-l-1)! / ((m-l-1)! (2m-1)!)).
inline double kernel_G_at_one(int l, int m) {
  if (m < 2 || l < 1 || l > m - 1) throw DomainError("kernel_G_at_one: need 1 <= l <= m-1");
  const double log_ratio = log_factorial(m - 1) + log_factorial(2 * m - l - 1) -
                           log_factorial(m - l - 1) - log_factorial(2 * m - 1);
  return -std::expm1(log_ratio) / l;
}

namespace detail {

inline void require_linear(const CostModel& cost) {
  if (!cost.is_linear()) {
    throw UnsupportedCost("objective evaluation requires a linear cost g(e) = k e; got " +
                          cost.name());
  }
}

// Rank-space kernels for a whole prize vector, summed over l with weight Z_l.
struct HpKernel {
  std::vector<PrizeKernel> kernels;
  std::vector<double> z;

  explicit HpKernel(std::span<const double> prizes) {
    const auto w = prize_gap_decomposition(prizes);
    const int m = static_cast<int>(prizes.size());
    for (int l = 1; l <= m - 1; ++l) {
      if (w.z[l - 1] != 0.0) {
        kernels.emplace_back(l, m);
        z.push_back(w.z[l - 1]);
      }
    }
  }
  double operator()(double q) const {
    double total = 0.0;
    for (std::size_t i = 0; i < kernels.size(); ++i) total += z[i] * kernels[i].density(q);
    return total;
  }
  bool empty() const { return kernels.empty(); }
};

// m sum_l Z_l C(m-1, l) q^l (1-q)^{m-l-1}.
struct TpKernel {
  int m = 2;
  std::vector<int> ls;
  std::vector<double> coeff;

  explicit TpKernel(std::span<const double> prizes) : m(static_cast<int>(prizes.size())) {
    const auto w = prize_gap_decomposition(prizes);
    for (int l = 1; l <= m - 1; ++l) {
      if (w.z[l - 1] != 0.0) {
        ls.push_back(l);
        coeff.push_back(m * w.z[l - 1] * std::exp(log_binomial(m - 1, l)));
      }
    }
  }
  double operator()(double q) const {
    double total = 0.0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      total += coeff[i] * std::pow(q, ls[i]) * std::pow(1.0 - q, m - ls[i] - 1);
    }
    return total;
  }
  bool empty() const { return ls.empty(); }
};

inline double beta_density(double x, double a, double b, double log_norm) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_norm);
}

// int_0^1 K(q) x(q s) dq: the objective given a cut-off whose tail mass under
// the prior is s.
template <class Kernel>
double given_tail_mass(const Kernel& kernel, const AbilityDistribution& d, double s,
                       const QuadratureOptions& opts) {
  std::vector<double> pts{0.0};
  for (double b : d.breakpoints()) {
    const double qb = d.survival(b) / s;
    if (qb > 0.0 && qb < 1.0) pts.push_back(qb);
  }
  pts.push_back(1.0);
  std::sort(pts.begin(), pts.end());
  auto integrand = [&](double q) {
    const double k = kernel(q);
    return k == 0.0 ? 0.0 : k * d.quantile_of_rank(q * s);
  };
  return integrate_checked(integrand, std::span<const double>(pts), opts,
                           "objective given cut-off (diverged?)");
}

// E over the cut-off of given_tail_mass(); m = n means no cut-off (s = 1).
template <class Kernel>
double over_cutoff(const Kernel& kernel, int m, int n, const AbilityDistribution& d) {
  const QuadratureOptions inner{1e-13, 1e-13, 2000};
  if (m == n) return given_tail_mass(kernel, d, 1.0, QuadratureOptions{1e-12, 1e-13, 10000});
  const double a = m + 1.0;
  const double b = n - m;
  const double log_norm = log_beta(a, b);
  auto integrand = [&](double s) {
    const double w = beta_density(s, a, b, log_norm);
    return w == 0.0 ? 0.0 : w * given_tail_mass(kernel, d, s, inner);
  };
  const auto pts = beta_breakpoints(a, b);
  return integrate_checked(integrand, std::span<const double>(pts),
                           QuadratureOptions{1e-11, 1e-12, 4000}, "objective over cut-off");
}

// int_0^1 |x'(q)| w(q) dq for a weight vanishing at q = 0. Bounded laws are
// integrated in ability space as int w(S(x)) dx, which sidesteps the spikes
// |x'| has wherever the density nearly vanishes; unbounded ones stay in rank
// space. `rank_hints` are ranks where w changes quickly.
template <class Weight>
double integrate_slope(const AbilityDistribution& d, const Weight& w,
                       std::span<const double> rank_hints, const QuadratureOptions& opts,
                       const std::string& what) {
  std::vector<double> pts;
  if (d.bounded()) {
    pts = {d.support_inf(), d.support_sup()};
    for (double b : d.breakpoints()) pts.push_back(b);
    for (double q : rank_hints) {
      if (q > 0.0 && q < 1.0) pts.push_back(d.quantile_of_rank(q));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto integrand = [&](double x) { return w(d.survival(x)); };
    return integrate_checked(integrand, std::span<const double>(pts), opts, what);
  }
  pts = {0.0, 1.0};
  for (double q : rank_hints) {
    if (q > 0.0 && q < 1.0) pts.push_back(q);
  }
  for (double b : d.breakpoints()) pts.push_back(d.survival(b));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto integrand = [&](double q) {
    const double weight = w(q);
    if (weight == 0.0) return 0.0;
    const double slope = d.abs_quantile_derivative(q);
    // Nodes that round onto an integrable endpoint singularity carry no mass.
    return std::isfinite(slope) ? slope * weight : 0.0;
  };
  return integrate_checked(integrand, std::span<const double>(pts), opts, what);
}

}  // namespace detail

// E[highest performance | cut-off] = E over the max of m i.i.d. posterior
// draws of the equilibrium bid.
inline double hp_given_cutoff(std::span<const double> prizes, const TruncatedDistribution& posterior,
                              const CostModel& cost = CostModel::linear()) {
  detail::require_linear(cost);
  detail::HpKernel kernel(prizes);
  if (kernel.empty()) return 0.0;
  // The posterior is its own law with tail mass 1.
  return detail::given_tail_mass(kernel, posterior, 1.0, QuadratureOptions{1e-12, 1e-13, 10000}) /
         cost.linear_coefficient();
}

// E[sum of performances | cut-off] = m E_P[b(X)].
inline double tp_given_cutoff(std::span<const double> prizes, const TruncatedDistribution& posterior,
                              const CostModel& cost = CostModel::linear()) {
  detail::require_linear(cost);
  detail::TpKernel kernel(prizes);
  if (kernel.empty()) return 0.0;
  return detail::given_tail_mass(kernel, posterior, 1.0, QuadratureOptions{1e-12, 1e-13, 10000}) /
         cost.linear_coefficient();
}

// Coefficient of Z_l in the HP given the (untruncated) law `dist`:
// int_0^1 |x'(q)| G_l(q) dq, plus x(1) G_l(1) when the support does not start
// at zero.
inline double z_coefficient(int l, int m, const DistributionPtr& dist) {
  const PrizeKernel kernel(l, m);
  auto weight = [&](double q) { return kernel.cumulative(q); };
  const double body = detail::integrate_slope(*dist, weight, std::span<const double>(),
                                              QuadratureOptions{1e-12, 1e-12, 10000},
                                              "z_coefficient");
  const double floor = dist->support_inf();
  return body + (floor != 0.0 ? floor * kernel_G_at_one(l, m) : 0.0);
}

// H_m(w) with w = 1 - tail:
//   H_m(w) = m/(2m-1) - (m-1) int_0^w I_{(w-z)/(1-z)}(n-m, m+1) [1 - z^m] z^{m-2} dz.
// Evaluated without cancellation through the complement
//   I_{(w-z)/(1-z)}(n-m, m+1) = 1 - I_{tail/(1-z)}(m+1, n-m).
inline double kernel_H_tail(int m, int n, double tail) {
  if (!(m >= 2 && m < n)) {
    throw DomainError("kernel_H: defined for 2 <= m < n (m = n has a degenerate beta parameter)");
  }
  if (!(tail >= 0.0 && tail <= 1.0)) throw DomainError("kernel_H: w must lie in [0, 1]");
  if (tail == 0.0) return 0.0;
  const double w = 1.0 - tail;
  // int_w^1 (z^{m-2} - z^{2m-2}) dz with 1 - w^k = -expm1(k log1p(-tail)).
  const double log_w = std::log1p(-tail);
  const double upper = -std::expm1((m - 1) * log_w) / (m - 1) -
                       -std::expm1((2 * m - 1) * log_w) / (2 * m - 1);
  if (w == 0.0) return (m - 1) * upper;
  auto integrand = [&](double z) {
    const double r = std::min(1.0, tail / (1.0 - z));
    const double zm2 = m == 2 ? 1.0 : std::pow(z, m - 2);
    return regularized_incomplete_beta(r, m + 1.0, n - m) * (1.0 - std::pow(z, m)) * zm2;
  };
  // The beta factor switches on where tail / (1 - z) ~ (m+1)/(n+1), inside a
  // window near z = w that shrinks with the tail; a doubling grid in 1 - z
  // keeps every panel at a resolvable scale.
  std::vector<double> pts{0.0};
  for (double r : detail::beta_breakpoints(m + 1.0, n - m)) {
    if (r <= 0.0 || r >= 1.0) continue;
    const double z = 1.0 - tail / r;
    if (z > 0.0 && z < w) pts.push_back(z);
  }
  double gap = 2.0 * tail;
  for (int k = 0; k < 60 && gap < 1.0; ++k, gap *= 2.0) pts.push_back(1.0 - gap);
  pts.push_back(w);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double body = integrate_checked(integrand, std::span<const double>(pts),
                                        QuadratureOptions{1e-14, 1e-13, 4000}, "kernel_H");
  return (m - 1) * (body + upper);
}

inline double kernel_H(int m, int n, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("kernel_H: w must lie in [0, 1]");
  return kernel_H_tail(m, n, 1.0 - w);
}

// Highest performance of the m-contestant winner-take-all contest with unit
// budget and unit linear cost, S(m, n, 1).
//   m < n:  int_0^1 x'(w) H_m(w) dw   (distribution-free kernel, tagged closed_form)
//   m = n:  direct rank-space quadrature of the single-stage contest.
inline ObjectiveEstimate hp_value(int m, int n, const DistributionPtr& dist) {
  if (!(m >= 2 && m <= n)) throw ConfigError("hp_value: need 2 <= m <= n");
  if (m == n) {
    const auto wta = ContestConfig::winner_take_all(n, m);
    detail::HpKernel kernel(wta.prizes);
    return {detail::over_cutoff(kernel, m, n, *dist), EstimateMethod::quadrature, 0.0};
  }
  auto weight = [&](double q) { return kernel_H_tail(m, n, q); };
  const auto hints = detail::beta_breakpoints(m + 1.0, n - m);
  const double body = detail::integrate_slope(*dist, weight, std::span<const double>(hints),
                                              QuadratureOptions{1e-12, 1e-12, 4000},
                                              "hp_value (diverged?)");
  const double floor = dist->support_inf();
  const double value = body + (floor != 0.0 ? floor * m / (2.0 * m - 1.0) : 0.0);
  return {value, EstimateMethod::closed_form, 0.0};
}

// E over the cut-off of the conditional HP, for any prize vector: the
// unsimplified nested expectation.
inline ObjectiveEstimate hp_nested(const ContestConfig& config, const DistributionPtr& dist,
                                   const CostModel& cost = CostModel::linear()) {
  config.validate();
  detail::require_linear(cost);
  detail::HpKernel kernel(config.prizes);
  if (kernel.empty()) return {0.0, EstimateMethod::quadrature, 0.0};
  return {detail::over_cutoff(kernel, config.m, config.n, *dist) / cost.linear_coefficient(),
          EstimateMethod::quadrature, 0.0};
}

inline ObjectiveEstimate tp_nested(const ContestConfig& config, const DistributionPtr& dist,
                                   const CostModel& cost = CostModel::linear()) {
  config.validate();
  detail::require_linear(cost);
  detail::TpKernel kernel(config.prizes);
  if (kernel.empty()) return {0.0, EstimateMethod::quadrature, 0.0};
  return {detail::over_cutoff(kernel, config.m, config.n, *dist) / cost.linear_coefficient(),
          EstimateMethod::quadrature, 0.0};
}

// TP = sum_l Z_l E[X^{(n-l)}], whatever the shortlist size.
inline ObjectiveEstimate tp_value(const ContestConfig& config, const DistributionPtr& dist,
                                  const CostModel& cost = CostModel::linear()) {
  config.validate();
  detail::require_linear(cost);
  const auto w = prize_gap_decomposition(config.prizes);
  double total = 0.0;
  for (int l = 1; l <= config.m - 1; ++l) {
    if (w.z[l - 1] == 0.0) continue;
    total += w.z[l - 1] * order_stat_expectation({config.n - l, config.n, dist});
  }
  return {total / cost.linear_coefficient(), EstimateMethod::closed_form, 0.0};
}

// S(m, n, 1) for U[0, b]: b (2m^2 n - m^2 - 2m + 1) / (2m (2m-1) (n+1)).
inline double hp_uniform_closed_form(int m, int n, double b = 1.0) {
  if (!(m >= 2 && m <= n)) throw ConfigError("hp_uniform_closed_form: need 2 <= m <= n");
  const double md = m;
  const double nd = n;
  return b * (2.0 * md * md * nd - md * md - 2.0 * md + 1.0) /
         (2.0 * md * (2.0 * md - 1.0) * (nd + 1.0));
}

// Large-n limit of S(m, n, 1): m/(2m-1) times the top of the support.
inline double hp_asymptotic(int m, double support_sup) {
  if (m < 2) throw ConfigError("hp_asymptotic: need m >= 2");
  if (!std::isfinite(support_sup)) return kInfinity;
  return m / (2.0 * m - 1.0) * support_sup;
}

// S(2, n, 1) / S(n, n, 1).
inline double preselection_gain(int n, const DistributionPtr& dist) {
  if (n < 2) throw ConfigError("preselection_gain: need n >= 2");
  if (n == 2) return 1.0;
  return hp_value(2, n, dist).value / hp_value(n, n, dist).value;
}

inline double preselection_gain_uniform(int n) {
  if (n < 2) throw ConfigError("preselection_gain: need n >= 2");
  return hp_uniform_closed_form(2, n) / hp_uniform_closed_form(n, n);
}

// HP of the (m, l) simple contest with unit budget.
inline ObjectiveEstimate hp_simple(int m, int l, int n, const DistributionPtr& dist) {
  if (l == 1) return hp_value(m, n, dist);
  return hp_nested(ContestConfig::simple(n, m, l), dist);
}

// TP of the (m, l) simple contest with unit budget: E[X^{(n-l)}].
inline ObjectiveEstimate tp_simple(int m, int l, int n, const DistributionPtr& dist) {
  return tp_value(ContestConfig::simple(n, m, l), dist);
}

}  // namespace contest
