#pragma once

// Contest configuration, cost models and the symmetric equilibrium bid of
// the admitted contestants once the cut-off ability has been disclosed.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contest/distributions.hpp"
#include "contest/errors.hpp"
#include "contest/quadrature.hpp"
#include "contest/special_functions.hpp"

namespace contest {

inline constexpr double kPrizeTolerance = 1e-12;

// n registrants, the top m are admitted, prize vector V (length m).
struct ContestConfig {
  int n = 2;
  int m = 2;
  std::vector<double> prizes{1.0, 0.0};
  double budget = 1.0;

  void validate() const {
    if (n < 2) throw ConfigError("config: need n >= 2, got " + std::to_string(n));
    if (m < 2 || m > n) {
      throw ConfigError("config: need 2 <= m <= n, got m=" + std::to_string(m) +
                        " n=" + std::to_string(n));
    }
    if (static_cast<int>(prizes.size()) != m) {
      throw ConfigError("config: prize vector has " + std::to_string(prizes.size()) +
                        " entries, expected m=" + std::to_string(m));
    }
    if (!(budget > 0.0) || !std::isfinite(budget)) throw ConfigError("config: budget must be positive");
    for (std::size_t i = 0; i < prizes.size(); ++i) {
      if (!(prizes[i] >= 0.0) || !std::isfinite(prizes[i])) {
        throw ConfigError("config: prizes must be finite and non-negative");
      }
      if (i > 0 && prizes[i] > prizes[i - 1] + kPrizeTolerance) {
        throw ConfigError("config: prizes must be non-increasing");
      }
    }
    const double total = std::accumulate(prizes.begin(), prizes.end(), 0.0);
    if (total > budget + kPrizeTolerance) {
      throw ConfigError("config: prizes sum to " + detail::format_number(total) +
                        ", exceeding the budget " + detail::format_number(budget));
    }
  }

  bool has_cutoff() const { return m < n; }

  // l equal prizes of budget / l, the rest zero.
  static ContestConfig simple(int n, int m, int l, double budget = 1.0) {
    if (l < 1 || l > m) throw ConfigError("simple contest: need 1 <= l <= m");
    ContestConfig c{n, m, std::vector<double>(static_cast<std::size_t>(std::max(m, 0)), 0.0), budget};
    for (int i = 0; i < l; ++i) c.prizes[i] = budget / l;
    c.validate();
    return c;
  }

  static ContestConfig winner_take_all(int n, int m, double budget = 1.0) {
    return simple(n, m, 1, budget);
  }
};

// Strictly increasing cost g with g(0) = 0. A contestant of ability x pays
// g(e) / x for performance e.
class CostModel {
public:
  static CostModel linear(double k = 1.0) {
    if (!(k > 0.0)) throw ConfigError("linear cost: k must be positive");
    return CostModel("linear(" + detail::format_number(k) + ")", [k](double e) { return k * e; },
                     [k](double c) { return c / k; }, k);
  }

  static CostModel power(double rho) {
    if (!(rho > 0.0)) throw ConfigError("power cost: rho must be positive");
    return CostModel(
        "power(" + detail::format_number(rho) + ")",
        [rho](double e) { return e <= 0.0 ? 0.0 : std::pow(e, rho); },
        [rho](double c) { return c <= 0.0 ? 0.0 : std::pow(c, 1.0 / rho); },
        rho == 1.0 ? std::optional<double>(1.0) : std::nullopt);
  }

  // Arbitrary increasing g; the inverse is found by bisection to 1e-10.
  static CostModel custom(std::string name, std::function<double(double)> g) {
    auto inverse = [g](double c) {
      if (c <= 0.0) return 0.0;
      double lo = 0.0;
      double hi = 1.0;
      while (g(hi) < c) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericalError("cost inverse: bracketing failed");
      }
      while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < c ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    return CostModel(std::move(name), std::move(g), std::move(inverse), std::nullopt);
  }

  double cost(double e) const { return g_(e); }
  double inverse(double c) const { return g_inv_(c); }
  bool is_linear() const { return k_.has_value(); }
  double linear_coefficient() const {
    if (!k_) throw UnsupportedCost("cost model " + name_ + " is not linear");
    return *k_;
  }
  const std::string& name() const { return name_; }

private:
  CostModel(std::string name, std::function<double(double)> g, std::function<double(double)> g_inv,
            std::optional<double> k)
      : name_(std::move(name)), g_(std::move(g)), g_inv_(std::move(g_inv)), k_(k) {}

  std::string name_;
  std::function<double(double)> g_;
  std::function<double(double)> g_inv_;
  std::optional<double> k_;
};

// Z_l = l (V_l - V_{l+1}) for l = 1..m-1.
struct PrizeGapWeights {
  std::vector<double> z;

  double total() const { return std::accumulate(z.begin(), z.end(), 0.0); }
};

inline PrizeGapWeights prize_gap_decomposition(std::span<const double> prizes) {
  PrizeGapWeights w;
  if (prizes.size() < 2) return w;
  w.z.resize(prizes.size() - 1);
  for (std::size_t l = 1; l < prizes.size(); ++l) {
    w.z[l - 1] = static_cast<double>(l) * (prizes[l - 1] - prizes[l]);
  }
  return w;
}

// Probability of finishing l-th (1-based) among m when a contestant reports
// an ability at posterior CDF level s: C(m-1, l-1) (1-s)^{l-1} s^{m-l}.
inline double rank_probability(int l, int m, double s) {
  if (l < 1 || l > m) return 0.0;
  const double log_c = log_binomial(m - 1, l - 1);
  double log_p = log_c;
  if (l - 1 > 0) log_p += (1.0 - s > 0.0) ? (l - 1) * std::log1p(-s) : -kInfinity;
  if (m - l > 0) log_p += (s > 0.0) ? (m - l) * std::log(s) : -kInfinity;
  return std::exp(log_p);
}

// sum_l V_l Pr[rank l | posterior CDF level s].
inline double expected_prize(std::span<const double> prizes, double s) {
  const int m = static_cast<int>(prizes.size());
  double total = 0.0;
  if (m <= 64) {
    // Direct powers and an exact running binomial; no overflow at this size.
    std::array<double, 64> s_pow{}, r_pow{};
    s_pow[0] = r_pow[0] = 1.0;
    for (int k = 1; k < m; ++k) {
      s_pow[k] = s_pow[k - 1] * s;
      r_pow[k] = r_pow[k - 1] * (1.0 - s);
    }
    double binom = 1.0;  // C(m-1, l-1)
    for (int l = 1; l <= m; ++l) {
      if (prizes[l - 1] != 0.0) total += prizes[l - 1] * binom * r_pow[l - 1] * s_pow[m - l];
      binom = binom * (m - l) / l;
    }
    return total;
  }
  for (int l = 1; l <= m; ++l) {
    if (prizes[l - 1] != 0.0) total += prizes[l - 1] * rank_probability(l, m, s);
  }
  return total;
}

// Posterior over a rival's ability after the cut-off is disclosed. With
// m = n nobody is eliminated; the cut-off is then the bottom of the support
// and the posterior is the prior.
inline TruncatedPtr posterior_beliefs(const ContestConfig& config, const DistributionPtr& dist,
                                      double cutoff) {
  config.validate();
  if (!config.has_cutoff()) {
    if (cutoff > dist->support_inf()) {
      throw ConfigError("m = n admits everyone; the cut-off must be the bottom of the support (" +
                        detail::format_number(dist->support_inf()) + ")");
    }
    return truncate_above(dist, dist->support_inf());
  }
  return truncate_above(dist, cutoff);
}

// b(x; a) = g^{-1}( int_a^x sum_l (V_l - V_{l+1}) C(m-1, l-1) (m-l)
//                    (1-P)^{l-1} P^{m-l-1} p(t) t dt ).
class EquilibriumBid {
public:
  EquilibriumBid(ContestConfig config, DistributionPtr dist, double cutoff,
                 CostModel cost = CostModel::linear())
      : config_(std::move(config)), prior_(std::move(dist)), cost_(std::move(cost)) {
    posterior_ = posterior_beliefs(config_, prior_, cutoff);
    const int m = config_.m;
    gap_coeff_.assign(static_cast<std::size_t>(m - 1), 0.0);
    for (int l = 1; l <= m - 1; ++l) {
      gap_coeff_[l - 1] = (config_.prizes[l - 1] - config_.prizes[l]) *
                          std::exp(log_binomial(m - 1, l - 1)) * (m - l);
    }
    for (double b : posterior_->breakpoints()) breakpoints_.push_back(b);
  }

  const ContestConfig& config() const { return config_; }
  const TruncatedDistribution& posterior() const { return *posterior_; }
  const CostModel& cost_model() const { return cost_; }
  double cutoff() const { return posterior_->cutoff(); }

  // Bid integrand in posterior-rank space, q = 1 - P(t).
  double rank_kernel(double q) const {
    const int m = config_.m;
    double total = 0.0;
    // q^{l-1} (1-q)^{m-l-1}, walked from l = 1 upward.
    const double p = 1.0 - q;
    if (p <= 0.0) {
      return m >= 2 ? gap_coeff_[m - 2] * std::pow(q, m - 2) : 0.0;
    }
    double term = std::pow(p, m - 2);
    const double ratio = q / p;
    for (int l = 1; l <= m - 1; ++l) {
      total += gap_coeff_[l - 1] * term;
      term *= ratio;
    }
    return total;
  }

  // g(b(x)): the integral inside g^{-1}, via quadrature in rank space.
  double performance_integral(double x) const {
    check_type(x);
    if (x == cutoff()) return 0.0;
    const double q_lo = posterior_->survival(x);
    std::vector<double> pts{q_lo};
    for (double b : breakpoints_) {
      if (b < x) pts.push_back(posterior_->survival(b));
    }
    pts.push_back(1.0);
    std::sort(pts.begin(), pts.end());
    auto integrand = [this](double q) { return rank_kernel(q) * posterior_->quantile_of_rank(q); };
    return integrate_checked(integrand, std::span<const double>(pts), QuadratureOptions{},
                             "equilibrium bid");
  }

  // Same quantity from the envelope identity
  //   g(b(x)) = x W(P(x)) - int_a^x W(P(t)) dt,  W = expected prize - V_m,
  // which only needs the CDF.
  double envelope_integral(double x, const QuadratureOptions& opts = {}) const {
    check_type(x);
    const double a = cutoff();
    if (x == a) return 0.0;
    const double v_last = config_.prizes.back();
    auto w = [&](double t) { return expected_prize(config_.prizes, posterior_->cdf(t)) - v_last; };
    std::vector<double> pts{a};
    for (double b : breakpoints_) {
      if (b > a && b < x) pts.push_back(b);
    }
    pts.push_back(x);
    const double area = integrate_checked(w, std::span<const double>(pts), opts, "envelope bid");
    return std::max(0.0, x * w(x) - area);
  }

  double operator()(double x) const { return cost_.inverse(performance_integral(x)); }
  double bid(double x) const { return (*this)(x); }
  double bid_envelope(double x, const QuadratureOptions& opts = {}) const {
    return cost_.inverse(envelope_integral(x, opts));
  }

  double expected_prize_at(double report) const {
    return expected_prize(config_.prizes, posterior_->cdf(report));
  }

  // Expected utility of a type-x contestant who performs as type `report`.
  double deviation_utility(double report, double true_x) const {
    check_type(report);
    check_type(true_x);
    const double payment = cost_.cost(bid(report));
    if (true_x <= 0.0) return payment > 0.0 ? -kInfinity : expected_prize_at(report);
    return expected_prize_at(report) - payment / true_x;
  }

private:
  void check_type(double x) const {
    if (!std::isfinite(x)) throw DomainError("bid: ability must be finite");
    if (x < cutoff()) {
      throw DomainError("bid: ability " + detail::format_number(x) + " is below the cut-off " +
                        detail::format_number(cutoff()) + "; eliminated contestants do not bid");
    }
  }

  ContestConfig config_;
  DistributionPtr prior_;
  CostModel cost_;
  TruncatedPtr posterior_;
  std::vector<double> gap_coeff_;
  std::vector<double> breakpoints_;
};

inline double bid(double x, double cutoff, const ContestConfig& config, const DistributionPtr& dist,
                  const CostModel& cost = CostModel::linear()) {
  return EquilibriumBid(config, dist, cutoff, cost).bid(x);
}

inline double deviation_utility(double report, double true_x, double cutoff,
                                const ContestConfig& config, const DistributionPtr& dist,
                                const CostModel& cost = CostModel::linear()) {
  return EquilibriumBid(config, dist, cutoff, cost).deviation_utility(report, true_x);
}

struct BestResponseVerdict {
  bool pass = false;
  double max_gain = 0.0;
  double best_report = 0.0;
  double equilibrium_utility = 0.0;
};

inline constexpr double kBestResponseTolerance = 1e-6;

// Scans reports on a uniform grid over [cutoff, top] and compares the best
// deviation with truthful play.
inline BestResponseVerdict best_response_check(const EquilibriumBid& eq, double true_x,
                                               int grid_size) {
  if (grid_size < 10) throw ConfigError("best_response_check: grid_size must be >= 10");
  BestResponseVerdict v;
  const double a = eq.cutoff();
  v.best_report = true_x;
  v.equilibrium_utility = eq.deviation_utility(true_x, true_x);
  const auto& post = eq.posterior();
  const double top = post.bounded() ? post.support_sup()
                                    : std::max(2.0 * true_x, post.quantile_of_rank(1e-9));
  v.max_gain = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double report = a + (top - a) * i / (grid_size - 1);
    const double u = eq.deviation_utility(report, true_x);
    const double gain = u - v.equilibrium_utility;
    if (gain > v.max_gain) {
      v.max_gain = gain;
      v.best_report = report;
    }
  }
  v.pass = v.max_gain <= kBestResponseTolerance;
  return v;
}

inline BestResponseVerdict best_response_check(double true_x, double cutoff,
                                               const ContestConfig& config,
                                               const DistributionPtr& dist, const CostModel& cost,
                                               int grid_size) {
  return best_response_check(EquilibriumBid(config, dist, cutoff, cost), true_x, grid_size);
}

}  // namespace contest
