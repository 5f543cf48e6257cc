#pragma once

// Executable invariant suites. Each check reports pass/fail, a margin
// (tolerance minus the worst observed violation, so positive means slack) and
// a short human-readable detail line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "contest/distributions.hpp"
#include "contest/equilibrium.hpp"
#include "contest/montecarlo.hpp"
#include "contest/objectives.hpp"
#include "contest/optimizer.hpp"
#include "contest/order_statistics.hpp"
#include "contest/rng.hpp"
#include "contest/special_functions.hpp"

namespace contest {

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  int workers = 1;
  std::int64_t mc_replications = 1'000'000;
};

struct CheckResult {
  std::string name;
  std::string module;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct CheckEntry {
  std::string name;
  std::string module;
  std::function<CheckResult(const VerifyOptions&)> run;
  std::string alias = {};  // older name still accepted by --only

  bool matches(const std::string& key) const {
    return key == name || key == module || (!alias.empty() && key == alias);
  }
};

namespace verify_detail {

// Worst |error| against a tolerance.
struct Worst {
  explicit Worst(double tolerance) : tol(tolerance) {}

  double tol;
  double worst = 0.0;
  std::string where;

  void see(double err, const std::string& at) {
    if (!(err <= worst)) {  // also catches NaN
      worst = err;
      where = at;
    }
  }
  CheckResult result() const {
    CheckResult r;
    r.pass = std::isfinite(worst) && worst <= tol;
    r.margin = tol - worst;
    std::ostringstream os;
    os << "worst " << worst << " (tol " << tol << ")";
    if (!where.empty()) os << " at " << where;
    r.detail = os.str();
    return r;
  }
};

inline std::vector<DistributionPtr> reference_distributions() {
  return {make_uniform(1.0), make_power(2.0), make_exponential(1.0)};
}

inline std::vector<DistributionPtr> builtin_distributions() {
  return {make_uniform(1.0),       make_uniform(0.0, 2.5), make_power(2.0),
          make_exponential(1.0),   make_beta(2.0, 3.0),    make_beta(40.0, 1.0),
          make_skewed_mixture()};
}

inline std::string at(const DistributionPtr& d, const std::string& rest) {
  return d->spec() + " " + rest;
}

inline std::string num(double v) { return detail::format_number(v); }

// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// A few configs spanning prize shapes.
inline std::vector<ContestConfig> sample_configs() {
  return {ContestConfig::winner_take_all(5, 2), ContestConfig{6, 3, {0.5, 0.5, 0.0}, 1.0},
          ContestConfig{8, 3, {0.6, 0.3, 0.1}, 1.0}, ContestConfig{10, 4, {0.4, 0.3, 0.2, 0.0}, 1.0},
          ContestConfig::winner_take_all(4, 4)};
}

inline double cutoff_at_rank(const ContestConfig& c, const DistributionPtr& d, double cdf_level) {
  return c.has_cutoff() ? d->quantile_of_rank(1.0 - cdf_level) : d->support_inf();
}

inline double top_of(const AbilityDistribution& d) {
  return d.bounded() ? d.support_sup() : d.quantile_of_rank(1e-4);
}

// ---- distributions -------------------------------------------------------

inline CheckResult quantile_cdf(const VerifyOptions&) {
  Worst w{1e-9};
  for (const auto& d : builtin_distributions()) {
    for (int i = 0; i <= 1000; ++i) {
      const double q = i / 1000.0;
      const double x = d->quantile_of_rank(q);
      if (!std::isfinite(x)) continue;
      w.see(std::abs(d->cdf(x) - (1.0 - q)), at(d, "q=" + num(q)));
    }
  }
  return w.result();
}

// Round trip x -> 1 - F(x) -> x wherever x is numerically identifiable from
// its rank (density not negligible).
inline CheckResult quantile_roundtrip(const VerifyOptions&) {
  Worst w{1e-8};
  for (const auto& d : builtin_distributions()) {
    const double lo = d->support_inf();
    const double hi = top_of(*d);
    for (int i = 1; i < 200; ++i) {
      const double x = lo + (hi - lo) * i / 200.0;
      const double h = 1e-6 * (hi - lo);
      if (!(std::min({d->pdf(x - h), d->pdf(x), d->pdf(x + h)}) > 1e-6)) continue;
      w.see(std::abs(d->quantile_of_rank(d->survival(x)) - x), at(d, "x=" + num(x)));
    }
  }
  return w.result();
}

inline CheckResult ks_sampling(const VerifyOptions& o) {
  Worst w{0.01};
  std::uint64_t k = 0;
  for (const auto& d : builtin_distributions()) {
    RngStream rng(o.seed, 0x5A5A0000ULL + k++);
    const auto xs = d->sample(rng, 100000);
    w.see(ks_statistic(xs, [&](double x) { return d->cdf(x); }), d->spec());
  }
  // Truncated sampling goes through the same inverse transform.
  RngStream rng(o.seed, 0x5A5AFFFFULL);
  const auto t = truncate_above(make_uniform(1.0), 0.5);
  const auto ts = t->sample(rng, 100000);
  w.see(ks_statistic(ts, [&](double x) { return t->cdf(x); }), t->spec());
  return w.result();
}

inline CheckResult truncation_composition(const VerifyOptions&) {
  Worst w{1e-9};
  for (const auto& d : builtin_distributions()) {
    const double a = d->quantile_of_rank(0.7);
    const double a2 = d->quantile_of_rank(0.4);
    const auto once = truncate_above(d, a2);
    const auto twice = truncate_above(truncate_above(d, a), a2);
    for (int i = 0; i <= 100; ++i) {
      const double x = a2 + (top_of(*d) - a2) * i / 100.0;
      w.see(std::abs(once->cdf(x) - twice->cdf(x)), at(d, "x=" + num(x)));
    }
  }
  return w.result();
}

inline CheckResult truncation_mass(const VerifyOptions&) {
  Worst w{1e-8};
  for (const auto& d : builtin_distributions()) {
    const auto t = truncate_above(d, d->quantile_of_rank(0.6));
    std::vector<double> pts{t->support_inf()};
    for (double b : t->breakpoints()) pts.push_back(b);
    // Unbounded tails: integrate up to where the remaining mass is < 1e-13.
    pts.push_back(t->bounded() ? t->support_sup() : t->quantile_of_rank(1e-13));
    const double mass = integrate(
        [&](double x) { return t->pdf(x); }, std::span<const double>(pts), {1e-12, 1e-12, 10000})
                            .value;
    w.see(std::abs(mass - 1.0), d->spec());
  }
  return w.result();
}

// ---- special functions ---------------------------------------------------

inline CheckResult beta_symmetry(const VerifyOptions&) {
  Worst w{1e-12};
  const double params[][2] = {{1, 1}, {3, 2}, {0.5, 0.5}, {40, 1}, {2, 30}, {498, 3}, {7.5, 2.25}};
  for (const auto& p : params) {
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      const double s = regularized_incomplete_beta(x, p[0], p[1]) +
                       regularized_incomplete_beta(1.0 - x, p[1], p[0]);
      w.see(std::abs(s - 1.0), "a=" + num(p[0]) + " b=" + num(p[1]) + " x=" + num(x));
    }
  }
  return w.result();
}

// I_x(n-m, m+1) <= eps below 1 - m/(n-1) - delta, <= 1 everywhere.
inline CheckResult step_bound(const VerifyOptions&) {
  constexpr int n = 500;
  constexpr double eps = 1e-3;
  constexpr double delta = 0.05;
  double worst_low = 0.0;
  double worst_any = 0.0;
  std::string where;
  for (int m = 2; m <= 20; ++m) {
    const double edge = 1.0 - static_cast<double>(m) / (n - 1) - delta;
    for (int i = 0; i < 1000; ++i) {
      const double x = i / 999.0;
      const double v = regularized_incomplete_beta(x, n - m, m + 1.0);
      worst_any = std::max(worst_any, v);
      if (x < edge && v > worst_low) {
        worst_low = v;
        where = "m=" + std::to_string(m) + " x=" + num(x);
      }
    }
  }
  CheckResult r;
  r.pass = worst_low <= eps && worst_any <= 1.0;
  r.margin = eps - worst_low;
  r.detail = "max I below edge " + num(worst_low) + " (eps " + num(eps) + ")" +
             (where.empty() ? "" : " at " + where) + ", max overall " + num(worst_any);
  return r;
}

inline CheckResult truncated_order_stats(const VerifyOptions&) {
  Worst w{1e-9};
  constexpr int n = 6;
  constexpr int m = 2;
  for (const auto& d : reference_distributions()) {
    const double a = d->quantile_of_rank(0.5);
    const auto post = truncate_above(d, a);
    for (int i = 1; i < 100; ++i) {
      const double x = post->quantile_of_rank(1.0 - i / 100.0);
      const double lhs = conditional_order_stat_pdf(n, n - m, n, a, x, d);
      const double rhs = m * std::pow(post->cdf(x), m - 1) * post->pdf(x);
      w.see(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), at(d, "x=" + num(x)));
    }
  }
  return w.result();
}

inline CheckResult density_sum(const VerifyOptions& o) {
  Worst w{1e-9};
  RngStream rng(o.seed, 0xB1);
  const auto dists = reference_distributions();
  for (int k = 0; k < 100; ++k) {
    const auto& d = dists[static_cast<std::size_t>(k) % dists.size()];
    const int n = 3 + static_cast<int>(rng.uniform() * 18);
    const int m = 2 + static_cast<int>(rng.uniform() * (n - 2));
    const double a = d->quantile_of_rank(0.05 + 0.9 * rng.uniform());
    const auto post = truncate_above(d, a);
    const double x = post->quantile_of_rank(rng.uniform());
    const double lhs = conditional_density_sum(n, m, a, x, d);
    const double rhs = m * post->pdf(x);
    w.see(std::abs(lhs - rhs) / std::max(1.0, rhs),
          at(d, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " x=" + num(x)));
  }
  return w.result();
}

inline CheckResult order_stat_normalization(const VerifyOptions&) {
  Worst w{1e-8};
  for (const auto& d : reference_distributions()) {
    for (auto [k, n] : {std::pair{1, 1}, {2, 3}, {4, 5}, {9, 10}, {1, 7}}) {
      const OrderStatisticSpec spec{k, n, d};
      // Rank space: x = x(q), dx = |x'(q)| dq.
      const double mass =
          integrate([&](double q) {
            const double x = d->quantile_of_rank(q);
            const double s = d->abs_quantile_derivative(q);
            return std::isfinite(x) && std::isfinite(s) ? order_stat_pdf(spec, x) * s : 0.0;
          }, 0.0, 1.0, {1e-12, 1e-12, 10000}).value;
      w.see(std::abs(mass - 1.0), at(d, "k=" + std::to_string(k) + " n=" + std::to_string(n)));
    }
  }
  return w.result();
}

// ---- equilibrium -----------------------------------------------------------

inline CheckResult bid_monotone(const VerifyOptions&) {
  Worst w{0.0};
  for (const auto& d : reference_distributions()) {
    for (const auto& c : sample_configs()) {
      const EquilibriumBid eq(c, d, cutoff_at_rank(c, d, 0.4));
      double prev = -1.0;
      const double a = eq.cutoff();
      const double top = top_of(eq.posterior());
      for (int i = 0; i < 200; ++i) {
        const double b = eq.bid(a + (top - a) * i / 199.0);
        w.see(std::max(0.0, prev - b), at(d, "m=" + std::to_string(c.m)));
        prev = b;
      }
    }
  }
  return w.result();
}

// Moving budget from nothing into the last prize never raises a bid.
inline CheckResult gap_incentive(const VerifyOptions&) {
  Worst w{0.0};
  for (const auto& d : reference_distributions()) {
    const ContestConfig base{8, 3, {0.5, 0.3, 0.0}, 1.0};
    ContestConfig raised = base;
    raised.prizes.back() = 0.1;
    const double a = cutoff_at_rank(base, d, 0.5);
    const EquilibriumBid lo(base, d, a);
    const EquilibriumBid hi(raised, d, a);
    const double top = top_of(lo.posterior());
    for (int i = 0; i < 200; ++i) {
      const double x = a + (top - a) * i / 199.0;
      w.see(std::max(0.0, hi.bid(x) - lo.bid(x) - 1e-12), at(d, "x=" + num(x)));
    }
  }
  return w.result();
}

// b_V(x) = sum_l Z_l b_l(x) / l, where b_l is the bid with l unit prizes.
inline CheckResult z_additivity(const VerifyOptions&) {
  Worst w{1e-8};
  for (const auto& d : reference_distributions()) {
    const ContestConfig c{9, 4, {0.4, 0.3, 0.2, 0.1}, 1.0};
    const double a = cutoff_at_rank(c, d, 0.5);
    const auto z = prize_gap_decomposition(c.prizes);
    const EquilibriumBid full(c, d, a);
    std::vector<EquilibriumBid> unit;
    for (int l = 1; l <= c.m - 1; ++l) {
      unit.emplace_back(ContestConfig::simple(c.n, c.m, l, l), d, a);
    }
    const double top = top_of(full.posterior());
    for (int i = 0; i <= 50; ++i) {
      const double x = a + (top - a) * i / 50.0;
      double sum = 0.0;
      for (int l = 1; l <= c.m - 1; ++l) sum += z.z[l - 1] * unit[l - 1].bid(x) / l;
      w.see(std::abs(full.bid(x) - sum), at(d, "x=" + num(x)));
    }
  }
  return w.result();
}

inline CheckResult scale_covariance(const VerifyOptions&) {
  Worst w{1e-9};
  for (const auto& d : reference_distributions()) {
    for (const auto& c : sample_configs()) {
      constexpr double factor = 3.7;
      ContestConfig scaled = c;
      scaled.budget *= factor;
      for (auto& v : scaled.prizes) v *= factor;
      const double a = cutoff_at_rank(c, d, 0.3);
      const EquilibriumBid e1(c, d, a);
      const EquilibriumBid e2(scaled, d, a);
      const double top = top_of(e1.posterior());
      for (int i = 0; i <= 50; ++i) {
        const double x = a + (top - a) * i / 50.0;
        w.see(std::abs(e2.bid(x) - factor * e1.bid(x)), at(d, "x=" + num(x)));
      }
    }
  }
  return w.result();
}

inline CheckResult envelope_agreement(const VerifyOptions&) {
  Worst w{1e-8};
  auto dists = reference_distributions();
  dists.push_back(make_skewed_mixture());
  for (const auto& d : dists) {
    for (const auto& c : sample_configs()) {
      const EquilibriumBid eq(c, d, cutoff_at_rank(c, d, 0.5));
      const double a = eq.cutoff();
      const double top = top_of(eq.posterior());
      for (int i = 0; i <= 40; ++i) {
        const double x = a + (top - a) * i / 40.0;
        w.see(std::abs(eq.bid(x) - eq.bid_envelope(x)), at(d, "m=" + std::to_string(c.m)));
      }
    }
  }
  return w.result();
}

inline CheckResult cost_inverse(const VerifyOptions&) {
  Worst w{1e-9};
  const CostModel models[] = {CostModel::linear(1.0), CostModel::linear(2.5), CostModel::power(2.0),
                              CostModel::power(0.5),
                              CostModel::custom("e+e^3", [](double e) { return e + e * e * e; })};
  for (const auto& g : models) {
    for (int i = 0; i <= 100; ++i) {
      const double e = 3.0 * i / 100.0;
      w.see(std::abs(g.inverse(g.cost(e)) - e), g.name() + " e=" + num(e));
    }
  }
  return w.result();
}

inline CheckResult best_response(const VerifyOptions& o) {
  Worst w{kBestResponseTolerance};
  RngStream rng(o.seed, 0xB5);
  const auto dists = reference_distributions();
  for (int k = 0; k < 30; ++k) {
    const auto& d = dists[static_cast<std::size_t>(k) % dists.size()];
    const int n = 3 + static_cast<int>(rng.uniform() * 8);
    const int m = 2 + static_cast<int>(rng.uniform() * (n - 1));
    ContestConfig c{n, m, std::vector<double>(static_cast<std::size_t>(m)), 1.0};
    double left = 1.0;
    for (auto& v : c.prizes) {
      v = left * rng.uniform();
      left -= v;
    }
    std::sort(c.prizes.rbegin(), c.prizes.rend());
    const double a = cutoff_at_rank(c, d, 0.8 * rng.uniform());
    const auto post = truncate_above(d, a);
    const double x = post->quantile_of_rank(0.02 + 0.96 * rng.uniform());
    const auto v = best_response_check(x, a, c, d, CostModel::linear(), 1000);
    w.see(v.max_gain, at(d, "n=" + std::to_string(n) + " m=" + std::to_string(m)));
  }
  return w.result();
}

// ---- objectives ------------------------------------------------------------

inline CheckResult kernel_dominance(const VerifyOptions&) {
  Worst w{1e-14};
  for (int m = 3; m <= 8; ++m) {
    for (int l = 1; l + 1 <= m - 1; ++l) {
      const PrizeKernel g1(l, m);
      const PrizeKernel g2(l + 1, m);
      for (int i = 0; i <= 200; ++i) {
        const double q = i / 200.0;
        w.see(g2.cumulative(q) - g1.cumulative(q),
              "m=" + std::to_string(m) + " l=" + std::to_string(l) + " q=" + num(q));
      }
    }
  }
  return w.result();
}

inline CheckResult kernel_ratio(const VerifyOptions&) {
  Worst w{1e-7};
  for (int m = 3; m <= 8; ++m) {
    for (int l = 1; l + 1 <= m - 1; ++l) {
      const PrizeKernel g1(l, m);
      const PrizeKernel g2(l + 1, m);
      double prev = kInfinity;
      for (int i = 1; i <= 200; ++i) {
        const double q = i / 200.0;
        const double den = g2.cumulative(q);
        if (!(den > 1e-9)) continue;
        const double ratio = g1.cumulative(q) / den;
        if (std::isfinite(prev)) {
          w.see((ratio - prev) / prev,
                "m=" + std::to_string(m) + " l=" + std::to_string(l) + " q=" + num(q));
        }
        prev = ratio;
      }
    }
  }
  return w.result();
}

inline CheckResult g_at_one(const VerifyOptions&) {
  Worst w{1e-10};
  for (int m = 2; m <= 12; ++m) {
    double prev = kInfinity;
    for (int l = 1; l <= m - 1; ++l) {
      const PrizeKernel g(l, m);
      const double quad =
          integrate([&](double t) { return g.density(t); }, 0.0, 1.0, {1e-14, 1e-14, 1000}).value;
      const double closed = kernel_G_at_one(l, m);
      w.see(std::abs(quad - closed), "m=" + std::to_string(m) + " l=" + std::to_string(l));
      w.see(std::abs(g.cumulative(1.0) - closed), "cumulative m=" + std::to_string(m));
      w.see(std::max(0.0, closed - prev), "ordering m=" + std::to_string(m));
      prev = closed;
    }
  }
  return w.result();
}

inline CheckResult tp_invariance(const VerifyOptions&) {
  Worst w{1e-8};
  for (const auto& d : reference_distributions()) {
    for (int n : {5, 9}) {
      for (int l : {1, 2}) {
        const double ref = tp_simple(l + 1, l, n, d).value;
        for (int m = l + 1; m <= n; ++m) {
          const auto c = ContestConfig::simple(n, m, l);
          const std::string where =
              "n=" + std::to_string(n) + " l=" + std::to_string(l) + " m=" + std::to_string(m);
          w.see(std::abs(tp_value(c, d).value - ref), at(d, where));
          // The nested route depends on m; agreement is the invariance.
          w.see(std::abs(tp_nested(c, d).value - ref), at(d, "nested " + where));
        }
      }
    }
  }
  return w.result();
}

inline CheckResult closed_vs_raw(const VerifyOptions&) {
  Worst w{1e-6};
  for (const auto& d : reference_distributions()) {
    for (int n = 3; n <= 12; ++n) {
      for (int m = 2; m < n; ++m) {
        const double closed = hp_value(m, n, d).value;
        const double raw = hp_nested(ContestConfig::winner_take_all(n, m), d).value;
        w.see(std::abs(closed - raw), at(d, "m=" + std::to_string(m) + " n=" + std::to_string(n)));
      }
    }
  }
  return w.result();
}

inline CheckResult uniform_closed_form(const VerifyOptions&) {
  Worst w{1e-10};
  const auto u = make_uniform(1.0);
  for (int n = 2; n <= 20; ++n) {
    for (int m = 2; m <= n; ++m) {
      w.see(std::abs(hp_value(m, n, u).value - hp_uniform_closed_form(m, n)),
            "m=" + std::to_string(m) + " n=" + std::to_string(n));
    }
  }
  return w.result();
}

inline CheckResult uniform_monotone(const VerifyOptions&) {
  Worst w{0.0};
  const auto u = make_uniform(2.0);
  for (int n = 3; n <= 30; ++n) {
    double prev = kInfinity;
    for (int m = 2; m <= n; ++m) {
      const double v = hp_value(m, n, u).value;
      w.see(std::max(0.0, v - prev), "U[0,2] n=" + std::to_string(n) + " m=" + std::to_string(m));
      prev = v;
    }
  }
  return w.result();
}

// H_m against the double integral it simplifies.
inline double kernel_h_unsimplified(int m, int n, double w) {
  const double log_c = std::log(static_cast<double>(n)) + std::log(m - 1.0) + log_binomial(n - 1, m);
  auto inner = [&](double v) {
    auto f = [&](double u) {
      const double r = (v - u) / (1.0 - u);
      return std::exp(log_c + (m - 2) * std::log(v - u) + (n - m - 1) * std::log(u)) *
             (1.0 - std::pow(r, m)) * (1.0 - u);
    };
    return integrate(f, 0.0, v, {1e-14, 1e-12, 2000}).value;
  };
  return integrate(inner, w, 1.0, {1e-12, 1e-12, 2000}).value;
}

inline CheckResult kernel_h(const VerifyOptions&) {
  Worst w{1e-7};
  for (auto [m, n] : {std::pair{2, 10}, {3, 8}, {4, 12}, {2, 40}}) {
    w.see(std::abs(kernel_H(m, n, 0.0) - m / (2.0 * m - 1.0)), "H(0) m=" + std::to_string(m));
    double prev = kInfinity;
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      const double h = kernel_H(m, n, x);
      w.see(std::max(0.0, h - prev), "monotone m=" + std::to_string(m) + " w=" + num(x));
      prev = h;
    }
    for (double x : {0.1, 0.5, 0.8, 0.95}) {
      w.see(std::abs(kernel_H(m, n, x) - kernel_h_unsimplified(m, n, x)),
            "double integral m=" + std::to_string(m) + " n=" + std::to_string(n) + " w=" + num(x));
    }
  }
  return w.result();
}

inline CheckResult asymptotic(const VerifyOptions&) {
  const auto u = make_uniform(1.0);
  double prev = 0.0;
  bool increasing = true;
  for (int n = 2; n <= 200; ++n) {
    const double v = hp_value(2, n, u).value;
    increasing = increasing && v > prev;
    prev = v;
  }
  const double gap = std::abs(prev - hp_asymptotic(2, 1.0));
  // Fixed-ratio scheme m = ceil(n/10): gap to m/(2m-1) shrinks with n.
  double last_gap = kInfinity;
  bool shrinking = true;
  for (int n : {100, 200, 400, 800}) {
    const int m = (n + 9) / 10;
    const double g = std::abs(hp_value(m, n, u).value - hp_asymptotic(m, 1.0));
    shrinking = shrinking && g < last_gap;
    last_gap = g;
  }
  CheckResult r;
  r.pass = increasing && gap <= 0.02 && shrinking && last_gap < 1e-3;
  r.margin = 0.02 - gap;
  r.detail = "S(2,200)=" + num(prev) + " gap " + num(gap) + (increasing ? "" : " NOT increasing") +
             "; m=n/10 gap at n=800 " + num(last_gap);
  return r;
}

inline CheckResult preselection_gains(const VerifyOptions&) {
  const double u = preselection_gain_uniform(1000);
  const double uq = preselection_gain(1000, make_uniform(1.0));
  const double p = preselection_gain(64, make_power(2.0));
  const double e = preselection_gain(64, make_exponential(1.0));
  CheckResult r;
  r.margin = std::min({0.01 - std::abs(u - 4.0 / 3.0), p - 1.25, e - 1.25});
  r.pass = r.margin > 0.0 && std::abs(u - uq) < 1e-8;
  r.detail = "uniform n=1000 " + num(u) + " (quadrature " + num(uq) + "), power(2) n=64 " + num(p) +
             ", exp(1) n=64 " + num(e);
  return r;
}

// ---- optimizer ---------------------------------------------------------------

inline CheckResult budget_linearity(const VerifyOptions&) {
  Worst w{1e-12};
  for (const auto& d : reference_distributions()) {
    for (auto kind : {ObjectiveKind::hp, ObjectiveKind::tp}) {
      const auto r1 = enumerate_designs(kind, 7, d, 1.0);
      const auto r2 = enumerate_designs(kind, 7, d, 2.5);
      for (std::size_t i = 0; i < r1.cells.size(); ++i) {
        const double a = r1.cells[i].estimate.value;
        const double b = r2.cells[i].estimate.value;
        w.see(std::abs(b / a - 2.5) / 2.5, at(d, to_string(kind)));
      }
    }
  }
  return w.result();
}

inline CheckResult uniform_argmax(const VerifyOptions&) {
  int bad = 0;
  std::string where;
  const auto u = make_uniform(1.0);
  for (int n = 2; n <= 50; ++n) {
    // l = 1 is optimal for every m (checked by wta-optimality); scan m.
    int best = 2;
    double best_v = -kInfinity;
    for (int m = 2; m <= n; ++m) {
      const double v = hp_value(m, n, u).value;
      if (v > best_v + kDeterministicTieTolerance) {
        best_v = v;
        best = m;
      }
    }
    if (best != 2) {
      ++bad;
      where = "n=" + std::to_string(n);
    }
  }
  for (int n = 2; n <= 8; ++n) {
    const auto r = enumerate_designs(ObjectiveKind::hp, n, u);
    if (r.best_m != 2 || r.best_l != 1) {
      ++bad;
      where = "full table n=" + std::to_string(n);
    }
  }
  CheckResult r;
  r.pass = bad == 0;
  r.margin = -bad;
  r.detail = bad == 0 ? "argmax m = 2 for n in [2, 50]" : std::to_string(bad) + " failures, last " + where;
  return r;
}

inline CheckResult tp_table_max(const VerifyOptions&) {
  Worst w{1e-9};
  for (const auto& d : reference_distributions()) {
    for (int n : {3, 5, 8}) {
      const auto r = enumerate_designs(ObjectiveKind::tp, n, d);
      const double top = order_stat_expectation({n - 1, n, d});
      w.see(std::abs(r.best_value - top), at(d, "n=" + std::to_string(n)));
      w.see(r.best_m == 2 && r.best_l == 1 ? 0.0 : 1.0, at(d, "tie-break n=" + std::to_string(n)));
      w.see(static_cast<int>(r.ties.size()) == n - 1 ? 0.0 : 1.0, at(d, "tie set n=" + std::to_string(n)));
    }
  }
  return w.result();
}

inline CheckResult wta_optimality(const VerifyOptions&) {
  double worst = kInfinity;
  std::string where;
  for (const auto& d : reference_distributions()) {
    for (auto kind : {ObjectiveKind::hp, ObjectiveKind::tp}) {
      for (int m = 3; m <= 8; ++m) {
        const auto v = verify_wta_optimality(kind, m, 10, d);
        if (v.margin < worst) {
          worst = v.margin;
          where = at(d, std::string(to_string(kind)) + " m=" + std::to_string(m) +
                            " l=" + std::to_string(v.closest_l));
        }
      }
    }
  }
  CheckResult r;
  r.pass = worst > 0.0;
  r.margin = worst;
  r.detail = "smallest WTA margin " + num(worst) + " at " + where;
  return r;
}

// ---- montecarlo --------------------------------------------------------------

inline CheckResult mc_determinism(const VerifyOptions& o) {
  SimulationPlan plan{ContestConfig::winner_take_all(8, 3), make_power(2.0), 20000, o.seed, 0.3, 1};
  const auto base = estimate(plan);
  int mismatches = 0;
  for (int workers : {1, 4, 16}) {
    plan.workers = workers;
    if (!(estimate(plan) == base)) ++mismatches;
  }
  CheckResult r;
  r.pass = mismatches == 0;
  r.margin = -mismatches;
  r.detail = mismatches == 0 ? "bit-identical for workers 1, 4, 16"
                             : std::to_string(mismatches) + " worker counts differ";
  return r;
}

inline CheckResult mc_oracle(const VerifyOptions& o) {
  double worst = 0.0;
  std::string where;
  const auto u = make_uniform(1.0);
  for (auto [n, m] : {std::pair{4, 2}, {6, 2}, {6, 4}, {8, 3}}) {
    const SimulationPlan plan{ContestConfig::winner_take_all(n, m), u, o.mc_replications, o.seed,
                              0.0, o.workers};
    const auto r = estimate(plan);
    const double zh = std::abs(r.hp_mean - hp_uniform_closed_form(m, n)) / r.hp_stderr;
    const double zt = std::abs(r.tp_mean - (n - 1.0) / (n + 1.0)) / r.tp_stderr;
    if (std::max(zh, zt) > worst) {
      worst = std::max(zh, zt);
      where = "n=" + std::to_string(n) + " m=" + std::to_string(m);
    }
  }
  CheckResult r;
  r.pass = worst <= 3.0;
  r.margin = 3.0 - worst;
  r.detail = "max |z| " + num(worst) + " (limit 3) at " + where + ", " +
             std::to_string(o.mc_replications) + " replications";
  return r;
}

// Top admitted ability given the cut-off behaves like the max of m draws
// from the truncated prior: U = P_a(top)^m is uniform in every cut-off bin.
inline CheckResult mc_truncation_identity(const VerifyOptions& o) {
  constexpr int n = 8;
  constexpr int m = 3;
  constexpr int bins = 20;
  constexpr int per_bin = 20000;
  const auto d = make_power(2.0);
  std::vector<std::vector<double>> u(bins);
  std::vector<double> x(n);
  const std::int64_t reps = static_cast<std::int64_t>(bins) * per_bin;
  for (std::int64_t r = 0; r < reps; ++r) {
    RngStream rng(o.seed ^ 0x7E57ULL, static_cast<std::uint64_t>(r));
    for (auto& v : x) v = d->sample(rng);
    std::sort(x.begin(), x.end());
    const double a = x[n - m - 1];
    const double top = x[n - 1];
    // Bin by the cut-off's CDF level, whose law is Beta(n-m, m+1).
    const double level = regularized_incomplete_beta(d->cdf(a), n - m, m + 1.0);
    const int bin = std::min(bins - 1, static_cast<int>(level * bins));
    const auto post = truncate_above(d, a);
    u[static_cast<std::size_t>(bin)].push_back(std::pow(post->cdf(top), m));
  }
  Worst w{0.02};
  for (int b = 0; b < bins; ++b) {
    const auto& s = u[static_cast<std::size_t>(b)];
    if (s.size() < 5000) {
      w.see(1.0, "bin " + std::to_string(b) + " has only " + std::to_string(s.size()));
      continue;
    }
    w.see(ks_statistic(s, [](double v) { return std::clamp(v, 0.0, 1.0); }), "bin " + std::to_string(b));
  }
  return w.result();
}

inline CheckResult noisy_alpha_zero(const VerifyOptions& o) {
  const std::vector<int> ns{6, 12};
  const auto rows = noisy_preselection_experiment(ns, make_uniform(1.0), 0.0, 20000, o.seed, o.workers);
  double worst = 0.0;
  for (const auto& row : rows) {
    worst = std::max(worst, std::abs(row.hp_noisy_m2.value - row.hp_ideal_m2.value));
  }
  CheckResult r;
  r.pass = worst == 0.0;
  r.margin = -worst;
  r.detail = "max |noisy - ideal| at alpha=0: " + num(worst);
  return r;
}

}  // namespace verify_detail

inline const std::vector<CheckEntry>& verification_suite() {
  namespace v = verify_detail;
  static const std::vector<CheckEntry> suite{
      {"quantile-cdf", "distributions", v::quantile_cdf},
      {"quantile-roundtrip", "distributions", v::quantile_roundtrip},
      {"ks-sampling", "distributions", v::ks_sampling},
      {"truncation-composition", "distributions", v::truncation_composition},
      {"truncation-mass", "distributions", v::truncation_mass},
      {"beta-symmetry", "special_functions", v::beta_symmetry},
      {"step-bound", "special_functions", v::step_bound, "lemma7"},
      {"truncated-order-stats", "special_functions", v::truncated_order_stats, "lemma1-identity"},
      {"density-sum", "special_functions", v::density_sum, "lemma-b1"},
      {"order-stat-normalization", "special_functions", v::order_stat_normalization},
      {"bid-monotone", "equilibrium", v::bid_monotone},
      {"gap-incentive", "equilibrium", v::gap_incentive},
      {"z-additivity", "equilibrium", v::z_additivity},
      {"scale-covariance", "equilibrium", v::scale_covariance},
      {"envelope-agreement", "equilibrium", v::envelope_agreement},
      {"cost-inverse", "equilibrium", v::cost_inverse},
      {"best-response", "equilibrium", v::best_response},
      {"kernel-dominance", "objectives", v::kernel_dominance},
      {"kernel-ratio", "objectives", v::kernel_ratio},
      {"g-at-one", "objectives", v::g_at_one},
      {"kernel-h", "objectives", v::kernel_h},
      {"tp-invariance", "objectives", v::tp_invariance},
      {"closed-vs-raw", "objectives", v::closed_vs_raw},
      {"uniform-closed-form", "objectives", v::uniform_closed_form},
      {"uniform-monotone", "objectives", v::uniform_monotone},
      {"asymptotic", "objectives", v::asymptotic},
      {"preselection-gain", "objectives", v::preselection_gains},
      {"budget-linearity", "optimizer", v::budget_linearity},
      {"uniform-argmax", "optimizer", v::uniform_argmax},
      {"tp-table-max", "optimizer", v::tp_table_max},
      {"wta-optimality", "optimizer", v::wta_optimality},
      {"mc-determinism", "montecarlo", v::mc_determinism},
      {"mc-oracle", "montecarlo", v::mc_oracle},
      {"mc-truncation-identity", "montecarlo", v::mc_truncation_identity},
      {"noisy-alpha-zero", "montecarlo", v::noisy_alpha_zero},
  };
  return suite;
}

// Runs the named checks (all when `only` is empty). Unknown names throw
// ConfigError. Exceptions inside a check count as a failure of that check.
inline std::vector<CheckResult> run_verification(const VerifyOptions& opts,
                                                 std::span<const std::string> only = {}) {
  const auto& suite = verification_suite();
  for (const auto& name : only) {
    const bool known = std::any_of(suite.begin(), suite.end(),
                                   [&](const CheckEntry& e) { return e.matches(name); });
    if (!known) throw ConfigError("verify: unknown check '" + name + "'");
  }
  std::vector<CheckResult> out;
  for (const auto& entry : suite) {
    if (!only.empty() && std::none_of(only.begin(), only.end(), [&](const std::string& s) { return entry.matches(s); })) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = entry.run(opts);
    } catch (const std::exception& e) {
      r.pass = false;
      r.margin = -kInfinity;
      r.detail = std::string("threw: ") + e.what();
    }
    r.name = entry.name;
    r.module = entry.module;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace contest
