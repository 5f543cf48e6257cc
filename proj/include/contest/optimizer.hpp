#pragma once

// Designer search over shortlist size m and the number of equal prizes l.
// Under linear cost the optimum is a simple contest, so the table over
// 2 <= m <= n, 1 <= l <= m-1 is exhaustive.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contest/distributions.hpp"
#include "contest/equilibrium.hpp"
#include "contest/errors.hpp"
#include "contest/montecarlo.hpp"
#include "contest/objectives.hpp"

namespace contest {

enum class Backend { deterministic, monte_carlo };

struct SearchOptions {
  Backend backend = Backend::deterministic;
  std::int64_t replications = 0;  // Monte Carlo only
  std::uint64_t seed = 0;
  int workers = 1;
};

inline constexpr double kDeterministicTieTolerance = 1e-9;
inline constexpr double kMonteCarloTieStderrs = 2.0;

struct DesignCell {
  int m = 2;
  int l = 1;
  ObjectiveEstimate estimate;
};

struct DesignSearchResult {
  ObjectiveKind objective_kind = ObjectiveKind::hp;
  int n = 2;
  double budget = 1.0;
  int best_m = 2;
  int best_l = 1;
  double best_value = 0.0;
  std::vector<DesignCell> cells;            // ordered by (m, l)
  std::vector<std::pair<int, int>> ties;    // cells tied with the maximum, best first

  const DesignCell& cell(int m, int l) const {
    for (const auto& c : cells) {
      if (c.m == m && c.l == l) return c;
    }
    throw ConfigError("no design cell (m=" + std::to_string(m) + ", l=" + std::to_string(l) + ")");
  }
};

namespace detail {

inline ObjectiveEstimate deterministic_cell(ObjectiveKind kind, int m, int l, int n,
                                            const DistributionPtr& dist,
                                            std::map<int, double>& tp_by_l) {
  if (kind == ObjectiveKind::hp) return hp_simple(m, l, n, dist);
  // TP of a simple contest depends on l only.
  auto it = tp_by_l.find(l);
  if (it == tp_by_l.end()) it = tp_by_l.emplace(l, tp_simple(m, l, n, dist).value).first;
  return {it->second, EstimateMethod::closed_form, 0.0};
}

// Picks the smallest (m, l) among cells within tolerance of the maximum.
inline void resolve_best(DesignSearchResult& r) {
  std::size_t top = 0;
  for (std::size_t i = 1; i < r.cells.size(); ++i) {
    if (r.cells[i].estimate.value > r.cells[top].estimate.value) top = i;
  }
  const auto& best = r.cells[top].estimate;
  r.ties.clear();
  for (const auto& c : r.cells) {
    const auto& e = c.estimate;
    double tol = kDeterministicTieTolerance;
    if (e.method == EstimateMethod::monte_carlo || best.method == EstimateMethod::monte_carlo) {
      tol = kMonteCarloTieStderrs * std::hypot(e.std_error, best.std_error);
    }
    if (best.value - e.value <= tol) r.ties.emplace_back(c.m, c.l);
  }
  r.best_m = r.ties.front().first;
  r.best_l = r.ties.front().second;
  r.best_value = r.cell(r.best_m, r.best_l).estimate.value;
}

}  // namespace detail

inline DesignSearchResult enumerate_designs(ObjectiveKind kind, int n, const DistributionPtr& dist,
                                            double budget = 1.0, const SearchOptions& opts = {}) {
  if (n < 2) throw ConfigError("enumerate_designs: need n >= 2");
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw ConfigError("enumerate_designs: budget must be positive");
  }
  if (!dist) throw ConfigError("enumerate_designs: missing distribution");
  DesignSearchResult r;
  r.objective_kind = kind;
  r.n = n;
  r.budget = budget;

  if (opts.backend == Backend::deterministic) {
    std::map<int, double> tp_by_l;
    for (int m = 2; m <= n; ++m) {
      for (int l = 1; l <= m - 1; ++l) {
        auto e = detail::deterministic_cell(kind, m, l, n, dist, tp_by_l);
        e.value *= budget;
        r.cells.push_back({m, l, e});
      }
    }
  } else {
    if (opts.replications < 2) throw ConfigError("enumerate_designs: Monte Carlo needs --mc >= 2");
    std::vector<SimulatedDesign> designs;
    for (int m = 2; m <= n; ++m) {
      for (int l = 1; l <= m - 1; ++l) {
        designs.push_back({ContestConfig::simple(n, m, l, budget), 0.0});
        r.cells.push_back({m, l, {}});
      }
    }
    const auto sim = simulate_designs(designs, dist, opts.replications, opts.seed, opts.workers,
                                      kind == ObjectiveKind::hp, false);
    for (std::size_t i = 0; i < designs.size(); ++i) {
      const auto& mo = kind == ObjectiveKind::hp ? sim.hp[i] : sim.tp[i];
      r.cells[i].estimate = {mo.mean, EstimateMethod::monte_carlo, mo.stderr_of_mean()};
    }
  }
  detail::resolve_best(r);
  return r;
}

struct WtaVerdict {
  bool pass = true;
  double margin = 0.0;  // min over l > 1 of value(l = 1) - value(l); +inf when m = 2
  int closest_l = 1;
  std::vector<double> values;  // index l - 1
};

// Checks that the winner-take-all prize weakly beats every other simple
// contest with the same shortlist size.
inline WtaVerdict verify_wta_optimality(ObjectiveKind kind, int m, int n, const DistributionPtr& dist) {
  if (!(m >= 2 && m <= n)) throw ConfigError("verify_wta_optimality: need 2 <= m <= n");
  WtaVerdict v;
  std::map<int, double> tp_by_l;
  for (int l = 1; l <= m - 1; ++l) {
    v.values.push_back(detail::deterministic_cell(kind, m, l, n, dist, tp_by_l).value);
  }
  v.margin = kInfinity;
  for (int l = 2; l <= m - 1; ++l) {
    const double gap = v.values[0] - v.values[static_cast<std::size_t>(l - 1)];
    if (gap < v.margin) {
      v.margin = gap;
      v.closest_l = l;
    }
  }
  v.pass = v.margin >= -kDeterministicTieTolerance;
  return v;
}

}  // namespace contest
