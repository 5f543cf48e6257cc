#pragma once

// Seeded simulation of the shortlist-then-compete protocol: draw n abilities,
// shortlist the top m by (possibly noisy) observed ability, disclose the
// borderline contestant's true ability, let the shortlist play the
// equilibrium bid.
//
// Replication r always uses RngStream(master_seed, r), and replications are
// reduced in fixed index blocks, so results do not depend on worker count.
// Several designs can share one pass (common random numbers); their paired
// differences then come with their own standard errors.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "contest/distributions.hpp"
#include "contest/equilibrium.hpp"
#include "contest/errors.hpp"
#include "contest/objectives.hpp"
#include "contest/rng.hpp"

namespace contest {

// What the designer announces as the cut-off when observation is noisy. The
// two coincide when alpha = 0.
enum class CutoffDisclosure {
  observed_score,  // the (m+1)-st observed score, the only thing the designer sees
  true_ability,    // the true ability of the (m+1)-st contestant by observed rank
};

inline const char* to_string(CutoffDisclosure d) {
  return d == CutoffDisclosure::observed_score ? "observed_score" : "true_ability";
}

struct SimulationPlan {
  ContestConfig config;
  DistributionPtr dist;
  std::int64_t replications = 1000;
  std::uint64_t master_seed = 0;
  double noise_alpha = 0.0;
  int workers = 1;
  CostModel cost = CostModel::linear();
  CutoffDisclosure disclosure = CutoffDisclosure::observed_score;

  void validate() const {
    config.validate();
    if (!dist) throw ConfigError("simulation: missing distribution");
    if (replications < 1) throw ConfigError("simulation: replications must be >= 1");
    if (!(noise_alpha >= 0.0 && noise_alpha <= 1.0)) {
      throw ConfigError("simulation: alpha must lie in [0, 1]");
    }
    if (workers < 1) throw ConfigError("simulation: workers must be >= 1");
  }
};

struct SimulationResult {
  double hp_mean = 0.0;
  double hp_stderr = 0.0;
  double tp_mean = 0.0;
  double tp_stderr = 0.0;
  std::int64_t replications_used = 0;
  std::uint64_t seed_echo = 0;

  bool operator==(const SimulationResult&) const = default;

  ObjectiveEstimate hp() const { return {hp_mean, EstimateMethod::monte_carlo, hp_stderr}; }
  ObjectiveEstimate tp() const { return {tp_mean, EstimateMethod::monte_carlo, tp_stderr}; }
};

struct DrawRecord {
  std::vector<double> abilities;
  std::vector<double> observed;
  std::vector<int> shortlist;  // indices into abilities, best observed first
  double cutoff = 0.0;
  std::vector<double> bids;  // one per registrant; zero when eliminated
  double hp = 0.0;
  double tp = 0.0;
};

// Running mean and sum of squared deviations, mergeable in a fixed order.
struct Moments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_of_mean() const {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

// One contest design evaluated inside a shared simulation pass.
struct SimulatedDesign {
  ContestConfig config;
  double noise_alpha = 0.0;
  CostModel cost = CostModel::linear();
  CutoffDisclosure disclosure = CutoffDisclosure::observed_score;
};

struct PairedSimulation {
  std::vector<Moments> hp;
  std::vector<Moments> tp;
  // hp_diff[i * D + j] tracks hp_i - hp_j for i > j.
  std::vector<Moments> hp_diff;
  std::size_t designs = 0;

  const Moments& diff(std::size_t i, std::size_t j) const { return hp_diff[i * designs + j]; }
  // Mean and standard error of hp_i - hp_j.
  std::pair<double, double> hp_difference(std::size_t i, std::size_t j) const {
    if (i == j) return {0.0, 0.0};
    if (hp_diff.empty()) throw ConfigError("simulation: paired differences were not tracked");
    if (i > j) {
      const auto& d = diff(i, j);
      return {d.mean, d.stderr_of_mean()};
    }
    const auto& d = diff(j, i);
    return {-d.mean, d.stderr_of_mean()};
  }
};

namespace detail {

inline constexpr std::int64_t kBlockSize = 2048;

inline const QuadratureOptions& mc_bid_options() {
  static const QuadratureOptions opts{1e-11, 1e-10, 200};
  return opts;
}

// Shared random inputs of one replication.
struct ReplicationDraw {
  std::vector<double> abilities;
  std::vector<double> noise;
  std::vector<int> tiebreak;  // random priority among equal observations
};

inline void draw_replication(const AbilityDistribution& dist, int n, bool noisy, RngStream& rng,
                             ReplicationDraw& out) {
  out.abilities.resize(static_cast<std::size_t>(n));
  for (auto& x : out.abilities) x = dist.sample(rng);
  out.noise.clear();
  if (noisy) {
    out.noise.resize(static_cast<std::size_t>(n));
    for (auto& e : out.noise) e = dist.sample(rng);
  }
  out.tiebreak.resize(static_cast<std::size_t>(n));
  std::iota(out.tiebreak.begin(), out.tiebreak.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.uniform() * (i + 1));
    std::swap(out.tiebreak[static_cast<std::size_t>(i)],
              out.tiebreak[static_cast<std::size_t>(std::min(j, i))]);
  }
}

// Plays one design on a drawn replication. With hp_only, only the top bid is
// evaluated (bids are non-decreasing in true ability) and tp is left at 0.
inline DrawRecord play_design(const SimulatedDesign& design, const DistributionPtr& dist,
                              const ReplicationDraw& draw, bool hp_only) {
  const auto& cfg = design.config;
  const int n = cfg.n;
  const int m = cfg.m;
  const double alpha = design.noise_alpha;
  DrawRecord rec;
  rec.abilities = draw.abilities;
  rec.observed.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    rec.observed[k] = alpha > 0.0 ? (1.0 - alpha) * draw.abilities[k] + alpha * draw.noise[k]
                                  : draw.abilities[k];
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double oa = rec.observed[static_cast<std::size_t>(a)];
    const double ob = rec.observed[static_cast<std::size_t>(b)];
    if (oa != ob) return oa > ob;
    return draw.tiebreak[static_cast<std::size_t>(a)] < draw.tiebreak[static_cast<std::size_t>(b)];
  });
  rec.shortlist.assign(order.begin(), order.begin() + m);
  if (m < n) {
    const auto border = static_cast<std::size_t>(order[static_cast<std::size_t>(m)]);
    rec.cutoff = design.disclosure == CutoffDisclosure::true_ability ? draw.abilities[border]
                                                                     : rec.observed[border];
  } else {
    rec.cutoff = dist->support_inf();
  }
  rec.bids.assign(static_cast<std::size_t>(n), 0.0);

  const bool any_prize = std::any_of(cfg.prizes.begin(), cfg.prizes.end(),
                                     [](double v) { return v != 0.0; });
  if (!any_prize) return rec;
  // A cut-off at the very top of the support leaves nothing to compete for.
  if (!(dist->survival(rec.cutoff) > 1e-14)) return rec;

  const EquilibriumBid eq(cfg, dist, rec.cutoff, design.cost);
  auto bid_of = [&](double x) {
    // Under noise an admitted contestant may sit below the disclosed cut-off.
    if (!(x > rec.cutoff)) return 0.0;
    return eq.bid_envelope(x, mc_bid_options());
  };
  if (hp_only) {
    int top = rec.shortlist.front();
    for (int i : rec.shortlist) {
      if (draw.abilities[static_cast<std::size_t>(i)] > draw.abilities[static_cast<std::size_t>(top)]) {
        top = i;
      }
    }
    const double b = bid_of(draw.abilities[static_cast<std::size_t>(top)]);
    rec.bids[static_cast<std::size_t>(top)] = b;
    rec.hp = b;
    return rec;
  }
  for (int i : rec.shortlist) {
    const double b = bid_of(draw.abilities[static_cast<std::size_t>(i)]);
    rec.bids[static_cast<std::size_t>(i)] = b;
    rec.hp = std::max(rec.hp, b);
    rec.tp += b;
  }
  return rec;
}

}  // namespace detail

// Simulates every design on the same replications. All designs must share n.
inline PairedSimulation simulate_designs(std::span<const SimulatedDesign> designs,
                                         const DistributionPtr& dist, std::int64_t replications,
                                         std::uint64_t master_seed, int workers,
                                         bool hp_only = false, bool track_pairs = true) {
  if (designs.empty()) throw ConfigError("simulation: no designs");
  if (!dist) throw ConfigError("simulation: missing distribution");
  if (replications < 1) throw ConfigError("simulation: replications must be >= 1");
  if (workers < 1) throw ConfigError("simulation: workers must be >= 1");
  const int n = designs.front().config.n;
  bool noisy = false;
  for (const auto& d : designs) {
    d.config.validate();
    if (d.config.n != n) throw ConfigError("simulation: designs in one pass must share n");
    if (!(d.noise_alpha >= 0.0 && d.noise_alpha <= 1.0)) {
      throw ConfigError("simulation: alpha must lie in [0, 1]");
    }
    noisy = noisy || d.noise_alpha > 0.0;
  }
  const std::size_t D = designs.size();
  const std::int64_t blocks = (replications + detail::kBlockSize - 1) / detail::kBlockSize;

  struct Block {
    std::vector<Moments> hp, tp, diff;
  };
  std::vector<Block> results(static_cast<std::size_t>(blocks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto work = [&]() {
    detail::ReplicationDraw draw;
    std::vector<double> hp(D);
    try {
      for (std::int64_t b = next++; b < blocks && !failed; b = next++) {
        Block blk{std::vector<Moments>(D), std::vector<Moments>(D),
                  std::vector<Moments>(track_pairs ? D * D : 0)};
        const std::int64_t lo = b * detail::kBlockSize;
        const std::int64_t hi = std::min(replications, lo + detail::kBlockSize);
        for (std::int64_t r = lo; r < hi; ++r) {
          RngStream rng(master_seed, static_cast<std::uint64_t>(r));
          detail::draw_replication(*dist, n, noisy, rng, draw);
          for (std::size_t i = 0; i < D; ++i) {
            const auto rec = detail::play_design(designs[i], dist, draw, hp_only);
            hp[i] = rec.hp;
            blk.hp[i].add(rec.hp);
            blk.tp[i].add(rec.tp);
          }
          if (track_pairs) {
            for (std::size_t i = 1; i < D; ++i) {
              for (std::size_t j = 0; j < i; ++j) blk.diff[i * D + j].add(hp[i] - hp[j]);
            }
          }
        }
        results[static_cast<std::size_t>(b)] = std::move(blk);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };

  const int threads = static_cast<int>(std::min<std::int64_t>(workers, blocks));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  PairedSimulation out;
  out.designs = D;
  out.hp.assign(D, {});
  out.tp.assign(D, {});
  out.hp_diff.assign(track_pairs ? D * D : 0, {});
  for (const auto& blk : results) {
    for (std::size_t i = 0; i < D; ++i) {
      out.hp[i].merge(blk.hp[i]);
      out.tp[i].merge(blk.tp[i]);
    }
    for (std::size_t k = 0; k < blk.diff.size(); ++k) out.hp_diff[k].merge(blk.diff[k]);
  }
  return out;
}

// One replication of the protocol, exposed for inspection.
inline DrawRecord run_draw(const SimulationPlan& plan, RngStream& rng) {
  plan.validate();
  detail::ReplicationDraw draw;
  detail::draw_replication(*plan.dist, plan.config.n, plan.noise_alpha > 0.0, rng, draw);
  return detail::play_design({plan.config, plan.noise_alpha, plan.cost, plan.disclosure}, plan.dist, draw,
                              false);
}

// Replays a draw on fixed abilities (no noise).
inline DrawRecord run_draw(const SimulationPlan& plan, std::span<const double> abilities,
                           RngStream& rng) {
  plan.validate();
  if (static_cast<int>(abilities.size()) != plan.config.n) {
    throw ConfigError("run_draw: expected " + std::to_string(plan.config.n) + " abilities");
  }
  detail::ReplicationDraw draw;
  detail::draw_replication(*plan.dist, plan.config.n, false, rng, draw);
  draw.abilities.assign(abilities.begin(), abilities.end());
  return detail::play_design({plan.config, 0.0, plan.cost}, plan.dist, draw, false);
}

inline SimulationResult estimate(const SimulationPlan& plan) {
  plan.validate();
  if (plan.replications < 2) throw ConfigError("estimate: replications must be >= 2");
  const SimulatedDesign design{plan.config, plan.noise_alpha, plan.cost, plan.disclosure};
  const auto sim = simulate_designs(std::span<const SimulatedDesign>(&design, 1), plan.dist,
                                    plan.replications, plan.master_seed, plan.workers);
  SimulationResult r;
  r.hp_mean = sim.hp[0].mean;
  r.hp_stderr = sim.hp[0].stderr_of_mean();
  r.tp_mean = sim.tp[0].mean;
  r.tp_stderr = sim.tp[0].stderr_of_mean();
  r.replications_used = sim.hp[0].count;
  r.seed_echo = plan.master_seed;
  return r;
}

struct NoisyRow {
  int n = 0;
  double alpha = 0.0;
  ObjectiveEstimate hp_noisy_m2;
  ObjectiveEstimate hp_ideal_m2;
  ObjectiveEstimate hp_no_preselection;
  // Paired difference noisy - no-preselection and its standard error.
  double noisy_minus_none = 0.0;
  double noisy_minus_none_stderr = 0.0;
  double noisy_minus_ideal = 0.0;
  double noisy_minus_ideal_stderr = 0.0;
};

// Two-contestant WTA under noisy shortlisting, under exact shortlisting, and
// the n-contestant WTA without shortlisting, on common draws.
inline std::vector<NoisyRow> noisy_preselection_experiment(std::span<const int> n_values,
                                                           const DistributionPtr& dist,
                                                           double alpha, std::int64_t replications,
                                                           std::uint64_t seed, int workers = 1,
                                                           CutoffDisclosure disclosure =
                                                               CutoffDisclosure::observed_score) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("noisy experiment: alpha must lie in [0, 1]");
  std::vector<NoisyRow> rows;
  for (int n : n_values) {
    if (n < 2) throw ConfigError("noisy experiment: n must be >= 2");
    const std::vector<SimulatedDesign> designs{
        {ContestConfig::winner_take_all(n, 2), alpha, CostModel::linear(), disclosure},
        {ContestConfig::winner_take_all(n, 2), 0.0},
        {ContestConfig::winner_take_all(n, n), 0.0},
    };
    const auto sim = simulate_designs(designs, dist, replications, seed, workers, true);
    NoisyRow row;
    row.n = n;
    row.alpha = alpha;
    auto est = [&](std::size_t i) {
      return ObjectiveEstimate{sim.hp[i].mean, EstimateMethod::monte_carlo,
                               sim.hp[i].stderr_of_mean()};
    };
    row.hp_noisy_m2 = est(0);
    row.hp_ideal_m2 = est(1);
    row.hp_no_preselection = est(2);
    std::tie(row.noisy_minus_none, row.noisy_minus_none_stderr) = sim.hp_difference(0, 2);
    std::tie(row.noisy_minus_ideal, row.noisy_minus_ideal_stderr) = sim.hp_difference(0, 1);
    rows.push_back(row);
  }
  return rows;
}

struct CounterexampleRow {
  int n = 0;
  int m = 0;
  ObjectiveEstimate hp;
  double diff_vs_m2 = 0.0;  // paired hp(m) - hp(2)
  double diff_vs_m2_stderr = 0.0;
  int best_m = 2;     // argmax over the simulated m for this n
  bool flagged = false;  // best_m > 2 and ahead of m = 2 by at least 2 paired stderr
};

inline constexpr double kCounterexampleSeparation = 2.0;

// WTA highest performance across shortlist sizes for the skewed mixture
// 0.01 Beta(40,1) + 0.99 U[0, 0.05], or any other law passed in.
inline std::vector<CounterexampleRow> counterexample_experiment(
    std::span<const int> n_values, std::span<const int> m_values, std::int64_t replications,
    std::uint64_t seed, int workers = 1, DistributionPtr dist = make_skewed_mixture()) {
  std::vector<CounterexampleRow> rows;
  for (int n : n_values) {
    std::vector<int> ms;
    for (int m : m_values) {
      if (m >= 2 && m <= n) ms.push_back(m);
    }
    if (ms.empty() || ms.front() != 2) ms.insert(ms.begin(), 2);
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    std::vector<SimulatedDesign> designs;
    for (int m : ms) designs.push_back({ContestConfig::winner_take_all(n, m), 0.0});
    const auto sim = simulate_designs(designs, dist, replications, seed, workers, true);

    std::size_t best = 0;
    for (std::size_t i = 1; i < ms.size(); ++i) {
      if (sim.hp[i].mean > sim.hp[best].mean) best = i;
    }
    const auto [lead, lead_se] = sim.hp_difference(best, 0);
    const bool flagged = best != 0 && lead > kCounterexampleSeparation * lead_se;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      CounterexampleRow row;
      row.n = n;
      row.m = ms[i];
      row.hp = {sim.hp[i].mean, EstimateMethod::monte_carlo, sim.hp[i].stderr_of_mean()};
      std::tie(row.diff_vs_m2, row.diff_vs_m2_stderr) = sim.hp_difference(i, 0);
      row.best_m = ms[best];
      row.flagged = flagged;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace contest
