// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail K ...] [--only K ...] [--report PATH]
//
// --report also writes the PASS/FAIL lines to PATH.
//
// A criterion listed with --expect-fail still runs and still prints FAIL; it
// does not fail the process, but an unexpected PASS does.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "contest/contest.hpp"

namespace {

using namespace contest;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double uniform_hp(int m, int n) {
  return (2.0 * m * m * n - m * m - 2.0 * m + 1) / (2.0 * m * (2.0 * m - 1) * (n + 1));
}

std::vector<DistributionPtr> figure_laws() { return {make_uniform(), make_power(2.0), make_exponential()}; }

Outcome uniform_closed_form() {
  const auto start = std::chrono::steady_clock::now();
  const auto u = make_uniform();
  double worst = 0.0;
  for (int n = 2; n <= 20; ++n)
    for (int m = 2; m <= n; ++m) worst = std::max(worst, std::abs(hp_value(m, n, u).value - uniform_hp(m, n)));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-10 && secs < 10.0, "max |err| " + fmt(worst) + " in " + fmt(secs) + " s"};
}

Outcome mc_vs_closed_form() {
  const auto start = std::chrono::steady_clock::now();
  const SimulationPlan plan{ContestConfig::winner_take_all(6, 2), make_uniform(), 1'000'000, 20240917, 0.0,
                            workers()};
  const auto r = estimate(plan);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double z = (r.hp_mean - 41.0 / 84.0) / r.hp_stderr;
  return {std::abs(z) <= 3.0 && secs < 60.0,
          "hp " + fmt(r.hp_mean) + " se " + fmt(r.hp_stderr) + " z " + fmt(z) + " in " + fmt(secs) + " s (" +
              std::to_string(plan.workers) + " workers)"};
}

Outcome tp_invariance() {
  const auto u = make_uniform();
  // E[X^(4) of 5] = int x * 20 x^3 (1 - x) dx
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [](double x) { return 20.0 * x * x * x * x * (1.0 - x); }, 0.0, 1.0, 5, 1e-15);
  double spread = 0.0, off = 0.0;
  std::vector<double> values;
  std::vector<SimulatedDesign> designs;
  for (int m = 2; m <= 5; ++m) {
    values.push_back(tp_value(ContestConfig::winner_take_all(5, m), u).value);
    designs.push_back({ContestConfig::winner_take_all(5, m), 0.0});
  }
  for (double v : values) {
    spread = std::max(spread, std::abs(v - values.front()));
    off = std::max(off, std::abs(v - oracle));
  }
  const auto sim = simulate_designs(designs, u, 1'000'000, 20240917, workers(), false, false);
  double worst_z = 0.0;
  for (const auto& mo : sim.tp) worst_z = std::max(worst_z, std::abs(mo.mean - oracle) / mo.stderr_of_mean());
  return {spread <= 1e-8 && off <= 1e-8 && std::abs(oracle - 2.0 / 3.0) < 1e-12 && worst_z <= 3.0,
          "spread " + fmt(spread) + ", |tp - E[X(4)]| " + fmt(off) + ", MC worst z " + fmt(worst_z)};
}

Outcome wta_optimality() {
  double worst = INFINITY;
  std::string where;
  bool pass = true;
  for (const auto& d : figure_laws()) {
    for (int m = 2; m <= 8; ++m) {
      for (int n : {m, m + 1, 2 * m, 20}) {
        for (auto kind : {ObjectiveKind::hp, ObjectiveKind::tp}) {
          const auto v = verify_wta_optimality(kind, m, n, d);
          // Strict dominance is required when there is an alternative to WTA.
          const bool ok = v.pass && (m == 2 || v.margin > 0.0);
          pass = pass && ok;
          if (v.margin < worst) {
            worst = v.margin;
            where = std::string(to_string(kind)) + " " + d->spec() + " m=" + std::to_string(m) +
                    " n=" + std::to_string(n);
          }
        }
      }
    }
  }
  return {pass, "smallest margin " + fmt(worst) + " at " + where};
}

Outcome asymptotic_limit() {
  const auto u = make_uniform();
  double prev = 0.0;
  bool increasing = true;
  for (int n = 2; n <= 200; ++n) {
    const double v = hp_value(2, n, u).value;
    increasing = increasing && v > prev;
    prev = v;
  }
  const double gap = std::abs(prev - 2.0 / 3.0);
  return {increasing && gap < 0.02 && std::abs(prev - 1593.0 / 2412.0) < 1e-10,
          std::string(increasing ? "increasing" : "NOT increasing") + ", hp(2,200) " + fmt(prev) + ", gap " +
              fmt(gap)};
}

Outcome preselection_gain_check() {
  double worst = 0.0;
  for (int n : {1000, 2000, 5000, 10000, 100000})
    worst = std::max(worst, std::abs(preselection_gain_uniform(n) - 4.0 / 3.0));
  const double power = preselection_gain(64, make_power(2.0));
  const double expo = preselection_gain(64, make_exponential());
  return {worst < 0.01 && power > 1.25 && expo > 1.25,
          "uniform max |gain - 4/3| " + fmt(worst) + " (n >= 1000); n=64 power(2) " + fmt(power) + ", exp(1) " +
              fmt(expo)};
}

Outcome best_response() {
  RngStream rng(20240917, 7);
  const auto laws = figure_laws();
  double worst = -INFINITY;
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto& d = laws[static_cast<std::size_t>(trial % 3)];
    const int n = 3 + static_cast<int>(rng.uniform() * 10);
    const int m = 2 + static_cast<int>(rng.uniform() * (n - 2));
    std::vector<double> prizes(static_cast<std::size_t>(m), 0.0);
    // Random non-increasing prizes with at least one zero at the bottom.
    double level = 1.0;
    for (int l = 0; l + 1 < m; ++l) {
      level *= rng.uniform();
      prizes[static_cast<std::size_t>(l)] = level;
    }
    const double total = std::accumulate(prizes.begin(), prizes.end(), 0.0);
    for (auto& p : prizes) p /= total;
    const ContestConfig cfg{n, m, prizes, 1.0};
    const double cutoff = d->quantile_of_rank(0.05 + 0.9 * rng.uniform());
    const EquilibriumBid eq(cfg, d, cutoff);
    const double x = eq.posterior().quantile_of_rank(0.02 + 0.96 * rng.uniform());
    const auto v = best_response_check(eq, x, 1000);
    worst = std::max(worst, v.max_gain);
    failures += v.pass ? 0 : 1;
  }
  return {failures == 0, "50 triples, max deviation gain " + fmt(worst) + ", failures " + std::to_string(failures)};
}

Outcome kernel_dominance() {
  double worst_dom = 0.0, worst_g1 = 0.0;
  for (int m = 2; m <= 8; ++m) {
    for (int l = 1; l < m; ++l) {
      const PrizeKernel k(l, m);
      const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double t) { return k.density(t); }, 0.0, 1.0, 10, 1e-15);
      worst_g1 = std::max(worst_g1, std::abs(kernel_G_at_one(l, m) - quad));
      if (l + 1 >= m) continue;
      const PrizeKernel next(l + 1, m);
      for (int i = 0; i < 200; ++i) {
        const double q = i / 199.0;
        worst_dom = std::max(worst_dom, next.cumulative(q) - k.cumulative(q));
      }
    }
  }
  return {worst_dom <= 0.0 && worst_g1 <= 1e-10,
          "max G_{l+1} - G_l " + fmt(worst_dom) + ", max |G(1) - quadrature| " + fmt(worst_g1)};
}

Outcome step_bound() {
  const int n = 500;
  const double eps = 1e-3, delta = 0.05;
  double worst_below = 0.0, worst_all = 0.0;
  for (int m = 2; m <= 20; ++m) {
    for (int i = 0; i < 1000; ++i) {
      const double x = i / 999.0;
      const double v = regularized_incomplete_beta(x, n - m, m + 1);
      worst_all = std::max(worst_all, v);
      if (x < 1.0 - static_cast<double>(m) / (n - 1) - delta) worst_below = std::max(worst_below, v);
    }
  }
  return {worst_below <= eps && worst_all <= 1.0,
          "max I below step " + fmt(worst_below) + ", max overall " + fmt(worst_all)};
}

Outcome density_sum() {
  RngStream rng(20240917, 11);
  const auto laws = figure_laws();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto& d = laws[static_cast<std::size_t>(t % 3)];
    const int n = 3 + static_cast<int>(rng.uniform() * 28);
    const int m = 2 + static_cast<int>(rng.uniform() * (n - 2));
    const double a = d->quantile_of_rank(0.02 + 0.96 * rng.uniform());
    const auto post = truncate_above(d, a);
    const double x = post->quantile_of_rank(0.01 + 0.98 * rng.uniform());
    const double lhs = conditional_density_sum(n, m, a, x, d);
    worst = std::max(worst, std::abs(lhs - m * post->pdf(x)));
  }
  return {worst <= 1e-9, "100 tuples, max |sum - m p(x)| " + fmt(worst)};
}

Outcome counterexample() {
  std::vector<int> ns;
  for (int n = 20; n <= 60; n += 5) ns.push_back(n);
  const std::vector<int> ms{2, 3, 4, 5, 6};
  const auto rows = counterexample_experiment(ns, ms, 200'000, 20240917, workers());
  std::ostringstream detail;
  bool found = false;
  for (const auto& r : rows) {
    if (r.m == 3) {
      detail << "n=" << r.n << " best m " << r.best_m << " (m3-m2 " << fmt(r.diff_vs_m2) << " se "
             << fmt(r.diff_vs_m2_stderr) << "); ";
    }
    if (r.m == r.best_m && r.flagged && (r.best_m == 3 || r.best_m == 4)) found = true;
  }
  return {found, detail.str()};
}

Outcome noisy_robustness() {
  const std::vector<int> ns{20};
  bool pass = true;
  std::string detail;
  for (const auto& d : figure_laws()) {
    const auto row = noisy_preselection_experiment(ns, d, 0.4, 100'000, 20240917, workers()).front();
    const bool ok = row.noisy_minus_none > 3.0 * row.noisy_minus_none_stderr;
    pass = pass && ok;
    detail += d->spec() + " diff " + fmt(row.noisy_minus_none) + " se " + fmt(row.noisy_minus_none_stderr) + "; ";
  }
  return {pass, detail};
}

std::set<int> parse_ids(int& i, int argc, char** argv) {
  std::set<int> ids;
  while (i + 1 < argc && argv[i + 1][0] != '-') ids.insert(std::stoi(argv[++i]));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail, only;
  std::ofstream report;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--report" && i + 1 < argc) {
      report.open(argv[++i]);
    } else if (arg == "--expect-fail") {
      expect_fail.merge(parse_ids(i, argc, argv));
    } else if (arg == "--only") {
      only.merge(parse_ids(i, argc, argv));
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail K...] [--only K...] [--report PATH]\n");
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "uniform closed form, 2 <= m <= n <= 20", uniform_closed_form},
      {2, "Monte Carlo HP vs 41/84 at 1e6 replications", mc_vs_closed_form},
      {3, "TP invariance across m, n = 5", tp_invariance},
      {4, "winner-take-all optimality, m = 2..8", wta_optimality},
      {5, "uniform HP(2, n) increasing toward 2/3", asymptotic_limit},
      {6, "pre-selection gain", preselection_gain_check},
      {7, "equilibrium best response", best_response},
      {8, "prize kernel dominance and G(1)", kernel_dominance},
      {9, "incomplete beta step bound at n = 500", step_bound},
      {10, "conditional density sum identity", density_sum},
      {11, "skewed mixture: some m in {3,4} beats m = 2", counterexample},
      {12, "noisy shortlisting beats no shortlisting", noisy_robustness},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool expected_failure = expect_fail.contains(c.id);
    char line[4096];
    std::snprintf(line, sizeof line, "%s criterion %2d: %s | %s [%.1f s]%s\n", o.pass ? "PASS" : "FAIL", c.id,
                  c.title.c_str(), o.detail.c_str(), secs,
                  expected_failure ? (o.pass ? " (listed as expected failure: unexpected pass)"
                                             : " (expected failure)")
                                   : "");
    std::fputs(line, stdout);
    std::fflush(stdout);
    if (report) report << line << std::flush;
    if (o.pass == expected_failure) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
