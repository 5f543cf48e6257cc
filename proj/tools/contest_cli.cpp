// contest: equilibrium bids, design search, simulation, figure data and the
// invariant suite from the command line.
//
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contest/contest.hpp"
#include "table.hpp"

namespace {

using namespace contest;
using cli::Json;
using cli::Table;

struct RunConfig {
  std::string command;
  std::string dist_spec = "uniform";
  std::optional<int> n;
  std::optional<int> m;
  bool wta = false;
  std::optional<int> simple_l;
  std::string prizes;
  double budget = 1.0;
  std::string objective = "hp";
  std::optional<double> cutoff;
  std::optional<double> alpha;
  std::optional<std::int64_t> mc;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;
  std::string format = "csv";
  int grid = 11;
  std::string cost = "linear";
  std::string disclosure = "observed";
  std::string figure;
  std::string n_grid;
  int m_max = 6;
  std::vector<std::string> only;
};

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string num(double v) { return detail::format_number(v); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    // a:b or a:b:step ranges
    const auto bounds = split(part, ':');
    try {
      if (bounds.size() == 1) {
        out.push_back(std::stoi(bounds[0]));
      } else if (bounds.size() == 2 || bounds.size() == 3) {
        const int lo = std::stoi(bounds[0]);
        const int hi = std::stoi(bounds[1]);
        const int step = bounds.size() == 3 ? std::stoi(bounds[2]) : 1;
        if (step <= 0) throw ConfigError(what + ": step must be positive");
        for (int v = lo; v <= hi; v += step) out.push_back(v);
      } else {
        throw ConfigError(what + ": bad entry '" + part + "'");
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError(what + ": bad entry '" + part + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError(what + ": bad entry '" + part + "'");
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

CostModel parse_cost(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const double arg = colon == std::string::npos
                         ? 1.0
                         : detail::parse_number(std::string_view(text).substr(colon + 1), "cost");
  if (kind == "linear") {
    if (!(arg > 0.0)) throw ConfigError("cost: linear coefficient must be positive");
    return CostModel::linear(arg);
  }
  if (kind == "power") return CostModel::power(arg);
  throw ConfigError("cost: expected linear[:k] or power:rho, got '" + text + "'");
}

CutoffDisclosure parse_disclosure(const std::string& text) {
  if (text == "observed") return CutoffDisclosure::observed_score;
  if (text == "true") return CutoffDisclosure::true_ability;
  throw ConfigError("disclosure: expected observed or true, got '" + text + "'");
}

int require_n(const RunConfig& rc) {
  if (!rc.n) throw ConfigError("--n is required for " + rc.command);
  return *rc.n;
}

ContestConfig build_config(const RunConfig& rc) {
  const int n = require_n(rc);
  int selectors = (rc.wta ? 1 : 0) + (rc.simple_l ? 1 : 0) + (rc.prizes.empty() ? 0 : 1);
  if (selectors > 1) throw ConfigError("choose at most one of --wta, --simple-l, --prizes");
  if (!rc.prizes.empty()) {
    std::vector<double> v;
    for (const auto& p : split(rc.prizes, ',')) v.push_back(detail::parse_number(p, "--prizes"));
    const int m = rc.m.value_or(static_cast<int>(v.size()));
    ContestConfig c{n, m, v, rc.budget};
    c.validate();
    return c;
  }
  if (!rc.m) throw ConfigError("--m is required for " + rc.command);
  const auto c = rc.simple_l ? ContestConfig::simple(n, *rc.m, *rc.simple_l, rc.budget)
                             : ContestConfig::winner_take_all(n, *rc.m, rc.budget);
  c.validate();
  return c;
}

std::string prizes_text(const ContestConfig& c) {
  std::string s;
  for (std::size_t i = 0; i < c.prizes.size(); ++i) s += (i ? ";" : "") + num(c.prizes[i]);
  return s;
}

ObjectiveKind parse_objective(const std::string& text) {
  if (text == "hp") return ObjectiveKind::hp;
  if (text == "tp") return ObjectiveKind::tp;
  throw ConfigError("--objective must be hp or tp");
}

// ---- subcommands -------------------------------------------------------------

Table cmd_equilibrium(const RunConfig& rc, std::string& config_text) {
  const auto dist = parse_distribution(rc.dist_spec);
  const auto c = build_config(rc);
  const auto cost = parse_cost(rc.cost);
  if (rc.grid < 2) throw ConfigError("--grid must be >= 2");
  double cutoff = dist->support_inf();
  std::string cutoff_source = "support";
  if (rc.cutoff) {
    cutoff = *rc.cutoff;
    cutoff_source = "given";
  } else if (c.has_cutoff()) {
    // Disclosed cut-off of one seeded draw: the (m+1)-st highest ability.
    RngStream rng(rc.seed, 0);
    auto xs = dist->sample(rng, static_cast<std::size_t>(c.n));
    std::sort(xs.begin(), xs.end(), std::greater<>());
    cutoff = xs[static_cast<std::size_t>(c.m)];
    cutoff_source = "sampled";
  }
  const EquilibriumBid eq(c, dist, cutoff, cost);
  const auto& post = eq.posterior();
  const double a = eq.cutoff();
  const double top = post.bounded() ? post.support_sup() : post.quantile_of_rank(1e-3);

  config_text = "cmd=equilibrium dist=" + dist->spec() + " n=" + std::to_string(c.n) +
                " m=" + std::to_string(c.m) + " prizes=" + prizes_text(c) + " budget=" +
                num(c.budget) + " cost=" + cost.name() + " cutoff=" + num(a) + " grid=" +
                std::to_string(rc.grid);
  Table t;
  t.columns = {"x", "bid"};
  t.meta = {{"cutoff", num(a)}, {"cutoff_source", cutoff_source}};
  for (int i = 0; i < rc.grid; ++i) {
    const double x = i + 1 == rc.grid ? top : a + (top - a) * i / (rc.grid - 1);
    t.add({x, eq.bid(x)});
  }
  return t;
}

Table cmd_optimize(const RunConfig& rc, std::string& config_text) {
  const auto dist = parse_distribution(rc.dist_spec);
  const int n = require_n(rc);
  const auto kind = parse_objective(rc.objective);
  if (!rc.cost.empty() && rc.cost != "linear") {
    const auto cost = parse_cost(rc.cost);
    if (!cost.is_linear() || cost.linear_coefficient() != 1.0) {
      throw UnsupportedCost("optimize: the design search assumes cost g(e) = e; rescale the budget by 1/k");
    }
  }
  SearchOptions opts;
  if (rc.mc) {
    opts.backend = Backend::monte_carlo;
    opts.replications = *rc.mc;
  }
  opts.seed = rc.seed;
  opts.workers = rc.workers;
  const auto r = enumerate_designs(kind, n, dist, rc.budget, opts);

  config_text = "cmd=optimize objective=" + std::string(to_string(kind)) + " dist=" + dist->spec() +
                " n=" + std::to_string(n) + " budget=" + num(rc.budget) + " backend=" +
                (rc.mc ? "monte_carlo replications=" + std::to_string(*rc.mc) : std::string("deterministic"));
  Table t;
  t.columns = {"m", "l", "value", "std_error", "method", "tied_with_best", "best"};
  std::string ties;
  for (const auto& [m, l] : r.ties) ties += (ties.empty() ? "" : ";") + std::to_string(m) + ":" + std::to_string(l);
  t.meta = {{"best_m", std::to_string(r.best_m)},
            {"best_l", std::to_string(r.best_l)},
            {"best_value", num(r.best_value)},
            {"ties", ties},
            {"best_m_above_2", r.best_m > 2 ? "true" : "false"}};
  for (const auto& cell : r.cells) {
    const bool tied = std::find(r.ties.begin(), r.ties.end(), std::pair{cell.m, cell.l}) != r.ties.end();
    t.add({cell.m, cell.l, cell.estimate.value, cell.estimate.std_error, to_string(cell.estimate.method),
           tied, cell.m == r.best_m && cell.l == r.best_l});
  }
  return t;
}

Table cmd_simulate(const RunConfig& rc, std::string& config_text) {
  SimulationPlan plan{build_config(rc), parse_distribution(rc.dist_spec), rc.mc.value_or(10000),
                      rc.seed, rc.alpha.value_or(0.0), rc.workers};
  plan.cost = parse_cost(rc.cost);
  plan.disclosure = parse_disclosure(rc.disclosure);
  const auto r = estimate(plan);
  config_text = "cmd=simulate dist=" + plan.dist->spec() + " n=" + std::to_string(plan.config.n) +
                " m=" + std::to_string(plan.config.m) + " prizes=" + prizes_text(plan.config) +
                " budget=" + num(plan.config.budget) + " cost=" + plan.cost.name() +
                " alpha=" + num(plan.noise_alpha) + " disclosure=" + to_string(plan.disclosure) +
                " replications=" + std::to_string(plan.replications);
  Table t;
  t.columns = {"n", "m", "alpha", "replications", "hp_mean", "hp_stderr", "tp_mean", "tp_stderr"};
  t.add({plan.config.n, plan.config.m, plan.noise_alpha, r.replications_used, r.hp_mean, r.hp_stderr,
         r.tp_mean, r.tp_stderr});
  return t;
}

std::vector<DistributionPtr> figure_distributions(const RunConfig& rc, bool dist_given) {
  if (dist_given) return {parse_distribution(rc.dist_spec)};
  return {make_power(2.0), make_uniform(1.0), make_exponential(1.0)};
}

Table cmd_reproduce(const RunConfig& rc, bool dist_given, std::string& config_text) {
  Table t;
  if (rc.figure == "fig1") {
    const auto ns = parse_int_list(rc.n_grid.empty() ? "2,4,8,16,32,64,128,256" : rc.n_grid, "--n-grid");
    const auto dists = figure_distributions(rc, dist_given);
    config_text = "cmd=reproduce figure=fig1 n_grid=" + (rc.n_grid.empty() ? "default" : rc.n_grid);
    t.columns = {"dist", "n", "hp_m2", "hp_no_preselection", "ratio", "method"};
    for (const auto& d : dists) {
      for (int n : ns) {
        const auto with = hp_value(2, n, d);
        const auto without = hp_value(n, n, d);
        t.add({d->spec(), n, with.value, without.value, with.value / without.value,
               std::string(to_string(with.method)) + "/" + to_string(without.method)});
      }
    }
    t.meta = {{"asymptotic_ratio", num(4.0 / 3.0)}};
    return t;
  }
  if (rc.figure == "fig2") {
    const auto ns = parse_int_list(rc.n_grid.empty() ? "5,10,20,40" : rc.n_grid, "--n-grid");
    const double alpha = rc.alpha.value_or(0.4);
    const auto reps = rc.mc.value_or(20000);
    const auto disclosure = parse_disclosure(rc.disclosure);
    config_text = "cmd=reproduce figure=fig2 alpha=" + num(alpha) + " replications=" +
                  std::to_string(reps) + " disclosure=" + to_string(disclosure) +
                  " n_grid=" + (rc.n_grid.empty() ? "default" : rc.n_grid);
    t.columns = {"dist", "n", "alpha", "hp_noisy_m2", "hp_noisy_m2_se", "hp_ideal_m2", "hp_ideal_m2_se",
                 "hp_no_preselection", "hp_no_preselection_se", "noisy_minus_none",
                 "noisy_minus_none_se", "noisy_beats_none_3se"};
    for (const auto& d : figure_distributions(rc, dist_given)) {
      for (const auto& row : noisy_preselection_experiment(ns, d, alpha, reps, rc.seed, rc.workers, disclosure)) {
        t.add({d->spec(), row.n, row.alpha, row.hp_noisy_m2.value, row.hp_noisy_m2.std_error,
               row.hp_ideal_m2.value, row.hp_ideal_m2.std_error, row.hp_no_preselection.value,
               row.hp_no_preselection.std_error, row.noisy_minus_none, row.noisy_minus_none_stderr,
               row.noisy_minus_none > 3.0 * row.noisy_minus_none_stderr});
      }
    }
    return t;
  }
  if (rc.figure == "figC") {
    const auto ns = parse_int_list(rc.n_grid.empty() ? "20:60:10" : rc.n_grid, "--n-grid");
    if (rc.m_max < 2) throw ConfigError("--m-max must be >= 2");
    std::vector<int> ms;
    for (int m = 2; m <= rc.m_max; ++m) ms.push_back(m);
    const auto reps = rc.mc.value_or(20000);
    const auto d = dist_given ? parse_distribution(rc.dist_spec) : make_skewed_mixture();
    config_text = "cmd=reproduce figure=figC dist=" + d->spec() + " replications=" +
                  std::to_string(reps) + " m_max=" + std::to_string(rc.m_max) +
                  " n_grid=" + (rc.n_grid.empty() ? "default" : rc.n_grid);
    t.columns = {"n", "m", "hp", "hp_se", "diff_vs_m2", "diff_vs_m2_se", "best_m", "flagged"};
    int flagged = 0;
    for (const auto& row : counterexample_experiment(ns, ms, reps, rc.seed, rc.workers, d)) {
      t.add({row.n, row.m, row.hp.value, row.hp.std_error, row.diff_vs_m2, row.diff_vs_m2_stderr,
             row.best_m, row.flagged});
      if (row.flagged && row.m == row.best_m) ++flagged;
    }
    t.meta = {{"flagged_n_count", std::to_string(flagged)}};
    return t;
  }
  throw ConfigError("reproduce: figure must be fig1, fig2 or figC");
}

Table cmd_verify(const RunConfig& rc, std::string& config_text, bool& all_pass) {
  VerifyOptions opts;
  opts.seed = rc.seed;
  opts.workers = rc.workers;
  if (rc.mc) opts.mc_replications = *rc.mc;
  std::vector<std::string> only;
  for (const auto& o : rc.only) {
    for (auto& part : split(o, ',')) only.push_back(part);
  }
  const auto results = run_verification(opts, only);
  config_text = "cmd=verify replications=" + std::to_string(opts.mc_replications) + " only=" +
                (only.empty() ? std::string("all") : rc.only.front());
  Table t;
  t.columns = {"check", "module", "pass", "margin", "detail"};
  all_pass = true;
  int failed = 0;
  for (const auto& r : results) {
    t.add({r.name, r.module, r.pass, r.margin, r.detail});
    // Timings vary run to run, so they go to stderr and the table stays reproducible.
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << num(r.seconds) << " s) " << r.detail
              << '\n';
    all_pass = all_pass && r.pass;
    failed += r.pass ? 0 : 1;
  }
  t.meta = {{"checks", std::to_string(results.size())}, {"failed", std::to_string(failed)}};
  return t;
}

void add_common(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--dist", rc.dist_spec, "ability distribution spec");
  sub->add_option("--n", rc.n, "registrants");
  sub->add_option("--m", rc.m, "shortlist size");
  sub->add_flag("--wta", rc.wta, "winner-take-all prize (default)");
  sub->add_option("--simple-l", rc.simple_l, "simple contest with l equal prizes");
  sub->add_option("--prizes", rc.prizes, "explicit prize vector v1,v2,...");
  sub->add_option("--budget", rc.budget, "prize budget");
  sub->add_option("--objective", rc.objective, "hp or tp");
  sub->add_option("--cutoff", rc.cutoff, "disclosed cut-off ability");
  sub->add_option("--alpha", rc.alpha, "observation noise weight in [0,1]");
  sub->add_option("--mc", rc.mc, "Monte Carlo replications");
  sub->add_option("--seed", rc.seed, "master seed");
  sub->add_option("--workers", rc.workers, "worker threads");
  sub->add_option("--out", rc.out, "output path (default stdout)");
  sub->add_option("--format", rc.format, "csv or json");
  sub->add_option("--cost", rc.cost, "linear[:k] or power:rho");
  sub->add_option("--disclosure", rc.disclosure, "noisy cut-off disclosure: observed or true");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  CLI::App app{"Contest design with pre-selection: equilibrium, objectives, search, simulation"};
  app.require_subcommand(1);
  auto* eq = app.add_subcommand("equilibrium", "bid function on a grid");
  auto* opt = app.add_subcommand("optimize", "search over (m, l) simple contests");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of HP and TP");
  auto* rep = app.add_subcommand("reproduce", "data behind fig1, fig2 or figC");
  auto* ver = app.add_subcommand("verify", "run invariant suites");
  for (auto* sub : {eq, opt, sim, rep, ver}) add_common(sub, rc);
  eq->add_option("--grid", rc.grid, "grid points");
  rep->add_option("figure", rc.figure, "fig1, fig2 or figC")->required();
  rep->add_option("--n-grid", rc.n_grid, "n values: list and/or a:b[:step] ranges");
  rep->add_option("--m-max", rc.m_max, "largest m for figC");
  ver->add_option("--only", rc.only, "check or module names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const bool dist_given = [&] {
    for (auto* sub : {eq, opt, sim, rep, ver}) {
      if (sub->parsed() && sub->count("--dist") > 0) return true;
    }
    return false;
  }();

  try {
    if (rc.format != "csv" && rc.format != "json") throw ConfigError("--format must be csv or json");
    if (rc.workers < 1) throw ConfigError("--workers must be >= 1");
    std::string config_text;
    Table table;
    bool all_pass = true;
    if (eq->parsed()) {
      rc.command = "equilibrium";
      table = cmd_equilibrium(rc, config_text);
    } else if (opt->parsed()) {
      rc.command = "optimize";
      table = cmd_optimize(rc, config_text);
    } else if (sim->parsed()) {
      rc.command = "simulate";
      table = cmd_simulate(rc, config_text);
    } else if (rep->parsed()) {
      rc.command = "reproduce";
      table = cmd_reproduce(rc, dist_given, config_text);
    } else {
      rc.command = "verify";
      table = cmd_verify(rc, config_text, all_pass);
    }

    std::ofstream file;
    if (!rc.out.empty()) {
      file.open(rc.out);
      if (!file) throw ConfigError("cannot open --out path " + rc.out);
    }
    std::ostream& os = rc.out.empty() ? std::cout : file;
    if (rc.format == "json") {
      cli::write_json(os, table, rc.seed, config_text);
    } else {
      cli::write_csv(os, table, rc.seed, config_text);
    }
    return all_pass ? kExitOk : kExitVerifyFailed;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::logic_error& e) {
    // ConfigError, DomainError (incl. degenerate truncation), UnsupportedCost.
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
