#pragma once

// Ability distributions. Every law is exposed through its CDF, density and
// the rank quantile x(q) = F^{-1}(1 - q), so that high abilities sit at small
// q. Integrals over ability are always taken in q, which keeps unbounded
// supports on the finite interval [0, 1].

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "contest/errors.hpp"
#include "contest/quadrature.hpp"
#include "contest/rng.hpp"
#include "contest/special_functions.hpp"

namespace contest {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

inline void check_rank(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("quantile_of_rank: rank must lie in [0, 1], got " + std::to_string(q));
  }
}

}  // namespace detail

class AbilityDistribution {
public:
  virtual ~AbilityDistribution() = default;

  virtual double cdf(double x) const = 0;
  virtual double pdf(double x) const = 0;
  virtual double support_inf() const = 0;
  // kInfinity for unbounded support.
  virtual double support_sup() const = 0;
  // Canonical text form accepted by parse_distribution().
  virtual std::string spec() const = 0;

  // 1 - F(x); overridden where the tail can be computed without cancellation.
  virtual double survival(double x) const { return 1.0 - cdf(x); }

  // x(q) = F^{-1}(1 - q). The default brackets the root and bisects.
  virtual double quantile_of_rank(double q) const {
    detail::check_rank(q);
    if (q == 0.0) return support_sup();
    if (q == 1.0) return support_inf();
    return invert_by_bisection(q);
  }

  // |dx/dq| = 1 / f(x(q)), with a central difference where the density
  // vanishes.
  virtual double abs_quantile_derivative(double q) const {
    detail::check_rank(q);
    const double x = quantile_of_rank(q);
    const double density = pdf(x);
    if (density > 0.0 && std::isfinite(x)) return 1.0 / density;
    constexpr double h = 1e-6;
    const double lo = std::max(0.0, q - h);
    const double hi = std::min(1.0, q + h);
    return std::abs(quantile_of_rank(lo) - quantile_of_rank(hi)) / (hi - lo);
  }

  // Interior points where the density is discontinuous or kinked.
  virtual std::vector<double> breakpoints() const { return {}; }

  virtual double sample(RngStream& rng) const { return quantile_of_rank(rng.uniform()); }

  bool bounded() const { return std::isfinite(support_sup()); }

  std::vector<double> sample(RngStream& rng, std::size_t count) const {
    std::vector<double> out(count);
    for (auto& v : out) v = sample(rng);
    return out;
  }

  double mean() const {
    return integrate_checked([this](double q) { return quantile_of_rank(q); }, 0.0, 1.0,
                             QuadratureOptions{}, "mean of " + spec());
  }

protected:
  double invert_by_bisection(double q) const {
    double lo = support_inf();
    double hi = support_sup();
    const bool unbounded = !std::isfinite(hi);
    if (unbounded) {
      hi = std::max(1.0, lo + 1.0);
      while (survival(hi) > q) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericalError("quantile_of_rank: bracketing failed");
      }
    }
    // Compare on whichever side of the median keeps full precision.
    const bool upper_tail = q < 0.5;
    const double target = upper_tail ? q : 1.0 - q;
    for (int iter = 0; iter < 400; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double tol = unbounded ? 1e-12 * std::max(1.0, std::abs(mid)) : 1e-12;
      if (hi - lo <= tol) break;
      const bool above = upper_tail ? survival(mid) < target : cdf(mid) > target;
      (above ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

using DistributionPtr = std::shared_ptr<const AbilityDistribution>;

// U[lo, hi].
class UniformDistribution final : public AbilityDistribution {
public:
  explicit UniformDistribution(double hi = 1.0) : UniformDistribution(0.0, hi) {}
  UniformDistribution(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw ConfigError("uniform: need finite lo < hi");
    }
  }

  double cdf(double x) const override { return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0); }
  double survival(double x) const override {
    return std::clamp((hi_ - x) / (hi_ - lo_), 0.0, 1.0);
  }
  double pdf(double x) const override { return (x >= lo_ && x <= hi_) ? 1.0 / (hi_ - lo_) : 0.0; }
  double support_inf() const override { return lo_; }
  double support_sup() const override { return hi_; }
  double quantile_of_rank(double q) const override {
    detail::check_rank(q);
    return q < 0.5 ? hi_ - q * (hi_ - lo_) : lo_ + (1.0 - q) * (hi_ - lo_);
  }
  double abs_quantile_derivative(double q) const override {
    detail::check_rank(q);
    return hi_ - lo_;
  }
  std::string spec() const override {
    return "uniform(" + detail::format_number(lo_) + "," + detail::format_number(hi_) + ")";
  }

private:
  double lo_;
  double hi_;
};

// F(x) = x^beta on [0, 1].
class PowerDistribution final : public AbilityDistribution {
public:
  explicit PowerDistribution(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("power: beta must be positive");
  }

  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::pow(x, beta_);
  }
  double survival(double x) const override {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return -std::expm1(beta_ * std::log(x));
  }
  double pdf(double x) const override {
    if (x < 0.0 || x > 1.0) return 0.0;
    if (x == 0.0) return beta_ < 1.0 ? kInfinity : (beta_ == 1.0 ? 1.0 : 0.0);
    return beta_ * std::pow(x, beta_ - 1.0);
  }
  double support_inf() const override { return 0.0; }
  double support_sup() const override { return 1.0; }
  double quantile_of_rank(double q) const override {
    detail::check_rank(q);
    if (q == 1.0) return 0.0;
    return std::exp(std::log1p(-q) / beta_);
  }
  double abs_quantile_derivative(double q) const override {
    detail::check_rank(q);
    if (q == 1.0) return beta_ > 1.0 ? kInfinity : (beta_ == 1.0 ? 1.0 : 0.0);
    return std::exp((1.0 / beta_ - 1.0) * std::log1p(-q)) / beta_;
  }
  std::string spec() const override { return "power(" + detail::format_number(beta_) + ")"; }

  double beta() const { return beta_; }

private:
  double beta_;
};

// Exp(lambda) on [0, inf).
class ExponentialDistribution final : public AbilityDistribution {
public:
  explicit ExponentialDistribution(double lambda = 1.0) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("exp: lambda must be positive");
  }

  double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-lambda_ * x); }
  double survival(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-lambda_ * x); }
  double pdf(double x) const override { return x < 0.0 ? 0.0 : lambda_ * std::exp(-lambda_ * x); }
  double support_inf() const override { return 0.0; }
  double support_sup() const override { return kInfinity; }
  double quantile_of_rank(double q) const override {
    detail::check_rank(q);
    if (q == 0.0) return kInfinity;
    return -std::log(q) / lambda_;
  }
  double abs_quantile_derivative(double q) const override {
    detail::check_rank(q);
    return q == 0.0 ? kInfinity : 1.0 / (lambda_ * q);
  }
  std::string spec() const override { return "exp(" + detail::format_number(lambda_) + ")"; }

private:
  double lambda_;
};

// Beta(a, b) on [0, 1].
class BetaDistribution final : public AbilityDistribution {
public:
  BetaDistribution(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("beta: parameters must be positive");
    log_norm_ = log_beta(a, b);
  }

  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (b_ == 1.0) return std::pow(x, a_);
    if (a_ == 1.0) return -std::expm1(b_ * std::log1p(-x));
    return regularized_incomplete_beta(x, a_, b_);
  }
  double survival(double x) const override {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    if (b_ == 1.0) return -std::expm1(a_ * std::log(x));
    if (a_ == 1.0) return std::exp(b_ * std::log1p(-x));
    return regularized_incomplete_beta(1.0 - x, b_, a_);
  }
  double pdf(double x) const override {
    if (x < 0.0 || x > 1.0) return 0.0;
    if ((x == 0.0 && a_ != 1.0) || (x == 1.0 && b_ != 1.0)) {
      const double expo = x == 0.0 ? a_ : b_;
      return expo < 1.0 ? kInfinity : 0.0;
    }
    double log_density = -log_norm_;
    if (a_ != 1.0) log_density += (a_ - 1.0) * std::log(x);
    if (b_ != 1.0) log_density += (b_ - 1.0) * std::log1p(-x);
    return std::exp(log_density);
  }
  double support_inf() const override { return 0.0; }
  double support_sup() const override { return 1.0; }
  double quantile_of_rank(double q) const override {
    detail::check_rank(q);
    if (q == 0.0) return 1.0;
    if (q == 1.0) return 0.0;
    if (b_ == 1.0) return std::exp(std::log1p(-q) / a_);
    if (a_ == 1.0) return -std::expm1(std::log(q) / b_);
    return invert_by_bisection(q);
  }
  std::string spec() const override {
    return "beta(" + detail::format_number(a_) + "," + detail::format_number(b_) + ")";
  }

private:
  double a_;
  double b_;
  double log_norm_;
};

// gamma * A + (1 - gamma) * B.
class MixtureDistribution final : public AbilityDistribution {
public:
  MixtureDistribution(double gamma, DistributionPtr a, DistributionPtr b)
      : gamma_(gamma), a_(std::move(a)), b_(std::move(b)) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("mixture: gamma must lie in [0, 1]");
    if (!a_ || !b_) throw ConfigError("mixture: missing component");
  }

  double cdf(double x) const override { return gamma_ * a_->cdf(x) + (1.0 - gamma_) * b_->cdf(x); }
  double survival(double x) const override {
    return gamma_ * a_->survival(x) + (1.0 - gamma_) * b_->survival(x);
  }
  double pdf(double x) const override { return gamma_ * a_->pdf(x) + (1.0 - gamma_) * b_->pdf(x); }
  double support_inf() const override { return std::min(a_->support_inf(), b_->support_inf()); }
  double support_sup() const override { return std::max(a_->support_sup(), b_->support_sup()); }
  std::vector<double> breakpoints() const override {
    std::vector<double> pts;
    for (const auto* c : {a_.get(), b_.get()}) {
      for (double p : c->breakpoints()) pts.push_back(p);
      pts.push_back(c->support_inf());
      pts.push_back(c->support_sup());
    }
    const double lo = support_inf();
    const double hi = support_sup();
    std::erase_if(pts, [&](double p) { return !(p > lo && p < hi); });
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }
  // Composition sampling: pick the component, then draw from it.
  double sample(RngStream& rng) const override {
    return rng.uniform() < gamma_ ? a_->sample(rng) : b_->sample(rng);
  }
  std::string spec() const override {
    return "kind=mixture gamma=" + detail::format_number(gamma_) + " a=" + a_->spec() +
           " b=" + b_->spec();
  }

  double gamma() const { return gamma_; }
  const AbilityDistribution& component_a() const { return *a_; }
  const AbilityDistribution& component_b() const { return *b_; }

private:
  double gamma_;
  DistributionPtr a_;
  DistributionPtr b_;
};

// Base law conditioned on X > cutoff: P(x) = (F(x) - F(a)) / (1 - F(a)).
class TruncatedDistribution final : public AbilityDistribution {
public:
  TruncatedDistribution(DistributionPtr base, double cutoff)
      : base_(std::move(base)), cutoff_(cutoff) {
    if (!base_) throw ConfigError("truncation: missing base distribution");
    if (cutoff_ < base_->support_inf()) cutoff_ = base_->support_inf();
    tail_ = base_->survival(cutoff_);
    head_ = base_->cdf(cutoff_);
    if (!(tail_ > 1e-14)) {
      throw DegenerateTruncation("truncation at " + detail::format_number(cutoff) +
                                 " leaves no probability mass (F(a) = 1)");
    }
  }

  double cdf(double x) const override {
    if (x <= cutoff_) return 0.0;
    const double v = head_ < 0.5 ? (base_->cdf(x) - head_) / tail_
                                 : (tail_ - base_->survival(x)) / tail_;
    return std::clamp(v, 0.0, 1.0);
  }
  double survival(double x) const override {
    if (x <= cutoff_) return 1.0;
    return std::clamp(base_->survival(x) / tail_, 0.0, 1.0);
  }
  double pdf(double x) const override { return x <= cutoff_ ? 0.0 : base_->pdf(x) / tail_; }
  double support_inf() const override { return cutoff_; }
  double support_sup() const override { return base_->support_sup(); }
  double quantile_of_rank(double q) const override {
    detail::check_rank(q);
    if (q == 1.0) return cutoff_;
    return std::max(cutoff_, base_->quantile_of_rank(q * tail_));
  }
  double abs_quantile_derivative(double q) const override {
    detail::check_rank(q);
    return tail_ * base_->abs_quantile_derivative(q * tail_);
  }
  std::vector<double> breakpoints() const override {
    auto pts = base_->breakpoints();
    std::erase_if(pts, [&](double p) { return p <= cutoff_; });
    return pts;
  }
  std::string spec() const override {
    return "truncated(" + base_->spec() + "," + detail::format_number(cutoff_) + ")";
  }

  double cutoff() const { return cutoff_; }
  // 1 - F(cutoff) under the base law.
  double tail_mass() const { return tail_; }
  const AbilityDistribution& base() const { return *base_; }
  const DistributionPtr& base_ptr() const { return base_; }

private:
  DistributionPtr base_;
  double cutoff_;
  double tail_ = 1.0;
  double head_ = 0.0;
};

using TruncatedPtr = std::shared_ptr<const TruncatedDistribution>;

inline TruncatedPtr truncate_above(DistributionPtr dist, double cutoff) {
  return std::make_shared<const TruncatedDistribution>(std::move(dist), cutoff);
}

inline DistributionPtr make_uniform(double lo, double hi) {
  return std::make_shared<const UniformDistribution>(lo, hi);
}
inline DistributionPtr make_uniform(double hi = 1.0) { return make_uniform(0.0, hi); }
inline DistributionPtr make_power(double beta) {
  return std::make_shared<const PowerDistribution>(beta);
}
inline DistributionPtr make_exponential(double lambda = 1.0) {
  return std::make_shared<const ExponentialDistribution>(lambda);
}
inline DistributionPtr make_beta(double a, double b) {
  return std::make_shared<const BetaDistribution>(a, b);
}
inline DistributionPtr make_mixture(double gamma, DistributionPtr a, DistributionPtr b) {
  return std::make_shared<const MixtureDistribution>(gamma, std::move(a), std::move(b));
}

// 0.01 Beta(40, 1) + 0.99 U[0, 0.05]: the skewed law used to probe m > 2.
inline DistributionPtr make_skewed_mixture() {
  return make_mixture(0.01, make_beta(40.0, 1.0), make_uniform(0.0, 0.05));
}

namespace detail {

inline double parse_number(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("distribution spec: bad number '" + std::string(text) + "' for " +
                      std::string(what));
  }
  return value;
}

// "name(a,b)" -> {"name", {a, b}}; bare "name" -> {"name", {}}.
inline std::pair<std::string, std::vector<double>> parse_call(std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos) return {std::string(text), {}};
  if (text.back() != ')') throw ConfigError("distribution spec: unbalanced '(' in " + std::string(text));
  std::string name(text.substr(0, open));
  std::vector<double> args;
  auto inner = text.substr(open + 1, text.size() - open - 2);
  while (!inner.empty()) {
    const auto comma = inner.find(',');
    args.push_back(parse_number(inner.substr(0, comma), name));
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return {name, args};
}

inline DistributionPtr from_call(const std::string& name, const std::vector<double>& args) {
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw ConfigError("distribution spec: wrong number of arguments for " + name);
    }
  };
  if (name == "uniform") {
    arity(0, 2);
    if (args.empty()) return make_uniform(1.0);
    if (args.size() == 1) return make_uniform(args[0]);
    return make_uniform(args[0], args[1]);
  }
  if (name == "power") {
    arity(0, 1);
    return make_power(args.empty() ? 2.0 : args[0]);
  }
  if (name == "exp" || name == "exponential") {
    arity(0, 1);
    return make_exponential(args.empty() ? 1.0 : args[0]);
  }
  if (name == "beta") {
    arity(2, 2);
    return make_beta(args[0], args[1]);
  }
  if (name == "mixtureC" || name == "mixture-c" || name == "skewed") {
    arity(0, 0);
    return make_skewed_mixture();
  }
  throw ConfigError("distribution spec: unknown distribution '" + name + "'");
}

}  // namespace detail

// Parses distribution specs such as
//   "kind=uniform b=1.0", "kind=power beta=2", "kind=exp lambda=1",
//   "kind=mixture gamma=0.01 a=beta(40,1) b=uniform(0,0.05)",
// as well as call forms ("uniform(0,0.05)", "beta(40,1)") and the bare
// names "uniform", "power", "exp", "mixtureC".
inline DistributionPtr parse_distribution(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    const auto start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t') ++pos;
    if (pos > start) tokens.push_back(text.substr(start, pos - start));
  }
  if (tokens.empty()) throw ConfigError("distribution spec: empty");

  if (tokens.front().find('=') == std::string_view::npos) {
    if (tokens.size() != 1) throw ConfigError("distribution spec: unexpected tokens after name");
    auto [name, args] = detail::parse_call(tokens.front());
    return detail::from_call(name, args);
  }

  std::map<std::string, std::string, std::less<>> kv;
  for (auto tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("distribution spec: expected key=value, got '" + std::string(tok) + "'");
    }
    kv[std::string(tok.substr(0, eq))] = std::string(tok.substr(eq + 1));
  }
  auto take = [&](const std::string& key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : detail::parse_number(it->second, key);
  };
  auto kind_it = kv.find("kind");
  if (kind_it == kv.end()) throw ConfigError("distribution spec: missing kind=");
  const std::string& kind = kind_it->second;
  if (kind == "uniform") return make_uniform(take("lo", 0.0), take("b", take("hi", 1.0)));
  if (kind == "power") return make_power(take("beta", 2.0));
  if (kind == "exp" || kind == "exponential") return make_exponential(take("lambda", 1.0));
  if (kind == "beta") return make_beta(take("a", 1.0), take("b", 1.0));
  if (kind == "mixture") {
    auto a = kv.find("a");
    auto b = kv.find("b");
    if (a == kv.end() || b == kv.end()) throw ConfigError("distribution spec: mixture needs a= and b=");
    auto [an, aa] = detail::parse_call(a->second);
    auto [bn, ba] = detail::parse_call(b->second);
    return make_mixture(take("gamma", 0.5), detail::from_call(an, aa), detail::from_call(bn, ba));
  }
  if (kind == "mixtureC") return make_skewed_mixture();
  throw ConfigError("distribution spec: unknown kind '" + kind + "'");
}

}  // namespace contest
