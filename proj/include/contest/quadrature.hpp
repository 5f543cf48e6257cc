#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature on finite intervals.
//
// The interval with the largest error estimate is bisected until the summed
// estimate drops below max(abs_tol, rel_tol * |I|) or the subdivision budget
// is exhausted. Integrands are never evaluated at interval endpoints, so
// integrable endpoint singularities (log, algebraic) are tolerated.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "contest/errors.hpp"

namespace contest {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_subdivisions = 10000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980223048, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment kronrod21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = kKronrodWeights[10] * f(center);
  double gauss = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

// Integrates f over [points.front(), points.back()], seeding the adaptive
// partition with the given (sorted) breakpoints.
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> points,
                           const QuadratureOptions& opts = {}) {
  QuadratureResult result;
  if (points.size() < 2) return result;
  std::priority_queue<detail::Segment> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    auto seg = detail::kronrod21(f, points[i], points[i + 1]);
    value += seg.value;
    error += seg.error;
    heap.push(seg);
  }
  int splits = 0;
  // Segments too narrow to bisect are retired with their error kept.
  double retired_error = 0.0;
  while (!heap.empty() &&
         error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value)) &&
         splits < opts.max_subdivisions) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 1e-15 * std::max(1.0, std::abs(mid))) {
      retired_error += worst.error;
      continue;
    }
    auto left = detail::kronrod21(f, worst.a, mid);
    auto right = detail::kronrod21(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
    if (heap.empty()) break;
  }
  // Re-sum from scratch to shed accumulated cancellation in the running totals.
  double fresh_value = 0.0;
  double fresh_error = retired_error;
  std::vector<detail::Segment> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& s : segments) {
    fresh_value += s.value;
    fresh_error += s.error;
  }
  result.value = fresh_value;
  result.error = fresh_error;
  result.subdivisions = splits;
  result.converged =
      fresh_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(fresh_value)) ||
      (retired_error > 0.0 && fresh_error - retired_error <=
                                  std::max(opts.abs_tol, opts.rel_tol * std::abs(fresh_value)));
  return result;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  const std::array<double, 2> pts = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), opts);
}

// Like integrate(), but an estimate whose error exceeds `give_up` (relative to
// max(1, |value|)) or is not finite raises NumericalError.
template <class F>
double integrate_checked(F&& f, std::span<const double> points, const QuadratureOptions& opts,
                         const std::string& what, double give_up = 1e-6) {
  auto r = integrate(std::forward<F>(f), points, opts);
  if (!std::isfinite(r.value) ||
      (!r.converged && r.error > give_up * std::max(1.0, std::abs(r.value)))) {
    throw NumericalError(what + ": quadrature did not converge (estimate " +
                         std::to_string(r.value) + ", error " + std::to_string(r.error) + ")");
  }
  return r.value;
}

template <class F>
double integrate_checked(F&& f, double a, double b, const QuadratureOptions& opts,
                         const std::string& what, double give_up = 1e-6) {
  const std::array<double, 2> pts = {a, b};
  return integrate_checked(std::forward<F>(f), std::span<const double>(pts), opts, what, give_up);
}

}  // namespace contest
