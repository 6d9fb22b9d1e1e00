#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval
// with caller-supplied mandatory breakpoints.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <queue>
#include <string>
#include <vector>

#include "isnet/errors.hpp"

namespace isnet::quadrature {

struct Options {
  double abs_tol = 1e-12;
  std::size_t max_panels = 20000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over [a, b]. `breakpoints` inside (a, b) become initial
/// panel boundaries so discontinuities and kinks never sit inside a panel.
/// Throws NumericalError when the total error estimate stays above
/// `opts.abs_tol` after `opts.max_panels` panels.
template <class F>
Result integrate(F&& f, double a, double b, std::vector<double> breakpoints = {},
                 const Options& opts = {}) {
  Result result;
  if (!(b > a)) return result;

  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());

  std::priority_queue<detail::Panel> heap;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const double hi = breakpoints[i + 1];
    if (lo < a || hi > b || !(hi > lo)) continue;
    auto panel = detail::gauss_kronrod(f, lo, hi);
    total += panel.value;
    error += panel.error;
    heap.push(panel);
  }

  std::vector<detail::Panel> exhausted;
  while (error > opts.abs_tol && !heap.empty()) {
    if (heap.size() + exhausted.size() >= opts.max_panels) break;
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 1e-15 * std::abs(mid)) {
      exhausted.push_back(worst);
      continue;
    }
    const auto left = detail::gauss_kronrod(f, worst.a, mid);
    const auto right = detail::gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  error = 0.0;
  result.panels = heap.size() + exhausted.size();
  for (const auto& p : exhausted) {
    total += p.value;
    error += p.error;
  }
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  result.value = total;
  result.error = error;
  if (!(error <= opts.abs_tol) || !std::isfinite(total)) {
    char estimate[32];
    std::snprintf(estimate, sizeof estimate, "%.3e", error);
    throw NumericalError(std::string("quadrature did not converge: error estimate ") + estimate +
                         " after " + std::to_string(result.panels) + " panels");
  }
  return result;
}

}  // namespace isnet::quadrature
