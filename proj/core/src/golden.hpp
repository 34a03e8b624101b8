// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace xbias::detail {

inline constexpr double kGoldenRatio = 0.6180339887498949;

// Golden-section search for the minimum of a quasi-convex function on
// [lo, hi]; stops once `done(lo, hi)` holds or after max_iterations.
// Returns the smallest value evaluated, both endpoints included.
template <class F, class Done>
double golden_minimize(F&& f, double lo, double hi, Done&& done, int max_iterations) {
  double best = std::min(f(lo), f(hi));
  double x1 = hi - kGoldenRatio * (hi - lo);
  double x2 = lo + kGoldenRatio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iterations && !done(lo, hi); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGoldenRatio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGoldenRatio * (hi - lo);
      f2 = f(x2);
    }
    best = std::min({best, f1, f2});
  }
  return std::min({best, f1, f2, f(0.5 * (lo + hi))});
}

// Pairwise summation over a fixed binary tree; the result
// depends only on the input order.
template <class It>
double pairwise_sum(It first, It last) {
  const auto n = last - first;
  if (n <= 8) {
    double acc = 0.0;
    for (; first != last; ++first) acc += *first;
    return acc;
  }
  const It mid = first + n / 2;
  return pairwise_sum(first, mid) + pairwise_sum(mid, last);
}

}  // namespace xbias::detail
