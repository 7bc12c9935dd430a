#pragma once

#include <cmath>
#include <cstddef>

namespace ehsched::detail {

inline constexpr int kMaxBisection = 200;

// Bisection on [lo, hi] for a function increasing through zero:
// f(lo) < 0 <= f(hi). Runs until the bracket stops shrinking in double
// precision, or kMaxBisection steps.
template <class F>
double bisect_increasing(F&& f, double lo, double hi) {
  for (int i = 0; i < kMaxBisection; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline bool near(double a, double b, double rel, double abs_floor = 1.0) {
  return std::abs(a - b) <= rel * std::fmax(abs_floor, std::fmax(std::abs(a), std::abs(b)));
}

}  // namespace ehsched::detail
