#pragma once

// Reference values and reference solvers used only by the tests. The solvers
// here are written independently of the library: throughput uses a lower
// convex hull instead of the greedy chord walk, and the offline optimum is
// found by bisection over the window start.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ehsched/model.hpp"

namespace oracle {

// High-precision values (50-digit arithmetic, rounded to double).
namespace frozen {
inline constexpr double kPowerForHalfLog2 = 5.31972235583836;    // log2(1+p)/p = 0.5
inline constexpr double kPowerForThirdLog2 = 10.6130102422795;   // log2(1+p)/p = 1/3
inline constexpr double kDurationE4B2 = 0.751918940959395;       // T log2(1+4/T) = 2
inline constexpr double kTwoLog2OneHalf = 1.16992500144231;      // 2 log2(1.5)

// Golden instance tx {(0,1),(1,3)}, Gamma_0 = 1, B_0 = 2, log2.
inline constexpr double kGoldenInitStart = 0.812020264760151;
inline constexpr double kGoldenInitStop = 1.56393920571955;
inline constexpr double kGoldenStart = 0.340684266433869;
inline constexpr double kGoldenFinish = 1.34068426643387;
inline constexpr double kGoldenPowerLow = 1.51672400503953;
inline constexpr double kGoldenPowerHigh = 8.80580729894767;
inline constexpr double kGoldenOnline = 1.751918940959395;
inline constexpr double kGoldenRatio = 1.30673491501424;

// tx {(0,3),(0.5,1)}, Gamma_0 = 10, B_0 = 2, log2: second online power.
inline constexpr double kOnlineL2 = 7.87393493981863;
inline constexpr double kOnlineFinish = 0.817503258422603;
}  // namespace frozen

using Rate = std::function<double(double)>;

inline Rate log2_rate(double scale = 1.0) {
  return [scale](double p) { return scale * std::log2(1.0 + p); };
}
inline Rate ln_rate(double scale = 1.0) {
  return [scale](double p) { return scale * std::log1p(p); };
}

struct Point {
  double t;
  double e;
};

// Lower convex hull (Andrew's monotone chain) of points sorted by t.
inline std::vector<Point> lower_hull(const std::vector<Point>& pts) {
  std::vector<Point> h;
  for (const auto& p : pts) {
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h[h.size() - 1];
      const double cross = (b.t - a.t) * (p.e - a.e) - (b.e - a.e) * (p.t - a.t);
      if (cross <= 0.0) {
        h.pop_back();
      } else {
        break;
      }
    }
    h.push_back(p);
  }
  return h;
}

// Max bits on [a, d] with everything harvested up to and including a
// available at a; later arrivals usable from their epoch.
inline double max_bits(const ehsched::HarvestTrace& tx, const Rate& g, double a, double d) {
  std::vector<Point> pts{{a, 0.0}};
  double avail = tx.cumulative_right(a);
  for (const auto& arr : tx.arrivals()) {
    if (arr.time <= a || arr.time >= d) continue;
    pts.push_back({arr.time, avail});
    avail += arr.amount;
  }
  pts.push_back({d, avail});
  const auto h = lower_hull(pts);
  double bits = 0.0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    const double dt = h[i].t - h[i - 1].t;
    const double de = h[i].e - h[i - 1].e;
    if (dt > 0.0 && de > 0.0) bits += dt * g(de / dt);
  }
  return bits;
}

// Earliest finish for `bits` starting at a, ignoring the receiver.
inline double min_finish_from(const ehsched::HarvestTrace& tx, const Rate& g, double bits, double a) {
  double lo = a;
  double hi = a + 1.0;
  while (max_bits(tx, g, a, hi) < bits) {
    lo = hi;
    hi = a + 2.0 * (hi - a);
    if (hi - a > 1e12) return INFINITY;
  }
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (max_bits(tx, g, a, mid) >= bits ? hi : lo) = mid;
  }
  return hi;
}

// Exact offline optimum for a receiver holding gamma0 seconds from t = 0.
// The window length F(a) - a shrinks as the start a moves later while F(a)
// grows, so the optimum is F at the earliest start whose window fits.
inline double offline_min_finish(const ehsched::ProblemInstance& inst, const Rate& g) {
  const auto& tx = inst.tx();
  const double gamma0 = inst.initial_on_time();
  const double b0 = inst.bits();
  auto fits = [&](double a) {
    const double f = min_finish_from(tx, g, b0, a);
    return std::isfinite(f) && f - a <= gamma0;
  };
  double lo = tx[0].time;
  if (fits(lo)) return min_finish_from(tx, g, b0, lo);
  double hi = tx[tx.size() - 1].time;
  if (!fits(hi)) return INFINITY;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (fits(mid) ? hi : lo) = mid;
  }
  return min_finish_from(tx, g, b0, hi);
}

// Piecewise-constant consumed energy, evaluated directly from segments.
inline double consumed(const ehsched::TransmissionPolicy& p, double t) {
  double u = 0.0;
  for (const auto& s : p.segments()) {
    if (t <= s.start) break;
    u += s.power * (std::min(t, s.end) - s.start);
  }
  return u;
}

// Dense sampling check of U(t) <= E(t) and O(t) <= Gamma_0.
inline bool dense_feasible(const ehsched::TransmissionPolicy& p, const ehsched::ProblemInstance& inst,
                           int samples = 2000, double tol = 1e-7) {
  const double t0 = p.start();
  const double t1 = p.finish();
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + (t1 - t0) * i / samples;
    const double e = inst.tx().cumulative(t);
    // Energy arriving exactly at a sample point is usable just after it.
    if (consumed(p, t) > inst.tx().cumulative_right(t) + tol * std::max(1.0, e)) return false;
  }
  double on = 0.0;
  for (const auto& s : p.segments()) {
    if (s.power > 0.0) on += s.end - s.start;
  }
  return on <= inst.rx_on_time().total() * (1.0 + tol);
}

}  // namespace oracle
