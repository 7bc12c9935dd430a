#include <algorithm>
#include <cmath>
#include <limits>

#include "ehsched/baseline.hpp"
#include "ehsched/error.hpp"
#include "ehsched/lab.hpp"

namespace ehsched::lab {

double default_grid_step(const HarvestTrace& tx) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < tx.size(); ++i) gap = std::fmin(gap, tx[i].time - tx[i - 1].time);
  if (!std::isfinite(gap)) return 1e-3;
  return std::fmax(gap / 50.0, 1e-4);
}

double oracle_min_finish(const ProblemInstance& instance, const RateFunction& g, double grid_step) {
  if (!(grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
  const auto& tx = instance.tx();
  const double gamma0 = instance.initial_on_time();
  const double b0 = instance.bits();
  if (tx.empty()) throw Error(ErrorCode::InsufficientHarvest, "transmitter never harvests");

  // Windows opening after the last arrival all look alike, so the scan stops
  // one step past it.
  const double last = tx[tx.size() - 1].time;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0;; ++i) {
    const double a = static_cast<double>(i) * grid_step;
    if (a >= best || a > last + grid_step) break;
    const double stock = tx.cumulative(a);
    // Only windows that can beat the incumbent are worth a full solve.
    const double deadline = std::fmin(a + gamma0, best);
    if (!(deadline > a)) continue;
    if (baseline::max_bits_by_deadline(tx, g, deadline, a, stock).bits < b0) continue;
    const double finish = baseline::min_finish_unconstrained(tx, g, b0, a, stock).finish();
    best = std::fmin(best, finish);
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::InsufficientHarvest, "no window of length Gamma_0 delivers B_0");
  }
  return best;
}

double oracle_min_finish(const ProblemInstance& instance, double grid_step) {
  return oracle_min_finish(instance, LogRate(instance.rate()), grid_step);
}

}  // namespace ehsched::lab
