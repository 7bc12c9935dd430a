#include "ehsched/baseline.hpp"

#include <cmath>
#include <vector>

#include "ehsched/error.hpp"
#include "roots.hpp"

namespace ehsched::baseline {

namespace {

struct Corner {
  double time;
  double available;  // cumulative usable energy strictly before `time`
};

std::vector<Corner> corners(const HarvestTrace& tx, double deadline, double origin,
                            double initial_stock) {
  std::vector<Corner> out;
  double available = initial_stock;
  std::size_t k = tx.count_before(origin);
  for (; k < tx.size() && tx[k].time < deadline; ++k) {
    if (tx[k].time > origin) out.push_back({tx[k].time, available});
    available += tx[k].amount;
  }
  out.push_back({deadline, available});
  return out;
}

}  // namespace

DeadlineResult max_bits_by_deadline(const HarvestTrace& tx, const RateFunction& g, double deadline,
                                    double origin, double initial_stock) {
  if (!(deadline > origin)) throw Error(ErrorCode::InvalidArgument, "deadline must exceed origin");
  if (initial_stock < 0.0) throw Error(ErrorCode::InvalidArgument, "negative initial stock");

  const auto pts = corners(tx, deadline, origin, initial_stock);
  DeadlineResult result;
  if (!(pts.back().available > 0.0)) return result;

  std::vector<PowerSegment> segs;
  double t = origin;
  double used = 0.0;
  std::size_t from = 0;
  while (from < pts.size()) {
    std::size_t best = from;
    double best_slope = (pts[from].available - used) / (pts[from].time - t);
    for (std::size_t j = from + 1; j < pts.size(); ++j) {
      const double slope = (pts[j].available - used) / (pts[j].time - t);
      if (slope <= best_slope) {
        best_slope = slope;
        best = j;
      }
    }
    best_slope = std::fmax(best_slope, 0.0);
    if (best_slope > 0.0) {
      segs.push_back({t, pts[best].time, best_slope});
      result.bits += g(best_slope) * (pts[best].time - t);
    }
    used = pts[best].available;
    t = pts[best].time;
    from = best + 1;
  }
  result.policy = TransmissionPolicy(std::move(segs));
  return result;
}

double deliverable_supremum(const HarvestTrace& tx, const RateFunction& g, double origin,
                            double initial_stock) {
  const double energy = initial_stock + tx.total() - tx.prefix(tx.count_before(origin));
  return energy * g.slope_at_zero();
}

TransmissionPolicy min_finish_unconstrained(const HarvestTrace& tx, const RateFunction& g, double bits,
                                            double origin, double initial_stock) {
  if (!(bits > 0.0)) throw Error(ErrorCode::InvalidArgument, "bits must be positive");
  const double energy = initial_stock + tx.total() - tx.prefix(tx.count_before(origin));
  if (!(energy > 0.0) || !(bits < energy * g.slope_at_zero())) {
    throw Error(ErrorCode::InsufficientHarvest, "bit target exceeds what the harvest can deliver");
  }

  const double last = tx.empty() ? origin : std::fmax(origin, tx[tx.size() - 1].time);
  // Spending all energy after the last arrival reaches the target by `hi`.
  double hi = last + solve_duration_for_bits(g, energy, bits);
  auto shortfall = [&](double deadline) {
    return bits - max_bits_by_deadline(tx, g, deadline, origin, initial_stock).bits;
  };
  for (int i = 0; shortfall(hi) > 0.0; ++i) {
    if (i > 60) throw Error(ErrorCode::NumericalFailure, "cannot bracket unconstrained finish time");
    hi = origin + 2.0 * (hi - origin);
  }

  double lo = origin;
  for (int i = 0; i < detail::kMaxBisection; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (shortfall(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // The deadline-hi policy delivers >= bits; cut its tail back to exactly bits.
  const auto full = max_bits_by_deadline(tx, g, hi, origin, initial_stock);
  std::vector<PowerSegment> segs;
  double sent = 0.0;
  for (const auto& s : full.policy.segments()) {
    const double seg_bits = g(s.power) * s.length();
    if (sent + seg_bits >= bits) {
      const double len = (bits - sent) / g(s.power);
      if (len > 0.0) segs.push_back({s.start, s.start + len, s.power});
      sent = bits;
      break;
    }
    segs.push_back(s);
    sent += seg_bits;
  }
  return TransmissionPolicy(std::move(segs));
}

}  // namespace ehsched::baseline
