#pragma once

#include "ehsched/model.hpp"
#include "ehsched/rate.hpp"

// Optimal scheduling when the receiver is always on: the tightest
// piecewise-linear consumption curve under the harvest staircase.
namespace ehsched::baseline {

struct DeadlineResult {
  double bits = 0.0;
  TransmissionPolicy policy;
};

/// Throughput-optimal policy on [origin, deadline].
///
/// Only arrivals at or after `origin` are drawn from `tx`; energy harvested
/// earlier is represented by `initial_stock`, usable from `origin` on. The
/// result is built by repeatedly taking the minimum-slope chord from the
/// current point to the remaining epochs (and to the deadline), so powers are
/// non-decreasing and consumption touches the staircase at every switch.
/// Leading zero-power stretches (no energy yet) are dropped from the policy.
DeadlineResult max_bits_by_deadline(const HarvestTrace& tx, const RateFunction& g, double deadline,
                                    double origin, double initial_stock = 0.0);

/// Largest bit count deliverable from `origin` on, approached as the horizon
/// grows: total energy times g'(0).
double deliverable_supremum(const HarvestTrace& tx, const RateFunction& g, double origin,
                            double initial_stock = 0.0);

/// Earliest-finishing policy from `origin` delivering exactly `bits`, ignoring
/// the receiver. Bisects on the finish time over max_bits_by_deadline.
/// Throws ErrorCode::InsufficientHarvest when bits >= deliverable_supremum.
TransmissionPolicy min_finish_unconstrained(const HarvestTrace& tx, const RateFunction& g, double bits,
                                            double origin, double initial_stock = 0.0);

}  // namespace ehsched::baseline
