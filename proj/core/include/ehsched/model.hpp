#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ehsched/rate.hpp"

namespace ehsched {

struct Arrival {
  double time = 0.0;    // seconds
  double amount = 0.0;  // joules (or seconds of on-time for derived traces)

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// Ordered discrete harvest arrivals. Times strictly increase from >= 0 and
/// every amount is positive.
class HarvestTrace {
 public:
  HarvestTrace() = default;
  explicit HarvestTrace(std::vector<Arrival> arrivals);

  std::span<const Arrival> arrivals() const noexcept { return arrivals_; }
  std::size_t size() const noexcept { return arrivals_.size(); }
  bool empty() const noexcept { return arrivals_.empty(); }
  const Arrival& operator[](std::size_t i) const { return arrivals_[i]; }

  double total() const noexcept { return prefix_.back(); }

  /// Sum of the first k amounts; prefix(k) == cumulative(arrivals[k].time).
  double prefix(std::size_t k) const { return prefix_[k]; }

  /// Sum of amounts arriving strictly before t.
  double cumulative(double t) const;
  /// Sum of amounts arriving at or before t.
  double cumulative_right(double t) const;

  /// Number of arrivals strictly before t.
  std::size_t count_before(double t) const;
  /// Index of an arrival within abs_tol of t, if any.
  std::optional<std::size_t> find_epoch(double t, double abs_tol) const;

  friend bool operator==(const HarvestTrace& a, const HarvestTrace& b) {
    return a.arrivals_ == b.arrivals_;
  }

 private:
  std::vector<Arrival> arrivals_;
  std::vector<double> prefix_{0.0};
};

double cumulative_energy(const HarvestTrace& trace, double t);
double cumulative_energy_right(const HarvestTrace& trace, double t);

class ProblemInstance {
 public:
  ProblemInstance(HarvestTrace tx, HarvestTrace rx, double rx_power, double bits,
                  RateFunctionSpec rate = {});

  const HarvestTrace& tx() const noexcept { return tx_; }
  /// Receiver energy arrivals R_j.
  const HarvestTrace& rx() const noexcept { return rx_; }
  /// Receiver on-time arrivals Gamma_j = R_j / P_r.
  const HarvestTrace& rx_on_time() const noexcept { return rx_on_time_; }
  double rx_power() const noexcept { return rx_power_; }
  double bits() const noexcept { return bits_; }
  const RateFunctionSpec& rate() const noexcept { return rate_; }

  /// True when the receiver harvests exactly once, at t = 0.
  bool single_rx_at_zero() const noexcept;
  /// Gamma_0; requires single_rx_at_zero().
  double initial_on_time() const;

  ProblemInstance with_rate(RateFunctionSpec rate) const;
  ProblemInstance with_bits(double bits) const;
  /// Replaces the receiver trace by a single arrival at 0 worth `on_time` seconds.
  ProblemInstance with_initial_on_time(double on_time) const;

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;

 private:
  HarvestTrace tx_;
  HarvestTrace rx_;
  HarvestTrace rx_on_time_;
  double rx_power_;
  double bits_;
  RateFunctionSpec rate_;
};

double cumulative_rx_time(const ProblemInstance& instance, double t);
double cumulative_rx_time_right(const ProblemInstance& instance, double t);

struct PowerSegment {
  double start = 0.0;
  double end = 0.0;
  double power = 0.0;

  double length() const noexcept { return end - start; }
  friend bool operator==(const PowerSegment&, const PowerSegment&) = default;
};

/// Piecewise-constant power profile {p, s, N}. Segments are contiguous and
/// ordered; adjacent segments may carry the same power (touch-point epochs are
/// kept as boundaries).
class TransmissionPolicy {
 public:
  TransmissionPolicy() = default;
  /// Throws ErrorCode::Structural on gaps, overlaps, empty or negative-power
  /// segments. Boundaries within 1e-12 (relative) are snapped together.
  explicit TransmissionPolicy(std::vector<PowerSegment> segments);

  std::span<const PowerSegment> segments() const noexcept { return segments_; }
  std::size_t size() const noexcept { return segments_.size(); }
  bool empty() const noexcept { return segments_.empty(); }

  double start() const;   // s_1
  double finish() const;  // s_{N+1}
  /// Total time with nonzero power.
  double on_duration() const noexcept;

  friend bool operator==(const TransmissionPolicy&, const TransmissionPolicy&) = default;

 private:
  std::vector<PowerSegment> segments_;
};

/// U(t)
double consumed_energy(const TransmissionPolicy& policy, double t);
/// B(t)
double transmitted_bits(const TransmissionPolicy& policy, const RateFunction& g, double t);
double total_bits(const TransmissionPolicy& policy, const RateFunction& g);
/// O(t): the receiver is on exactly while power is nonzero.
double receiver_on_time(const TransmissionPolicy& policy, double t);

/// Splits segments at every tx epoch where consumption meets the strict-left
/// harvest, U(tau) == E(tau-) within rel_tol.
TransmissionPolicy split_at_binding_epochs(const TransmissionPolicy& policy,
                                           const HarvestTrace& tx, double rel_tol = 1e-10);

/// Drops zero-power segments at the front and back.
TransmissionPolicy trim_idle_ends(const TransmissionPolicy& policy);

struct Tolerance {
  double feasibility = 1e-7;  // scaled by max(1, magnitude)
  double bits_rel = 1e-6;
};

struct FeasibilityReport {
  bool feasible = false;
  double bits_delivered = 0.0;
  double worst_energy_violation = 0.0;  // max over samples of U - E, floored at 0
  double worst_time_violation = 0.0;    // max over samples of O - Gamma, floored at 0
  std::optional<double> violating_time;
};

/// Checks B(T) == B_0, U(t) <= E(t) and O(t) <= Gamma(t) at every segment
/// boundary and every arrival epoch up to the finish time. Both constraint
/// gaps are piecewise linear between those points, so this is exhaustive.
FeasibilityReport check_feasibility(const TransmissionPolicy& policy, const ProblemInstance& instance,
                                    const RateFunction& g, Tolerance tol = {});
FeasibilityReport check_feasibility(const TransmissionPolicy& policy, const ProblemInstance& instance,
                                    Tolerance tol = {});

}  // namespace ehsched
