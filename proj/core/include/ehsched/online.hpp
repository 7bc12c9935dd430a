#pragma once

#include <string_view>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/rate.hpp"

// Causal scheduler: waits until the harvested energy and on-time could carry
// B_0 bits, then at every transmitter arrival re-picks the power that would
// finish exactly when the energy in hand runs out.
namespace ehsched::online {

struct PowerChange {
  double epoch = 0.0;  // b_j
  double power = 0.0;  // l_j
};

struct OnlineResult {
  TransmissionPolicy policy;
  double t_start = 0.0;
  double t_finish = 0.0;
  std::vector<PowerChange> power_history;
};

/// Earliest tx or rx event t with Gamma(t) g(E(t)/Gamma(t)) >= B_0, using
/// right-limit cumulatives (energy arriving at t is usable at t).
/// Throws ErrorCode::InsufficientHarvest when no event qualifies.
double online_start_time(const ProblemInstance& instance, const RateFunction& g);
double online_start_time(const ProblemInstance& instance);

OnlineResult run_online(const ProblemInstance& instance, const RateFunction& g);
OnlineResult run_online(const ProblemInstance& instance);

struct LowerBound {
  double value = 0.0;  // +inf when not achievable
  bool achievable = false;
};

/// No feasible policy, offline or not, finishes before online_start_time.
LowerBound offline_lower_bound(const ProblemInstance& instance, const RateFunction& g);
LowerBound offline_lower_bound(const ProblemInstance& instance);

enum class RatioBasis { ExactOffline, LowerBound };
std::string_view to_string(RatioBasis basis) noexcept;

struct Ratio {
  double value = 0.0;
  RatioBasis basis = RatioBasis::ExactOffline;
  double t_online = 0.0;
  double t_reference = 0.0;  // T_off or the lower bound
};

/// Against the exact offline optimum when the receiver harvests once at t = 0;
/// otherwise against offline_lower_bound (diagnostic only: the < 2 guarantee
/// is not claimed on that basis).
Ratio competitive_ratio(const ProblemInstance& instance, const RateFunction& g);
Ratio competitive_ratio(const ProblemInstance& instance);

}  // namespace ehsched::online
