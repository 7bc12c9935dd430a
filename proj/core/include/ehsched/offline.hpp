#pragma once

#include <cstddef>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/rate.hpp"

// Exact offline scheduler for a transmitter harvesting at known epochs and a
// receiver holding Gamma_0 seconds of on-time from t = 0.
//
// Three phases:
//   init_policy     earliest feasible constant-power line that delivers B_0 in
//                   at most Gamma_0, re-optimised after its first binding epoch
//                   with the unconstrained scheduler;
//   pull_back_step  moves the start earlier one combinatorial event at a time,
//                   lowering the first power and raising the last so that the
//                   transmission duration grows while the finish time drops;
//   quit_finalize   interpolates inside the last regime so the duration equals
//                   Gamma_0 exactly.
//
// "Time zero" in the termination rules is the first transmitter arrival: no
// useful transmission can begin earlier.
namespace ehsched::offline {

/// Constant-power line of the first phase, before any splicing.
struct ConstantLine {
  std::size_t tau_n_index = 0;
  double tau_n = 0.0;
  double gamma_tilde = 0.0;  // duration of the line
  double p_c = 0.0;
  double t_start = 0.0;
  double t_stop = 0.0;
  double tau_q = 0.0;      // first binding epoch strictly after t_start, else t_start
  double tau_q_alt = 0.0;  // first binding epoch at or after t_start
};

struct InitResult {
  TransmissionPolicy policy;
  double tau_n = 0.0;
  double gamma_tilde = 0.0;
  double p_c = 0.0;
  double tau_q = 0.0;
  double t_start = 0.0;
  double t_stop = 0.0;  // finish of the returned (possibly spliced) policy
  bool spliced = false;
};

/// Iterate of the pull-back phase. Epochs are tracked by arrival index:
/// the front [t_start, tau_l] consumes tx.prefix(l), the tail [tau_r, t_stop]
/// consumes tx.prefix(m) - tx.prefix(r), and everything between tau_l and
/// tau_r is left untouched.
struct PullBackState {
  TransmissionPolicy policy;
  std::size_t l = 0;
  std::size_t r = 0;
  std::size_t m = 0;
  double tau_l = 0.0;
  double tau_r = 0.0;
  double p_l = 0.0;
  double p_r = 0.0;
  double t_start = 0.0;
  double t_stop = 0.0;
  std::size_t iteration = 0;
  bool terminated = false;

  double duration() const noexcept { return t_stop - t_start; }
};

struct Check {
  bool pass = false;
  double residual = 0.0;
};

/// Optimality structure of a policy: bit target met; non-decreasing powers;
/// interior switches at binding tx epochs and consumption equal to the
/// strict-left harvest at every switch and at the finish; duration equal to
/// Gamma_0 unless the policy starts at time zero (then at most Gamma_0);
/// tau_q among the switch times.
struct StructureReport {
  Check bits;
  Check monotone_power;
  Check binding_switches;
  Check duration;
  Check contains_tau_q;
  double tau_q = 0.0;
  /// contains_tau_q evaluated with tau_q_alt (binding epochs at t_start count).
  bool contains_tau_q_alt = false;

  bool all_pass() const noexcept {
    return bits.pass && monotone_power.pass && binding_switches.pass && duration.pass &&
           contains_tau_q.pass;
  }
};

struct OffResult {
  TransmissionPolicy policy;
  std::size_t iterations = 0;
  double tau_q = 0.0;
  double init_finish = 0.0;
  /// Transmission duration of the initial state followed by each pull-back
  /// iterate, including the one that triggered termination.
  std::vector<double> durations;
  bool quit_interpolated = false;

  double finish() const { return policy.finish(); }
};

ConstantLine constant_line(const ProblemInstance& instance, const RateFunction& g);

InitResult init_policy(const ProblemInstance& instance, const RateFunction& g);
InitResult init_policy(const ProblemInstance& instance);

PullBackState initial_state(const InitResult& init, const ProblemInstance& instance);

bool should_terminate(const PullBackState& state, const ProblemInstance& instance);

/// One pull-back iteration. A state that already meets the termination rule is
/// returned unchanged with `terminated` set.
PullBackState pull_back_step(const PullBackState& state, const ProblemInstance& instance,
                             const RateFunction& g);

/// Final policy from the last non-terminal iterate `prev` and the terminal
/// iterate `last`.
TransmissionPolicy quit_finalize(const PullBackState& prev, const PullBackState& last,
                                 const ProblemInstance& instance, const RateFunction& g);

OffResult off_solve(const ProblemInstance& instance, const RateFunction& g);
OffResult off_solve(const ProblemInstance& instance);

StructureReport verify_structure(const TransmissionPolicy& policy, const ProblemInstance& instance,
                                 const RateFunction& g, double tol = 1e-6);
StructureReport verify_structure(const TransmissionPolicy& policy, const ProblemInstance& instance,
                                 double tol = 1e-6);

}  // namespace ehsched::offline
