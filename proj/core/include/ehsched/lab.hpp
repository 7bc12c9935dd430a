#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/online.hpp"
#include "ehsched/rate.hpp"

namespace ehsched::lab {

// ---------------------------------------------------------------------------
// Oracle

/// Grid search over window starts a in {0, d, 2d, ...}: the unconstrained
/// minimum finish using only the window [a, a + Gamma_0], with E(a-) carried in
/// as initial stock. Shares nothing with the pull-back machinery; the result
/// lies within one grid step above the true optimum.
double oracle_min_finish(const ProblemInstance& instance, const RateFunction& g, double grid_step);
double oracle_min_finish(const ProblemInstance& instance, double grid_step);

/// min inter-arrival gap / 50, floored at 1e-4 s.
double default_grid_step(const HarvestTrace& tx);

// ---------------------------------------------------------------------------
// Random instances

enum class EnergyDistribution { Uniform, Exponential };

struct TraceSpec {
  double horizon = 10.0;            // seconds; all arrivals fall in [0, horizon)
  double intensity = 1.0;           // tx arrivals per second
  EnergyDistribution energy = EnergyDistribution::Uniform;
  double energy_a = 0.5;            // uniform lower bound, or exponential mean
  double energy_b = 5.0;            // uniform upper bound
  double gamma_min = 0.5;           // receiver on-time Gamma_0 range, seconds
  double gamma_max = 3.0;
  double bits_min = 0.5;            // B_0 range
  double bits_max = 8.0;
  double rx_power = 1.0;
  std::size_t max_arrivals = 12;    // 0 = unlimited
  bool arrival_at_zero = true;            // first tx arrival pinned at t = 0
  RateFunctionSpec rate{};
  std::uint64_t seed = 1;
};

void validate(const TraceSpec& spec);

/// Deterministic in spec.seed. Draws are repeated (deterministically) until
/// B_0 can be sent within Gamma_0 using every arrival.
ProblemInstance generate_instance(const TraceSpec& spec);

/// splitmix64 finaliser used to derive per-instance seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  std::size_t instances = 100;
  TraceSpec spec{};
  double grid_step = 0.0;           // 0 = default_grid_step per instance
  std::size_t oracle_instances = 0; // run the oracle on the first N instances
  bool inflate_gamma = false;             // Gamma_0 above the unconstrained finish
  double tolerance = 1e-6;
  unsigned threads = 1;
};

struct ExperimentRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string digest;
  std::size_t tx_arrivals = 0;
  double gamma0 = 0.0;
  double bits = 0.0;
  double t_off = 0.0;
  double t_online = 0.0;
  std::optional<double> t_oracle;
  double t_baseline = 0.0;
  double ratio = 0.0;
  online::RatioBasis basis = online::RatioBasis::ExactOffline;
  std::size_t iterations = 0;
  std::size_t iteration_bound = 0;

  bool structure = false;                 // all five optimality conditions
  bool monotone_power = false;            // offline powers non-decreasing
  bool no_idle = false;                   // no zero-power segment
  bool binding_switches = false;          // switches at binding epochs
  bool duration_rule = false;             // Gamma_0 used fully unless starting at the first arrival
  bool duration_growth = false;           // pull-back durations strictly increase
  bool iteration_bound_ok = false;        // iterations within 2x arrivals before init finish
  bool tau_q = false;                     // U(tau_q) = E(tau_q-) on the output
  bool online_monotone = false;           // online powers non-decreasing
  bool online_energy_rule = false;        // E(t) g(l)/l <= B_0 with equality at start
  bool online_start_early = false;        // online start < T_off
  bool ratio_below_two = false;           // ratio < 2
  bool oracle_ok = true;                  // |T_off - T_oracle| <= 2 grid steps
  bool baseline_match = true;             // with inflate_gamma, T_off equals T_baseline to 1e-8
  bool ordering = false;                  // T_baseline <= T_off <= T_online
  bool feasible_off = false;
  bool feasible_online = false;
  std::string error;                      // solver error, empty on success

  bool all_pass() const noexcept;
};

struct ExperimentSummary {
  std::size_t instances = 0;
  std::size_t failures = 0;  // records with any failed check or error
  std::size_t errors = 0;
  double max_ratio = 0.0;
  double max_oracle_gap = 0.0;
  double max_baseline_gap = 0.0;  // relative, only with inflate_gamma
  std::size_t max_iterations = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  ExperimentSummary summary;
};

/// Evaluates one instance; solver errors are captured in the record.
ExperimentRecord evaluate_instance(const ProblemInstance& instance, const ExperimentConfig& config,
                                   std::size_t index = 0, std::uint64_t seed = 0);

/// Instance i uses seed mix_seed(config.spec.seed, i). Records are ordered by
/// index regardless of thread scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Fixed CSV columns; the trailing `timestamp` column is the only
/// non-deterministic field.
std::string csv_header();
std::string to_csv_row(const ExperimentRecord& record, const std::string& timestamp);
std::string to_csv(const ExperimentResult& result, const std::string& timestamp);

}  // namespace ehsched::lab
