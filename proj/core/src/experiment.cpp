#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "ehsched/baseline.hpp"
#include "ehsched/io.hpp"
#include "ehsched/lab.hpp"
#include "ehsched/offline.hpp"

namespace ehsched::lab {

namespace {

constexpr double kOrderSlack = 1e-9;
constexpr double kEnergyRuleTol = 1e-7;
constexpr double kBaselineRel = 1e-8;

bool durations_increase(const std::vector<double>& d) {
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (!(d[i] > d[i - 1])) return false;
  }
  return true;
}

bool online_powers_rise(const std::vector<online::PowerChange>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i].power < h[i - 1].power * (1.0 - 1e-12)) return false;
  }
  return true;
}

bool energy_rule_holds(const ProblemInstance& inst, const RateFunction& g,
                       const std::vector<online::PowerChange>& h) {
  const double b0 = inst.bits();
  const double slack = kEnergyRuleTol * std::fmax(1.0, b0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double e = inst.tx().cumulative_right(h[i].epoch);
    const double v = e * g(h[i].power) / h[i].power;
    if (v > b0 + slack) return false;
    if (i == 0 && std::fabs(v - b0) > slack) return false;
  }
  return true;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

bool ExperimentRecord::all_pass() const noexcept {
  return error.empty() && structure && monotone_power && no_idle && binding_switches && duration_rule &&
         duration_growth && iteration_bound_ok && tau_q && online_monotone && online_energy_rule &&
         online_start_early && ratio_below_two && oracle_ok && baseline_match && ordering && feasible_off &&
         feasible_online;
}

ExperimentRecord evaluate_instance(const ProblemInstance& instance, const ExperimentConfig& config,
                                   std::size_t index, std::uint64_t seed) {
  ExperimentRecord rec;
  rec.index = index;
  rec.seed = seed;
  rec.digest = io::digest(instance);
  rec.tx_arrivals = instance.tx().size();
  rec.bits = instance.bits();
  rec.oracle_ok = false;
  rec.baseline_match = false;
  try {
    const LogRate g(instance.rate());
    const auto& tx = instance.tx();
    rec.gamma0 = instance.initial_on_time();

    const auto off = offline::off_solve(instance, g);
    rec.t_off = off.finish();
    rec.iterations = off.iterations;
    rec.iteration_bound = 2 * tx.count_before(off.init_finish);

    const auto on = online::run_online(instance, g);
    rec.t_online = on.t_finish;
    rec.ratio = rec.t_online / rec.t_off;
    rec.basis = online::RatioBasis::ExactOffline;

    rec.t_baseline = baseline::min_finish_unconstrained(tx, g, instance.bits(), 0.0).finish();

    const auto st = offline::verify_structure(off.policy, instance, g, config.tolerance);
    rec.structure = st.all_pass();
    rec.monotone_power = st.monotone_power.pass;
    rec.binding_switches = st.binding_switches.pass;
    rec.duration_rule = st.duration.pass;
    rec.no_idle = std::all_of(off.policy.segments().begin(), off.policy.segments().end(),
                              [](const PowerSegment& s) { return s.power > 0.0; });
    rec.duration_growth = durations_increase(off.durations);
    rec.iteration_bound_ok = off.iterations <= rec.iteration_bound;
    {
      const double e = tx.cumulative(off.tau_q);
      const double u = consumed_energy(off.policy, off.tau_q);
      rec.tau_q = std::fabs(u - e) <= config.tolerance * std::fmax(1.0, e);
    }

    rec.online_monotone = online_powers_rise(on.power_history);
    rec.online_energy_rule = energy_rule_holds(instance, g, on.power_history);
    rec.online_start_early = on.t_start < rec.t_off;
    rec.ratio_below_two = rec.ratio < 2.0;

    rec.oracle_ok = true;
    if (index < config.oracle_instances) {
      const double step = config.grid_step > 0.0 ? config.grid_step : default_grid_step(tx);
      rec.t_oracle = oracle_min_finish(instance, g, step);
      rec.oracle_ok = std::fabs(rec.t_off - *rec.t_oracle) <= 2.0 * step;
    }
    rec.baseline_match = !config.inflate_gamma ||
                         std::fabs(rec.t_off - rec.t_baseline) <= kBaselineRel * rec.t_baseline;

    rec.ordering = rec.t_baseline <= rec.t_off * (1.0 + kOrderSlack) &&
                   rec.t_off <= rec.t_online * (1.0 + kOrderSlack);

    const Tolerance tol{};
    rec.feasible_off = check_feasibility(off.policy, instance, g, tol).feasible;
    rec.feasible_online = check_feasibility(on.policy, instance, g, tol).feasible;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config.spec);
  ExperimentResult result;
  result.records.resize(config.instances);

  std::atomic<std::size_t> next{0};
  std::mutex fail_mu;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < config.instances; i = next++) {
        TraceSpec spec = config.spec;
        spec.seed = mix_seed(config.spec.seed, i);
        ProblemInstance inst = generate_instance(spec);
        if (config.inflate_gamma) {
          const LogRate g(inst.rate());
          const double tb =
              baseline::min_finish_unconstrained(inst.tx(), g, inst.bits(), 0.0).finish();
          inst = inst.with_initial_on_time(std::fmax(inst.initial_on_time(), 1.5 * tb + 1.0));
        }
        result.records[i] = evaluate_instance(inst, config, i, spec.seed);
      }
    } catch (...) {
      std::lock_guard lock(fail_mu);
      if (!failure) failure = std::current_exception();
    }
  };

  const unsigned n = std::max(1u, config.threads);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  auto& s = result.summary;
  s.instances = result.records.size();
  for (const auto& r : result.records) {
    if (!r.error.empty()) ++s.errors;
    if (!r.all_pass()) ++s.failures;
    if (!r.error.empty()) continue;
    s.max_ratio = std::fmax(s.max_ratio, r.ratio);
    s.max_iterations = std::max(s.max_iterations, r.iterations);
    if (r.t_oracle) s.max_oracle_gap = std::fmax(s.max_oracle_gap, std::fabs(r.t_off - *r.t_oracle));
    if (config.inflate_gamma) {
      s.max_baseline_gap =
          std::fmax(s.max_baseline_gap, std::fabs(r.t_off - r.t_baseline) / r.t_baseline);
    }
  }
  return result;
}

std::string csv_header() {
  return "index,seed,digest,tx_arrivals,gamma0,bits,t_off,t_online,t_oracle,t_baseline,ratio,"
         "basis,iterations,iteration_bound,structure,monotone_power,no_idle,binding_switches,"
         "duration_rule,duration_growth,iteration_bound_ok,tau_q,online_monotone,online_energy_rule,"
         "online_start_early,ratio_below_two,oracle_ok,baseline_match,ordering,feasible_off,"
         "feasible_online,error,timestamp";
}

std::string to_csv_row(const ExperimentRecord& r, const std::string& timestamp) {
  std::string row;
  auto add = [&row](const std::string& v) {
    if (!row.empty()) row += ',';
    row += v;
  };
  auto flag = [&add](bool b) { add(b ? "1" : "0"); };
  add(std::to_string(r.index));
  add(std::to_string(r.seed));
  add(r.digest);
  add(std::to_string(r.tx_arrivals));
  add(fmt(r.gamma0));
  add(fmt(r.bits));
  add(fmt(r.t_off));
  add(fmt(r.t_online));
  add(r.t_oracle ? fmt(*r.t_oracle) : "");
  add(fmt(r.t_baseline));
  add(fmt(r.ratio));
  add(std::string(online::to_string(r.basis)));
  add(std::to_string(r.iterations));
  add(std::to_string(r.iteration_bound));
  for (bool b : {r.structure, r.monotone_power, r.no_idle, r.binding_switches, r.duration_rule,
                 r.duration_growth, r.iteration_bound_ok, r.tau_q, r.online_monotone, r.online_energy_rule,
                 r.online_start_early, r.ratio_below_two, r.oracle_ok, r.baseline_match, r.ordering,
                 r.feasible_off, r.feasible_online}) {
    flag(b);
  }
  add(csv_quote(r.error));
  add(csv_quote(timestamp));
  return row;
}

std::string to_csv(const ExperimentResult& result, const std::string& timestamp) {
  std::string out = csv_header() + "\n";
  for (const auto& r : result.records) out += to_csv_row(r, timestamp) + "\n";
  return out;
}

}  // namespace ehsched::lab
