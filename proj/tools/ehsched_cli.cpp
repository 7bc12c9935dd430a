#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ehsched/error.hpp"
#include "ehsched/io.hpp"
#include "ehsched/lab.hpp"
#include "ehsched/offline.hpp"
#include "ehsched/online.hpp"

using namespace ehsched;
using nlohmann::json;

namespace {

// Exit codes: 0 success, 1 an invariant failed, 2 bad input or solver error.
constexpr int kInvariantFailed = 1;
constexpr int kError = 2;

struct Options {
  std::string rate;
  double tol = 1e-6;
  bool json = false;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ehsched");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("EH_SCHED_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

ProblemInstance load(const std::string& path, const Options& opt) {
  auto inst = io::load_instance(path);
  spdlog::debug("loaded {}: {} tx arrivals, {} rx arrivals, B_0={}", path, inst.tx().size(), inst.rx().size(),
                inst.bits());
  if (opt.rate == "log2") return inst.with_rate({LogBase::Two, inst.rate().scale});
  if (opt.rate == "ln") return inst.with_rate({LogBase::Natural, inst.rate().scale});
  return inst;
}

json policy_json(const TransmissionPolicy& p) { return json::parse(io::to_json(p)); }

void print_policy(const TransmissionPolicy& p) {
  for (const auto& s : p.segments()) {
    std::cout << "  [" << s.start << ", " << s.end << "]  power " << s.power << "\n";
  }
}

int solve_offline(const std::string& path, const Options& opt) {
  const auto inst = load(path, opt);
  const LogRate g(inst.rate());
  const auto off = offline::off_solve(inst, g);
  const auto st = offline::verify_structure(off.policy, inst, g, opt.tol);
  const auto feas = check_feasibility(off.policy, inst, g);
  const bool ok = st.all_pass() && feas.feasible;
  if (!ok) spdlog::error("offline policy fails its invariants");
  if (opt.json) {
    std::cout << json{{"finish", off.finish()},
                      {"start", off.policy.start()},
                      {"iterations", off.iterations},
                      {"tau_q", off.tau_q},
                      {"structure_ok", st.all_pass()},
                      {"feasible", feas.feasible},
                      {"policy", policy_json(off.policy)}}
                     .dump(2)
              << "\n";
  } else {
    std::cout.precision(12);
    std::cout << "T_off " << off.finish() << " (start " << off.policy.start() << ", " << off.iterations
              << " pull-back iterations)\n";
    print_policy(off.policy);
    std::cout << "structure " << (st.all_pass() ? "ok" : "FAILED") << ", feasibility "
              << (feas.feasible ? "ok" : "FAILED") << "\n";
  }
  return ok ? 0 : kInvariantFailed;
}

int solve_online(const std::string& path, const Options& opt) {
  const auto inst = load(path, opt);
  const LogRate g(inst.rate());
  const auto on = online::run_online(inst, g);
  const auto ratio = online::competitive_ratio(inst, g);
  const auto feas = check_feasibility(on.policy, inst, g);
  bool ok = feas.feasible;
  if (ratio.basis == online::RatioBasis::ExactOffline && !(ratio.value < 2.0)) ok = false;
  if (!ok) spdlog::error("online policy fails its invariants");
  if (opt.json) {
    json history = json::array();
    for (const auto& h : on.power_history) history.push_back({{"epoch", h.epoch}, {"power", h.power}});
    std::cout << json{{"start", on.t_start},
                      {"finish", on.t_finish},
                      {"ratio", ratio.value},
                      {"basis", std::string(online::to_string(ratio.basis))},
                      {"reference", ratio.t_reference},
                      {"feasible", feas.feasible},
                      {"power_history", history},
                      {"policy", policy_json(on.policy)}}
                     .dump(2)
              << "\n";
  } else {
    std::cout.precision(12);
    std::cout << "T_start " << on.t_start << ", T_online " << on.t_finish << "\n";
    print_policy(on.policy);
    std::cout << "ratio " << ratio.value << " (" << online::to_string(ratio.basis) << ", reference "
              << ratio.t_reference << "), feasibility " << (feas.feasible ? "ok" : "FAILED") << "\n";
  }
  return ok ? 0 : kInvariantFailed;
}

int run_oracle(const std::string& path, double grid, const Options& opt) {
  const auto inst = load(path, opt);
  const double step = grid > 0.0 ? grid : lab::default_grid_step(inst.tx());
  const double t = lab::oracle_min_finish(inst, step);
  if (opt.json) {
    std::cout << json{{"finish", t}, {"grid", step}}.dump(2) << "\n";
  } else {
    std::cout.precision(12);
    std::cout << "oracle finish " << t << " (grid " << step << ")\n";
  }
  return 0;
}

int verify(const std::string& inst_path, const std::string& policy_path, const Options& opt) {
  const auto inst = load(inst_path, opt);
  const auto policy = io::load_policy(policy_path);
  const LogRate g(inst.rate());
  const auto feas = check_feasibility(policy, inst, g, {1e-7, opt.tol});
  std::optional<offline::StructureReport> st;
  if (inst.single_rx_at_zero()) st = offline::verify_structure(policy, inst, g, opt.tol);
  if (opt.json) {
    json out{{"feasible", feas.feasible},
             {"bits_delivered", feas.bits_delivered},
             {"worst_energy_violation", feas.worst_energy_violation},
             {"worst_time_violation", feas.worst_time_violation}};
    if (feas.violating_time) out["violating_time"] = *feas.violating_time;
    if (st) out["optimal_structure"] = st->all_pass();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "feasible " << (feas.feasible ? "yes" : "no") << ", bits " << feas.bits_delivered
              << ", worst energy violation " << feas.worst_energy_violation << ", worst on-time violation "
              << feas.worst_time_violation << "\n";
    if (st) std::cout << "optimal structure " << (st->all_pass() ? "yes" : "no") << "\n";
  }
  return feas.feasible ? 0 : kInvariantFailed;
}

int generate(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out,
             const Options& opt) {
  auto spec = io::parse_trace_spec(io::read_text(spec_path));
  if (seed) spec.seed = *seed;
  if (opt.rate == "log2") spec.rate.kind = LogBase::Two;
  if (opt.rate == "ln") spec.rate.kind = LogBase::Natural;
  const auto text = io::to_json(lab::generate_instance(spec)) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    io::write_text(out, text);
  }
  return 0;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int experiment(const std::string& config_path, const std::string& out, const Options& opt) {
  auto cfg = io::parse_experiment_config(io::read_text(config_path));
  if (opt.rate == "log2") cfg.spec.rate.kind = LogBase::Two;
  if (opt.rate == "ln") cfg.spec.rate.kind = LogBase::Natural;
  cfg.tolerance = opt.tol;
  spdlog::info("running {} instances", cfg.instances);
  const auto res = lab::run_experiment(cfg);
  const auto csv = lab::to_csv(res, utc_now());
  if (out.empty()) {
    std::cout << csv;
  } else {
    io::write_text(out, csv);
  }
  const auto& s = res.summary;
  for (const auto& r : res.records) {
    if (!r.all_pass()) spdlog::warn("instance {} (seed {}) failed: {}", r.index, r.seed, r.error);
  }
  if (opt.json) {
    std::cerr << json{{"instances", s.instances},
                      {"failures", s.failures},
                      {"errors", s.errors},
                      {"max_ratio", s.max_ratio},
                      {"max_oracle_gap", s.max_oracle_gap},
                      {"max_baseline_gap", s.max_baseline_gap},
                      {"max_iterations", s.max_iterations}}
                     .dump(2)
              << "\n";
  } else {
    std::cerr << s.instances << " instances, " << s.failures << " failed, " << s.errors << " errors, max ratio "
              << s.max_ratio << ", max oracle gap " << s.max_oracle_gap << "\n";
  }
  return s.failures == 0 ? 0 : kInvariantFailed;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Transmission scheduling for energy-harvesting links"};
  app.require_subcommand(1);

  Options opt;
  std::string instance, policy, spec, config, out;
  double grid = 0.0;
  std::optional<std::uint64_t> seed;

  auto* off = app.add_subcommand("solve-offline", "Exact offline schedule");
  off->add_option("instance", instance)->required();
  auto* on = app.add_subcommand("solve-online", "Online schedule and competitive ratio");
  on->add_option("instance", instance)->required();
  auto* orc = app.add_subcommand("oracle", "Grid-search reference finish time");
  orc->add_option("instance", instance)->required();
  orc->add_option("--grid", grid, "Grid step in seconds (default: tightest gap / 50)");
  auto* ver = app.add_subcommand("verify", "Check a policy against an instance");
  ver->add_option("instance", instance)->required();
  ver->add_option("policy", policy)->required();
  auto* gen = app.add_subcommand("gen", "Draw a random instance");
  gen->add_option("--spec", spec, "Trace spec JSON")->required();
  gen->add_option("--seed", seed, "Seed override");
  gen->add_option("--out", out, "Output file (default: stdout)");
  auto* exp = app.add_subcommand("experiment", "Run a seeded campaign and write CSV");
  exp->add_option("--config", config, "Experiment config JSON")->required();
  exp->add_option("--out", out, "CSV output (default: stdout)");

  for (auto* sub : {off, on, orc, ver, gen, exp}) {
    sub->add_option("--rate", opt.rate, "Override the rate function base")->check(CLI::IsMember({"log2", "ln"}));
    sub->add_option("--tol", opt.tol, "Verification tolerance")->check(CLI::PositiveNumber);
    sub->add_flag("--json", opt.json, "Machine-readable output");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*off) return solve_offline(instance, opt);
    if (*on) return solve_online(instance, opt);
    if (*orc) return run_oracle(instance, grid, opt);
    if (*ver) return verify(instance, policy, opt);
    if (*gen) return generate(spec, seed, out, opt);
    if (*exp) return experiment(config, out, opt);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kError;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return kError;
  }
  return kError;
}
