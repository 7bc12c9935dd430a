#include "ehsched/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ehsched/error.hpp"

namespace ehsched::io {

using nlohmann::json;

namespace {

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::Io, std::string("missing field '") + key + "'");
  }
  return get_or<T>(j, key, T{});
}

RateFunctionSpec rate_from(const json& j) {
  RateFunctionSpec spec;
  if (!j.is_object()) throw Error(ErrorCode::Io, "rate must be an object");
  const auto kind = get_or<std::string>(j, "kind", "log2");
  if (kind == "log2") {
    spec.kind = LogBase::Two;
  } else if (kind == "ln") {
    spec.kind = LogBase::Natural;
  } else {
    throw Error(ErrorCode::Io, "unknown rate kind '" + kind + "'");
  }
  spec.scale = get_or<double>(j, "scale", 1.0);
  return spec;
}

json rate_to(const RateFunctionSpec& spec) {
  return {{"kind", spec.kind == LogBase::Two ? "log2" : "ln"}, {"scale", spec.scale}};
}

HarvestTrace trace_from(const json& j, const char* name) {
  if (!j.is_array()) throw Error(ErrorCode::Io, std::string("'") + name + "' must be an array");
  std::vector<Arrival> out;
  for (const auto& a : j) out.push_back({get_required<double>(a, "t"), get_required<double>(a, "e")});
  return HarvestTrace(std::move(out));
}

json trace_to(const HarvestTrace& trace) {
  json out = json::array();
  for (const auto& a : trace.arrivals()) out.push_back({{"t", a.time}, {"e", a.amount}});
  return out;
}

json instance_json(const ProblemInstance& instance) {
  return {{"bits", instance.bits()},
          {"rx_power", instance.rx_power()},
          {"rate", rate_to(instance.rate())},
          {"tx", trace_to(instance.tx())},
          {"rx", trace_to(instance.rx())}};
}

json spec_json(const lab::TraceSpec& s) {
  json energy;
  if (s.energy == lab::EnergyDistribution::Uniform) {
    energy = {{"dist", "uniform"}, {"a", s.energy_a}, {"b", s.energy_b}};
  } else {
    energy = {{"dist", "exponential"}, {"mean", s.energy_a}};
  }
  return {{"horizon", s.horizon},
          {"intensity", s.intensity},
          {"energy", energy},
          {"gamma", {s.gamma_min, s.gamma_max}},
          {"bits", {s.bits_min, s.bits_max}},
          {"rx_power", s.rx_power},
          {"max_arrivals", s.max_arrivals},
          {"arrival_at_zero", s.arrival_at_zero},
          {"rate", rate_to(s.rate)},
          {"seed", s.seed}};
}

void range_from(const json& j, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
    throw Error(ErrorCode::Io, std::string("'") + key + "' must be [min, max]");
  }
  lo = r[0].get<double>();
  hi = r[1].get<double>();
}

lab::TraceSpec spec_from(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Io, "trace spec must be an object");
  lab::TraceSpec s;
  s.horizon = get_or(j, "horizon", s.horizon);
  s.intensity = get_or(j, "intensity", s.intensity);
  if (j.contains("energy")) {
    const auto& e = j.at("energy");
    const auto dist = get_or<std::string>(e, "dist", "uniform");
    if (dist == "uniform") {
      s.energy = lab::EnergyDistribution::Uniform;
      s.energy_a = get_or(e, "a", s.energy_a);
      s.energy_b = get_or(e, "b", s.energy_b);
    } else if (dist == "exponential") {
      s.energy = lab::EnergyDistribution::Exponential;
      s.energy_a = get_or(e, "mean", 1.0);
    } else {
      throw Error(ErrorCode::Io, "unknown energy distribution '" + dist + "'");
    }
  }
  range_from(j, "gamma", s.gamma_min, s.gamma_max);
  range_from(j, "bits", s.bits_min, s.bits_max);
  s.rx_power = get_or(j, "rx_power", s.rx_power);
  s.max_arrivals = get_or(j, "max_arrivals", s.max_arrivals);
  s.arrival_at_zero = get_or(j, "arrival_at_zero", s.arrival_at_zero);
  if (j.contains("rate")) s.rate = rate_from(j.at("rate"));
  s.seed = get_or(j, "seed", s.seed);
  lab::validate(s);
  return s;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

ProblemInstance parse_instance(std::string_view text) {
  const json j = parse(text);
  if (!j.is_object()) throw Error(ErrorCode::Io, "instance must be an object");
  const RateFunctionSpec rate = j.contains("rate") ? rate_from(j.at("rate")) : RateFunctionSpec{};
  return ProblemInstance(trace_from(j.value("tx", json::array()), "tx"),
                         trace_from(j.value("rx", json::array()), "rx"),
                         get_or<double>(j, "rx_power", 1.0), get_required<double>(j, "bits"), rate);
}

std::string to_json(const ProblemInstance& instance, int indent) {
  return instance_json(instance).dump(indent);
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  return parse_instance(read_text(path));
}

TransmissionPolicy parse_policy(std::string_view text) {
  const json j = parse(text);
  const json& segs = j.is_object() ? j.value("segments", json()) : j;
  if (!segs.is_array()) throw Error(ErrorCode::Io, "policy needs a 'segments' array");
  std::vector<PowerSegment> out;
  for (const auto& s : segs) {
    out.push_back({get_required<double>(s, "start"), get_required<double>(s, "end"),
                   get_required<double>(s, "power")});
  }
  return TransmissionPolicy(std::move(out));
}

std::string to_json(const TransmissionPolicy& policy, int indent) {
  json segs = json::array();
  for (const auto& s : policy.segments()) {
    segs.push_back({{"start", s.start}, {"end", s.end}, {"power", s.power}});
  }
  return json{{"segments", segs}}.dump(indent);
}

TransmissionPolicy load_policy(const std::filesystem::path& path) {
  return parse_policy(read_text(path));
}

lab::TraceSpec parse_trace_spec(std::string_view text) { return spec_from(parse(text)); }

std::string to_json(const lab::TraceSpec& spec, int indent) { return spec_json(spec).dump(indent); }

lab::ExperimentConfig parse_experiment_config(std::string_view text) {
  const json j = parse(text);
  if (!j.is_object()) throw Error(ErrorCode::Io, "experiment config must be an object");
  lab::ExperimentConfig c;
  c.instances = get_or(j, "instances", c.instances);
  if (j.contains("spec")) c.spec = spec_from(j.at("spec"));
  c.spec.seed = get_or(j, "seed", c.spec.seed);
  c.grid_step = get_or(j, "grid_step", c.grid_step);
  c.oracle_instances = get_or(j, "oracle_instances", c.oracle_instances);
  c.inflate_gamma = get_or(j, "inflate_gamma", c.inflate_gamma);
  c.tolerance = get_or(j, "tolerance", c.tolerance);
  c.threads = get_or(j, "threads", c.threads);
  if (!(c.tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (c.grid_step < 0.0) throw Error(ErrorCode::InvalidArgument, "grid_step must be >= 0");
  return c;
}

std::string to_json(const lab::ExperimentConfig& c, int indent) {
  return json{{"instances", c.instances},
              {"spec", spec_json(c.spec)},
              {"grid_step", c.grid_step},
              {"oracle_instances", c.oracle_instances},
              {"inflate_gamma", c.inflate_gamma},
              {"tolerance", c.tolerance},
              {"threads", c.threads}}
      .dump(indent);
}

std::string digest(const ProblemInstance& instance) {
  const std::string text = instance_json(instance).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ehsched::io
