#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ehsched/lab.hpp"
#include "ehsched/model.hpp"

// JSON documents for instances, policies, trace specs and experiment configs.
//
//   instance  {"bits", "rx_power", "rate": {"kind": "log2"|"ln", "scale"},
//              "tx": [{"t", "e"}, ...], "rx": [{"t", "e"}, ...]}
//   policy    {"segments": [{"start", "end", "power"}, ...]}
//
// Malformed documents raise ErrorCode::Io; well-formed documents with invalid
// values raise the model's own errors.
namespace ehsched::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

ProblemInstance parse_instance(std::string_view json);
std::string to_json(const ProblemInstance& instance, int indent = 2);
ProblemInstance load_instance(const std::filesystem::path& path);

TransmissionPolicy parse_policy(std::string_view json);
std::string to_json(const TransmissionPolicy& policy, int indent = 2);
TransmissionPolicy load_policy(const std::filesystem::path& path);

lab::TraceSpec parse_trace_spec(std::string_view json);
std::string to_json(const lab::TraceSpec& spec, int indent = 2);

lab::ExperimentConfig parse_experiment_config(std::string_view json);
std::string to_json(const lab::ExperimentConfig& config, int indent = 2);

/// FNV-1a over the compact instance JSON, as 16 hex digits.
std::string digest(const ProblemInstance& instance);

}  // namespace ehsched::io
