#pragma once

// JSON configuration files and result serialization. Every document carries
// "schema_version": 1. Sub-documents of a scenario or experiment may be
// given inline or as a path relative to the containing file.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "hjscc/codec.hpp"
#include "hjscc/dmc.hpp"
#include "hjscc/oracle.hpp"
#include "hjscc/region.hpp"

namespace hjscc::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Errc::Parse with "<name>:<line>:<column>: ..." on malformed input.
json parse_json(const std::string& text, const std::string& name = "<input>");
json load_json(const std::filesystem::path& path);

SourceModel source_from_json(const json& j);
AuxChannel aux_from_json(const json& j);
Channel channel_from_json(const json& j);
ScenarioConfig scenario_from_json(const json& j, const std::filesystem::path& base = {});
codec::SimParams sim_from_json(const json& j);

struct Experiment {
    ScenarioConfig scenario;
    AuxChannel aux;
    codec::SimParams sim;
};
Experiment experiment_from_json(const json& j, const std::filesystem::path& base = {});

json to_json(const SourceModel& src);
json to_json(const AuxChannel& aux);
json to_json(const Channel& ch);
json to_json(const ScenarioConfig& sc);
json to_json(const codec::SimParams& sp);
json to_json(const CapacityResult& cap);
json to_json(const codec::ExperimentSummary& sum);
json to_json(const oracle::OracleReport& rep);

}  // namespace hjscc::io
