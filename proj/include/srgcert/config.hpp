#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "srgcert/models.hpp"
#include "srgcert/network.hpp"

namespace srgcert {

inline constexpr int kSchemaVersion = 1;

struct ConverterConfig {
    std::string name;
    ConverterPlacement placement;
    ControllerParams controller;
    FilterParams filter;
    SeriesApproxConfig series;
    OperatingPoint setpoint;
    bool setpoint_as_power = false; ///< setpoint was given as (p, q)
};

struct FrequencySection {
    double start = 1e-2;
    double stop = 1e3;
    std::size_t count = 500;
    bool hz = false;
    bool linear = false;
};

struct AnalysisSection {
    int q = 360;
    int sweep_resolution = 21;
    int region_resolution = 201;
    double oracle_start = 1e-7;
    double oracle_stop = 1e9;
    std::size_t oracle_count = 800;
};

struct StudyConfig {
    std::string description;
    NetworkSpec network; ///< converter_nodes follows the converter list
    std::vector<ConverterConfig> converters;
    FrequencySection frequency;
    AnalysisSection analysis;
};

/// Validates and converts; throws SchemaError naming the offending path.
StudyConfig parse_config(const nlohmann::json& j);
StudyConfig load_config(const std::string& path);
nlohmann::json to_json(const StudyConfig& cfg);

} // namespace srgcert
