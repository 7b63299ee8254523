#pragma once

#include "qdcav/dynamics.hpp"
#include "qdcav/phonon_propagate.hpp"

#include <string>
#include <string_view>

namespace qdcav {

// Complete description of one simulation run. Parsed from flat key-value
// files with dotted section keys (e.g. drive.pulse1.area_pi = 15.95);
// unknown keys are rejected. Everything is deterministic; the flag below
// is an explicit contract of that.
struct RunConfig {
    DriveConfig drive = re_paper_drive();
    CavitySpec cavity;
    LossRates losses;
    SolverConfig solver;
    PhononSpec phonons;
    CompressionConfig compression;
    std::string output_path;
    bool deterministic = true;
    int jobs = 0;  // worker threads for sweeps; 0 = hardware default
};

// Named full-run presets: "super-paper" and "re-paper".
RunConfig preset_config(std::string_view name);

// Parses "<number>" or "<number>pi" (e.g. "30pi" or "0.25pi").
double parse_value_with_pi(std::string_view text);

// Sets one dotted key; throws ConfigError naming the key on any problem.
void apply_config_key(RunConfig& cfg, std::string_view key, std::string_view value);

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(std::string_view text, const std::string& origin = "<config>");

// Cross-field validation; throws ConfigError naming the offending key.
void validate_config(const RunConfig& cfg);

}  // namespace qdcav
