#pragma once

#include <string>
#include <string_view>

#include "ads/optimizer.hpp"
#include "ads/surface_gen.hpp"

namespace ads {

struct MaterialConfig {
    double youngs_modulus = 1.0;
    double poisson_ratio = 0.3;

    LameSet lame() const { return lame_from_engineering(youngs_modulus, poisson_ratio); }
};

struct GeneratorConfig {
    PerturbationSpec perturbation;
    ExtractOptions extract;
};

struct OutputConfig {
    std::string mesh = "optimized.obj";
    std::string history = "history.csv";
    std::string summary = "summary.json";
};

/// Everything a run needs. Defaults reproduce the reference constants.
struct RunConfig {
    MaterialConfig material;
    ObjectiveSpec objective;
    OptimizerOptions optimizer;
    GeneratorConfig generator;
    std::string input;  // mesh file; empty means generate from `generator`
    OutputConfig output;
};

enum class ConfigFormat { Json, Toml };

/// Parses a configuration document. Unknown keys, wrong types and invalid
/// values throw Error(Config) naming the key and, where known, the line.
RunConfig parse_config(std::string_view text, ConfigFormat format, const std::string& source = "<config>");

/// Reads a .toml or .json file (format chosen by extension).
RunConfig load_config(const std::string& path);

/// The fully resolved configuration as pretty-printed JSON. Reparsing it
/// with parse_config yields the same configuration.
std::string config_to_json(const RunConfig& config);

}  // namespace ads
