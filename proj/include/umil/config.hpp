// config.hpp
//
// Flat key-value run configuration. One document carries training,
// objective, division and generator settings so ablation sweeps are plain
// key substitutions. Unknown keys are rejected by name.

#pragma once

#include <stdexcept>
#include <string>

#include "umil/synthgen.hpp"
#include "umil/trainer.hpp"

namespace umil {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigFile {
    RunConfig run;
    GeneratorConfig gen;
};

ConfigFile parse_config(const std::string& json_text);
ConfigFile load_config(const std::string& path);

// All defaults, serialized; documents every accepted key.
std::string default_config_json();

}  // namespace umil
