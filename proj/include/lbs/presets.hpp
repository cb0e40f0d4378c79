#pragma once

#include "lbs/study.hpp"

#include <string>
#include <vector>

namespace lbs {

struct Preset {
  std::string name;
  std::string description;
  std::string config;  // config file text
};

const std::vector<Preset>& presets();

/// Throws ConfigError for unknown names.
const Preset& find_preset(const std::string& name);

StudyConfig preset_config(const std::string& name);

}  // namespace lbs
