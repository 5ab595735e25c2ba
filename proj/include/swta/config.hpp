#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "swta/trainer.hpp"

namespace swta {

/// Scenario parameters used by the scripted experiments.
struct ExperimentSettings {
  double noise_level = 0.2;
  double mask_fraction = 0.3;
  double pattern_sigma = 1.0;      // grid units
  double fuse_weak_weight = 0.5;   // weight of the weaker input in the unequal fuse
  std::size_t evolve_row = 12;     // neuron whose weight vector evolve1d exports
  std::filesystem::path digits_dir = "data/digits";
  std::vector<std::string> digits = {"0", "1"};
};

struct RunConfig {
  TrainerConfig trainer;
  ExperimentSettings experiment;
};

// Config files are flat `key = value` lines; `#` starts a comment.

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct ConfigKey {
  std::string name;
  std::string help;
  bool list_valued = false;  // accepts comma lists natively
};

/// Every recognized key, in documentation order.
const std::vector<ConfigKey>& config_keys();
bool is_config_key(std::string_view key);

/// Splits text into entries. Throws Config on a line without `=`.
std::vector<ConfigEntry> parse_config_text(std::string_view text, const std::string& origin);

/// Throws Config for an unknown key or an unparsable value.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
std::string get_setting(const RunConfig& config, const std::string& key);

/// All keys with their current values; parse_config_text + apply_setting
/// reproduces `config` exactly.
std::string to_config_text(const RunConfig& config);

}  // namespace swta
