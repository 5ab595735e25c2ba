#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swta/config.hpp"

namespace swta {

enum class Experiment { Evolve1D, Recall2D, Denoise, Complete, Fused, Digits };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

/// Scenario defaults an experiment starts from before config files and
/// overrides are applied.
RunConfig experiment_preset(Experiment e);

/// Summary values in insertion order plus one metrics row per stored
/// template / cue.
struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;

  double value(std::string_view key) const;  // throws Parameter when missing
  void add(std::string key, double v) { summary.emplace_back(std::move(key), v); }

  std::string to_key_value() const;
};

/// The templates an experiment trains on: M Gaussians with seeded centres,
/// or digit images for Digits.
std::vector<Pattern> experiment_templates(const RunConfig& config, Experiment e);

/// Runs one seeded scenario. With a non-empty `out_dir` every pattern,
/// matrix and population is written there (CSV + PGM) together with
/// report.txt and metrics.csv; an empty path keeps everything in memory.
ExperimentReport run_experiment(const RunConfig& config, Experiment e,
                                const std::filesystem::path& out_dir = {});

}  // namespace swta
