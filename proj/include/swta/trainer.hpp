#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swta/dynamics.hpp"
#include "swta/firefly.hpp"
#include "swta/layout.hpp"
#include "swta/pattern.hpp"
#include "swta/plasticity.hpp"

namespace swta {

enum class LearnSchedule {
  AtOnset,           // sources = active set of the presented pattern
  AfterConvergence,  // sources = active set of the network response D * p
};

enum class InitMode {
  Random,     // distance-decaying kernel times uniform jitter
  HandWired,  // equal weight to every neuron within `init_neighbors` grid units
};

struct TrainerConfig {
  Shape grid = Shape::grid2d(5, 5);
  Boundary boundary = Boundary::Open;
  bool use_firefly = true;
  LearnSchedule schedule = LearnSchedule::AtOnset;
  PlasticityParams plasticity;
  SwarmParams swarm;

  double theta_act = 0.1;  // active threshold, fraction of the pattern maximum
  std::size_t pattern_count = 3;
  std::uint64_t master_seed = 1;

  InitMode init = InitMode::Random;
  std::size_t init_neighbors = 3;
  double init_sigma = 1.0;   // grid units
  double init_jitter = 0.5;  // strengths scaled by U(1 - jitter, 1 + jitter)

  std::size_t epochs = 5;
  std::size_t steps_per_presentation = 300;  // 0: run to convergence (plasticity.max_steps)
  double inhibition_gain = 0.5;              // scale of the synthesized inhibitory part
  std::size_t recall_iterations = 1;         // extra passes normalize(clamp(D x)) when > 1

  std::size_t n() const noexcept { return grid.size(); }
  void validate() const;
};

struct RecallMetrics {
  double cosine = 0.0;
  double mse = 0.0;
  double pearson = 0.0;
  std::optional<std::string> best_match_label;
};

/// Cosine, mean squared error and Pearson correlation of `output` against
/// `reference`, both normalized first (zero vectors stay zero).
RecallMetrics compare(const Pattern& output, const Pattern& reference);

struct Model {
  TrainerConfig config;
  GridLayout layout{Shape::line(1), Boundary::Open};
  WeightMatrix weights;  // plastic excitatory part, entries in [0, v]
  Matrix inhibition;     // fixed inhibitory magnitudes, >= 0
  Matrix plastic_mask;   // 1 where weights may evolve
  std::optional<FireflyPopulation> population;
  std::vector<EvolveReport> history;
  std::vector<Pattern> templates;  // distinct patterns presented so far
  std::size_t presentations = 0;

  /// weights - inhibition, the matrix the network dynamics run on.
  Matrix effective_weights() const { return weights.w - inhibition; }
  /// Throws Invariant if the plastic weights leave [0, v], lose the zero
  /// diagonal or go non-finite.
  void check_invariants() const;
};

Model init_model(const TrainerConfig& config);

/// One presentation: optional swarm update and weight synthesis, source set,
/// correlation tensor, weight evolution.
Model present_pattern(Model model, const Pattern& p);

/// `epochs` passes over `patterns` in order.
Model train(Model model, std::span<const Pattern> patterns);

struct RecallResult {
  Pattern output;
  RecallMetrics metrics;  // against the cue (recall) or the original (complete)
  std::vector<double> template_cosines;
  bool low_confidence = false;
};

/// normalize(clamp(D * cue)) through the trained network. Throws Annihilated
/// for a zero cue.
RecallResult recall(const Model& model, const Pattern& cue);

/// Recall on `original` with the masked entries zeroed; metrics are against
/// the unmasked original. A mask that removes the whole active set, or an
/// empty cue, yields a low-confidence result instead of an error.
RecallResult complete(const Model& model, const Pattern& original, std::span<const std::size_t> masked);

/// Persists W, the inhibition, the plastic mask, the population, the stored
/// templates and the config echo under `dir`.
void save_model(const Model& model, const std::filesystem::path& dir);
Model load_model(const std::filesystem::path& dir);

}  // namespace swta
