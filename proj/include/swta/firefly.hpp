#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "swta/dynamics.hpp"
#include "swta/layout.hpp"
#include "swta/pattern.hpp"

namespace swta {

enum class Polarity { Excitatory, Inhibitory };

struct Firefly {
  Point position;
  Polarity polarity = Polarity::Excitatory;
  double brightness = 0.0;
};

struct SwarmParams {
  double b = 0.5;       // base attractiveness
  double gamma = 1.0;   // attraction decay, 1 / distance^2 (unit square)
  double eta = 0.0;     // amplitude of the uniform jitter
  double d_min = 0.02;  // minimum separation after a settle pass
  std::size_t steps = 5;  // swarm steps per presented pattern
  std::uint64_t seed = 0;
  double excit_fraction = 0.7;
  std::size_t population_factor = 4;  // flies per neuron

  // Weight synthesis. Kernel widths are in grid pitches; the inhibitory cap
  // is a fraction of the saturation ceiling v.
  double sigma_exc = 1.5;
  double sigma_inh = 2.0;
  double w_inh_max = 0.5;

  bool reset_per_pattern = false;

  void validate() const;
};

struct FireflyPopulation {
  std::vector<Firefly> flies;
  SwarmParams params;
  std::mt19937_64 rng;

  std::size_t count(Polarity p) const;
};

/// `count` flies uniform in the unit square; the first
/// round(excit_fraction * count) are excitatory. Seeded from params.seed.
FireflyPopulation make_population(std::size_t count, const SwarmParams& params);

/// b * exp(-gamma r^2).
double brightness(double b, double gamma, double r);

/// x_i + b exp(-gamma r^2) (x_j - x_i) + eta (u - 1/2) per coordinate,
/// clipped to the unit square. Two uniforms are drawn from `rng` per call.
Point move(Point xi, Point xj, const SwarmParams& params, std::mt19937_64& rng);

struct SettleReport {
  std::size_t sweeps = 0;
  bool converged = true;
};

/// Pushes apart pairs closer than d_min (symmetric split along their
/// separation, seeded random direction for coincident flies), at most 100
/// sweeps.
FireflyPopulation enforce_min_distance(FireflyPopulation pop, SettleReport* report = nullptr);

/// Brightness of each fly from the activity of its nearest cell, one
/// in-place pass of moves toward every strictly brighter fly (ascending
/// index order), then enforce_min_distance.
FireflyPopulation swarm_step(FireflyPopulation pop, const Pattern& activity, const GridLayout& layout,
                             SettleReport* report = nullptr);

/// Signed connection matrix from the settled population. Each fly adds a
/// Gaussian kernel, centred on the fly, to the column of its nearest cell
/// (+ for excitatory, - for inhibitory). Rows are then scaled so their
/// positive parts sum to 1 and clamped to [-w_inh_max * v, v]; diagonal zero.
WeightMatrix synthesize_weights(const FireflyPopulation& pop, const GridLayout& layout, double v = 1.0);

/// One row per fly: x,y,polarity(E/I),brightness.
void write_population_csv(const FireflyPopulation& pop, const std::filesystem::path& path);
std::vector<Firefly> read_population_csv(const std::filesystem::path& path);

}  // namespace swta
