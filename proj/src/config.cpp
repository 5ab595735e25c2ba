#include "swta/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "swta/error.hpp"

namespace swta {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  fail(ErrorKind::Config, "invalid value '" + value + "' for " + key + " (expected " + expected + ")");
}

double to_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) bad_value(key, v, "a real number");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); }))
    bad_value(key, v, "a non-negative integer");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    bad_value(key, v, "a non-negative integer");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true or false");
}

// shortest text that parses back to the same double
std::string real_str(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Shape to_shape(const std::string& key, const std::string& v) {
  const auto x = v.find('x');
  if (x == std::string::npos) {
    const auto n = to_uint(key, v);
    if (n == 0) bad_value(key, v, "a positive size");
    return Shape::line(n);
  }
  const auto r = to_uint(key, v.substr(0, x));
  const auto c = to_uint(key, v.substr(x + 1));
  if (r == 0 || c == 0) bad_value(key, v, "ROWSxCOLS with positive sizes");
  return Shape::grid2d(r, c);
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Binding {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REAL_KEY(NAME, FIELD, HELP)                                                          \
  Binding {                                                                                  \
    {NAME, HELP, false}, [](RunConfig& c, const std::string& v) { c.FIELD = to_real(NAME, v); }, \
        [](const RunConfig& c) { return real_str(c.FIELD); }                                 \
  }
#define UINT_KEY(NAME, FIELD, HELP)                                                             \
  Binding {                                                                                     \
    {NAME, HELP, false},                                                                        \
        [](RunConfig& c, const std::string& v) { c.FIELD = static_cast<decltype(c.FIELD)>(to_uint(NAME, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                              \
  }
#define BOOL_KEY(NAME, FIELD, HELP)                                                           \
  Binding {                                                                                   \
    {NAME, HELP, false}, [](RunConfig& c, const std::string& v) { c.FIELD = to_bool(NAME, v); }, \
        [](const RunConfig& c) { return std::string(c.FIELD ? "true" : "false"); }            \
  }

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = {
      Binding{{"grid", "network shape: ROWSxCOLS grid or a bare count for a line", false},
              [](RunConfig& c, const std::string& v) { c.trainer.grid = to_shape("grid", v); },
              [](const RunConfig& c) { return to_string(c.trainer.grid); }},
      Binding{{"boundary", "open | periodic", false},
              [](RunConfig& c, const std::string& v) {
                if (v == "open") c.trainer.boundary = Boundary::Open;
                else if (v == "periodic") c.trainer.boundary = Boundary::Periodic;
                else bad_value("boundary", v, "open or periodic");
              },
              [](const RunConfig& c) {
                return std::string(c.trainer.boundary == Boundary::Open ? "open" : "periodic");
              }},
      BOOL_KEY("use_firefly", trainer.use_firefly, "synthesize topology with the firefly swarm"),
      Binding{{"learn_schedule", "at_onset | after_convergence", false},
              [](RunConfig& c, const std::string& v) {
                if (v == "at_onset") c.trainer.schedule = LearnSchedule::AtOnset;
                else if (v == "after_convergence") c.trainer.schedule = LearnSchedule::AfterConvergence;
                else bad_value("learn_schedule", v, "at_onset or after_convergence");
              },
              [](const RunConfig& c) {
                return std::string(c.trainer.schedule == LearnSchedule::AtOnset ? "at_onset"
                                                                                : "after_convergence");
              }},
      REAL_KEY("alpha", trainer.plasticity.alpha, "unspecific growth rate"),
      REAL_KEY("beta", trainer.plasticity.beta, "cooperation gain"),
      REAL_KEY("v", trainer.plasticity.v, "weight saturation ceiling"),
      REAL_KEY("dt", trainer.plasticity.dt, "Euler step"),
      UINT_KEY("max_steps", trainer.plasticity.max_steps, "Euler step budget for a full evolution"),
      REAL_KEY("tol", trainer.plasticity.tol, "convergence threshold on max |dw/dt|"),
      UINT_KEY("steps_per_presentation", trainer.steps_per_presentation,
               "Euler steps per presented pattern (0 = run to convergence)"),
      REAL_KEY("swarm.b", trainer.swarm.b, "base attractiveness"),
      REAL_KEY("swarm.gamma", trainer.swarm.gamma, "attraction decay rate"),
      REAL_KEY("swarm.eta", trainer.swarm.eta, "movement jitter amplitude"),
      REAL_KEY("swarm.d_min", trainer.swarm.d_min, "minimum fly separation"),
      UINT_KEY("swarm.steps", trainer.swarm.steps, "swarm steps per presented pattern"),
      REAL_KEY("swarm.excit_fraction", trainer.swarm.excit_fraction, "fraction of excitatory flies"),
      UINT_KEY("swarm.population_factor", trainer.swarm.population_factor, "flies per neuron"),
      REAL_KEY("swarm.sigma_exc", trainer.swarm.sigma_exc, "excitatory kernel width (grid pitches)"),
      REAL_KEY("swarm.sigma_inh", trainer.swarm.sigma_inh, "inhibitory kernel width (grid pitches)"),
      REAL_KEY("swarm.w_inh_max", trainer.swarm.w_inh_max, "inhibitory cap as a fraction of v"),
      BOOL_KEY("swarm.reset_per_pattern", trainer.swarm.reset_per_pattern,
               "re-seed the population for every pattern"),
      REAL_KEY("inhibition_gain", trainer.inhibition_gain, "scale of the synthesized inhibition"),
      REAL_KEY("theta_act", trainer.theta_act, "active threshold as a fraction of the pattern maximum"),
      UINT_KEY("patterns", trainer.pattern_count, "number of stored patterns M"),
      UINT_KEY("seed", trainer.master_seed, "master seed"),
      Binding{{"init", "random | handwired", false},
              [](RunConfig& c, const std::string& v) {
                if (v == "random") c.trainer.init = InitMode::Random;
                else if (v == "handwired") c.trainer.init = InitMode::HandWired;
                else bad_value("init", v, "random or handwired");
              },
              [](const RunConfig& c) {
                return std::string(c.trainer.init == InitMode::Random ? "random" : "handwired");
              }},
      UINT_KEY("init.neighbors", trainer.init_neighbors, "hand-wired reach in grid units"),
      REAL_KEY("init.sigma", trainer.init_sigma, "random init kernel width (grid units)"),
      REAL_KEY("init.jitter", trainer.init_jitter, "random init strength jitter"),
      UINT_KEY("epochs", trainer.epochs, "passes over the training patterns"),
      UINT_KEY("recall_iterations", trainer.recall_iterations, "equilibrium passes per recall"),
      REAL_KEY("noise_level", experiment.noise_level, "cue noise standard deviation"),
      REAL_KEY("mask_fraction", experiment.mask_fraction, "fraction of entries masked for completion"),
      REAL_KEY("pattern_sigma", experiment.pattern_sigma, "Gaussian template width (grid units)"),
      REAL_KEY("fuse_weak_weight", experiment.fuse_weak_weight, "weight of the weaker fused input"),
      UINT_KEY("evolve_row", experiment.evolve_row, "neuron whose weight vector evolve1d exports"),
      Binding{{"digits_dir", "directory holding digit_<label>.pgm templates", false},
              [](RunConfig& c, const std::string& v) { c.experiment.digits_dir = v; },
              [](const RunConfig& c) { return c.experiment.digits_dir.string(); }},
      Binding{{"digits", "comma list of digit labels to store", true},
              [](RunConfig& c, const std::string& v) {
                auto l = to_list(v);
                if (l.empty()) bad_value("digits", v, "a non-empty comma list");
                c.experiment.digits = std::move(l);
              },
              [](const RunConfig& c) {
                std::string s;
                for (const auto& d : c.experiment.digits) s += (s.empty() ? "" : ",") + d;
                return s;
              }},
  };
  return table;
}

#undef REAL_KEY
#undef UINT_KEY
#undef BOOL_KEY

const Binding* find_binding(std::string_view key) {
  const auto& t = bindings();
  const auto it = std::find_if(t.begin(), t.end(), [&](const Binding& b) { return b.key.name == key; });
  return it == t.end() ? nullptr : &*it;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& b : bindings()) out.push_back(b.key);
    return out;
  }();
  return keys;
}

bool is_config_key(std::string_view key) { return find_binding(key) != nullptr; }

std::vector<ConfigEntry> parse_config_text(std::string_view text, const std::string& origin) {
  std::vector<ConfigEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Config, origin + ":" + std::to_string(no) + ": expected `key = value`");
    ConfigEntry e{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), no};
    if (e.key.empty()) fail(ErrorKind::Config, origin + ":" + std::to_string(no) + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const Binding* b = find_binding(key);
  if (!b) fail(ErrorKind::Config, "unknown config key '" + key + "'");
  b->set(config, value);
}

std::string get_setting(const RunConfig& config, const std::string& key) {
  const Binding* b = find_binding(key);
  if (!b) fail(ErrorKind::Config, "unknown config key '" + key + "'");
  return b->get(config);
}

std::string to_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& b : bindings()) out += b.key.name + " = " + b.get(config) + "\n";
  return out;
}

}  // namespace swta
