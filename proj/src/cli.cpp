#include "swta/cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "swta/config.hpp"
#include "swta/experiment.hpp"
#include "swta/image_io.hpp"
#include "swta/trainer.hpp"

namespace swta {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Parameter:
    case ErrorKind::EmptyPopulation:
    case ErrorKind::MissingPolarity:
      return kConfig;
    case ErrorKind::Shape:
    case ErrorKind::Annihilated:
    case ErrorKind::MalformedHeader:
    case ErrorKind::MalformedData:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::Unreadable:
    case ErrorKind::Io:
      return kData;
    case ErrorKind::Invariant:
      return kInternal;
  }
  return kInternal;
}

namespace {

// Keys only the command line understands; everything else goes to RunConfig.
constexpr const char* kExperimentKey = "experiment";
constexpr const char* kSeedsKey = "seeds";

struct CommonOptions {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

std::string keys_footer() {
  std::ostringstream s;
  s << "Config keys (file lines `key = value`, or --set key=value):\n";
  for (const auto& k : config_keys()) s << "  " << std::left << std::setw(26) << k.name << k.help << '\n';
  s << "  " << std::left << std::setw(26) << kExperimentKey << "experiment name (experiment, sweep)\n";
  s << "  " << std::left << std::setw(26) << kSeedsKey << "comma list of master seeds (sweep)\n";
  s << "Exit codes: 0 ok, 1 usage, 2 config, 3 data, 4 internal invariant.";
  return s.str();
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_config = true) {
  if (with_config) {
    cmd->add_option("--config", o.config_path, "key = value config file");
    cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
    cmd->add_option("--set", o.sets, "override, repeatable: --set key=value")->allow_extra_args(false);
  }
  cmd->add_option("--out", o.out, "output directory")->required();
  cmd->footer(keys_footer());
}

std::vector<ConfigEntry> collect_entries(const CommonOptions& o) {
  std::vector<ConfigEntry> entries;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) fail(ErrorKind::Config, "cannot read config file '" + o.config_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    entries = parse_config_text(text.str(), o.config_path);
  }
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::Config, "--set expects key=value, got '" + s + "'");
    auto more = parse_config_text(s, "--set");
    entries.insert(entries.end(), more.begin(), more.end());
  }
  for (const auto& e : entries)
    if (e.key != kExperimentKey && e.key != kSeedsKey && !is_config_key(e.key))
      fail(ErrorKind::Config, "unknown config key '" + e.key + "'");
  return entries;
}

std::optional<std::string> last_value(const std::vector<ConfigEntry>& entries, const std::string& key) {
  std::optional<std::string> v;
  for (const auto& e : entries)
    if (e.key == key) v = e.value;
  return v;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::uint64_t parse_seed(const std::string& s) {
  RunConfig probe;
  apply_setting(probe, "seed", s);
  return probe.trainer.master_seed;
}

Experiment resolve_experiment(const std::string& positional, const std::vector<ConfigEntry>& entries) {
  std::string name = positional;
  if (name.empty()) name = last_value(entries, kExperimentKey).value_or("");
  if (name.empty()) fail(ErrorKind::Config, "no experiment named (positional argument or `experiment` key)");
  const auto e = parse_experiment(name);
  if (!e) {
    std::string all;
    for (auto x : all_experiments()) all += (all.empty() ? "" : " | ") + std::string(to_string(x));
    fail(ErrorKind::Config, "unknown experiment '" + name + "' (expected " + all + ")");
  }
  return *e;
}

// Applies every non-CLI entry; entries whose value is a comma list on a
// scalar key become sweep axes when `axes` is given, else they are errors.
void apply_entries(RunConfig& c, const std::vector<ConfigEntry>& entries,
                   std::vector<std::pair<std::string, std::vector<std::string>>>* axes) {
  const auto& keys = config_keys();
  for (const auto& e : entries) {
    if (e.key == kExperimentKey || e.key == kSeedsKey) continue;
    const bool list_key = std::any_of(keys.begin(), keys.end(),
                                      [&](const ConfigKey& k) { return k.name == e.key && k.list_valued; });
    if (axes && !list_key && e.value.find(',') != std::string::npos) {
      auto values = split_list(e.value);
      for (const auto& v : values) {
        RunConfig probe = c;
        apply_setting(probe, e.key, v);  // reject bad values before any run starts
      }
      auto it = std::find_if(axes->begin(), axes->end(), [&](const auto& a) { return a.first == e.key; });
      if (it == axes->end()) axes->emplace_back(e.key, std::move(values));
      else it->second = std::move(values);
      continue;
    }
    apply_setting(c, e.key, e.value);
    if (axes) std::erase_if(*axes, [&](const auto& a) { return a.first == e.key; });
  }
}

void print_notes(const ExperimentReport& r) {
  for (const auto& n : r.notes) std::cerr << "warning: " << n << '\n';
}

std::vector<Pattern> load_input_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::Unreadable, "input directory '" + dir.string() + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".csv")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorKind::Unreadable, "no .pgm or .csv patterns in '" + dir.string() + "'");
  std::vector<Pattern> out;
  for (const auto& f : files) out.push_back(load_image(f));
  return out;
}

int cmd_train(const CommonOptions& o, const std::string& input) {
  const auto entries = collect_entries(o);
  RunConfig c;
  apply_entries(c, entries, nullptr);
  if (o.seed) c.trainer.master_seed = *o.seed;
  auto patterns = load_input_dir(input);
  for (const auto& p : patterns)
    if (p.size() != c.trainer.n())
      fail(ErrorKind::DimensionMismatch, "pattern '" + p.label().value_or("?") + "' has " +
                                             std::to_string(p.size()) + " entries but grid is " +
                                             to_string(c.trainer.grid) + " (set `grid`)");
  for (auto& p : patterns) p = Pattern(std::vector<double>(p.values().begin(), p.values().end()), c.trainer.grid, p.label());
  c.trainer.pattern_count = patterns.size();
  const Model m = train(init_model(c.trainer), patterns);
  save_model(m, o.out);
  std::size_t unconverged = 0;
  for (const auto& h : m.history) unconverged += h.converged ? 0 : 1;
  std::cout << "trained " << patterns.size() << " pattern(s), " << m.presentations << " presentation(s), "
            << unconverged << " without convergence; model in " << o.out << '\n';
  return kOk;
}

int cmd_recall(const CommonOptions& o, const std::string& model_dir, const std::string& cue_path) {
  const Model m = load_model(model_dir);
  Pattern cue = load_image(cue_path);
  if (cue.size() != m.config.n())
    fail(ErrorKind::DimensionMismatch, "cue '" + cue_path + "' has " + std::to_string(cue.size()) +
                                           " entries, model has " + std::to_string(m.config.n()));
  cue = Pattern(std::vector<double>(cue.values().begin(), cue.values().end()), m.config.grid, cue.label());
  const RecallResult r = recall(m, cue);
  fs::create_directories(o.out);
  save_image(r.output, fs::path(o.out) / "output.csv");
  save_image(r.output, fs::path(o.out) / "output.pgm", {PgmEncoding::Binary, true});
  std::ofstream out(fs::path(o.out) / "metrics.txt");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "cosine = " << r.metrics.cosine << "\nmse = " << r.metrics.mse << "\npearson = " << r.metrics.pearson
      << "\nbest_match = " << r.metrics.best_match_label.value_or("") << "\nlow_confidence = "
      << (r.low_confidence ? "true" : "false") << '\n';
  for (std::size_t k = 0; k < r.template_cosines.size(); ++k)
    out << "template_cosine." << m.templates[k].label().value_or("#" + std::to_string(k)) << " = "
        << r.template_cosines[k] << '\n';
  if (!out) fail(ErrorKind::Io, "cannot write metrics under '" + o.out + "'");
  std::cout << "best match: " << r.metrics.best_match_label.value_or("(none)") << ", cosine to cue "
            << r.metrics.cosine << '\n';
  return kOk;
}

int cmd_experiment(const CommonOptions& o, const std::string& name) {
  const auto entries = collect_entries(o);
  const Experiment e = resolve_experiment(name, entries);
  RunConfig c = experiment_preset(e);
  apply_entries(c, entries, nullptr);
  if (o.seed) c.trainer.master_seed = *o.seed;
  const ExperimentReport r = run_experiment(c, e, o.out);
  print_notes(r);
  std::cout << r.to_key_value();
  return kOk;
}

struct SweepRun {
  std::vector<std::string> axis_values;
  std::uint64_t seed = 0;
};

int cmd_sweep(const CommonOptions& o, const std::string& name, std::size_t jobs) {
  const auto entries = collect_entries(o);
  const Experiment e = resolve_experiment(name, entries);
  RunConfig base = experiment_preset(e);
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  apply_entries(base, entries, &axes);

  std::vector<std::uint64_t> seeds;
  if (const auto s = last_value(entries, kSeedsKey))
    for (const auto& v : split_list(*s)) seeds.push_back(parse_seed(v));
  if (seeds.empty()) seeds.push_back(o.seed.value_or(base.trainer.master_seed));

  // first axis varies slowest, seeds fastest
  std::vector<SweepRun> runs{{}};
  for (const auto& [key, values] : axes) {
    std::vector<SweepRun> next;
    for (const auto& r : runs)
      for (const auto& v : values) {
        SweepRun x = r;
        x.axis_values.push_back(v);
        next.push_back(std::move(x));
      }
    runs = std::move(next);
  }
  {
    std::vector<SweepRun> next;
    for (const auto& r : runs)
      for (auto s : seeds) {
        SweepRun x = r;
        x.seed = s;
        next.push_back(std::move(x));
      }
    runs = std::move(next);
  }

  const fs::path out(o.out);
  fs::create_directories(out);
  std::vector<std::optional<ExperimentReport>> reports(runs.size());
  std::vector<std::exception_ptr> errors(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        RunConfig c = base;
        for (std::size_t a = 0; a < axes.size(); ++a) apply_setting(c, axes[a].first, runs[i].axis_values[a]);
        c.trainer.master_seed = runs[i].seed;
        reports[i] = run_experiment(c, e, out / ("run_" + std::to_string(i)));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(runs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::ofstream csv(out / "sweep.csv");
  csv << "run,seed";
  for (const auto& a : axes) csv << ',' << a.first;
  const auto& first = *reports.front();
  for (const auto& kv : first.summary) csv << ',' << kv.first;
  csv << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    csv << i << ',' << runs[i].seed;
    for (const auto& v : runs[i].axis_values) csv << ',' << v;
    for (const auto& kv : reports[i]->summary) csv << ',' << kv.second;
    csv << '\n';
  }
  if (!csv) fail(ErrorKind::Io, "cannot write '" + (out / "sweep.csv").string() + "'");
  print_notes(first);
  std::cout << runs.size() << " run(s) of " << to_string(e) << "; table in " << (out / "sweep.csv").string() << '\n';
  return kOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args);
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Soft winner-take-all associative memory with firefly-synthesized topology"};
  app.name("swta");
  app.require_subcommand(1);
  app.footer(keys_footer());

  CommonOptions opts;
  std::string input, model_dir, cue, experiment_name;
  std::size_t jobs = 1;

  auto* train_cmd = app.add_subcommand("train", "train a model on every .pgm/.csv pattern in a directory");
  add_common(train_cmd, opts);
  train_cmd->add_option("--input", input, "directory of training patterns")->required();

  auto* recall_cmd = app.add_subcommand("recall", "feed a cue through a saved model");
  add_common(recall_cmd, opts, false);
  recall_cmd->add_option("--model", model_dir, "model directory written by `train`")->required();
  recall_cmd->add_option("--cue", cue, "cue pattern (.pgm or .csv)")->required();

  auto* exp_cmd = app.add_subcommand("experiment", "run a scripted scenario");
  add_common(exp_cmd, opts);
  exp_cmd->add_option("name", experiment_name, "evolve1d | recall2d | denoise | complete | fused | digits");

  auto* sweep_cmd = app.add_subcommand("sweep", "cross product of comma-list keys x seeds");
  add_common(sweep_cmd, opts);
  sweep_cmd->add_option("name", experiment_name, "experiment to sweep");
  sweep_cmd->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  // CLI11 wants argv order reversed
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(opts, input);
    if (*recall_cmd) return cmd_recall(opts, model_dir, cue);
    if (*exp_cmd) return cmd_experiment(opts, experiment_name);
    if (*sweep_cmd) return cmd_sweep(opts, experiment_name, jobs);
  } catch (const Error& e) {
    std::cerr << "swta: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "swta: io error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "swta: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace swta
