#include "swta/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "swta/error.hpp"
#include "swta/image_io.hpp"
#include "swta/seeding.hpp"

namespace swta {

namespace fs = std::filesystem;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Evolve1D: return "evolve1d";
    case Experiment::Recall2D: return "recall2d";
    case Experiment::Denoise: return "denoise";
    case Experiment::Complete: return "complete";
    case Experiment::Fused: return "fused";
    case Experiment::Digits: return "digits";
  }
  return "?";
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = {Experiment::Evolve1D, Experiment::Recall2D,
                                              Experiment::Denoise,  Experiment::Complete,
                                              Experiment::Fused,    Experiment::Digits};
  return all;
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (Experiment e : all_experiments())
    if (to_string(e) == name) return e;
  return std::nullopt;
}

RunConfig experiment_preset(Experiment e) {
  RunConfig c;
  switch (e) {
    case Experiment::Evolve1D:
      c.trainer.grid = Shape::line(25);
      c.trainer.boundary = Boundary::Periodic;
      c.trainer.init = InitMode::HandWired;
      c.trainer.init_neighbors = 3;
      c.trainer.use_firefly = false;
      c.trainer.epochs = 1;
      c.trainer.steps_per_presentation = 0;
      break;
    case Experiment::Recall2D:
    case Experiment::Denoise:
    case Experiment::Complete:
      break;
    case Experiment::Fused:
      c.trainer.grid = Shape::grid2d(11, 11);
      c.trainer.pattern_count = 2;
      c.experiment.pattern_sigma = 1.5;
      break;
    case Experiment::Digits:
      c.trainer.grid = Shape::grid2d(11, 11);
      c.trainer.pattern_count = 2;
      break;
  }
  return c;
}

double ExperimentReport::value(std::string_view key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  fail(ErrorKind::Parameter, "report '" + name + "' has no value '" + std::string(key) + "'");
}

std::string ExperimentReport::to_key_value() const {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "experiment = " << name << '\n';
  for (const auto& [k, v] : summary) out << k << " = " << v << '\n';
  for (const auto& n : notes) out << "# " << n << '\n';
  return out.str();
}

namespace {

// The truncated series only tracks (I - W)^-1 while rows stay below 1.
void note_row_sum(ExperimentReport& r, const Model& m, const std::string& which = "") {
  const double s = m.effective_weights().cwiseAbs().rowwise().sum().maxCoeff();
  r.add(which + "max_abs_row_sum", s);
  if (s >= 1.0)
    r.notes.push_back(which + "trained max |row sum| = " + std::to_string(s) +
                      " >= 1: the third-order series is far from (I - W)^-1");
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

class Emitter {
 public:
  explicit Emitter(fs::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::Io, "cannot create '" + dir_.string() + "': " + ec.message());
  }

  bool enabled() const { return !dir_.empty(); }

  void pattern(const Pattern& p, const std::string& stem) const {
    if (!enabled()) return;
    save_image(p, dir_ / (stem + ".csv"));
    save_image(p, dir_ / (stem + ".pgm"), {PgmEncoding::Binary, true});
  }

  void matrix(const Matrix& m, const std::string& stem) const {
    if (!enabled()) return;
    write_matrix_csv(m, dir_ / (stem + ".csv"));
    write_matrix_pgm(m, dir_ / (stem + ".pgm"));
  }

  // Input and output signal per neuron, for line plots.
  void signals(const std::string& stem, const std::vector<std::pair<std::string, const Pattern*>>& cols) const {
    if (!enabled()) return;
    std::ofstream out(dir_ / (stem + ".csv"));
    out << "neuron";
    for (const auto& c : cols) out << ',' << c.first;
    out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    const std::size_t n = cols.empty() ? 0 : cols.front().second->size();
    for (std::size_t i = 0; i < n; ++i) {
      out << i;
      for (const auto& c : cols) out << ',' << (*c.second)[i];
      out << '\n';
    }
    if (!out) fail(ErrorKind::Io, "write failed for '" + (dir_ / (stem + ".csv")).string() + "'");
  }

  void model(const Model& m, const std::string& prefix) const {
    if (!enabled()) return;
    matrix(m.weights.w, prefix + "weights");
    matrix(m.effective_weights(), prefix + "effective_weights");
    if (m.population) write_population_csv(*m.population, dir_ / (prefix + "population.csv"));
  }

  void report(const ExperimentReport& r) const {
    if (!enabled()) return;
    std::ofstream kv(dir_ / "report.txt");
    kv << r.to_key_value();
    std::ofstream csv(dir_ / "metrics.csv");
    for (std::size_t c = 0; c < r.columns.size(); ++c) csv << (c ? "," : "") << r.columns[c];
    csv << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& row : r.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << row[c];
      csv << '\n';
    }
    if (!kv || !csv) fail(ErrorKind::Io, "cannot write report under '" + dir_.string() + "'");
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
};

std::vector<Pattern> gaussian_templates(const RunConfig& c, std::size_t count) {
  const Shape s = c.trainer.grid;
  std::mt19937_64 rng(derive_seed(c.trainer.master_seed, "templates"));
  std::uniform_real_distribution<double> cx(0.0, static_cast<double>(s.cols - 1));
  std::uniform_real_distribution<double> cy(0.0, static_cast<double>(s.rows - 1));
  const bool wrap = c.trainer.boundary == Boundary::Periodic;
  std::vector<Pattern> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double x = cx(rng);
    const double y = cy(rng);
    Pattern p = s.grid ? gaussian_2d(s.rows, s.cols, x, y, c.experiment.pattern_sigma,
                                     c.experiment.pattern_sigma, wrap)
                       : gaussian_1d(s.cols, x, c.experiment.pattern_sigma, wrap);
    p.set_label("g" + std::to_string(k));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Pattern> digit_templates(const RunConfig& c) {
  std::vector<Pattern> out;
  for (const auto& label : c.experiment.digits) {
    Pattern p = load_image(c.experiment.digits_dir / ("digit_" + label + ".pgm"));
    if (p.size() != c.trainer.n())
      fail(ErrorKind::DimensionMismatch, "digit '" + label + "' has " + std::to_string(p.size()) +
                                             " pixels, network grid " + to_string(c.trainer.grid));
    p.set_label(label);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::size_t> mask_indices(std::size_t n, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto k = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
  idx.resize(std::min(k, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

ExperimentReport evolve1d(const RunConfig& c, const Emitter& out) {
  ExperimentReport r{"evolve1d", {}, {"neuron", "nn_weight", "third_weight", "row_sum"}, {}, {}};
  Model m = init_model(c.trainer);
  const Matrix initial = m.weights.w;
  const std::size_t n = c.trainer.n();
  // uniform drive: every neuron is a fluctuation source
  const Pattern all = normalize(Pattern(std::vector<double>(n, 1.0), c.trainer.grid));
  m = train(std::move(m), std::span<const Pattern>(&all, 1));
  const Matrix& w = m.weights.w;

  std::vector<double> nn, third, rest;
  std::size_t violations = 0;
  double min_row = std::numeric_limits<double>::infinity(), max_row = -min_row;
  for (std::size_t i = 0; i < n; ++i) {
    double nn_i = 0.0, third_i = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = m.layout.grid_distance(i, j);
      const double x = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::abs(d - 1.0) < 1e-9) {
        nn.push_back(x);
        nn_i = std::max(nn_i, x);
      } else {
        rest.push_back(x);
        if (std::abs(d - 3.0) < 1e-9) {
          third.push_back(x);
          third_i = std::max(third_i, x);
        }
      }
    }
    // every nearest-neighbour weight must beat every third-neighbour weight
    double nn_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && std::abs(m.layout.grid_distance(i, j) - 1.0) < 1e-9)
        nn_min = std::min(nn_min, w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    if (!(nn_min > third_i)) ++violations;
    const double rs = w.row(static_cast<Eigen::Index>(i)).sum();
    min_row = std::min(min_row, rs);
    max_row = std::max(max_row, rs);
    r.rows.push_back({static_cast<double>(i), nn_i, third_i, rs});
  }
  const auto& rep = m.history.back();
  r.add("neurons", static_cast<double>(n));
  r.add("steps", static_cast<double>(rep.steps));
  r.add("converged", rep.converged ? 1.0 : 0.0);
  r.add("nearest_mean", mean(nn));
  r.add("third_mean", mean(third));
  r.add("non_neighbor_mean", mean(rest));
  r.add("nearest_over_non_neighbor", mean(rest) > 0.0 ? mean(nn) / mean(rest) : INFINITY);
  r.add("ordering_violations", static_cast<double>(violations));
  r.add("min_row_sum", min_row);
  r.add("max_row_sum", max_row);
  note_row_sum(r, m);

  if (out.enabled()) {
    write_matrix_csv(initial, out.dir() / "w_matrix_initial.csv");
    write_matrix_csv(w, out.dir() / "w_matrix_final.csv");
    write_matrix_pgm(initial, out.dir() / "w_matrix_initial.pgm");
    write_matrix_pgm(w, out.dir() / "w_matrix_final.pgm");
    const auto row = static_cast<Eigen::Index>(std::min(c.experiment.evolve_row, n - 1));
    std::ofstream vec(out.dir() / ("weight_row_" + std::to_string(row) + ".csv"));
    vec << "j,initial,final\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
      vec << j << ',' << initial(row, j) << ',' << w(row, j) << '\n';
    rep.write_trace_csv(out.dir() / "evolve_trace.csv");
  }
  return r;
}

ExperimentReport recall2d(const RunConfig& c, const Emitter& out) {
  ExperimentReport r{"recall2d", {}, {"template", "cos_with", "cos_without", "paired_diff"}, {}, {}};
  const auto templates = gaussian_templates(c, c.trainer.pattern_count);
  TrainerConfig with = c.trainer, without = c.trainer;
  with.use_firefly = true;
  without.use_firefly = false;
  const Model mw = train(init_model(with), templates);
  const Model mo = train(init_model(without), templates);
  out.model(mw, "with_firefly_");
  out.model(mo, "without_firefly_");

  std::vector<double> cw, co, diff;
  for (std::size_t k = 0; k < templates.size(); ++k) {
    const auto& t = templates[k];
    const RecallResult a = recall(mw, t);
    const RecallResult b = recall(mo, t);
    cw.push_back(a.metrics.cosine);
    co.push_back(b.metrics.cosine);
    diff.push_back(a.metrics.cosine - b.metrics.cosine);
    r.rows.push_back({static_cast<double>(k), cw.back(), co.back(), diff.back()});
    const std::string s = std::to_string(k);
    out.pattern(t, "input_" + s);
    out.pattern(a.output, "output_with_firefly_" + s);
    out.pattern(b.output, "output_without_firefly_" + s);
    out.signals("signals_" + s, {{"input", &t}, {"with_firefly", &a.output}, {"without_firefly", &b.output}});
  }
  r.add("mean_cos_with", mean(cw));
  r.add("mean_cos_without", mean(co));
  r.add("paired_diff", mean(diff));
  note_row_sum(r, mw, "with_firefly_");
  note_row_sum(r, mo, "without_firefly_");
  return r;
}

ExperimentReport denoise(const RunConfig& c, const Emitter& out) {
  ExperimentReport r{"denoise", {}, {"template", "cos_cue", "cos_output", "gain"}, {}, {}};
  const auto templates = gaussian_templates(c, c.trainer.pattern_count);
  const Model m = train(init_model(c.trainer), templates);
  out.model(m, "");
  std::vector<double> cue_cos, out_cos, gain;
  for (std::size_t k = 0; k < templates.size(); ++k) {
    const auto& t = templates[k];
    const Pattern cue = add_noise(t, c.experiment.noise_level, derive_seed(c.trainer.master_seed, "noise", k));
    const RecallResult res = recall(m, cue);
    cue_cos.push_back(cosine_similarity(cue, t));
    out_cos.push_back(cosine_similarity(res.output, t));
    gain.push_back(out_cos.back() - cue_cos.back());
    r.rows.push_back({static_cast<double>(k), cue_cos.back(), out_cos.back(), gain.back()});
    const std::string s = std::to_string(k);
    out.pattern(t, "clean_" + s);
    out.pattern(cue, "noisy_" + s);
    out.pattern(res.output, "recovered_" + s);
    out.signals("signals_" + s, {{"clean", &t}, {"noisy", &cue}, {"recovered", &res.output}});
  }
  r.add("mean_cos_cue", mean(cue_cos));
  r.add("mean_cos_output", mean(out_cos));
  r.add("mean_gain", mean(gain));
  note_row_sum(r, m);
  return r;
}

ExperimentReport complete_exp(const RunConfig& c, const Emitter& out) {
  ExperimentReport r{"complete", {}, {"template", "masked", "cos_cue", "cos_output", "gain", "low_confidence"}, {}, {}};
  const auto templates = gaussian_templates(c, c.trainer.pattern_count);
  const Model m = train(init_model(c.trainer), templates);
  out.model(m, "");
  std::vector<double> cue_cos, out_cos, gain;
  for (std::size_t k = 0; k < templates.size(); ++k) {
    const auto& t = templates[k];
    const auto idx = mask_indices(t.size(), c.experiment.mask_fraction,
                                  derive_seed(c.trainer.master_seed, "mask", k));
    const Pattern cue = zero_entries(t, idx);
    const RecallResult res = complete(m, t, idx);
    cue_cos.push_back(cosine_similarity(cue, t));
    out_cos.push_back(res.metrics.cosine);
    gain.push_back(out_cos.back() - cue_cos.back());
    r.rows.push_back({static_cast<double>(k), static_cast<double>(idx.size()), cue_cos.back(),
                      out_cos.back(), gain.back(), res.low_confidence ? 1.0 : 0.0});
    const std::string s = std::to_string(k);
    out.pattern(t, "original_" + s);
    out.pattern(cue, "partial_" + s);
    out.pattern(res.output, "completed_" + s);
    out.signals("signals_" + s, {{"original", &t}, {"partial", &cue}, {"completed", &res.output}});
  }
  r.add("mean_cos_cue", mean(cue_cos));
  r.add("mean_cos_output", mean(out_cos));
  r.add("mean_gain", mean(gain));
  note_row_sum(r, m);
  return r;
}

ExperimentReport fused(const RunConfig& c, const Emitter& out) {
  ExperimentReport r{"fused", {}, {"weight2", "cos_first", "cos_second", "gap"}, {}, {}};
  const auto templates = gaussian_templates(c, 2);
  const Model m = train(init_model(c.trainer), templates);
  out.model(m, "");
  const auto& p1 = templates[0];
  const auto& p2 = templates[1];
  const std::uint64_t seed = derive_seed(c.trainer.master_seed, "noise");

  const Pattern equal = add_noise(fuse(p1, p2, 1.0, 1.0), c.experiment.noise_level, seed);
  const RecallResult re = recall(m, equal);
  const double c1 = cosine_similarity(re.output, p1), c2 = cosine_similarity(re.output, p2);

  const Pattern weak = add_noise(fuse(p1, p2, 1.0, c.experiment.fuse_weak_weight), c.experiment.noise_level, seed);
  const RecallResult rw = recall(m, weak);
  const double w1 = cosine_similarity(rw.output, p1), w2 = cosine_similarity(rw.output, p2);

  r.rows.push_back({1.0, c1, c2, std::abs(c1 - c2)});
  r.rows.push_back({c.experiment.fuse_weak_weight, w1, w2, std::abs(w1 - w2)});
  r.add("cos_first", c1);
  r.add("cos_second", c2);
  r.add("symmetry_gap", std::abs(c1 - c2));
  r.add("weak_cos_first", w1);
  r.add("weak_cos_second", w2);
  r.add("input_pair_cosine", cosine_similarity(p1, p2));
  note_row_sum(r, m);
  out.pattern(p1, "input_first");
  out.pattern(p2, "input_second");
  out.pattern(equal, "fused_cue");
  out.pattern(re.output, "fused_output");
  out.pattern(weak, "weak_cue");
  out.pattern(rw.output, "weak_output");
  return r;
}

ExperimentReport digits(const RunConfig& c, const Emitter& out) {
  ExperimentReport r{"digits", {}, {"template", "cos_cue", "cos_output", "correct"}, {}, {}};
  const auto templates = digit_templates(c);
  const Model m = train(init_model(c.trainer), templates);
  out.model(m, "");
  std::size_t correct = 0;
  std::vector<double> out_cos;
  for (std::size_t k = 0; k < templates.size(); ++k) {
    const auto& t = templates[k];
    const Pattern cue = add_noise(t, c.experiment.noise_level, derive_seed(c.trainer.master_seed, "noise", k));
    const RecallResult res = recall(m, cue);
    const bool ok = res.metrics.best_match_label == t.label();
    correct += ok ? 1 : 0;
    out_cos.push_back(cosine_similarity(res.output, t));
    r.rows.push_back({static_cast<double>(k), cosine_similarity(cue, t), out_cos.back(), ok ? 1.0 : 0.0});
    const std::string s = *t.label();
    out.pattern(t, "stored_" + s);
    out.pattern(cue, "noisy_" + s);
    out.pattern(res.output, "retrieved_" + s);
    out.signals("signals_" + s, {{"stored", &t}, {"noisy", &cue}, {"retrieved", &res.output}});
  }
  r.add("templates", static_cast<double>(templates.size()));
  r.add("correct", static_cast<double>(correct));
  r.add("accuracy", static_cast<double>(correct) / static_cast<double>(templates.size()));
  r.add("mean_cos_output", mean(out_cos));
  note_row_sum(r, m);
  return r;
}

}  // namespace

std::vector<Pattern> experiment_templates(const RunConfig& config, Experiment e) {
  switch (e) {
    case Experiment::Evolve1D: return {};
    case Experiment::Digits: return digit_templates(config);
    case Experiment::Fused: return gaussian_templates(config, 2);
    default: return gaussian_templates(config, config.trainer.pattern_count);
  }
}

ExperimentReport run_experiment(const RunConfig& config, Experiment e, const fs::path& out_dir) {
  config.trainer.validate();
  const Emitter out(out_dir);
  ExperimentReport r;
  switch (e) {
    case Experiment::Evolve1D: r = evolve1d(config, out); break;
    case Experiment::Recall2D: r = recall2d(config, out); break;
    case Experiment::Denoise: r = denoise(config, out); break;
    case Experiment::Complete: r = complete_exp(config, out); break;
    case Experiment::Fused: r = fused(config, out); break;
    case Experiment::Digits: r = digits(config, out); break;
  }
  if (out.enabled()) {
    std::ofstream cfg(out_dir / "config.txt");
    cfg << to_config_text(config);
  }
  out.report(r);
  return r;
}

}  // namespace swta
