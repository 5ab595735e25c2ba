#include "swta/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "swta/config.hpp"
#include "swta/error.hpp"
#include "swta/image_io.hpp"
#include "swta/seeding.hpp"

namespace swta {

namespace fs = std::filesystem;

void TrainerConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::Parameter, "trainer: " + what); };
  if (grid.size() == 0) bad("grid must hold at least one neuron");
  if (!(theta_act >= 0.0 && theta_act < 1.0)) bad("theta_act must be in [0, 1)");
  if (pattern_count == 0) bad("pattern count M must be >= 1");
  if (!(init_sigma > 0.0)) bad("init_sigma must be > 0");
  if (!(init_jitter >= 0.0 && init_jitter < 1.0)) bad("init_jitter must be in [0, 1)");
  if (init == InitMode::HandWired && init_neighbors == 0) bad("init_neighbors must be >= 1");
  if (!(inhibition_gain >= 0.0)) bad("inhibition_gain must be >= 0");
  if (recall_iterations == 0) bad("recall_iterations must be >= 1");
  plasticity.validate();
  if (use_firefly) swarm.validate();
}

void Model::check_invariants() const {
  if (!weights.is_finite()) fail(ErrorKind::Invariant, "weights are not finite");
  if (!weights.has_zero_diagonal()) fail(ErrorKind::Invariant, "weights have self connections");
  if (!weights.within(0.0, config.plasticity.v))
    fail(ErrorKind::Invariant, "plastic weights left [0, v]");
  if ((inhibition.array() < 0.0).any()) fail(ErrorKind::Invariant, "negative inhibition magnitude");
}

RecallMetrics compare(const Pattern& output, const Pattern& reference) {
  if (output.size() != reference.size()) fail(ErrorKind::Shape, "compared patterns differ in size");
  const std::size_t n = output.size();
  const double no = output.norm();
  const double nr = reference.norm();
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = no > 0.0 ? output[i] / no : 0.0;
    b[i] = nr > 0.0 ? reference[i] / nr : 0.0;
  }
  RecallMetrics m;
  m.cosine = cosine_similarity(a, b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m.mse += (a[i] - b[i]) * (a[i] - b[i]);
    ma += a[i];
    mb += b[i];
  }
  m.mse /= static_cast<double>(n);
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  m.pearson = saa > 0.0 && sbb > 0.0 ? std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0) : 0.0;
  return m;
}

namespace {

Matrix off_diagonal_ones(Eigen::Index n) {
  Matrix m = Matrix::Ones(n, n);
  m.diagonal().setZero();
  return m;
}

WeightMatrix initial_weights(const TrainerConfig& cfg, const GridLayout& layout) {
  const auto n = static_cast<Eigen::Index>(cfg.n());
  Matrix w = Matrix::Zero(n, n);
  if (cfg.init == InitMode::HandWired) {
    const double reach = static_cast<double>(cfg.init_neighbors) + 1e-9;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j && layout.grid_distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) <= reach)
          w(i, j) = 1.0;
  } else {
    std::mt19937_64 rng(derive_seed(cfg.master_seed, "weights"));
    std::uniform_real_distribution<double> jitter(1.0 - cfg.init_jitter, 1.0 + cfg.init_jitter);
    const double two_var = 2.0 * cfg.init_sigma * cfg.init_sigma;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = layout.grid_distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        const double u = jitter(rng);
        if (i != j) w(i, j) = std::exp(-d * d / two_var) * u;
      }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = w.row(i).sum();
    if (s > 0.0) w.row(i) /= s;
  }
  return WeightMatrix(w.cwiseMin(cfg.plasticity.v));
}

FireflyPopulation fresh_population(const TrainerConfig& cfg, std::uint64_t index) {
  SwarmParams sp = cfg.swarm;
  sp.seed = derive_seed(cfg.master_seed, "swarm", index);
  return make_population(sp.population_factor * cfg.n(), sp);
}

bool same_values(const Pattern& a, const Pattern& b) {
  return a.shape() == b.shape() && std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

void apply_firefly_topology(Model& m, const Pattern& p) {
  const auto& cfg = m.config;
  if (cfg.swarm.reset_per_pattern || !m.population)
    m.population = fresh_population(cfg, m.presentations);
  for (std::size_t s = 0; s < cfg.swarm.steps; ++s)
    m.population = swarm_step(std::move(*m.population), p, m.layout);

  const Matrix synth = synthesize_weights(*m.population, m.layout, cfg.plasticity.v).w;
  const Matrix prior = synth.cwiseMax(0.0);
  const Matrix mask = (synth.array() > 0.0).cast<double>();
  // the synthesized strengths seed W once; afterwards the topology only gates it
  if (m.presentations == 0) m.weights.w = prior;
  else m.weights.w = m.weights.w.cwiseProduct(mask);
  m.weights.w.diagonal().setZero();
  m.plastic_mask = mask;
  m.inhibition = cfg.inhibition_gain * (-synth).cwiseMax(0.0);
}

}  // namespace

Model init_model(const TrainerConfig& config) {
  config.validate();
  Model m;
  m.config = config;
  m.layout = GridLayout(config.grid, config.boundary);
  m.weights = initial_weights(config, m.layout);
  const auto n = static_cast<Eigen::Index>(config.n());
  m.inhibition = Matrix::Zero(n, n);
  m.plastic_mask = off_diagonal_ones(n);
  if (config.use_firefly) m.population = fresh_population(config, 0);
  return m;
}

Model present_pattern(Model m, const Pattern& p) {
  const auto& cfg = m.config;
  if (p.size() != cfg.n())
    fail(ErrorKind::Shape, "pattern has " + std::to_string(p.size()) + " entries, network has " +
                               std::to_string(cfg.n()) + " neurons");

  if (cfg.use_firefly) apply_firefly_topology(m, p);

  Resolvent d = truncated_resolvent(m.effective_weights());
  ActiveSet sources;
  if (cfg.schedule == LearnSchedule::AtOnset) {
    sources = relative_active_set(p, cfg.theta_act);
  } else {
    const Response settled = equilibrium_response(d, p);
    sources = relative_active_set(settled.activity, cfg.theta_act);
  }
  const CorrelationTensor t = correlation_tensor(d, sources);

  PlasticityParams pp = cfg.plasticity;
  if (cfg.steps_per_presentation > 0) pp.max_steps = cfg.steps_per_presentation;
  EvolveResult evolved = evolve_weights(m.weights, t, pp, m.plastic_mask);
  m.weights = std::move(evolved.weights);
  m.history.push_back(std::move(evolved.report));
  ++m.presentations;

  if (!p.is_zero() &&
      std::none_of(m.templates.begin(), m.templates.end(), [&](const Pattern& q) { return same_values(q, p); }))
    m.templates.push_back(p);
  m.check_invariants();
  return m;
}

Model train(Model m, std::span<const Pattern> patterns) {
  for (std::size_t e = 0; e < m.config.epochs; ++e)
    for (const auto& p : patterns) m = present_pattern(std::move(m), p);
  return m;
}

RecallResult recall(const Model& m, const Pattern& cue) {
  if (cue.size() != m.config.n())
    fail(ErrorKind::Shape, "cue has " + std::to_string(cue.size()) + " entries, network has " +
                               std::to_string(m.config.n()) + " neurons");
  if (cue.is_zero()) fail(ErrorKind::Annihilated, "pattern annihilated: recall cue is all zero");

  const Resolvent d = truncated_resolvent(m.effective_weights());
  RecallResult r;
  Pattern state = cue;
  for (std::size_t k = 0; k < m.config.recall_iterations; ++k) {
    Pattern act = equilibrium_response(d, state).activity;
    if (act.is_zero()) {
      r.low_confidence = true;
      state = Pattern::zeros(cue.shape());
      break;
    }
    state = normalize(act);
  }
  r.output = Pattern(std::vector<double>(state.values().begin(), state.values().end()), cue.shape());
  r.metrics = compare(r.output, cue);

  double best = -2.0;
  for (std::size_t k = 0; k < m.templates.size(); ++k) {
    const double c = cosine_similarity(r.output, m.templates[k]);
    r.template_cosines.push_back(c);
    if (c > best) {
      best = c;
      r.metrics.best_match_label = m.templates[k].label().value_or("#" + std::to_string(k));
    }
  }
  return r;
}

RecallResult complete(const Model& m, const Pattern& original, std::span<const std::size_t> masked) {
  const Pattern cue = zero_entries(original, masked);
  const ActiveSet active = relative_active_set(original, m.config.theta_act);
  const bool covers_active = std::all_of(active.indices.begin(), active.indices.end(), [&](std::size_t i) {
    return std::find(masked.begin(), masked.end(), i) != masked.end();
  });

  RecallResult r;
  if (cue.is_zero()) {
    r.output = Pattern::zeros(original.shape());
    r.low_confidence = true;
  } else {
    r = recall(m, normalize(cue));
  }
  const auto best = r.metrics.best_match_label;
  r.metrics = compare(r.output, original);
  r.metrics.best_match_label = best;
  r.low_confidence = r.low_confidence || covers_active;
  return r;
}

void save_model(const Model& m, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());

  RunConfig rc;
  rc.trainer = m.config;
  std::ofstream cfg(dir / "config.txt");
  cfg << to_config_text(rc);
  if (!cfg) fail(ErrorKind::Io, "cannot write '" + (dir / "config.txt").string() + "'");

  write_matrix_csv(m.weights.w, dir / "weights.csv");
  write_matrix_csv(m.inhibition, dir / "inhibition.csv");
  write_matrix_csv(m.plastic_mask, dir / "plastic_mask.csv");
  write_matrix_pgm(m.effective_weights(), dir / "weights.pgm");
  if (m.population) write_population_csv(*m.population, dir / "population.csv");

  std::ofstream idx(dir / "templates.csv");
  idx << "label,file\n";
  for (std::size_t k = 0; k < m.templates.size(); ++k) {
    const std::string file = "template_" + std::to_string(k) + ".csv";
    save_image(m.templates[k], dir / file);
    idx << m.templates[k].label().value_or("#" + std::to_string(k)) << ',' << file << '\n';
  }

  std::ofstream hist(dir / "history.txt");
  for (std::size_t k = 0; k < m.history.size(); ++k)
    hist << "[presentation " << k << "]\n" << m.history[k].to_key_value();
  if (!idx || !hist) fail(ErrorKind::Io, "cannot write model index files under '" + dir.string() + "'");
}

Model load_model(const fs::path& dir) {
  std::ifstream cfg(dir / "config.txt");
  if (!cfg) fail(ErrorKind::Unreadable, "cannot open '" + (dir / "config.txt").string() + "'");
  std::stringstream ss;
  ss << cfg.rdbuf();
  RunConfig rc;
  for (const auto& e : parse_config_text(ss.str(), (dir / "config.txt").string()))
    apply_setting(rc, e.key, e.value);

  Model m;
  m.config = rc.trainer;
  m.layout = GridLayout(m.config.grid, m.config.boundary);
  m.weights = WeightMatrix(read_matrix_csv(dir / "weights.csv"));
  m.inhibition = read_matrix_csv(dir / "inhibition.csv");
  m.plastic_mask = read_matrix_csv(dir / "plastic_mask.csv");
  const auto n = static_cast<Eigen::Index>(m.config.n());
  for (const Matrix* x : {&m.weights.w, &m.inhibition, &m.plastic_mask})
    if (x->rows() != n)
      fail(ErrorKind::DimensionMismatch, "model matrices under '" + dir.string() +
                                             "' do not match the configured " + std::to_string(n) + " neurons");
  if (fs::exists(dir / "population.csv")) {
    FireflyPopulation pop{read_population_csv(dir / "population.csv"), m.config.swarm,
                          std::mt19937_64(derive_seed(m.config.master_seed, "swarm-reload"))};
    m.population = std::move(pop);
  }

  std::ifstream idx(dir / "templates.csv");
  std::string line;
  if (idx && std::getline(idx, line)) {
    while (std::getline(idx, line)) {
      const auto comma = line.rfind(',');
      if (comma == std::string::npos) continue;
      Pattern t = normalize(load_image(dir / line.substr(comma + 1)));
      t.set_label(line.substr(0, comma));
      m.templates.push_back(std::move(t));
    }
  }
  m.check_invariants();
  return m;
}

}  // namespace swta
