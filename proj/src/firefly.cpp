#include "swta/firefly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "swta/error.hpp"

namespace swta {

namespace {

double clip01(double u) { return std::clamp(u, 0.0, 1.0); }

constexpr std::size_t kMaxSettleSweeps = 100;

}  // namespace

void SwarmParams::validate() const {
  auto bad = [](const char* what) { fail(ErrorKind::Parameter, std::string("swarm: ") + what); };
  if (!(b > 0.0)) bad("b must be > 0");
  if (!(gamma > 0.0)) bad("gamma must be > 0");
  if (!(eta >= 0.0)) bad("eta must be >= 0");
  if (!(d_min >= 0.0)) bad("d_min must be >= 0");
  if (!(excit_fraction > 0.0 && excit_fraction < 1.0)) bad("excit_fraction must be in (0, 1)");
  if (population_factor == 0) bad("population_factor must be >= 1");
  if (!(sigma_exc > 0.0) || !(sigma_inh > 0.0)) bad("kernel widths must be > 0");
  if (!(w_inh_max >= 0.0)) bad("w_inh_max must be >= 0");
}

std::size_t FireflyPopulation::count(Polarity p) const {
  return static_cast<std::size_t>(
      std::count_if(flies.begin(), flies.end(), [p](const Firefly& f) { return f.polarity == p; }));
}

FireflyPopulation make_population(std::size_t count, const SwarmParams& params) {
  params.validate();
  FireflyPopulation pop{{}, params, std::mt19937_64(params.seed)};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto n_exc = static_cast<std::size_t>(std::lround(params.excit_fraction * static_cast<double>(count)));
  if (count >= 2) n_exc = std::clamp<std::size_t>(n_exc, 1, count - 1);
  pop.flies.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Firefly f;
    f.position.x = unit(pop.rng);
    f.position.y = unit(pop.rng);
    f.polarity = k < n_exc ? Polarity::Excitatory : Polarity::Inhibitory;
    pop.flies.push_back(f);
  }
  return pop;
}

double brightness(double b, double gamma, double r) { return b * std::exp(-gamma * r * r); }

Point move(Point xi, Point xj, const SwarmParams& params, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ux = unit(rng);
  const double uy = unit(rng);
  const double pull = brightness(params.b, params.gamma, std::sqrt(squared_distance(xi, xj)));
  return {clip01(xi.x + pull * (xj.x - xi.x) + params.eta * (ux - 0.5)),
          clip01(xi.y + pull * (xj.y - xi.y) + params.eta * (uy - 0.5))};
}

FireflyPopulation enforce_min_distance(FireflyPopulation pop, SettleReport* report) {
  SettleReport rep;
  const double dmin = pop.params.d_min;
  auto& flies = pop.flies;
  if (dmin > 0.0) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double dmin2 = dmin * dmin;
    rep.converged = false;
    for (std::size_t sweep = 1; sweep <= kMaxSettleSweeps; ++sweep) {
      bool moved = false;
      for (std::size_t i = 0; i < flies.size(); ++i) {
        for (std::size_t j = i + 1; j < flies.size(); ++j) {
          Point& a = flies[i].position;
          Point& b = flies[j].position;
          const double r2 = squared_distance(a, b);
          if (r2 >= dmin2) continue;
          const double r = std::sqrt(r2);
          double ux, uy;
          if (r == 0.0) {
            const double th = angle(pop.rng);
            ux = std::cos(th);
            uy = std::sin(th);
          } else {
            ux = (b.x - a.x) / r;
            uy = (b.y - a.y) / r;
          }
          // a hair past half the deficit so rounding cannot leave the pair short
          const double push = 0.5 * (dmin - r) + 1e-12;
          a = {clip01(a.x - push * ux), clip01(a.y - push * uy)};
          b = {clip01(b.x + push * ux), clip01(b.y + push * uy)};
          moved = true;
        }
      }
      rep.sweeps = sweep;
      if (!moved) {
        rep.converged = true;
        break;
      }
    }
  }
  if (report) *report = rep;
  return pop;
}

FireflyPopulation swarm_step(FireflyPopulation pop, const Pattern& activity, const GridLayout& layout,
                             SettleReport* report) {
  if (pop.flies.empty()) fail(ErrorKind::EmptyPopulation, "swarm step on an empty population");
  if (activity.size() != layout.size())
    fail(ErrorKind::Shape, "activity has " + std::to_string(activity.size()) + " entries, layout " +
                               std::to_string(layout.size()));
  for (auto& f : pop.flies) f.brightness = activity[layout.nearest_cell(f.position)];

  auto& flies = pop.flies;
  for (std::size_t i = 0; i < flies.size(); ++i) {
    for (std::size_t j = 0; j < flies.size(); ++j) {
      if (flies[j].brightness > flies[i].brightness)
        flies[i].position = move(flies[i].position, flies[j].position, pop.params, pop.rng);
    }
  }
  return enforce_min_distance(std::move(pop), report);
}

WeightMatrix synthesize_weights(const FireflyPopulation& pop, const GridLayout& layout, double v) {
  if (pop.flies.empty()) fail(ErrorKind::EmptyPopulation, "cannot synthesize weights without flies");
  if (pop.count(Polarity::Excitatory) == 0)
    fail(ErrorKind::MissingPolarity, "population has no excitatory flies");
  if (!(v > 0.0)) fail(ErrorKind::Parameter, "saturation ceiling v must be > 0");

  const auto n = static_cast<Eigen::Index>(layout.size());
  const double pitch = layout.pitch();
  const double two_var_e = 2.0 * std::pow(pop.params.sigma_exc * pitch, 2);
  const double two_var_i = 2.0 * std::pow(pop.params.sigma_inh * pitch, 2);

  Matrix w = Matrix::Zero(n, n);
  for (const auto& f : pop.flies) {
    const auto j = static_cast<Eigen::Index>(layout.nearest_cell(f.position));
    const bool exc = f.polarity == Polarity::Excitatory;
    const double sign = exc ? 1.0 : -1.0;
    const double two_var = exc ? two_var_e : two_var_i;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d2 = squared_distance(layout.position(static_cast<std::size_t>(i)), f.position);
      w(i, j) += sign * pop.params.b * std::exp(-d2 / two_var);
    }
  }
  w.diagonal().setZero();
  const double floor = -pop.params.w_inh_max * v;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double positive = w.row(i).cwiseMax(0.0).sum();
    if (positive > 0.0) w.row(i) /= positive;
  }
  w = w.cwiseMax(floor).cwiseMin(v);
  return WeightMatrix(std::move(w));
}

void write_population_csv(const FireflyPopulation& pop, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << "x,y,polarity,brightness\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& f : pop.flies)
    out << f.position.x << ',' << f.position.y << ','
        << (f.polarity == Polarity::Excitatory ? 'E' : 'I') << ',' << f.brightness << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::vector<Firefly> read_population_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Unreadable, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,polarity,brightness", 0) != 0)
    fail(ErrorKind::MalformedHeader, "'" + path.string() + "': expected population header");
  std::vector<Firefly> flies;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string x, y, pol, br;
    if (!std::getline(row, x, ',') || !std::getline(row, y, ',') || !std::getline(row, pol, ',') ||
        !std::getline(row, br))
      fail(ErrorKind::MalformedData, "'" + path.string() + "': short row '" + line + "'");
    Firefly f;
    try {
      f.position = {std::stod(x), std::stod(y)};
      f.brightness = std::stod(br);
    } catch (const std::exception&) {
      fail(ErrorKind::MalformedData, "'" + path.string() + "': bad number in '" + line + "'");
    }
    if (pol == "E") f.polarity = Polarity::Excitatory;
    else if (pol == "I") f.polarity = Polarity::Inhibitory;
    else fail(ErrorKind::MalformedData, "'" + path.string() + "': polarity must be E or I");
    flies.push_back(f);
  }
  return flies;
}

}  // namespace swta
