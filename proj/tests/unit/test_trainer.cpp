#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "swta/trainer.hpp"
#include "test_support.hpp"

using namespace swta;

namespace {

TrainerConfig ring(std::size_t n) {
  TrainerConfig c;
  c.grid = Shape::line(n);
  c.boundary = Boundary::Periodic;
  c.use_firefly = false;
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("initialization") {
  TrainerConfig c;
  c.master_seed = 5;
  const Model a = init_model(c), b = init_model(c);
  CHECK(a.weights.w == b.weights.w);
  CHECK(a.weights.has_zero_diagonal());
  CHECK(a.weights.within(0.0, c.plasticity.v));
  c.master_seed = 6;
  CHECK(init_model(c).weights.w != a.weights.w);

  SUBCASE("hand-wired ring") {
    TrainerConfig h = ring(25);
    h.init = InitMode::HandWired;
    h.init_neighbors = 3;
    const Model m = init_model(h);
    for (Eigen::Index i = 0; i < 25; ++i)
      for (Eigen::Index j = 0; j < 25; ++j) {
        const double d = m.layout.grid_distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        CHECK(m.weights.w(i, j) == doctest::Approx(i != j && d <= 3.0 ? 1.0 / 6.0 : 0.0));
      }
  }

  SUBCASE("random init decays with distance in expectation") {
    TrainerConfig r = ring(12);
    double near = 0.0, far = 0.0;
    for (std::uint64_t s = 1; s <= 200; ++s) {
      r.master_seed = s;
      const Model m = init_model(r);
      near += m.weights.w(0, 1);
      far += m.weights.w(0, 3);
    }
    CHECK(near > far);
  }

  SUBCASE("validation") {
    TrainerConfig bad;
    bad.init = InitMode::HandWired;
    bad.init_neighbors = 0;
    CHECK_ERROR_KIND(init_model(bad), ErrorKind::Parameter);
  }
}

TEST_CASE("a zero pattern relaxes every weight toward 1/N") {
  TrainerConfig c = ring(8);
  c.steps_per_presentation = 0;
  Model m = present_pattern(init_model(c), Pattern::zeros(c.grid));
  CHECK(m.history.back().converged);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j)
      CHECK(m.weights.w(i, j) == doctest::Approx(i == j ? 0.0 : 1.0 / 8.0).epsilon(1e-3));
  CHECK(m.templates.empty());
}

TEST_CASE("warm start: the second presentation of a pattern settles no slower") {
  std::vector<double> first, second;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    TrainerConfig c;
    c.master_seed = s;
    c.use_firefly = false;
    c.steps_per_presentation = 0;
    const Pattern p = gaussian_2d(5, 5, 1.0 + 0.1 * static_cast<double>(s % 3), 2.0, 1.0, 1.0);
    Model m = present_pattern(init_model(c), p);
    m = present_pattern(std::move(m), p);
    first.push_back(static_cast<double>(m.history[0].steps));
    second.push_back(static_cast<double>(m.history[1].steps));
  }
  CHECK(median(second) <= median(first));
}

TEST_CASE("training strengthens links inside the active set") {
  TrainerConfig c;
  c.use_firefly = false;
  const Pattern p = gaussian_2d(5, 5, 1.0, 1.0, 0.8, 0.8);
  const Model m = train(init_model(c), std::vector<Pattern>{p});
  const ActiveSet act = relative_active_set(p, c.theta_act);
  double inside = 0.0, outside = 0.0;
  std::size_t ni = 0, no = 0;
  for (std::size_t i : act.indices)
    for (std::size_t j = 0; j < 25; ++j) {
      if (i == j) continue;
      const double w = m.weights.w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (act.contains(j)) inside += w, ++ni;
      else outside += w, ++no;
    }
  REQUIRE(ni > 0);
  REQUIRE(no > 0);
  CHECK(inside / static_cast<double>(ni) > outside / static_cast<double>(no));
  CHECK_NOTHROW(m.check_invariants());
}

TEST_CASE("recall") {
  TrainerConfig c;
  c.use_firefly = false;
  Model m = init_model(c);
  const Pattern cue = gaussian_2d(5, 5, 3, 1, 1, 1);

  SUBCASE("a network without connections returns the cue") {
    m.weights = WeightMatrix::zeros(25);
    const RecallResult r = recall(m, cue);
    for (std::size_t i = 0; i < 25; ++i) CHECK(r.output[i] == doctest::Approx(cue[i]).epsilon(1e-12));
    CHECK(r.metrics.cosine == doctest::Approx(1.0));
    CHECK(r.metrics.mse == doctest::Approx(0.0));
    CHECK_FALSE(r.low_confidence);
  }
  SUBCASE("output is normalized and the best match is a stored template") {
    const Pattern a = gaussian_2d(5, 5, 1, 1, 1, 1, false), b = gaussian_2d(5, 5, 3, 3, 1, 1, false);
    Pattern la = a, lb = b;
    la.set_label("a");
    lb.set_label("b");
    m = train(std::move(m), std::vector<Pattern>{la, lb});
    const RecallResult r = recall(m, add_noise(a, 0.1, 3));
    CHECK(r.output.norm() == doctest::Approx(1.0));
    CHECK(r.template_cosines.size() == 2);
    CHECK(r.metrics.best_match_label == std::optional<std::string>("a"));
  }
  SUBCASE("errors") {
    CHECK_ERROR_KIND(recall(m, Pattern::zeros(c.grid)), ErrorKind::Annihilated);
    CHECK_ERROR_KIND(recall(m, gaussian_1d(7, 3, 1)), ErrorKind::Shape);
    CHECK_ERROR_KIND(present_pattern(m, gaussian_1d(7, 3, 1)), ErrorKind::Shape);
  }
}

TEST_CASE("completion") {
  TrainerConfig c;
  c.use_firefly = false;
  const Pattern p = gaussian_2d(5, 5, 2, 2, 1, 1);
  const Model m = train(init_model(c), std::vector<Pattern>{p});

  const std::vector<std::size_t> none;
  const RecallResult plain = recall(m, p), comp = complete(m, p, none);
  for (std::size_t i = 0; i < 25; ++i) CHECK(comp.output[i] == doctest::Approx(plain.output[i]).epsilon(1e-12));
  CHECK_FALSE(comp.low_confidence);

  const ActiveSet act = relative_active_set(p, c.theta_act);
  CHECK(complete(m, p, act.indices).low_confidence);

  std::vector<std::size_t> all(25);
  for (std::size_t i = 0; i < 25; ++i) all[i] = i;
  const RecallResult empty = complete(m, p, all);
  CHECK(empty.low_confidence);
  CHECK(empty.output.is_zero());
}

TEST_CASE("invariants hold with the firefly topology") {
  for (std::uint64_t s = 1; s <= 3; ++s) {
    TrainerConfig c;
    c.master_seed = s;
    c.epochs = 2;
    c.steps_per_presentation = 50;
    const std::vector<Pattern> ps{gaussian_2d(5, 5, 1, 1, 1, 1), gaussian_2d(5, 5, 3, 3, 1, 1)};
    const Model m = train(init_model(c), ps);
    CHECK_NOTHROW(m.check_invariants());
    CHECK((m.inhibition.array() >= 0.0).all());
    CHECK(m.presentations == 4);
    CHECK(m.templates.size() == 2);
    // frozen entries are exactly the ones the mask excludes
    CHECK((m.weights.w.array() * (1.0 - m.plastic_mask.array())).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("training on every shift of a ring pattern gives a near-circulant matrix") {
  // default schedule; on much shorter rings competition breaks the symmetry
  const std::size_t n = 25;
  TrainerConfig c = ring(n);
  c.init = InitMode::HandWired;
  c.init_neighbors = 2;
  std::vector<Pattern> shifts;
  for (std::size_t k = 0; k < n; ++k) shifts.push_back(gaussian_1d(n, static_cast<double>(k), 1.0, true));
  const Model m = train(init_model(c), shifts);
  double dev = 0.0;
  const auto N = static_cast<Eigen::Index>(n);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      dev = std::max(dev, std::abs(m.weights.w(i, j) - m.weights.w((i + 1) % N, (j + 1) % N)));
  CHECK(dev <= 0.1);
}

TEST_CASE("model save and load round trip") {
  ScratchDir dir("model");
  TrainerConfig c;
  c.master_seed = 9;
  c.epochs = 1;
  c.steps_per_presentation = 30;
  Pattern p = gaussian_2d(5, 5, 2, 1, 1, 1);
  p.set_label("bump");
  const Model m = train(init_model(c), std::vector<Pattern>{p});
  save_model(m, dir.path());
  const Model back = load_model(dir.path());
  CHECK(back.weights.w.isApprox(m.weights.w, 1e-15));
  CHECK(back.inhibition.isApprox(m.inhibition, 1e-15));
  CHECK(back.plastic_mask == m.plastic_mask);
  REQUIRE(back.templates.size() == 1);
  const Pattern cue = add_noise(p, 0.1, 2);
  const RecallResult r1 = recall(m, cue), r2 = recall(back, cue);
  for (std::size_t i = 0; i < 25; ++i) CHECK(r1.output[i] == doctest::Approx(r2.output[i]).epsilon(1e-12));
  CHECK_ERROR_KIND(load_model(dir / "missing"), ErrorKind::Unreadable);
}

TEST_CASE("compare") {
  const Pattern a = gaussian_1d(9, 4, 1);
  const RecallMetrics same = compare(a, a);
  CHECK(same.cosine == doctest::Approx(1.0));
  CHECK(same.pearson == doctest::Approx(1.0));
  CHECK(same.mse == doctest::Approx(0.0));
  CHECK_ERROR_KIND(compare(a, gaussian_1d(8, 4, 1)), ErrorKind::Shape);
}
