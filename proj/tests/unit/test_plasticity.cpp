#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "../oracles.hpp"
#include "swta/plasticity.hpp"
#include "test_support.hpp"

using namespace swta;

namespace {

Matrix random_w(std::mt19937_64& rng, Eigen::Index n, double hi = 1.0) {
  std::uniform_real_distribution<double> u(0.0, hi);
  Matrix w(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = i == j ? 0.0 : u(rng);
  return w;
}

Matrix random_t(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix t(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) t(i, j) = u(rng);
  return 0.5 * (t + t.transpose());
}

CorrelationTensor tensor(Matrix t) { return CorrelationTensor{std::move(t), {}}; }

}  // namespace

TEST_CASE("rhs fixed points from the two remarks") {
  const Eigen::Index n = 9;
  PlasticityParams p;
  SUBCASE("beta = 0 at w = 1/N") {
    p.beta = 0.0;
    Matrix w = Matrix::Constant(n, n, 1.0 / n);
    w.diagonal().setZero();
    std::mt19937_64 rng(1);
    CHECK(haeussler_rhs(WeightMatrix(w), tensor(random_t(rng, n, -1, 1)), p).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("alpha = 0, constant T, rows summing to one") {
    p.alpha = 0.0;
    std::mt19937_64 rng(2);
    Matrix w = random_w(rng, n);
    for (Eigen::Index i = 0; i < n; ++i) w.row(i) /= w.row(i).sum();
    CHECK(haeussler_rhs(WeightMatrix(w), tensor(Matrix::Constant(n, n, 0.7)), p).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("both terms at w = 1/N leave beta t / N^2") {
    // The combined remark does not hold literally: the cooperation term
    // keeps t (1 - (N-1)/N) / N at the uniform 1/N state.
    const double t = 0.8;
    Matrix w = Matrix::Constant(n, n, 1.0 / n);
    w.diagonal().setZero();
    const Matrix f = haeussler_rhs(WeightMatrix(w), tensor(Matrix::Constant(n, n, t)), p);
    CHECK(f(0, 1) == doctest::Approx(p.beta * t / (n * n)).epsilon(1e-12));
  }
}

TEST_CASE("rhs matches the loop oracle") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index n = k % 2 ? 6 : 11;
    const Matrix w = random_w(rng, n), t = random_t(rng, n, -0.5, 1.5);
    PlasticityParams p;
    p.alpha = 0.1;
    p.beta = 1.0;
    const Matrix f = haeussler_rhs(WeightMatrix(w), tensor(t), p);
    CHECK(oracle::max_abs_diff(oracle::from_eigen(f), oracle::haeussler_rhs(oracle::from_eigen(w), oracle::from_eigen(t), p.alpha, p.beta)) <= 1e-12);
  }
}

TEST_CASE("cooperation minus competition form equals the rewritten form") {
  // f_ij = alpha + beta w_ij T_ij, B_i = sum over all j' of f_ij';
  // f_ij - w_ij B_i expands to alpha (1 - N w_ij) + beta w_ij (T_ij - sum w T).
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = 7;
    const Matrix w = random_w(rng, n, 0.4), t = random_t(rng, n, 0.0, 2.0);
    PlasticityParams p;
    p.alpha = 0.03;
    p.beta = 0.8;
    const Matrix f = haeussler_rhs(WeightMatrix(w), tensor(t), p);
    for (Eigen::Index i = 0; i < n; ++i) {
      double b = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) b += p.alpha + p.beta * w(i, j) * t(i, j);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double regrouped = p.alpha + p.beta * w(i, j) * t(i, j) - w(i, j) * b;
        CHECK(std::abs(regrouped - f(i, j)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("rhs contract errors") {
  PlasticityParams p;
  CHECK_ERROR_KIND(haeussler_rhs(WeightMatrix::zeros(3), tensor(Matrix::Zero(4, 4)), p), ErrorKind::Shape);
  Matrix w = Matrix::Zero(3, 3);
  w(1, 1) = 0.2;
  CHECK_ERROR_KIND(haeussler_rhs(WeightMatrix(w), tensor(Matrix::Zero(3, 3)), p), ErrorKind::Invariant);
}

TEST_CASE("saturation gate") {
  CHECK(saturation_gate(0.0, 0.3) == 1.0);
  CHECK(saturation_gate(0.3, 0.3) == 1.0);
  CHECK(saturation_gate(std::nextafter(0.3, 1.0), 0.3) == 0.0);
  CHECK(saturation_gate(5.0, 1.0) == 0.0);
}

TEST_CASE("parameter validation and the stability guard") {
  PlasticityParams p;
  CHECK_NOTHROW(p.validate());
  p.dt = 0.0;
  CHECK_ERROR_KIND(p.validate(), ErrorKind::Parameter);
  p = {};
  p.alpha = -1;
  CHECK_ERROR_KIND(p.validate(), ErrorKind::Parameter);
  p = {};
  p.v = 0;
  CHECK_ERROR_KIND(p.validate(), ErrorKind::Parameter);
  p = {};
  CHECK_NOTHROW(check_step_stability(p, 25, 1.0));
  p.dt = 0.9;
  CHECK_ERROR_KIND(check_step_stability(p, 25, 1.0), ErrorKind::Parameter);
  CHECK_ERROR_KIND(evolve_weights(WeightMatrix::zeros(25), tensor(Matrix::Constant(25, 25, 1.0)), p), ErrorKind::Parameter);
}

TEST_CASE("one Euler step composes the gate and the rhs") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = 8;
    PlasticityParams p;
    p.v = 0.6;
    p.dt = 0.05;
    Matrix w = random_w(rng, n, 0.8);  // some entries above v: gate closed there
    const Matrix t = random_t(rng, n, 0.0, 1.0);
    const Matrix f = haeussler_rhs(WeightMatrix(w), tensor(t), p);
    Matrix expect(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        expect(i, j) = i == j ? 0.0 : std::clamp(w(i, j) + p.dt * saturation_gate(w(i, j), p.v) * f(i, j), 0.0, p.v);
    const Matrix got = euler_step(WeightMatrix(w), tensor(t), p).w;
    CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("masked entries do not move") {
  std::mt19937_64 rng(6);
  const Matrix w = random_w(rng, 6, 0.5), t = random_t(rng, 6, 0.0, 1.0);
  Matrix mask = Matrix::Ones(6, 6);
  mask(0, 3) = mask(4, 1) = 0.0;
  const auto res = evolve_weights(WeightMatrix(w), tensor(t), PlasticityParams{}, mask);
  CHECK(res.weights.w(0, 3) == w(0, 3));
  CHECK(res.weights.w(4, 1) == w(4, 1));
  CHECK(res.weights.w(0, 1) != w(0, 1));
}

TEST_CASE("evolution keeps the invariants") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = 5 + k % 6;
    PlasticityParams p;
    p.v = 0.4;
    p.max_steps = 200;
    p.alpha = 0.05;
    WeightMatrix w(random_w(rng, n, 0.4));
    const auto t = tensor(random_t(rng, n, -1.0, 3.0));
    for (int s = 0; s < 50; ++s) {
      w = euler_step(w, t, p);
      REQUIRE(w.has_zero_diagonal());
      REQUIRE(w.within(0.0, p.v));
      REQUIRE(w.is_finite());
    }
  }
}

TEST_CASE("T = 0 relaxes to 1/N") {
  std::mt19937_64 rng(8);
  PlasticityParams p;
  p.alpha = 0.05;
  p.max_steps = 100000;
  const auto res = evolve_weights(WeightMatrix(random_w(rng, 7, 0.6)), tensor(Matrix::Zero(7, 7)), p);
  CHECK(res.report.converged);
  for (Eigen::Index i = 0; i < 7; ++i)
    for (Eigen::Index j = 0; j < 7; ++j)
      if (i != j) CHECK(std::abs(res.weights.w(i, j) - 1.0 / 7.0) <= p.tol / (p.alpha * 7.0));
}

TEST_CASE("non-convergence is reported, not thrown") {
  std::mt19937_64 rng(9);
  PlasticityParams p;
  p.max_steps = 3;
  const auto res = evolve_weights(WeightMatrix(random_w(rng, 5, 0.5)), tensor(random_t(rng, 5, 0, 1)), p);
  CHECK_FALSE(res.report.converged);
  CHECK(res.report.steps == 3);
  CHECK(res.report.trace.size() == 3);
  CHECK(res.report.to_key_value().find("converged = false") != std::string::npos);
  ScratchDir dir("trace");
  res.report.write_trace_csv(dir / "t.csv");
  CHECK(slurp(dir / "t.csv").rfind("step,max_rhs,min_row_sum,mean_row_sum,max_row_sum\n", 0) == 0);
}

TEST_CASE("hand-wired ring strengthens the nearest neighbours") {
  const Eigen::Index n = 25;
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 1; k <= 3; ++k) {
      w(i, (i + k) % n) = 1.0 / 6.0;
      w(i, (i - k + n) % n) = 1.0 / 6.0;
    }
  const Matrix d = w + Matrix::Identity(n, n) + w * w + w * w * w;
  const Matrix t = d * d.transpose();
  const auto res = evolve_weights(WeightMatrix(w), tensor(t), PlasticityParams{});
  CHECK(res.report.converged);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double nn = std::min(res.weights.w(i, (i + 1) % n), res.weights.w(i, (i + n - 1) % n));
    const double third = std::max(res.weights.w(i, (i + 3) % n), res.weights.w(i, (i + n - 3) % n));
    CHECK(nn > third);
    CHECK(std::abs(res.weights.w.row(i).sum() - 1.0) <= 0.1);
  }
}

TEST_CASE("generic T: row sums approach one") {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index n = 8;
    PlasticityParams p;
    p.max_steps = 200000;
    const auto res = evolve_weights(WeightMatrix(random_w(rng, n, 0.2)), tensor(random_t(rng, n, 0.5, 1.5)), p);
    CHECK(res.report.converged);
    for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(res.weights.w.row(i).sum() - 1.0) <= 0.1);
  }
}

TEST_CASE("competition: the maximal-cooperation weight wins its row") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index n = 8;
    PlasticityParams p;
    p.alpha = 0.01;
    p.beta = 1.0;
    p.max_steps = 400000;
    const Matrix t = random_t(rng, n, 0.5, 1.5);
    const auto res = evolve_weights(WeightMatrix(random_w(rng, n, 0.2)), tensor(t), p);
    CHECK(res.report.converged);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = i == 0 ? 1 : 0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i && t(i, j) > t(i, best)) best = j;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) CHECK(res.weights.w(i, best) >= res.weights.w(i, j));
    }
  }
}
