#include "swta/plasticity.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "swta/error.hpp"

namespace swta {

void PlasticityParams::validate() const {
  auto bad = [](const char* what) { fail(ErrorKind::Parameter, std::string("plasticity: ") + what); };
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) bad("alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) bad("beta must be >= 0");
  if (!(v > 0.0) || !std::isfinite(v)) bad("v must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt must be > 0");
  if (!(tol > 0.0)) bad("tol must be > 0");
}

void check_step_stability(const PlasticityParams& params, std::size_t n, double t_max) {
  const double stiffness = params.alpha * static_cast<double>(n) + params.beta * t_max;
  if (!(params.dt * stiffness < 1.0)) {
    std::ostringstream msg;
    msg << "plasticity: dt * (alpha * N + beta * max|T|) = " << params.dt * stiffness
        << " must be < 1; reduce dt";
    fail(ErrorKind::Parameter, msg.str());
  }
}

Matrix haeussler_rhs(const WeightMatrix& w, const CorrelationTensor& t, const PlasticityParams& params) {
  const Matrix& W = w.w;
  const Matrix& T = t.t;
  if (W.rows() != W.cols() || T.rows() != W.rows() || T.cols() != W.cols())
    fail(ErrorKind::Shape, "weight matrix and correlation tensor sizes differ");
  if (!w.has_zero_diagonal()) fail(ErrorKind::Invariant, "weight matrix has self connections");

  const double n = static_cast<double>(W.rows());
  // Diagonal of W is zero, so the full row sum equals the sum over j' != i.
  const Vector cooperation = W.cwiseProduct(T).rowwise().sum();
  Matrix f = params.alpha * (1.0 - n * W.array()).matrix();
  f.array() += params.beta * W.array() * (T.colwise() - cooperation).array();
  f.diagonal().setZero();
  return f;
}

WeightMatrix euler_step(const WeightMatrix& w, const CorrelationTensor& t,
                        const PlasticityParams& params, const Matrix* plastic_mask) {
  Matrix f = haeussler_rhs(w, t, params);
  const Matrix gate = w.w.unaryExpr([v = params.v](double x) { return saturation_gate(x, v); });
  f = f.cwiseProduct(gate);
  if (plastic_mask) f = f.cwiseProduct(*plastic_mask);
  WeightMatrix next((w.w + params.dt * f).cwiseMax(0.0).cwiseMin(params.v));
  if (plastic_mask) {
    // frozen entries keep their value even outside [0, v]
    next.w = (plastic_mask->array() != 0.0).select(next.w, w.w);
  }
  next.w.diagonal().setZero();
  return next;
}

namespace {

EvolveResult evolve_impl(const WeightMatrix& w0, const CorrelationTensor& t,
                         const PlasticityParams& params, const Matrix* mask) {
  params.validate();
  const std::size_t n = w0.size();
  if (!w0.is_finite()) fail(ErrorKind::Invariant, "weight matrix has non-finite entries");
  if (mask && (mask->rows() != w0.w.rows() || mask->cols() != w0.w.cols()))
    fail(ErrorKind::Shape, "plastic mask size differs from weight matrix");
  check_step_stability(params, n, t.t.size() ? t.t.cwiseAbs().maxCoeff() : 0.0);

  EvolveResult out{w0, {}};
  out.weights.w.diagonal().setZero();
  auto& rep = out.report;
  rep.trace.reserve(std::min<std::size_t>(params.max_steps, 1u << 16));
  const double stop = params.tol * params.dt;

  for (std::size_t step = 1; step <= params.max_steps; ++step) {
    WeightMatrix next = euler_step(out.weights, t, params, mask);
    const double change = (next.w - out.weights.w).cwiseAbs().maxCoeff();
    out.weights = std::move(next);

    const Vector rows = out.weights.w.rowwise().sum();
    rep.trace.push_back({step, change / params.dt, rows.minCoeff(), rows.mean(), rows.maxCoeff()});
    rep.steps = step;
    rep.final_max_rhs = change / params.dt;
    if (change < stop) {
      rep.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

EvolveResult evolve_weights(const WeightMatrix& w, const CorrelationTensor& t,
                            const PlasticityParams& params) {
  return evolve_impl(w, t, params, nullptr);
}

EvolveResult evolve_weights(const WeightMatrix& w, const CorrelationTensor& t,
                            const PlasticityParams& params, const Matrix& plastic_mask) {
  return evolve_impl(w, t, params, &plastic_mask);
}

std::string EvolveReport::to_key_value() const {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "steps = " << steps << '\n';
  out << "converged = " << (converged ? "true" : "false") << '\n';
  out << "final_max_rhs = " << final_max_rhs << '\n';
  if (!trace.empty()) {
    out << "final_min_row_sum = " << trace.back().min_row_sum << '\n';
    out << "final_mean_row_sum = " << trace.back().mean_row_sum << '\n';
    out << "final_max_row_sum = " << trace.back().max_row_sum << '\n';
  }
  return out.str();
}

void EvolveReport::write_trace_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << "step,max_rhs,min_row_sum,mean_row_sum,max_row_sum\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : trace)
    out << r.step << ',' << r.max_rhs << ',' << r.min_row_sum << ',' << r.mean_row_sum << ','
        << r.max_row_sum << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace swta
