#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swta/dynamics.hpp"

namespace swta {

struct PlasticityParams {
  double alpha = 0.01;  // unspecific growth rate
  double beta = 1.0;    // cooperation gain
  double v = 1.0;       // saturation ceiling
  double dt = 0.01;     // Euler step
  std::size_t max_steps = 20000;
  double tol = 1e-6;    // convergence threshold on max |dw/dt|

  /// Throws Parameter when a field is out of its domain.
  void validate() const;
};

/// Throws Parameter unless dt * (alpha * n + beta * t_max) < 1.
void check_step_stability(const PlasticityParams& params, std::size_t n, double t_max);

/// f(w_ij) = alpha (1 - N w_ij) + beta w_ij (T_ij - sum_{j' != i} w_ij' T_ij'),
/// zero on the diagonal.
Matrix haeussler_rhs(const WeightMatrix& w, const CorrelationTensor& t, const PlasticityParams& params);

/// 1 for w <= v, 0 above.
inline double saturation_gate(double w, double v) noexcept { return w <= v ? 1.0 : 0.0; }

struct EvolveTraceRow {
  std::size_t step = 0;
  double max_rhs = 0.0;
  double min_row_sum = 0.0;
  double mean_row_sum = 0.0;
  double max_row_sum = 0.0;
};

struct EvolveReport {
  std::size_t steps = 0;
  bool converged = false;
  double final_max_rhs = 0.0;
  std::vector<EvolveTraceRow> trace;

  /// `key = value` lines.
  std::string to_key_value() const;
  void write_trace_csv(const std::filesystem::path& path) const;
};

struct EvolveResult {
  WeightMatrix weights;
  EvolveReport report;
};

/// One forward Euler step: clamp_[0,v](w + dt * gate(w) * f(w)), diagonal
/// kept at zero. Entries where `plastic_mask` is zero do not change.
WeightMatrix euler_step(const WeightMatrix& w, const CorrelationTensor& t,
                        const PlasticityParams& params, const Matrix* plastic_mask = nullptr);

/// Iterates euler_step until the largest per-step change drops below tol * dt
/// or max_steps is reached. Non-convergence is reported, not thrown.
EvolveResult evolve_weights(const WeightMatrix& w, const CorrelationTensor& t,
                            const PlasticityParams& params);
EvolveResult evolve_weights(const WeightMatrix& w, const CorrelationTensor& t,
                            const PlasticityParams& params, const Matrix& plastic_mask);

}  // namespace swta
