#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hyperball/geometry.hpp"

namespace hyperball {

/// Points of B^n with nonnegative weights, at least one of them positive.
class WeightedDataset {
 public:
  WeightedDataset(PointSet points, Eigen::VectorXd weights);
  /// All weights equal to one.
  static WeightedDataset unit(PointSet points);

  const PointSet& points() const noexcept { return points_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  int dim() const noexcept { return points_.dim(); }
  std::size_t size() const noexcept { return points_.size(); }
  double total_weight() const noexcept { return weights_.sum(); }

  /// Copy without the zero-weight points.
  WeightedDataset without_zero_weights() const;

 private:
  PointSet points_;
  Eigen::VectorXd weights_;
};

struct BarycenterOptions {
  double step_size = 0.5;
  /// Bound on the weight-normalised residual |sum_i w_i h_a(y_i)| / W.
  double tolerance = 1e-10;
  int max_iterations = 10'000;
  /// Warm start; the origin when empty.
  std::optional<BallPoint> initial;
  /// Use complex arithmetic when n = 2.
  bool disc_fast_path = true;
};

struct BarycenterReport {
  BallPoint point;
  int iterations = 0;
  double residual_norm = 0.0;  // normalised, as in BarycenterOptions::tolerance
};

/// Weighted potential -sum_i w_i log[(1-|a|^2)(1-|y_i|^2) / rho(y_i, a)] >= 0.
double potential(const BallPoint& a, const WeightedDataset& data);

/// Euclidean gradient of potential() with respect to a:
///   sum_i w_i [2a / (1-|a|^2) + 2(a|y_i|^2 - y_i) / rho(y_i, a)].
Eigen::VectorXd potential_gradient(const BallPoint& a, const WeightedDataset& data);

/// sum_i w_i h_a(y_i); zero exactly at the weighted barycenter.
Eigen::VectorXd residual(const BallPoint& a, const WeightedDataset& data);

/// Damped fixed-point iteration a <- h_a(eta * residual(a) / W). Throws
/// ConvergenceError carrying the last iterate when max_iterations is hit.
BarycenterReport solve_barycenter(const WeightedDataset& data, const BarycenterOptions& opts = {});

/// The unique minimiser of potential().
BallPoint barycenter(const WeightedDataset& data, const BarycenterOptions& opts = {});

// ---------------------------------------------------------------------------
// Swarm gradient flow
//
//   dx_i/dt = 1/2 (1 + |x_i|^2) f - <x_i, f> x_i,   f = (K/N) sum_j w_j x_j,
//
// a hyperbolic gradient flow of the potential. The right-hand side with f
// held fixed generates the translations x -> c (+) x, so each step freezes f
// and applies the exact translation with c = tanh(|f| dt / 2) f/|f|. The
// iterates are therefore exact Mobius images of the input and the
// barycenter is recovered by replaying the inverse translations on 0.

struct FlowRecord {
  Eigen::VectorXd field;  // f used by the step
  double dt = 0.0;        // accepted step length
};

struct FlowState {
  PointSet positions;
  double coupling = -1.0;  // K < 0
  double time = 0.0;
  std::vector<FlowRecord> field_log;
};

/// One frozen-field step. Halves dt while any position would reach the
/// boundary; throws NumericalError once dt underflows.
FlowState flow_step(const FlowState& state, double dt, std::span<const double> weights);
/// In-place flow_step.
void flow_advance(FlowState& state, double dt, std::span<const double> weights);

/// Explicit Euler step of the disc form dz/dt = i (f z^2 + conj(f)) with
/// f = (i K / 2N) conj(sum_j w_j z_j).
std::vector<std::complex<double>> disc_flow_step(std::span<const std::complex<double>> z,
                                                 std::span<const double> weights,
                                                 double coupling, double dt);

/// Potential of the current positions evaluated at the origin; the quantity
/// the flow decreases.
double origin_potential(const FlowState& state, std::span<const double> weights);

struct FlowOptions {
  double dt = 0.05;
  double coupling = -1.0;
  double tolerance = 1e-10;  // on |sum_i w_i x_i| / W
  long max_steps = 1'000'000;
};

struct FlowResult {
  BallPoint barycenter;
  FlowState final_state;
  long steps = 0;
};

/// Integrates the flow until the weighted mean of the positions vanishes,
/// then replays the recorded steps backwards on the origin.
FlowResult barycenter_via_flow(const WeightedDataset& data, const FlowOptions& opts = {});

/// Inverse replay of a field log starting from the origin of B^n.
BallPoint replay_origin(std::span<const FlowRecord> log, int dim);

}  // namespace hyperball
