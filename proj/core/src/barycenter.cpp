#include "hyperball/barycenter.hpp"

#include <cmath>
#include <string>

#include "hyperball/error.hpp"

namespace hyperball {
namespace {

using Complex = std::complex<double>;

// Weighted mean of h_a(y_i), general dimension.
void mean_residual(const Eigen::VectorXd& a, const WeightedDataset& data, double total,
                   Eigen::VectorXd& out, Eigen::VectorXd& scratch) {
  const int n = data.dim();
  const double a2 = a.squaredNorm();
  const Eigen::MatrixXd& y = data.points().matrix();
  const Eigen::VectorXd& w = data.weights();
  out.setZero(n);
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    detail::h_raw(a.data(), a2, y.col(i).data(), scratch.data(), n);
    out.noalias() += w[i] * scratch;
  }
  out /= total;
}

Complex mean_residual_disc(Complex a, std::span<const Complex> z, const Eigen::VectorXd& w,
                           double total) {
  const Complex ac = std::conj(a);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    sum += w[static_cast<Eigen::Index>(i)] * (a - z[i]) / (1.0 - ac * z[i]);
  }
  return sum / total;
}

bool all_identical(const PointSet& points) {
  const Eigen::MatrixXd& m = points.matrix();
  for (Eigen::Index i = 1; i < m.cols(); ++i) {
    if (m.col(i) != m.col(0)) return false;
  }
  return true;
}

double step_radius(double field_norm, double dt) { return std::tanh(0.5 * field_norm * dt); }

}  // namespace

WeightedDataset::WeightedDataset(PointSet points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw DomainError("weighted dataset is empty");
  if (static_cast<std::size_t>(weights_.size()) != points_.size()) {
    throw DimensionError("weights and points differ in length");
  }
  bool any_positive = false;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw DomainError("weights must be finite and nonnegative");
    }
    any_positive = any_positive || weights_[i] > 0.0;
  }
  if (!any_positive) throw DomainError("at least one weight must be positive");
}

WeightedDataset WeightedDataset::unit(PointSet points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  return WeightedDataset(std::move(points), Eigen::VectorXd::Ones(n));
}

WeightedDataset WeightedDataset::without_zero_weights() const {
  const Eigen::Index kept = (weights_.array() > 0.0).count();
  if (kept == weights_.size()) return *this;
  Eigen::MatrixXd pts(dim(), kept);
  Eigen::VectorXd w(kept);
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (weights_[i] > 0.0) {
      pts.col(j) = points_.matrix().col(i);
      w[j] = weights_[i];
      ++j;
    }
  }
  return WeightedDataset(PointSet(std::move(pts)), std::move(w));
}

double potential(const BallPoint& a, const WeightedDataset& data) {
  if (a.dim() != data.dim()) throw DimensionError("potential: dimension mismatch");
  const int n = a.dim();
  const double a2 = a.squared_norm();
  const Eigen::MatrixXd& y = data.points().matrix();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    const double w = data.weights()[i];
    if (w == 0.0) continue;
    const double log_ratio =
        detail::log_conformal_ratio(y.col(i).data(), a.coords().data(), y.col(i).squaredNorm(), a2, n);
    if (!std::isfinite(log_ratio)) throw BoundaryError("potential: degenerate log ratio");
    // log(1 - R^2) <= 0; clamp rounding noise at R = 0.
    sum -= w * std::min(log_ratio, 0.0);
  }
  return sum;
}

Eigen::VectorXd potential_gradient(const BallPoint& a, const WeightedDataset& data) {
  if (a.dim() != data.dim()) throw DimensionError("potential_gradient: dimension mismatch");
  const double a2 = a.squared_norm();
  const Eigen::MatrixXd& y = data.points().matrix();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(a.dim());
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    const double w = data.weights()[i];
    const double y2 = y.col(i).squaredNorm();
    const double r = detail::rho_raw(y.col(i).data(), a.coords().data(), y2, a2, a.dim());
    grad += w * (2.0 * a.coords() / (1.0 - a2) + 2.0 * (y2 * a.coords() - y.col(i)) / r);
  }
  return grad;
}

Eigen::VectorXd residual(const BallPoint& a, const WeightedDataset& data) {
  if (a.dim() != data.dim()) throw DimensionError("residual: dimension mismatch");
  Eigen::VectorXd out(a.dim());
  Eigen::VectorXd scratch(a.dim());
  mean_residual(a.coords(), data, 1.0, out, scratch);
  return out;
}

BarycenterReport solve_barycenter(const WeightedDataset& input, const BarycenterOptions& opts) {
  if (!(opts.step_size > 0.0) || !(opts.tolerance > 0.0) || opts.max_iterations <= 0) {
    throw DomainError("barycenter options must be positive");
  }
  const WeightedDataset data = input.without_zero_weights();
  const int n = data.dim();
  if (all_identical(data.points())) return {data.points().point(0), 0, 0.0};

  const double total = data.total_weight();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  if (opts.initial) {
    if (opts.initial->dim() != n) throw DimensionError("barycenter warm start dimension");
    a = opts.initial->coords();
  }
  const double eta = opts.step_size;

  if (n == 2 && opts.disc_fast_path) {
    std::vector<Complex> z(data.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = {data.points().col(i)[0], data.points().col(i)[1]};
    Complex az{a[0], a[1]};
    double norm = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
      const Complex r = mean_residual_disc(az, z, data.weights(), total);
      norm = std::abs(r);
      if (norm < opts.tolerance) {
        return {detail::trusted_point(Eigen::Vector2d(az.real(), az.imag())), it, norm};
      }
      const Complex step = eta * r;
      az = (az - step) / (1.0 - std::conj(az) * step);
    }
    throw ConvergenceError("barycenter did not converge in " + std::to_string(opts.max_iterations) +
                               " iterations",
                           Eigen::Vector2d(az.real(), az.imag()), norm);
  }

  Eigen::VectorXd r(n);
  Eigen::VectorXd scratch(n);
  Eigen::VectorXd next(n);
  double norm = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    mean_residual(a, data, total, r, scratch);
    norm = r.norm();
    if (norm < opts.tolerance) return {detail::trusted_point(a), it, norm};
    // Step in the chart where a sits at the origin, then map back (h_a is
    // an involution).
    scratch = eta * r;
    detail::h_raw(a.data(), a.squaredNorm(), scratch.data(), next.data(), n);
    a.swap(next);
  }
  throw ConvergenceError("barycenter did not converge in " + std::to_string(opts.max_iterations) +
                             " iterations",
                         a, norm);
}

BallPoint barycenter(const WeightedDataset& data, const BarycenterOptions& opts) {
  return solve_barycenter(data, opts).point;
}

FlowState flow_step(const FlowState& state, double dt, std::span<const double> weights) {
  FlowState next = state;
  flow_advance(next, dt, weights);
  return next;
}

void flow_advance(FlowState& state, double dt, std::span<const double> weights) {
  if (!(state.coupling < 0.0)) throw DomainError("flow coupling K must be negative");
  if (!(dt > 0.0)) throw DomainError("flow step must be positive");
  const PointSet& x = state.positions;
  if (weights.size() != x.size()) throw DimensionError("flow weights and positions differ");
  const int n = x.dim();
  const auto count = static_cast<double>(x.size());

  Eigen::VectorXd field = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < x.size(); ++i) field += weights[i] * x.col(i);
  field *= state.coupling / count;

  const double fnorm = field.norm();
  if (fnorm == 0.0) {
    state.time += dt;
    state.field_log.push_back({field, dt});
    return;
  }
  const Eigen::VectorXd dir = field / fnorm;

  for (;;) {
    const Eigen::VectorXd c = step_radius(fnorm, dt) * dir;
    const double c2 = c.squaredNorm();
    Eigen::MatrixXd moved(n, static_cast<Eigen::Index>(x.size()));
    bool inside = true;
    for (std::size_t i = 0; i < x.size() && inside; ++i) {
      const auto xi = x.col(i);
      const double cx = c.dot(xi);
      const double x2 = xi.squaredNorm();
      const auto col = static_cast<Eigen::Index>(i);
      moved.col(col) = ((1.0 + 2.0 * cx + x2) * c + (1.0 - c2) * xi) / (1.0 + 2.0 * cx + c2 * x2);
      inside = moved.col(col).norm() < 1.0 - kBoundaryMargin;
    }
    if (inside) {
      state.positions = PointSet(std::move(moved));
      state.time += dt;
      state.field_log.push_back({field, dt});
      return;
    }
    dt *= 0.5;
    if (dt < 1e-300) throw NumericalError("flow step size underflow");
  }
}

std::vector<std::complex<double>> disc_flow_step(std::span<const std::complex<double>> z,
                                                 std::span<const double> weights,
                                                 double coupling, double dt) {
  if (!(coupling < 0.0)) throw DomainError("flow coupling K must be negative");
  if (weights.size() != z.size()) throw DimensionError("flow weights and positions differ");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += weights[i] * z[i];
  const Complex i_unit{0.0, 1.0};
  const Complex f = i_unit * coupling / (2.0 * static_cast<double>(z.size())) * std::conj(sum);
  std::vector<Complex> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = z[i] + dt * i_unit * (f * z[i] * z[i] + std::conj(f));
  }
  return out;
}

double origin_potential(const FlowState& state, std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t i = 0; i < state.positions.size(); ++i) {
    sum -= weights[i] * std::log1p(-state.positions.col(i).squaredNorm());
  }
  return sum;
}

BallPoint replay_origin(std::span<const FlowRecord> log, int dim) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
  for (auto it = log.rbegin(); it != log.rend(); ++it) {
    const double fnorm = it->field.norm();
    if (fnorm == 0.0) continue;
    const Eigen::VectorXd c = -step_radius(fnorm, it->dt) * (it->field / fnorm);
    const double cp = c.dot(p);
    const double c2 = c.squaredNorm();
    const double p2 = p.squaredNorm();
    p = ((1.0 + 2.0 * cp + p2) * c + (1.0 - c2) * p) / (1.0 + 2.0 * cp + c2 * p2);
  }
  return detail::trusted_point(std::move(p));
}

FlowResult barycenter_via_flow(const WeightedDataset& input, const FlowOptions& opts) {
  if (!(opts.dt > 0.0) || !(opts.tolerance > 0.0)) throw DomainError("flow options must be positive");
  const WeightedDataset data = input.without_zero_weights();
  const std::span<const double> w(data.weights().data(), data.size());
  const double total = data.total_weight();

  FlowState state{data.points(), opts.coupling, 0.0, {}};
  long steps = 0;
  for (;; ++steps) {
    const double mean = (state.positions.matrix() * data.weights()).norm() / total;
    if (mean < opts.tolerance) break;
    if (steps >= opts.max_steps) {
      throw ConvergenceError("swarm flow did not reach consensus",
                             replay_origin(state.field_log, data.dim()).coords(), mean);
    }
    flow_advance(state, opts.dt, w);
  }
  BallPoint bary = replay_origin(state.field_log, data.dim());
  return {std::move(bary), std::move(state), steps};
}

}  // namespace hyperball
