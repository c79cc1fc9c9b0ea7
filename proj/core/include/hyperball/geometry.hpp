#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>

#include <Eigen/Core>

namespace hyperball {

class BallPoint;
namespace detail {
// Wraps a computed point that is mathematically inside the ball. Only the
// hard constraint |x| < 1 is checked, not the input margin.
BallPoint trusted_point(Eigen::VectorXd coords);
}  // namespace detail

/// Points with Euclidean norm at or beyond 1 - kBoundaryMargin are rejected.
inline constexpr double kBoundaryMargin = 1e-12;

/// A point of the open Poincare ball B^n, n >= 2.
class BallPoint {
 public:
  /// Validates dimension and the boundary margin; throws BoundaryError or
  /// DomainError.
  explicit BallPoint(Eigen::VectorXd coords);
  BallPoint(std::initializer_list<double> coords);

  /// The origin of B^n.
  static BallPoint origin(int dim);

  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  double squared_norm() const noexcept { return coords_.squaredNorm(); }
  double norm() const noexcept { return coords_.norm(); }
  double operator[](int i) const { return coords_[i]; }

 private:
  struct Trusted {};
  BallPoint(Eigen::VectorXd coords, Trusted) : coords_(std::move(coords)) {}
  friend BallPoint detail::trusted_point(Eigen::VectorXd coords);

  Eigen::VectorXd coords_;
};

/// N points of B^n stored column-wise (n x N), validated once on
/// construction so hot loops can work on raw columns.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(Eigen::MatrixXd columns);
  explicit PointSet(std::span<const BallPoint> points);

  int dim() const noexcept { return static_cast<int>(data_.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(data_.cols()); }
  bool empty() const noexcept { return data_.cols() == 0; }

  const Eigen::MatrixXd& matrix() const noexcept { return data_; }
  auto col(std::size_t i) const { return data_.col(static_cast<Eigen::Index>(i)); }
  BallPoint point(std::size_t i) const;

 private:
  Eigen::MatrixXd data_;
};

void require_same_dim(const BallPoint& x, const BallPoint& y);

/// rho(x, a) = |x - a|^2 + (1 - |a|^2)(1 - |x|^2). Equals |1 - conj(a) x|^2
/// in the disc.
double rho(const BallPoint& x, const BallPoint& a);

enum class DistanceConvention {
  kHalfLog,     // d = 1/2 log((1+R)/(1-R)) = artanh R
  kFullMetric,  // 2 artanh R, matching ds^2 = 4|dx|^2/(1-|x|^2)^2
};

/// Hyperbolic distance via R = |x - y| / sqrt(rho(x, y)). Throws
/// BoundaryError when R rounds to 1 or more.
double hyperbolic_distance(const BallPoint& x, const BallPoint& y,
                           DistanceConvention convention = DistanceConvention::kHalfLog);

/// Mobius (gyrovector) addition c (+) x; the translation carrying 0 to c.
BallPoint moebius_add(const BallPoint& c, const BallPoint& x);

/// Isometry x -> A h_a(x) with
///   h_a(x) = (a |x - a|^2 + (1 - |a|^2)(a - x)) / rho(x, a).
/// h_a swaps 0 and a and is its own inverse. Compositions are renormalised
/// to (A, a) form from the action on 0 and on an orthonormal frame.
class MoebiusMap {
 public:
  explicit MoebiusMap(BallPoint center);
  /// Throws DomainError unless rotation^T rotation = I within 1e-12.
  MoebiusMap(BallPoint center, Eigen::MatrixXd rotation);

  static MoebiusMap identity(int dim);
  /// x -> c (+) x.
  static MoebiusMap translation(const BallPoint& c);

  const BallPoint& center() const noexcept { return center_; }
  const Eigen::MatrixXd& rotation() const noexcept { return rotation_; }
  int dim() const noexcept { return center_.dim(); }

  BallPoint operator()(const BallPoint& x) const;
  PointSet operator()(const PointSet& points) const;

  MoebiusMap inverse() const;
  /// (this o inner)(x) = this(inner(x)).
  MoebiusMap compose(const MoebiusMap& inner) const;

 private:
  BallPoint center_;
  Eigen::MatrixXd rotation_;
};

/// Pure map h_a.
BallPoint moebius_apply(const BallPoint& a, const BallPoint& x);
BallPoint moebius_apply(const MoebiusMap& map, const BallPoint& x);

/// Disc isometry e^{i theta} (a - z) / (1 - conj(a) z).
std::complex<double> moebius_disc(std::complex<double> a, double theta,
                                  std::complex<double> z);

/// dLambda/dlambda = 1 / (1 - |x|^2)^n.
double hyperbolic_measure_density(const BallPoint& x);

/// Uniformly random isometry for tests and tooling: center drawn with norm
/// below max_radius, rotation from QR of a Gaussian matrix.
class Rng;
MoebiusMap random_moebius(int dim, Rng& rng, double max_radius = 0.9);

namespace detail {

// Unchecked kernels over raw coordinates; callers guarantee dimensions and
// ball membership.
inline double rho_raw(const double* x, const double* a, double x2, double a2, int n) {
  double diff2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = x[k] - a[k];
    diff2 += d * d;
  }
  return diff2 + (1.0 - a2) * (1.0 - x2);
}

// out = h_a(x); returns rho(x, a).
inline double h_raw(const double* a, double a2, const double* x, double* out, int n) {
  double diff2 = 0.0;
  double x2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = x[k] - a[k];
    diff2 += d * d;
    x2 += x[k] * x[k];
  }
  const double r = diff2 + (1.0 - a2) * (1.0 - x2);
  const double inv = 1.0 / r;
  for (int k = 0; k < n; ++k) {
    out[k] = (a[k] * diff2 + (1.0 - a2) * (a[k] - x[k])) * inv;
  }
  return r;
}

// log[(1 - |a|^2)(1 - |x|^2) / rho(x, a)] = log(1 - R^2) <= 0.
inline double log_conformal_ratio(const double* x, const double* a, double x2, double a2,
                                  int n) {
  const double r = rho_raw(x, a, x2, a2, n);
  return std::log1p(-a2) + std::log1p(-x2) - std::log(r);
}

}  // namespace detail

}  // namespace hyperball
