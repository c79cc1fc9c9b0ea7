#include "hyperball/geometry.hpp"

#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "hyperball/error.hpp"
#include "hyperball/random.hpp"

namespace hyperball {
namespace {

void check_in_ball(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() < 2) {
    throw DomainError("ball dimension must be at least 2, got " + std::to_string(v.size()));
  }
  if (!v.allFinite()) throw DomainError("point has non-finite coordinates");
  const double norm = v.norm();
  if (!(norm < 1.0 - kBoundaryMargin)) {
    throw BoundaryError("point norm " + std::to_string(norm) +
                        " is not below 1 - 1e-12");
  }
}

}  // namespace

namespace detail {

BallPoint trusted_point(Eigen::VectorXd coords) {
  if (!(coords.squaredNorm() < 1.0) || !coords.allFinite()) {
    throw BoundaryError("computed point left the open unit ball");
  }
  return BallPoint(std::move(coords), BallPoint::Trusted{});
}

}  // namespace detail

BallPoint::BallPoint(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  check_in_ball(coords_);
}

BallPoint::BallPoint(std::initializer_list<double> coords)
    : BallPoint(Eigen::Map<const Eigen::VectorXd>(coords.begin(),
                                                  static_cast<Eigen::Index>(coords.size()))) {}

BallPoint BallPoint::origin(int dim) { return BallPoint(Eigen::VectorXd::Zero(dim)); }

PointSet::PointSet(Eigen::MatrixXd columns) : data_(std::move(columns)) {
  for (Eigen::Index i = 0; i < data_.cols(); ++i) check_in_ball(data_.col(i));
}

PointSet::PointSet(std::span<const BallPoint> points) {
  if (points.empty()) return;
  const int n = points.front().dim();
  data_.resize(n, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].dim() != n) throw DimensionError("points of mixed dimension");
    data_.col(static_cast<Eigen::Index>(i)) = points[i].coords();
  }
}

BallPoint PointSet::point(std::size_t i) const {
  return detail::trusted_point(data_.col(static_cast<Eigen::Index>(i)));
}

void require_same_dim(const BallPoint& x, const BallPoint& y) {
  if (x.dim() != y.dim()) {
    throw DimensionError("dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                         std::to_string(y.dim()));
  }
}

double rho(const BallPoint& x, const BallPoint& a) {
  require_same_dim(x, a);
  return detail::rho_raw(x.coords().data(), a.coords().data(), x.squared_norm(),
                         a.squared_norm(), x.dim());
}

double hyperbolic_distance(const BallPoint& x, const BallPoint& y,
                           DistanceConvention convention) {
  const double r2 = (x.coords() - y.coords()).squaredNorm() / rho(x, y);
  const double r = std::sqrt(r2);
  if (!(r < 1.0)) {
    throw BoundaryError("points too close to the boundary: R = " + std::to_string(r));
  }
  const double d = std::atanh(r);
  return convention == DistanceConvention::kFullMetric ? 2.0 * d : d;
}

BallPoint moebius_add(const BallPoint& c, const BallPoint& x) {
  require_same_dim(c, x);
  const double cx = c.coords().dot(x.coords());
  const double c2 = c.squared_norm();
  const double x2 = x.squared_norm();
  const double denom = 1.0 + 2.0 * cx + c2 * x2;
  return detail::trusted_point(((1.0 + 2.0 * cx + x2) * c.coords() + (1.0 - c2) * x.coords()) /
                               denom);
}

BallPoint moebius_apply(const BallPoint& a, const BallPoint& x) {
  require_same_dim(a, x);
  Eigen::VectorXd out(a.dim());
  detail::h_raw(a.coords().data(), a.squared_norm(), x.coords().data(), out.data(), a.dim());
  return detail::trusted_point(std::move(out));
}

MoebiusMap::MoebiusMap(BallPoint center)
    : center_(std::move(center)),
      rotation_(Eigen::MatrixXd::Identity(center_.dim(), center_.dim())) {}

MoebiusMap::MoebiusMap(BallPoint center, Eigen::MatrixXd rotation)
    : center_(std::move(center)), rotation_(std::move(rotation)) {
  const int n = center_.dim();
  if (rotation_.rows() != n || rotation_.cols() != n) {
    throw DimensionError("rotation must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  const double defect =
      (rotation_.transpose() * rotation_ - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > 1e-12) {
    throw DomainError("rotation is not orthogonal (defect " + std::to_string(defect) + ")");
  }
}

MoebiusMap MoebiusMap::identity(int dim) {
  // h_0(x) = -x, so the identity is (-I) h_0.
  return MoebiusMap(BallPoint::origin(dim), -Eigen::MatrixXd::Identity(dim, dim));
}

MoebiusMap MoebiusMap::translation(const BallPoint& c) {
  // c (+) x = h_c(-x) = -h_{-c}(x).
  return MoebiusMap(detail::trusted_point(-c.coords()),
                    -Eigen::MatrixXd::Identity(c.dim(), c.dim()));
}

BallPoint MoebiusMap::operator()(const BallPoint& x) const {
  require_same_dim(center_, x);
  Eigen::VectorXd tmp(x.dim());
  detail::h_raw(center_.coords().data(), center_.squared_norm(), x.coords().data(), tmp.data(),
                x.dim());
  return detail::trusted_point(rotation_ * tmp);
}

PointSet MoebiusMap::operator()(const PointSet& points) const {
  if (points.empty()) return points;
  if (points.dim() != dim()) throw DimensionError("point set dimension mismatch");
  const int n = dim();
  const double a2 = center_.squared_norm();
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(points.size()));
  Eigen::VectorXd tmp(n);
  for (std::size_t i = 0; i < points.size(); ++i) {
    detail::h_raw(center_.coords().data(), a2, points.matrix().col(static_cast<Eigen::Index>(i)).data(),
                  tmp.data(), n);
    out.col(static_cast<Eigen::Index>(i)) = rotation_ * tmp;
  }
  return PointSet(std::move(out));
}

MoebiusMap MoebiusMap::inverse() const {
  // (A h_a)^{-1} = h_a A^T = A^T h_{A a}.
  return MoebiusMap(detail::trusted_point(rotation_ * center_.coords()),
                    rotation_.transpose());
}

MoebiusMap MoebiusMap::compose(const MoebiusMap& inner) const {
  const int n = dim();
  if (inner.dim() != n) throw DimensionError("cannot compose maps of different dimension");
  // M = h_p C with p = M(0) and C = h_p o M orthogonal, so M = C h_{C^T p}.
  const BallPoint p = (*this)(inner(BallPoint::origin(n)));
  constexpr double kProbe = 0.5;
  Eigen::MatrixXd frame(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = kProbe;
    const BallPoint image = (*this)(inner(BallPoint(e)));
    frame.col(j) = moebius_apply(p, image).coords() / kProbe;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(frame, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd rotation = svd.matrixU() * svd.matrixV().transpose();
  return MoebiusMap(detail::trusted_point(rotation.transpose() * p.coords()), rotation);
}

BallPoint moebius_apply(const MoebiusMap& map, const BallPoint& x) { return map(x); }

std::complex<double> moebius_disc(std::complex<double> a, double theta, std::complex<double> z) {
  if (!(std::abs(a) < 1.0 - kBoundaryMargin) || !(std::abs(z) < 1.0 - kBoundaryMargin)) {
    throw BoundaryError("disc Mobius map requires |a| < 1 and |z| < 1");
  }
  return std::polar(1.0, theta) * (a - z) / (1.0 - std::conj(a) * z);
}

double hyperbolic_measure_density(const BallPoint& x) {
  return std::pow(1.0 - x.squared_norm(), -static_cast<double>(x.dim()));
}

MoebiusMap random_moebius(int dim, Rng& rng, double max_radius) {
  Eigen::VectorXd dir(dim);
  for (int k = 0; k < dim; ++k) dir[k] = rng.normal();
  dir.normalize();
  const double radius = max_radius * std::pow(rng.uniform(), 1.0 / dim);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  // Re-orthonormalise to push the defect well below the 1e-12 check.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  q = svd.matrixU() * svd.matrixV().transpose();
  return MoebiusMap(BallPoint(Eigen::VectorXd(radius * dir)), q);
}

}  // namespace hyperball
