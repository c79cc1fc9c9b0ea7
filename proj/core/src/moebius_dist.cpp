#include "hyperball/moebius_dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hyperball/error.hpp"
#include "hyperball/special.hpp"

namespace hyperball {
namespace {

constexpr double kDegeneratePotential = 1e-14;
constexpr double kLowerOffset = 1e-6;

double score(int n, double total_weight, double weighted_potential, double s) {
  return total_weight * (digamma(1.0 + s - n / 2.0) - digamma(1.0 + s - n)) - weighted_potential;
}

}  // namespace

MoebiusComponent::MoebiusComponent(BallPoint location, double concentration)
    : location_(std::move(location)), concentration_(concentration) {
  const int n = location_.dim();
  if (!(concentration_ > n - 1.0) || !std::isfinite(concentration_)) {
    throw DomainError("Mobius concentration must satisfy s > n - 1 (n = " + std::to_string(n) +
                      ", s = " + std::to_string(concentration_) + ")");
  }
}

double log_normalizer(int n, double s) {
  if (n < 2 || !(s > n - 1.0)) throw DomainError("log_normalizer requires n >= 2 and s > n - 1");
  return log_gamma(1.0 + s - n / 2.0) - log_gamma(1.0 + s - n) -
         0.5 * n * std::log(std::numbers::pi);
}

double log_density(const BallPoint& x, const MoebiusComponent& comp) {
  require_same_dim(x, comp.location());
  const int n = x.dim();
  const double log_ratio = detail::log_conformal_ratio(
      x.coords().data(), comp.location().coords().data(), x.squared_norm(),
      comp.location().squared_norm(), n);
  return log_normalizer(n, comp.concentration()) + comp.concentration() * std::min(log_ratio, 0.0);
}

double density(const BallPoint& x, const MoebiusComponent& comp) {
  return std::exp(log_density(x, comp));
}

BallPoint sample_one(const MoebiusComponent& comp, Rng& rng) {
  const int n = comp.dim();
  const double s = comp.concentration();
  const RadialLaw law(n, s);
  Eigen::VectorXd u(n);
  for (;;) {
    double u2 = 0.0;
    do {
      for (int k = 0; k < n; ++k) u[k] = rng.normal();
      u2 = u.squaredNorm();
    } while (u2 == 0.0);
    u /= std::sqrt(u2);
    const double kappa = rng.uniform();
    const double b = n == 2 ? radial_cdf_inverse_disc(kappa, s) : radial_cdf_inverse(kappa, law);
    const Eigen::VectorXd y = b * u;
    if (!(y.norm() < 1.0 - kBoundaryMargin)) continue;
    Eigen::VectorXd x(n);
    detail::h_raw(comp.location().coords().data(), comp.location().squared_norm(), y.data(),
                  x.data(), n);
    if (x.norm() < 1.0 - kBoundaryMargin) return BallPoint(std::move(x));
  }
}

PointSet sample(const MoebiusComponent& comp, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw DomainError("sample count must be at least 1");
  Eigen::MatrixXd out(comp.dim(), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, i);
    out.col(static_cast<Eigen::Index>(i)) = sample_one(comp, rng).coords();
  }
  return PointSet(std::move(out));
}

double concentration_objective(int n, double total_weight, double weighted_potential, double s) {
  return total_weight * (log_gamma(1.0 + s - n / 2.0) - log_gamma(1.0 + s - n)) -
         s * weighted_potential;
}

double solve_concentration(int n, double total_weight, double weighted_potential,
                           ConcentrationMethod method, double s_max) {
  if (n < 2) throw DomainError("dimension must be at least 2");
  if (!(total_weight > 0.0)) throw DomainError("total weight must be positive");
  if (!(weighted_potential >= 0.0)) throw DomainError("weighted potential must be nonnegative");
  const double lower = n - 1.0 + kLowerOffset;
  if (!(s_max > lower)) throw DomainError("s_max must exceed n - 1");

  // A mean potential at rounding level means all mass sits on one point.
  if (weighted_potential <= kDegeneratePotential * total_weight) {
    if (std::isfinite(s_max)) return s_max;
    throw NumericalError("concentration overflow: data carry no spread (potential is zero)");
  }

  if (method == ConcentrationMethod::kAuto) {
    method = n == 2 ? ConcentrationMethod::kClosedForm : ConcentrationMethod::kRootSolve;
  }
  if (method == ConcentrationMethod::kClosedForm) {
    if (n != 2) throw DomainError("closed-form concentration exists only for n = 2");
    return std::clamp(1.0 + total_weight / weighted_potential, lower, s_max);
  }

  // The score is strictly decreasing in s: +inf at n - 1, -H at infinity.
  if (score(n, total_weight, weighted_potential, lower) <= 0.0) return lower;
  double lo = lower;
  double hi = std::max(2.0 * n, lower + 1.0);
  while (score(n, total_weight, weighted_potential, hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > s_max) return s_max;
    if (hi > 1e300) throw NumericalError("concentration overflow while bracketing");
  }
  if (hi > s_max && score(n, total_weight, weighted_potential, s_max) > 0.0) return s_max;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (score(n, total_weight, weighted_potential, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::min(0.5 * (lo + hi), s_max);
}

MoebiusComponent mle(const WeightedDataset& data, const MleOptions& opts) {
  BallPoint location = barycenter(data, opts.barycenter);
  const double h = potential(location, data);
  const double s =
      solve_concentration(data.dim(), data.total_weight(), h, opts.method, opts.s_max);
  return MoebiusComponent(std::move(location), s);
}

}  // namespace hyperball
