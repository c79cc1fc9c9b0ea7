#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include "hyperball/barycenter.hpp"
#include "hyperball/geometry.hpp"
#include "hyperball/random.hpp"

namespace hyperball {

/// Parameters (a, s) of Moeb_n(a, s); s > n - 1.
class MoebiusComponent {
 public:
  MoebiusComponent(BallPoint location, double concentration);

  const BallPoint& location() const noexcept { return location_; }
  double concentration() const noexcept { return concentration_; }
  int dim() const noexcept { return location_.dim(); }

 private:
  BallPoint location_;
  double concentration_;
};

/// log C_n(s) with C_n(s) = Gamma(1+s-n/2) / (pi^{n/2} Gamma(1+s-n)); equals
/// log((s-1)/pi) for n = 2.
double log_normalizer(int n, double s);

/// Log density with respect to the hyperbolic measure:
///   log C_n(s) + s log[(1-|x|^2)(1-|a|^2) / rho(a, x)].
double log_density(const BallPoint& x, const MoebiusComponent& comp);
double density(const BallPoint& x, const MoebiusComponent& comp);

/// One draw: u uniform on S^{n-1}, kappa uniform, b = radial inverse CDF,
/// result h_a(b u). Draws landing within the boundary margin are redrawn.
BallPoint sample_one(const MoebiusComponent& comp, Rng& rng);

/// count draws; draw i uses generator stream (seed, i) so the output does not
/// depend on evaluation order.
PointSet sample(const MoebiusComponent& comp, std::size_t count, std::uint64_t seed);

enum class ConcentrationMethod {
  kAuto,        // closed form for n = 2, root solve otherwise
  kClosedForm,  // n = 2 only: s = 1 + W / H
  kRootSolve,   // W [psi(1+s-n/2) - psi(1+s-n)] = H by bracketed bisection
};

/// Weighted log-likelihood in s at a fixed location, up to an s-free
/// constant: W [log Gamma(1+s-n/2) - log Gamma(1+s-n)] - s H.
double concentration_objective(int n, double total_weight, double weighted_potential, double s);

/// Maximiser of concentration_objective over s > n - 1, clamped to
/// [n - 1 + 1e-6, s_max]. Throws NumericalError when the potential is zero
/// (below 1e-14 per unit weight; the maximiser is at infinity) and s_max is
/// infinite.
double solve_concentration(int n, double total_weight, double weighted_potential,
                           ConcentrationMethod method = ConcentrationMethod::kAuto,
                           double s_max = std::numeric_limits<double>::infinity());

struct MleOptions {
  BarycenterOptions barycenter;
  ConcentrationMethod method = ConcentrationMethod::kAuto;
  double s_max = std::numeric_limits<double>::infinity();
};

/// Weighted maximum-likelihood fit: location is the weighted barycenter,
/// concentration solves the score equation at that location.
MoebiusComponent mle(const WeightedDataset& data, const MleOptions& opts = {});

}  // namespace hyperball
