#pragma once

namespace hyperball {

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// psi(x) = Gamma'(x) / Gamma(x) for x > 0.
double digamma(double x);

/// Gauss hypergeometric series 2F1(a, b; c; z) for 0 <= z < 1. Summation
/// stops once a term drops below 1e-15 of the partial sum; a nonpositive
/// integer b (or a) terminates the series and it is summed exactly. Throws
/// ConvergenceError after 10^6 terms.
double gauss_2f1(double a, double b, double c, double z);

/// Radial law of Moeb_n(0, s): the distribution of |y|.
class RadialLaw {
 public:
  /// Throws DomainError unless n >= 2 and s > n - 1.
  RadialLaw(int n, double s);

  int dim() const noexcept { return n_; }
  double concentration() const noexcept { return s_; }

  /// True when n - s is a nonpositive integer, i.e. the CDF is a polynomial.
  bool polynomial() const noexcept { return polynomial_; }

 private:
  int n_;
  double s_;
  bool polynomial_;
};

/// P(|y| <= b) = [2 Gamma(1+s-n/2) / (Gamma(1+s-n) Gamma(n/2))] (b^n/n)
///               * 2F1(n/2, n-s; n/2+1; b^2).
/// This is the regularised incomplete beta I_{b^2}(n/2, s-n+1); for b^2 past
/// (p+1)/(p+q+2) the complementary series in 1-b^2 is summed instead, which
/// converges fast there and avoids cancellation in long alternating
/// polynomials.
double radial_cdf(double b, const RadialLaw& law);

/// Bisection inverse of radial_cdf on [0, 1).
double radial_cdf_inverse(double kappa, const RadialLaw& law);

/// Closed-form inverse for n = 2: b = sqrt(1 - (1 - kappa)^{1/(s-1)}).
double radial_cdf_inverse_disc(double kappa, double s);

}  // namespace hyperball
