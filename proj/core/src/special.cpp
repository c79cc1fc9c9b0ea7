#include "hyperball/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "hyperball/error.hpp"

namespace hyperball {
namespace {

constexpr double kSeriesRelTol = 1e-15;
constexpr long kMaxSeriesTerms = 1'000'000;

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

// log[x^p / (p B(p, q))], evaluated in log space so large shapes do not
// overflow the Gamma ratio.
double log_beta_prefix(double x, double p, double q) {
  return p * std::log(x) - std::log(p) + log_gamma(p + q) - log_gamma(p) - log_gamma(q);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma requires a positive finite argument, got " + std::to_string(x));
  }
  return std::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("digamma requires a positive finite argument, got " + std::to_string(x));
  }
  // Shift up with psi(x) = psi(x+1) - 1/x, then the asymptotic series.
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli terms B_{2k} / (2k x^{2k}), k = 1..7.
  const double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 -
                                              inv2 * (691.0 / 32760 - inv2 * (1.0 / 12)))))));
  return shift + std::log(x) - 0.5 * inv - tail;
}

double gauss_2f1(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw DomainError("2F1: c must not be a nonpositive integer");
  if (!(z >= 0.0 && z < 1.0)) throw DomainError("2F1: z must lie in [0, 1)");
  if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;

  const bool terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
  double term = 1.0;
  double sum = 1.0;
  for (long k = 0; k < kMaxSeriesTerms; ++k) {
    const double kd = static_cast<double>(k);
    term *= (a + kd) * (b + kd) / ((c + kd) * (kd + 1.0)) * z;
    if (term == 0.0) return sum;  // exact termination
    sum += term;
    if (!terminating && std::abs(term) < kSeriesRelTol * std::abs(sum)) return sum;
  }
  throw ConvergenceError("2F1 series did not converge within 1e6 terms", Eigen::VectorXd(),
                         std::abs(term));
}

RadialLaw::RadialLaw(int n, double s) : n_(n), s_(s) {
  if (n < 2) throw DomainError("radial law requires n >= 2");
  if (!(s > n - 1.0) || !std::isfinite(s)) {
    throw DomainError("concentration must satisfy s > n - 1 (n = " + std::to_string(n) +
                      ", s = " + std::to_string(s) + ")");
  }
  polynomial_ = is_nonpositive_integer(static_cast<double>(n) - s);
}

double radial_cdf(double b, const RadialLaw& law) {
  if (!(b >= 0.0 && b < 1.0)) throw DomainError("radial_cdf: b must lie in [0, 1)");
  if (b == 0.0) return 0.0;
  const double n = law.dim();
  const double s = law.concentration();
  const double p = n / 2.0;          // beta shape of b^2
  const double q = s - n + 1.0;      // beta shape of 1 - b^2
  const double x = b * b;

  if (x <= (p + 1.0) / (p + q + 2.0)) {
    // I_x(p, q) = x^p / (p B(p, q)) 2F1(p, 1-q; p+1; x).
    const double value = std::exp(log_beta_prefix(x, p, q)) * gauss_2f1(p, 1.0 - q, p + 1.0, x);
    return std::clamp(value, 0.0, 1.0);
  }
  // I_x(p, q) = 1 - I_{1-x}(q, p).
  const double y = 1.0 - x;
  const double comp = std::exp(log_beta_prefix(y, q, p)) * gauss_2f1(q, 1.0 - p, q + 1.0, y);
  return std::clamp(1.0 - comp, 0.0, 1.0);
}

double radial_cdf_inverse(double kappa, const RadialLaw& law) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw DomainError("radial_cdf_inverse: kappa in [0, 1)");
  if (kappa == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  // Stop when the bracket no longer splits in double precision.
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = radial_cdf(mid, law);
    if (f == kappa) return mid;
    if (f < kappa) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // hi may equal 1 only if kappa is within rounding of 1; stay inside.
  return hi < 1.0 ? 0.5 * (lo + hi) : lo;
}

double radial_cdf_inverse_disc(double kappa, double s) {
  if (!(s > 1.0)) throw DomainError("disc concentration must exceed 1");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw DomainError("kappa must lie in [0, 1)");
  // b^2 = 1 - (1 - kappa)^{1/(s-1)}
  return std::sqrt(-std::expm1(std::log1p(-kappa) / (s - 1.0)));
}

}  // namespace hyperball
