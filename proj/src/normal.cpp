#include "normal.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>

namespace icmm::detail {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
}

double log_norm_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double log_norm_cdf(double x) {
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
  if (x > -30.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
  // Asymptotic Mills-ratio series; the truncation error at x = -30 is below
  // 1e-12 relative.
  const double z = 1.0 / (x * x);
  const double series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z * (1.0 - 9.0 * z))));
  return log_norm_pdf(x) - std::log(-x) + std::log(series);
}

double norm_quantile_from_log(double log_p) {
  if (log_p >= 0.0) return std::numeric_limits<double>::infinity();
  if (log_p > -0.6931471805599453) {
    // p > 1/2: work with the complement to keep precision near 1.
    const double q = -std::expm1(log_p);
    return kSqrt2 * boost::math::erfc_inv(2.0 * q);
  }
  if (log_p > -700.0) {
    return -kSqrt2 * boost::math::erfc_inv(2.0 * std::exp(log_p));
  }
  // Deep lower tail: Newton iterations on log Phi.
  double x = -std::sqrt(-2.0 * log_p);
  for (int it = 0; it < 100; ++it) {
    const double f = log_norm_cdf(x) - log_p;
    const double slope = std::exp(log_norm_pdf(x) - log_norm_cdf(x));
    const double step = f / slope;
    x -= step;
    if (std::abs(step) <= 1e-15 * std::abs(x)) break;
  }
  return x;
}

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double log1p_exp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace icmm::detail
