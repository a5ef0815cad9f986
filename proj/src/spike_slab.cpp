#include "icmm/spike_slab.hpp"

#include "normal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace icmm {

using detail::log_norm_cdf;
using detail::log_norm_pdf;
using detail::log_sum_exp;

namespace {

void check(const ThresholdProblem& p) {
  if (!std::isfinite(p.s)) throw std::invalid_argument("spike_slab: s must be finite");
  if (!(p.w >= 0.0 && p.w <= 1.0)) throw std::invalid_argument("spike_slab: w must lie in [0, 1]");
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
    throw std::invalid_argument("spike_slab: alpha must be positive");
}

// log of exp(-alpha s) Phi(s - alpha) and exp(alpha s) Phi(-s - alpha), the
// positive- and negative-side slab posterior masses (up to a common factor).
struct SideMasses {
  double log_pos;
  double log_neg;
};

SideMasses side_masses(double s, double alpha) {
  return {-alpha * s + log_norm_cdf(s - alpha), alpha * s + log_norm_cdf(-s - alpha)};
}

double log_slab_odds(const ThresholdProblem& p) {
  return std::log(p.w) - std::log1p(-p.w) + log_marginal_density(p.s, p.alpha) - log_norm_pdf(p.s);
}

// For s >= 0 the median is positive exactly when the posterior mass above 0
// exceeds 1/2. Writing that mass as pi * q_plus with
//   x = (Phi(s - alpha) + exp(2 alpha s) Phi(-s - alpha)) / (2 pi),
// the condition becomes x < Phi(s - alpha) and the median solves
//   Phi(s - alpha - m) = x.
struct MedianTerms {
  double log_x;
  double log_cdf_shift;  // log Phi(s - alpha)
};

MedianTerms median_terms(double s_abs, double w, double alpha) {
  const double log_cdf_shift = log_norm_cdf(s_abs - alpha);
  const double log_tail = 2.0 * alpha * s_abs + log_norm_cdf(-s_abs - alpha);
  double log_pi = 0.0;
  if (w < 1.0) {
    const double odds = log_slab_odds({s_abs, w, alpha});
    log_pi = -detail::log1p_exp(-odds);
  }
  const double log_x = log_sum_exp(log_cdf_shift, log_tail) - std::log(2.0) - log_pi;
  return {log_x, log_cdf_shift};
}

bool median_is_nonzero(double s_abs, double w, double alpha) {
  if (w == 0.0 || s_abs == 0.0) return false;
  const auto t = median_terms(s_abs, w, alpha);
  return t.log_x < t.log_cdf_shift;
}

double median_for_abs(double s_abs, double w, double alpha) {
  if (w == 0.0 || s_abs == 0.0) return 0.0;
  const auto t = median_terms(s_abs, w, alpha);
  if (!(t.log_x < t.log_cdf_shift)) return 0.0;
  const double m = s_abs - alpha - detail::norm_quantile_from_log(t.log_x);
  // Exact arithmetic gives 0 < m <= s_abs; guard the rounding.
  if (m > s_abs) return s_abs;
  if (!(m > 0.0)) return std::numeric_limits<double>::min();
  return m;
}

}  // namespace

double log_marginal_density(double s, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("marginal_density: alpha must be positive");
  const auto m = side_masses(s, alpha);
  return std::log(alpha / 2.0) + 0.5 * alpha * alpha + log_sum_exp(m.log_pos, m.log_neg);
}

double marginal_density(double s, double alpha) { return std::exp(log_marginal_density(s, alpha)); }

double posterior_nonzero_prob(const ThresholdProblem& problem) {
  check(problem);
  if (problem.w == 0.0) return 0.0;
  if (problem.w == 1.0) return 1.0;
  return detail::logistic(log_slab_odds(problem));
}

double posterior_median_value(const ThresholdProblem& problem) {
  check(problem);
  const double m = median_for_abs(std::abs(problem.s), problem.w, problem.alpha);
  return problem.s < 0.0 ? -m : m;
}

double threshold(double w, double alpha) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("threshold: w must lie in [0, 1]");
  if (!(alpha > 0.0)) throw std::invalid_argument("threshold: alpha must be positive");
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  if (w == 1.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (!median_is_nonzero(hi, w, alpha)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::numeric_limits<double>::infinity();
  }
  // Invariant: median(lo) == 0 (or lo == 0), median(hi) != 0.
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (median_is_nonzero(mid, w, alpha)) hi = mid;
    else lo = mid;
  }
  return lo;
}

ThresholdSolution posterior_median(const ThresholdProblem& problem) {
  check(problem);
  return {posterior_median_value(problem), posterior_nonzero_prob(problem),
          threshold(problem.w, problem.alpha)};
}

double unstandardize_coef(double median, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("unstandardize_coef: scale must be positive");
  return median / scale;
}

}  // namespace icmm
