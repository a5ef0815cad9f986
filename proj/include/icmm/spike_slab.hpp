#pragma once

// Scalar spike-and-slab problem on the standardized scale:
//
//   s | u ~ N(u, 1),   u ~ (1 - w) delta_0 + w * Laplace(alpha),
//
// where the Laplace slab has density (alpha / 2) exp(-alpha |u|). Every
// coefficient update of the ICM/M engine reduces to this problem.

namespace icmm {

struct ThresholdProblem {
  double s = 0.0;      // standardized sufficient statistic
  double w = 0.5;      // prior slab weight in [0, 1]
  double alpha = 0.5;  // Laplace rate, > 0
};

struct ThresholdSolution {
  double median = 0.0;         // posterior median of u
  double prob_nonzero = 0.0;   // P(u != 0 | s)
  double threshold = 0.0;      // median is zero exactly when |s| <= threshold
};

inline constexpr double kDefaultAlpha = 0.5;

/// Slab marginal g(s) = integral of phi(s - u) (alpha/2) exp(-alpha|u|) du.
double marginal_density(double s, double alpha);
double log_marginal_density(double s, double alpha);

/// Posterior probability of the slab, w g(s) / (w g(s) + (1 - w) phi(s)).
double posterior_nonzero_prob(const ThresholdProblem& problem);

/// Posterior median together with the nonzero probability and the
/// threshold of the (w, alpha) rule.
ThresholdSolution posterior_median(const ThresholdProblem& problem);

/// Median only; skips the threshold search. Identical to
/// posterior_median(problem).median.
double posterior_median_value(const ThresholdProblem& problem);

/// Largest |s| with a zero median. Infinite when w == 0.
double threshold(double w, double alpha);

/// Maps a standardized median back to the coefficient scale (median / scale).
double unstandardize_coef(double median, double scale);

}  // namespace icmm
