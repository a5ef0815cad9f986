#pragma once

// Standard normal helpers evaluated in the log domain.

namespace icmm::detail {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_norm_pdf(double x);

// log Phi(x), accurate in both tails.
double log_norm_cdf(double x);

// Phi^{-1}(exp(log_p)) for log_p <= 0.
double norm_quantile_from_log(double log_p);

double log_sum_exp(double a, double b);

// log(1 + exp(x)) without overflow.
double log1p_exp(double x);

// 1 / (1 + exp(-x)) without overflow.
double logistic(double x);

}  // namespace icmm::detail
