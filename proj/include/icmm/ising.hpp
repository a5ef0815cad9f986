#pragma once

#include "icmm/data_model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace icmm {

/// Ising prior P(tau) proportional to exp(a sum tau_j + b sum_{<j,l>} tau_j tau_l).
struct IsingParams {
  double a = 0.0;
  double b = 0.0;
};

inline constexpr double kIsingBound = 20.0;

/// Inclusion indicators; tau[j] is 1 exactly when beta_j != 0.
using Indicators = std::vector<std::uint8_t>;

Indicators indicators_from(const Eigen::VectorXd& beta);

std::vector<int> neighbor_sums(const Indicators& tau, const EdgeList& graph);

/// Maximizes the pseudo-likelihood prod_j P(tau_j | neighbours), i.e. the
/// logistic regression of tau_j on its neighbour sum, over the box
/// [-20, 20]^2 by damped (projected) Newton iterations.
///
/// Degenerate inputs: constant tau gives b = 0 and a = +-20; a neighbour sum
/// with no variation gives b = 0 and a = logit(k / p), clamped.
IsingParams fit_ising_pseudolikelihood(const Indicators& tau, const EdgeList& graph);

/// 1 / (1 + exp(-a - b * neighbor_sum)).
double inclusion_prob(const IsingParams& params, double neighbor_sum);

double conditional_inclusion_prob(std::size_t j, const Indicators& tau, const EdgeList& graph,
                                  const IsingParams& params);

}  // namespace icmm
