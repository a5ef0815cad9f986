#include "icmm/ising.hpp"

#include "icmm/diagnostics.hpp"
#include "normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace icmm {

Indicators indicators_from(const Eigen::VectorXd& beta) {
  Indicators tau(static_cast<std::size_t>(beta.size()));
  for (Eigen::Index j = 0; j < beta.size(); ++j) tau[static_cast<std::size_t>(j)] = beta[j] != 0.0;
  return tau;
}

std::vector<int> neighbor_sums(const Indicators& tau, const EdgeList& graph) {
  if (tau.size() != graph.num_nodes()) throw std::invalid_argument("tau length does not match graph");
  std::vector<int> sums(tau.size(), 0);
  for (const auto& [j, l] : graph.edges()) {
    sums[j] += tau[l];
    sums[l] += tau[j];
  }
  return sums;
}

double inclusion_prob(const IsingParams& params, double neighbor_sum) {
  return detail::logistic(params.a + params.b * neighbor_sum);
}

double conditional_inclusion_prob(std::size_t j, const Indicators& tau, const EdgeList& graph,
                                  const IsingParams& params) {
  if (j >= tau.size() || tau.size() != graph.num_nodes())
    throw std::invalid_argument("conditional_inclusion_prob: index out of range");
  int sum = 0;
  for (const auto l : graph.neighbors(j)) sum += tau[l];
  return inclusion_prob(params, sum);
}

namespace {

double clamp_box(double v) { return std::clamp(v, -kIsingBound, kIsingBound); }

struct PseudoLikelihood {
  const Indicators& tau;
  const std::vector<int>& x;

  double value(double a, double b) const {
    double ll = 0.0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const double eta = a + b * x[j];
      ll += tau[j] * eta - detail::log1p_exp(eta);
    }
    return ll;
  }

  // Gradient and (negated) Hessian of the log pseudo-likelihood.
  void derivatives(double a, double b, std::array<double, 2>& grad,
                   std::array<double, 3>& info) const {
    grad = {0.0, 0.0};
    info = {0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const double xj = x[j];
      const double pi = detail::logistic(a + b * xj);
      const double r = tau[j] - pi;
      const double v = pi * (1.0 - pi);
      grad[0] += r;
      grad[1] += r * xj;
      info[0] += v;
      info[1] += v * xj;
      info[2] += v * xj * xj;
    }
  }
};

}  // namespace

IsingParams fit_ising_pseudolikelihood(const Indicators& tau, const EdgeList& graph) {
  const std::size_t p = tau.size();
  if (p < 2) throw std::invalid_argument("fit_ising_pseudolikelihood needs p >= 2");
  const auto x = neighbor_sums(tau, graph);
  const auto k = static_cast<double>(std::count(tau.begin(), tau.end(), 1));

  if (k == 0.0 || k == static_cast<double>(p)) {
    warn(std::string("Ising fit: all indicators are ") + (k == 0.0 ? "0" : "1") +
         "; using the clamped intercept-only fit");
    return {k == 0.0 ? -kIsingBound : kIsingBound, 0.0};
  }
  const bool constant_x = std::all_of(x.begin(), x.end(), [&](int v) { return v == x[0]; });
  if (constant_x) {
    // Slope not identified; the intercept-only MLE is logit(k / p).
    const double frac = k / static_cast<double>(p);
    return {clamp_box(std::log(frac) - std::log1p(-frac)), 0.0};
  }

  const PseudoLikelihood pl{tau, x};
  const double frac = k / static_cast<double>(p);
  std::array<double, 2> theta{clamp_box(std::log(frac) - std::log1p(-frac)), 0.0};
  // Complete separation in the neighbour sum sends b to infinity, where the
  // objective is numerically flat; start b on the matching face of the box.
  int max0 = std::numeric_limits<int>::min(), min0 = std::numeric_limits<int>::max();
  int max1 = max0, min1 = min0;
  for (std::size_t j = 0; j < p; ++j) {
    if (tau[j]) {
      max1 = std::max(max1, x[j]);
      min1 = std::min(min1, x[j]);
    } else {
      max0 = std::max(max0, x[j]);
      min0 = std::min(min0, x[j]);
    }
  }
  if (min1 > max0) theta[1] = kIsingBound;
  else if (max1 < min0) theta[1] = -kIsingBound;
  double ll = pl.value(theta[0], theta[1]);
  std::array<double, 2> grad{};
  std::array<double, 3> info{};

  for (int iter = 0; iter < 100; ++iter) {
    pl.derivatives(theta[0], theta[1], grad, info);
    // Coordinates pinned at the box with the gradient pointing outward are
    // held fixed.
    std::array<bool, 2> fixed{};
    for (int c = 0; c < 2; ++c) {
      fixed[c] = (theta[c] >= kIsingBound && grad[c] >= 0.0) ||
                 (theta[c] <= -kIsingBound && grad[c] <= 0.0);
    }
    double proj_grad = 0.0;
    for (int c = 0; c < 2; ++c)
      if (!fixed[c]) proj_grad = std::max(proj_grad, std::abs(grad[c]));

    std::array<double, 2> step{0.0, 0.0};
    if (!fixed[0] && !fixed[1]) {
      const double det = info[0] * info[2] - info[1] * info[1];
      if (det > 1e-300) {
        step[0] = (info[2] * grad[0] - info[1] * grad[1]) / det;
        step[1] = (info[0] * grad[1] - info[1] * grad[0]) / det;
      } else {
        step = {info[0] > 0.0 ? grad[0] / info[0] : grad[0], info[2] > 0.0 ? grad[1] / info[2] : grad[1]};
      }
    } else if (!fixed[0]) {
      step[0] = info[0] > 0.0 ? grad[0] / info[0] : grad[0];
    } else if (!fixed[1]) {
      step[1] = info[2] > 0.0 ? grad[1] / info[2] : grad[1];
    }
    // Under separation the gradient vanishes long before the box is reached
    // while the Newton steps stay large, so both must be small to stop.
    if (proj_grad <= 1e-8 && std::max(std::abs(step[0]), std::abs(step[1])) <= 1e-6) break;

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const std::array<double, 2> cand{clamp_box(theta[0] + t * step[0]),
                                       clamp_box(theta[1] + t * step[1])};
      const double cand_ll = pl.value(cand[0], cand[1]);
      // Near the optimum the gain of a full Newton step falls below the
      // rounding of the objective; allow it.
      const double slack = halving == 0 ? 1e-13 * (1.0 + std::abs(ll)) : 0.0;
      if (cand_ll >= ll - slack) {
        accepted = cand != theta || cand_ll > ll;
        theta = cand;
        ll = cand_ll;
        break;
      }
    }
    if (!accepted) break;
  }
  return {theta[0], theta[1]};
}

}  // namespace icmm
