#include "icmm/ising.hpp"

#include "oracles/logistic_mle_oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace icmm;

namespace {

EdgeList path(std::size_t p) {
  EdgeList g(p);
  for (std::size_t j = 0; j + 1 < p; ++j) g.add_edge(j, j + 1);
  return g;
}

}  // namespace

TEST_CASE("neighbor sums") {
  const EdgeList empty(4);
  CHECK(neighbor_sums({1, 0, 1, 1}, empty) == std::vector<int>{0, 0, 0, 0});
  CHECK(neighbor_sums({1, 1, 1}, path(3)) == std::vector<int>{1, 2, 1});
  CHECK(neighbor_sums({0, 0, 0}, path(3)) == std::vector<int>{0, 0, 0});
}

TEST_CASE("indicators mark exact nonzeros") {
  const Eigen::Vector4d beta(0.0, -1e-300, 2.0, -0.0);
  CHECK(indicators_from(beta) == Indicators{0, 1, 1, 0});
}

TEST_CASE("intercept-only fits") {
  const EdgeList empty(10);
  Indicators tau(10, 0);
  tau[1] = tau[4] = tau[7] = 1;
  const auto fit = fit_ising_pseudolikelihood(tau, empty);
  CHECK(fit.b == 0.0);
  CHECK(std::fabs(fit.a - std::log(3.0 / 7.0)) <= 1e-10);

  const auto ones = fit_ising_pseudolikelihood(Indicators(10, 1), path(10));
  CHECK(ones.a == kIsingBound);
  CHECK(ones.b == 0.0);
  const auto zeros = fit_ising_pseudolikelihood(Indicators(10, 0), path(10));
  CHECK(zeros.a == -kIsingBound);
  CHECK(zeros.b == 0.0);
}

TEST_CASE("separated indicators are clamped to the box") {
  // A 4-clique of ones next to isolated zeros separates perfectly in the
  // neighbour sum.
  EdgeList g(8);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t l = j + 1; l < 4; ++l) g.add_edge(j, l);
  const Indicators tau{1, 1, 1, 1, 0, 0, 0, 0};
  const auto fit = fit_ising_pseudolikelihood(tau, g);
  CHECK(fit.a == doctest::Approx(-kIsingBound));
  CHECK(fit.b == doctest::Approx(kIsingBound));
}

TEST_CASE("pseudo-likelihood fit matches the logistic MLE") {
  std::mt19937_64 rng(17);
  int compared = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t p = 20;
    EdgeList g = path(p);
    std::bernoulli_distribution extra(0.05), on(0.45);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t l = j + 2; l < p; ++l)
        if (extra(rng)) g.add_edge(j, l);
    Indicators tau(p);
    for (auto& t : tau) t = on(rng);
    const auto sums = neighbor_sums(tau, g);
    const auto mle = oracle::logistic_mle(std::vector<int>(tau.begin(), tau.end()), sums, 1e-13);
    if (!mle) continue;
    ++compared;
    const auto fit = fit_ising_pseudolikelihood(tau, g);
    CHECK(std::fabs(fit.a - static_cast<double>(mle->a)) <= 1e-6);
    CHECK(std::fabs(fit.b - static_cast<double>(mle->b)) <= 1e-6);
  }
  CHECK(compared >= 40);
}

TEST_CASE("conditional inclusion probabilities") {
  const auto g = path(5);
  const Indicators tau{1, 0, 1, 1, 0};
  for (std::size_t j = 0; j < 5; ++j) CHECK(conditional_inclusion_prob(j, tau, g, {0.0, 0.0}) == 0.5);
  CHECK(inclusion_prob({0.0, 1.0}, 2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
  CHECK(inclusion_prob({0.0, 1.0}, 2.0) == doctest::Approx(0.8808).epsilon(1e-4));
  const double expect = 1.0 / (1.0 + std::exp(1.3));
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(conditional_inclusion_prob(j, tau, g, {-1.3, 0.0}) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("inclusion probability is monotone in the neighbour sum") {
  for (double b : {-2.0, -0.1, 0.1, 3.0}) {
    double prev = inclusion_prob({0.3, b}, 0.0);
    for (int s = 1; s <= 30; ++s) {
      const double cur = inclusion_prob({0.3, b}, s);
      if (b > 0) CHECK(cur >= prev);
      else CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("relabelling predictors permutes sums and keeps the fit") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t p = 25;
    EdgeList g(p);
    std::bernoulli_distribution edge(0.12), on(0.4);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t l = j + 1; l < p; ++l)
        if (edge(rng)) g.add_edge(j, l);
    Indicators tau(p);
    for (auto& t : tau) t = on(rng);
    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Indicators tau_p(p);
    for (std::size_t j = 0; j < p; ++j) tau_p[perm[j]] = tau[j];
    const auto gp = g.permuted(perm);
    const auto s = neighbor_sums(tau, g), sp = neighbor_sums(tau_p, gp);
    for (std::size_t j = 0; j < p; ++j) CHECK(sp[perm[j]] == s[j]);
    const auto f = fit_ising_pseudolikelihood(tau, g), fp = fit_ising_pseudolikelihood(tau_p, gp);
    CHECK(std::fabs(f.a - fp.a) <= 1e-9);
    CHECK(std::fabs(f.b - fp.b) <= 1e-9);
  }
}
