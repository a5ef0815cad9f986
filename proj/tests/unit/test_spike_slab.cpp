#include "icmm/spike_slab.hpp"

#include "oracles/posterior_oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace icmm;

TEST_CASE("marginal density is symmetric and matches quadrature") {
  for (double s : {0.5, 2.0, 7.0}) CHECK(marginal_density(s, 0.5) == doctest::Approx(marginal_density(-s, 0.5)).epsilon(1e-15));
  const oracle::PosteriorOracle at0(0.0, 0.5, 0.5);
  CHECK(std::fabs(marginal_density(0.0, 0.5) - double(at0.marginal())) <= 1e-10);
  for (double alpha : {0.05, 0.5, 2.0})
    for (double s : {-6.0, -1.0, 0.3, 4.0}) {
      const oracle::PosteriorOracle o(s, 0.5, alpha);
      CHECK(std::fabs(marginal_density(s, alpha) - double(o.marginal())) <= 1e-12);
    }
}

TEST_CASE("marginal density stays finite far in the tail") {
  const double g = marginal_density(20.0, 0.5);
  CHECK(std::isfinite(g));
  CHECK(g > 0.0);
  const oracle::PosteriorOracle o(20.0, 0.5, 0.5);
  CHECK(std::fabs(std::log(g) - std::log(double(o.marginal()))) <= 1e-10);
  CHECK(std::isfinite(log_marginal_density(1e4, 0.5)));
  CHECK(std::isfinite(log_marginal_density(-1e4, 2.0)));
}

TEST_CASE("nonzero probability edge weights") {
  for (double s : {-3.0, 0.0, 5.0}) {
    CHECK(posterior_nonzero_prob({s, 0.0, 0.5}) == 0.0);
    CHECK(posterior_nonzero_prob({s, 1.0, 0.5}) == 1.0);
  }
}

TEST_CASE("nonzero probability at w = 0.5, alpha = 0.5, s = 3") {
  const oracle::PosteriorOracle o(3.0, 0.5, 0.5);
  CHECK(std::fabs(posterior_nonzero_prob({3.0, 0.5, 0.5}) - double(o.prob_nonzero())) <= 1e-8);
}

TEST_CASE("median examples") {
  CHECK(posterior_median({0.0, 0.3, 0.5}).median == 0.0);
  CHECK(posterior_median({0.0, 0.99, 2.0}).median == 0.0);
  // Flat slab with no spike: the median approaches s.
  for (double s : {-3.0, 0.7, 5.0}) CHECK(std::fabs(posterior_median_value({s, 1.0, 1e-6}) - s) <= 1e-3);
  for (double s : {0.5, 1.5, 2.5, 4.0}) {
    const oracle::PosteriorOracle o(s, 0.5, 0.5);
    CHECK(std::fabs(posterior_median({s, 0.5, 0.5}).median - double(o.median())) <= 1e-6);
  }
}

TEST_CASE("median agrees with oracle on random triples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> us(-8.0, 8.0), uw(0.0, 1.0), ua(0.05, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double s = us(rng), w = uw(rng), a = ua(rng);
    const oracle::PosteriorOracle o(s, w, a);
    INFO("s=" << s << " w=" << w << " alpha=" << a);
    CHECK(std::fabs(posterior_median_value({s, w, a}) - double(o.median())) <= 1e-6);
    CHECK(std::fabs(posterior_nonzero_prob({s, w, a}) - double(o.prob_nonzero())) <= 1e-8);
  }
}

TEST_CASE("posterior_median reports consistent threshold") {
  for (double w : {0.01, 0.2, 0.5, 0.9})
    for (double a : {0.1, 0.5, 1.5}) {
      const double t = threshold(w, a);
      CHECK(t >= 0.0);
      CHECK(posterior_median_value({t * (1 - 1e-9), w, a}) == 0.0);
      CHECK(posterior_median_value({t * (1 + 1e-6) + 1e-9, w, a}) != 0.0);
      CHECK(posterior_median({1.0, w, a}).threshold == t);
    }
  CHECK(std::isinf(threshold(0.0, 0.5)));
  CHECK(threshold(1.0, 0.5) == 0.0);
}

TEST_CASE("threshold decreases in w") {
  double prev = std::numeric_limits<double>::infinity();
  for (double w = 0.001; w < 1.0; w += 0.05) {
    const double t = threshold(w, 0.5);
    CHECK(t <= prev);
    prev = t;
  }
}

TEST_CASE("antisymmetry and shrinkage") {
  for (double s = -12.0; s <= 12.0; s += 0.37)
    for (double w : {0.05, 0.5, 0.95}) {
      const double m = posterior_median_value({s, w, 0.5});
      CHECK(posterior_median_value({-s, w, 0.5}) == -m);
      CHECK(std::fabs(m) <= std::fabs(s));
    }
}

TEST_CASE("extreme statistics stay finite") {
  for (double s : {-1e6, -40.0, 40.0, 1e6}) {
    const auto sol = posterior_median({s, 0.01, 0.5});
    CHECK(std::isfinite(sol.median));
    CHECK(sol.prob_nonzero == doctest::Approx(1.0));
    CHECK(std::fabs(sol.median) <= std::fabs(s));
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS(posterior_median({1.0, -0.1, 0.5}));
  CHECK_THROWS(posterior_median({1.0, 1.1, 0.5}));
  CHECK_THROWS(posterior_median({1.0, 0.5, 0.0}));
  CHECK_THROWS(posterior_median({std::nan(""), 0.5, 0.5}));
}

TEST_CASE("unstandardize_coef") {
  CHECK(unstandardize_coef(0.0, 3.0) == 0.0);
  CHECK(unstandardize_coef(2.0, 4.0) == 0.5);
  CHECK_THROWS(unstandardize_coef(1.0, 0.0));
  CHECK_THROWS(unstandardize_coef(1.0, -2.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0), sc(0.01, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const double beta = u(rng), scale = sc(rng);
    CHECK(std::fabs(unstandardize_coef(beta * scale, scale) - beta) <= 1e-12 * std::max(1.0, std::fabs(beta)));
  }
}
