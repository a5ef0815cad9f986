#include "icmm/glm_family.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

using namespace icmm;

namespace {

SurvivalResponse surv(std::initializer_list<double> t, std::initializer_list<double> d) {
  SurvivalResponse r;
  r.time = Eigen::Map<const Eigen::VectorXd>(t.begin(), static_cast<Eigen::Index>(t.size()));
  r.status = Eigen::Map<const Eigen::VectorXd>(d.begin(), static_cast<Eigen::Index>(d.size()));
  return r;
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace

TEST_CASE("gaussian pseudodata") {
  Eigen::MatrixXd x(2, 1);
  x << 0.3, -0.7;
  const Eigen::Vector2d y(1, 2);
  const auto st = gaussian_pseudo(x, y, 0.0, Eigen::VectorXd::Zero(1));
  CHECK(st.eta == Eigen::Vector2d(0, 0));
  CHECK(st.z == y);
  const auto st2 = gaussian_pseudo(x, y, 0.4, Eigen::VectorXd::Constant(1, 1.7));
  CHECK(st2.z == y);
  CHECK(st2.sigma2[0] == st2.sigma2[1]);

  // Perfect fit hits the variance floor.
  Eigen::MatrixXd x3(3, 1);
  x3 << 1, 2, 3;
  const auto fit = gaussian_pseudo(x3, Eigen::Vector3d(2, 4, 6), 0.0, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(fit.sigma2[0] == glm::kGaussianVarianceFloor);
}

TEST_CASE("logistic pseudodata at the symmetric point") {
  const auto one = logistic_working(0.0, 1.0);
  CHECK(one.z == 2.0);
  CHECK(one.sigma2 == 4.0);
  const auto zero = logistic_working(0.0, 0.0);
  CHECK(zero.z == -2.0);
  CHECK(zero.sigma2 == 4.0);
  CHECK(logistic_fitted_probability(0.0) == 0.5);
}

TEST_CASE("logistic clipping at large eta") {
  using big = boost::multiprecision::cpp_bin_float_50;
  const auto clipped = logistic_working(50.0, 0.0);
  const auto at30 = logistic_working(30.0, 0.0);
  CHECK(clipped.z == at30.z);
  CHECK(clipped.sigma2 == at30.sigma2);
  // Extended-precision evaluation at eta = 30.
  const big e = exp(big(-30));
  const big hp = 1 / (1 + e), hm = e / (1 + e);
  const big z = big(30) - 1 / hm;
  const big s2 = 1 / (hm * hp);
  CHECK(std::fabs(clipped.z / z.convert_to<double>() - 1.0) <= 1e-14);
  CHECK(std::fabs(clipped.sigma2 / s2.convert_to<double>() - 1.0) <= 1e-14);
  CHECK(std::isfinite(clipped.z));
  CHECK(logistic_fitted_probability(50.0) == 1.0);
  CHECK(logistic_fitted_probability(-50.0) == 0.0);
  CHECK(logistic_fitted_probability(-12.0) == 0.0);
  CHECK(logistic_fitted_probability(-11.0) > 0.0);
}

TEST_CASE("logistic symmetry and agreement with the naive form") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 20000; ++k) {
    const double eta = u(rng);
    const double y = k % 2;
    const auto w = logistic_working(eta, y);
    const auto flip = logistic_working(-eta, 1.0 - y);
    CHECK(flip.z == -w.z);
    CHECK(flip.sigma2 == w.sigma2);
    const double pi = 1.0 / (1.0 + std::exp(-eta));
    const double z = eta + (y - pi) / (pi * (1.0 - pi));
    const double s2 = 1.0 / (pi * (1.0 - pi));
    CHECK(std::fabs(w.z - z) <= 1e-10 * std::fabs(z));
    CHECK(std::fabs(w.sigma2 - s2) <= 1e-10 * s2);
  }
  for (double eta : {-1e6, -1e3, 1e3, 1e6}) {
    const auto w = logistic_working(eta, 1.0);
    CHECK(std::isfinite(w.z));
    CHECK(std::isfinite(w.sigma2));
    CHECK(w.sigma2 > 0.0);
  }
}

TEST_CASE("breslow with distinct times") {
  const auto r = surv({1, 2, 3}, {1, 1, 1});
  const auto h = breslow_baseline_from_eta(Eigen::Vector3d::Zero(), r);
  REQUIRE(h.increments.size() == 3);
  CHECK(near(h.increments[0], 1.0 / 3.0, 1e-15));
  CHECK(near(h.increments[1], 1.0 / 2.0, 1e-15));
  CHECK(near(h.increments[2], 1.0, 1e-15));
  CHECK(near(h.cumulative[0], 1.0 / 3.0, 1e-15));
  CHECK(near(h.cumulative[1], 5.0 / 6.0, 1e-15));
  CHECK(near(h.cumulative[2], 11.0 / 6.0, 1e-15));

  const auto st = cox_pseudo_from_eta(Eigen::Vector3d::Zero(), r);
  CHECK(near(st.z[0], 2.0, 1e-14));
  CHECK(near(st.z[1], 0.2, 1e-14));
  CHECK(near(st.z[2], -5.0 / 11.0, 1e-14));
  CHECK(near(st.sigma2[0], 3.0, 1e-14));
  CHECK(near(st.sigma2[1], 1.2, 1e-14));
  CHECK(near(st.sigma2[2], 6.0 / 11.0, 1e-14));
}

TEST_CASE("breslow with tied times") {
  const auto h = breslow_baseline_from_eta(Eigen::Vector3d::Zero(), surv({1, 1, 2}, {1, 1, 1}));
  REQUIRE(h.increments.size() == 2);
  CHECK(h.event_times == Eigen::Vector2d(1, 2));
  CHECK(near(h.increments[0], 2.0 / 3.0, 1e-15));
  CHECK(near(h.increments[1], 1.0, 1e-15));
}

TEST_CASE("single event gives one increment") {
  const auto h = breslow_baseline_from_eta(Eigen::Vector4d::Zero(), surv({3, 1, 4, 2}, {0, 0, 1, 0}));
  CHECK(h.increments.size() == 1);
  CHECK(h.event_times[0] == 4.0);
}

TEST_CASE("cox pseudodata edge cases") {
  // The last subject is alone in its risk set, so M = 1 and Z = eta.
  const Eigen::Vector2d eta(0.4, 0.9);
  const auto st = cox_pseudo_from_eta(eta, surv({1, 2}, {0, 1}));
  CHECK(near(st.mu[1], 1.0, 1e-15));
  CHECK(near(st.z[1], 0.9, 1e-15));

  // Censored before the first event: expected count floored.
  const auto early = cox_pseudo_from_eta(Eigen::Vector3d::Zero(), surv({0.5, 1, 2}, {0, 1, 1}));
  CHECK(early.mu[0] == doctest::Approx(glm::kCoxExpectedFloor).epsilon(1e-12));
  CHECK(std::isfinite(early.z[0]));
  CHECK(std::isfinite(early.sigma2[0]));
  CHECK(early.sigma2[0] > 0.0);
}

TEST_CASE("cox increments times risk sets recover the event count") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_int_distribution<int> tie(1, 15);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 40;
    SurvivalResponse r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    Eigen::VectorXd eta(n);
    for (int i = 0; i < n; ++i) {
      r.time[i] = tie(rng);
      r.status[i] = z(rng) > -0.3 ? 1.0 : 0.0;
      eta[i] = 2.0 * z(rng);
    }
    r.status[0] = 1.0;
    const auto h = breslow_baseline_from_eta(eta, r);
    double total = 0.0;
    for (Eigen::Index j = 0; j < h.event_times.size(); ++j) {
      double risk = 0.0;
      for (int i = 0; i < n; ++i)
        if (r.time[i] >= h.event_times[j]) risk += std::exp(eta[i]);
      total += h.increments[j] * risk;
    }
    CHECK(total == doctest::Approx(r.status.sum()).epsilon(1e-12));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (r.time[i] <= r.time[k]) CHECK(h.cumulative[i] <= h.cumulative[k]);
  }
}

TEST_CASE("pseudodata stays finite for extreme coefficients") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = 30;
  Eigen::MatrixXd x(n, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  Eigen::VectorXd yb(n), t(n), d(n);
  for (int i = 0; i < n; ++i) {
    yb[i] = i % 2;
    t[i] = 1.0 + i;
    d[i] = i % 3 ? 1.0 : 0.0;
  }
  for (double scale : {0.0, 1.0, 50.0, 1e4, 1e8}) {
    const Eigen::Vector3d beta(scale, -scale, 0.5 * scale);
    for (const ResponseVec& r : {ResponseVec{ContinuousResponse{yb}}, ResponseVec{BinaryResponse{yb}},
                                 ResponseVec{SurvivalResponse{t, d}}}) {
      const auto st = pseudodata(x, r, 0.3, beta);
      CHECK(st.z.allFinite());
      CHECK(st.sigma2.allFinite());
      CHECK((st.sigma2.array() > 0.0).all());
    }
  }
}
