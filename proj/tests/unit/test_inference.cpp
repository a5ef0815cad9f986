#include "icmm/inference.hpp"
#include "icmm/glm_family.hpp"

#include "oracles/posterior_oracle.hpp"

#include <doctest.h>

#include <random>

using namespace icmm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("estimated fdr examples") {
  const auto z = vec({0.9, 0.8, 0.2});
  CHECK(estimated_fdr(z, 0.5) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(estimated_fdr(z, 0.9) == 0.0);
  CHECK(estimated_fdr(z, 0.95) == 0.0);
  CHECK(estimated_fdr(vec({1, 1, 1}), 0.0) == 0.0);
  CHECK(estimated_fdr(vec({1, 1, 1}), 0.7) == 0.0);
}

TEST_CASE("true fdr examples") {
  const auto z = vec({0.9, 0.8, 0.2});
  CHECK(true_fdr(z, {true, true, false}, 0.5) == 0.0);
  CHECK(true_fdr(z, {false, false, true}, 0.5) == 1.0);
  CHECK(true_fdr(z, {true, false, false}, 0.5) == 0.5);
  CHECK(true_fdr(z, {true, false, false}, 0.95) == 0.0);
}

TEST_CASE("selection at a target level") {
  const auto sel = select_at_fdr(vec({0.99, 0.98, 0.50}), 0.05);
  CHECK(sel.selected == std::vector<Eigen::Index>{0, 1});
  CHECK(sel.kappa_star == 0.50);

  const auto none = select_at_fdr(vec({0.5, 0.2, 0.4}), 0.05);
  CHECK(none.selected.empty());
  CHECK(none.kappa_star == 0.5);

  const auto z = vec({0.3, 0.9, 0.1, 0.6});
  const auto all = select_at_fdr(z, 0.999);
  CHECK(all.kappa_star == 0.1);
  CHECK(all.selected == std::vector<Eigen::Index>{0, 1, 3});
}

TEST_CASE("selection grows with the level") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd z(40);
    for (auto& v : z) v = std::pow(u(rng), 0.3);
    std::vector<Eigen::Index> prev;
    for (double level : {0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      const auto sel = select_at_fdr(z, level);
      CHECK(std::includes(sel.selected.begin(), sel.selected.end(), prev.begin(), prev.end()));
      CHECK(estimated_fdr(z, sel.kappa_star) <= level + 1e-15);
      for (Eigen::Index j = 0; j < z.size(); ++j)
        CHECK((z[j] > sel.kappa_star) == std::binary_search(sel.selected.begin(), sel.selected.end(), j));
      prev = sel.selected;
    }
  }
}

TEST_CASE("fdr curve shape") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd z(30);
  for (auto& v : z) v = std::round(u(rng) * 10.0) / 10.0;
  std::vector<bool> truth(30);
  for (std::size_t j = 0; j < truth.size(); ++j) truth[j] = z[j] > 0.5;
  const auto curve = fdr_curve(z, &truth);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    CHECK(curve[k].est_fdr >= 0.0);
    CHECK(curve[k].est_fdr <= 1.0);
    CHECK(curve[k].est_fdr == estimated_fdr(z, curve[k].kappa));
    REQUIRE(curve[k].true_fdr);
    if (k > 0) {
      CHECK(curve[k].kappa > curve[k - 1].kappa);
      CHECK(curve[k].n_selected <= curve[k - 1].n_selected);
      // Piecewise constant between breakpoints.
      const double mid = 0.5 * (curve[k].kappa + curve[k - 1].kappa);
      CHECK(estimated_fdr(z, mid) == curve[k - 1].est_fdr);
    }
  }
  CHECK(fdr_curve(z).front().true_fdr == std::nullopt);
  const auto rep = importance_report(z, 0.1, &truth);
  CHECK(rep.selected == select_at_fdr(z, 0.1).selected);
  CHECK(rep.fdr_curve.size() == curve.size());
}

TEST_CASE("local posterior probabilities") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 80;
  Eigen::MatrixXd x(n, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  Eigen::VectorXd y = 3.0 * x.col(0);
  for (int i = 0; i < n; ++i) y[i] += g(rng);
  // Column 2 orthogonal to the residual at the fitted coefficients.
  const Eigen::VectorXd beta(Eigen::Vector3d(3.0, 0.0, 0.0));
  Eigen::VectorXd resid = y - x * beta;
  resid.array() -= resid.mean();
  y = x * beta + resid;
  Eigen::VectorXd c2 = x.col(2);
  c2 -= resid.dot(c2) / resid.squaredNorm() * resid;
  x.col(2) = c2;
  const auto state = gaussian_pseudo(x, y, 0.0, beta);
  const Eigen::Vector3d w(0.4, 0.0, 0.3);
  const auto zeta = local_posterior_probs(x, state, 0.0, beta, w, 0.5);
  CHECK(zeta[0] > 0.99);
  CHECK(zeta[1] == 0.0);
  const oracle::PosteriorOracle o(0.0, 0.3, 0.5);
  CHECK(std::fabs(zeta[2] - double(o.prob_nonzero())) <= 1e-8);
}
