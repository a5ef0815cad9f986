#include "icmm/lasso.hpp"

#include "icmm/glm_family.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace icmm {

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

double lasso_coordinate_step(double z, double lambda, double norm) {
  if (!(norm > 0.0)) throw std::invalid_argument("lasso_coordinate_step: norm must be positive");
  return soft_threshold(z, lambda) / norm;
}

namespace {

struct Working {
  Eigen::VectorXd z;
  Eigen::VectorXd w;
};

Working working_response(const Eigen::MatrixXd& x, const ResponseVec& response, double beta0,
                         const Eigen::VectorXd& beta) {
  if (const auto* g = std::get_if<ContinuousResponse>(&response))
    return {g->y, Eigen::VectorXd::Ones(g->y.size())};
  const auto st = pseudodata(x, response, beta0, beta);
  return {st.z, st.weights()};
}

double null_intercept(const ResponseVec& response) {
  if (const auto* g = std::get_if<ContinuousResponse>(&response)) return g->y.mean();
  if (const auto* b = std::get_if<BinaryResponse>(&response)) {
    const double m = b->y.mean();
    return std::log(m) - std::log1p(-m);
  }
  return 0.0;
}

// Weighted coordinate descent with active-set cycling on a fixed quadratic.
void coordinate_descent(const Eigen::MatrixXd& x, const Working& wk, double lambda,
                        bool intercept, double& beta0, Eigen::VectorXd& beta,
                        const LassoOptions& options) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();
  Eigen::VectorXd r = wk.z - x * beta;
  r.array() -= beta0;
  const double wsum = wk.w.sum();
  Eigen::VectorXd norm(p);
  for (Eigen::Index j = 0; j < p; ++j) norm[j] = wk.w.dot(x.col(j).cwiseAbs2()) / n;

  auto sweep = [&](bool visit_all) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!visit_all && beta[j] == 0.0) continue;
      if (!(norm[j] > 0.0)) {
        beta[j] = 0.0;
        continue;
      }
      const double old = beta[j];
      const double g = x.col(j).dot(wk.w.cwiseProduct(r)) / n + norm[j] * old;
      const double updated = lasso_coordinate_step(g, lambda, norm[j]);
      if (updated != old) {
        r -= (updated - old) * x.col(j);
        beta[j] = updated;
        max_change = std::max(max_change, norm[j] * (updated - old) * (updated - old));
      }
    }
    if (intercept) {
      const double shift = wk.w.dot(r) / wsum;
      if (shift != 0.0) {
        beta0 += shift;
        r.array() -= shift;
        max_change = std::max(max_change, shift * shift);
      }
    }
    return max_change;
  };

  int sweeps = 0;
  while (sweeps < options.max_sweeps) {
    ++sweeps;
    if (sweep(true) <= options.tol) break;
    while (sweeps < options.max_sweeps) {
      ++sweeps;
      if (sweep(false) <= options.tol) break;
    }
  }
}

}  // namespace

LassoFit fit_lasso(const Eigen::MatrixXd& x, const ResponseVec& response, double lambda,
                   const LassoFit* warm_start, const LassoOptions& options) {
  if (lambda < 0.0) throw std::invalid_argument("fit_lasso: lambda must be nonnegative");
  const Family family = family_of(response);
  const bool intercept = family != Family::Cox;
  LassoFit fit;
  fit.lambda = lambda;
  if (warm_start && warm_start->beta.size() == x.cols()) {
    fit.beta = warm_start->beta;
    fit.beta0 = warm_start->beta0;
  } else {
    fit.beta = Eigen::VectorXd::Zero(x.cols());
    fit.beta0 = null_intercept(response);
  }

  const int outer = family == Family::Gaussian ? 1 : options.max_irls;
  for (int it = 0; it < outer; ++it) {
    const Eigen::VectorXd previous = fit.beta;
    const double previous0 = fit.beta0;
    const auto wk = working_response(x, response, fit.beta0, fit.beta);
    coordinate_descent(x, wk, lambda, intercept, fit.beta0, fit.beta, options);
    const double change = std::max((fit.beta - previous).cwiseAbs().maxCoeff(),
                                   std::abs(fit.beta0 - previous0));
    if (change <= 1e-8 * (1.0 + fit.beta.cwiseAbs().maxCoeff())) break;
  }

  Eigen::VectorXd eta = x * fit.beta;
  if (intercept) eta.array() += fit.beta0;
  else fit.beta0 = 0.0;
  fit.df = static_cast<int>((fit.beta.array() != 0.0).count());
  fit.bic = deviance(eta, response) + fit.df * std::log(static_cast<double>(x.rows()));
  return fit;
}

double lambda_max(const Eigen::MatrixXd& x, const ResponseVec& response) {
  const double b0 = null_intercept(response);
  const auto wk = working_response(x, response, b0, Eigen::VectorXd::Zero(x.cols()));
  Eigen::VectorXd r = wk.z;
  if (family_of(response) != Family::Cox) r.array() -= b0;
  const Eigen::VectorXd grad = x.transpose() * wk.w.cwiseProduct(r);
  return grad.cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

std::vector<double> default_lambda_grid(const Eigen::MatrixXd& x, const ResponseVec& response,
                                        std::size_t count) {
  if (count < 2) throw std::invalid_argument("lambda grid needs at least 2 points");
  const double top = lambda_max(x, response);
  const double ratio = x.cols() > x.rows() ? 1e-2 : 1e-4;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k)
    grid[k] = top * std::pow(ratio, static_cast<double>(k) / static_cast<double>(count - 1));
  return grid;
}

LassoPath lasso_path_bic(const Eigen::MatrixXd& x, const ResponseVec& response,
                         std::vector<double> grid) {
  if (grid.empty()) grid = default_lambda_grid(x, response);
  std::sort(grid.begin(), grid.end(), std::greater<>());
  LassoOptions options;
  options.tol = 1e-10;
  LassoPath path;
  path.fits.reserve(grid.size());
  for (const double lambda : grid) {
    const LassoFit* warm = path.fits.empty() ? nullptr : &path.fits.back();
    path.fits.push_back(fit_lasso(x, response, lambda, warm, options));
    if (path.fits.back().bic < path.fits[path.best].bic) path.best = path.fits.size() - 1;
  }
  return path;
}

LassoFit fit_lasso_init(const Dataset& data, const std::vector<double>& grid,
                        bool standardize_design) {
  if (!standardize_design) return lasso_path_bic(data.x(), data.response(), grid).chosen();
  const auto st = standardize(data.x(), &data.names());
  LassoFit fit = lasso_path_bic(st.xs, data.response(), grid).chosen();
  fit.beta = fit.beta.cwiseQuotient(st.scales);
  if (data.family() != Family::Cox) fit.beta0 -= fit.beta.dot(st.centers);
  return fit;
}

}  // namespace icmm
