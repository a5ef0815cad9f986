#pragma once

#include "icmm/data_model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace icmm {

/// l1-penalized fit of the IRLS quadratic approximation,
///   (1 / 2n) sum_i w_i (z_i - beta0 - x_i beta)^2 + lambda ||beta||_1,
/// refreshed until the coefficients stop moving. Gaussian uses w = 1 and
/// z = y; logistic and Cox use the working response and weights 1/sigma^2
/// of the ICM/M pseudodata. Cox has no intercept.
struct LassoFit {
  double beta0 = 0.0;
  Eigen::VectorXd beta;
  double lambda = 0.0;
  double bic = 0.0;
  int df = 0;
};

struct LassoOptions {
  int max_irls = 50;
  int max_sweeps = 100000;
  double tol = 1e-12;
};

double soft_threshold(double z, double lambda);

// sign(z) max(|z| - lambda, 0) / norm
double lasso_coordinate_step(double z, double lambda, double norm);

LassoFit fit_lasso(const Eigen::MatrixXd& x, const ResponseVec& response, double lambda,
                   const LassoFit* warm_start = nullptr, const LassoOptions& options = {});

/// Smallest lambda with an all-zero solution.
double lambda_max(const Eigen::MatrixXd& x, const ResponseVec& response);

/// Log-spaced grid from lambda_max down to ratio * lambda_max, with ratio
/// 0.01 when p > n and 1e-4 otherwise.
std::vector<double> default_lambda_grid(const Eigen::MatrixXd& x, const ResponseVec& response,
                                        std::size_t count = 50);

struct LassoPath {
  std::vector<LassoFit> fits;
  std::size_t best = 0;  // index of the minimum-BIC fit

  const LassoFit& chosen() const { return fits.at(best); }
};

/// Warm-started path over `grid` (descending); BIC = deviance + df log n.
LassoPath lasso_path_bic(const Eigen::MatrixXd& x, const ResponseVec& response,
                         std::vector<double> grid = {});

/// BIC-tuned lasso on the (optionally standardized) design; coefficients are
/// returned on the original covariate scale.
LassoFit fit_lasso_init(const Dataset& data, const std::vector<double>& grid = {},
                        bool standardize_design = true);

}  // namespace icmm
