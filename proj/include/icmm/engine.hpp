#pragma once

#include "icmm/data_model.hpp"
#include "icmm/glm_family.hpp"
#include "icmm/ising.hpp"
#include "icmm/spike_slab.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace icmm {

enum class PriorKind { Independent, Ising };
enum class InitKind { Zero, Lasso, Supplied };

std::string to_string(PriorKind prior);
PriorKind parse_prior(const std::string& name);

/// One accepted coordinate update, reported to FitConfig::observer.
struct CoordinateRecord {
  int iteration = 0;
  Eigen::Index j = 0;
  double s = 0.0;      // standardized statistic
  double w = 0.0;      // prior slab weight (omega or varpi_j)
  double alpha = 0.0;
  double scale = 0.0;  // sqrt(x_j' Sigma^{-1} x_j)
  double beta = 0.0;   // new coefficient on the fitting design
};

using CoordinateObserver = std::function<void(const CoordinateRecord&)>;

struct FitConfig {
  PriorKind prior = PriorKind::Independent;
  double alpha = kDefaultAlpha;
  int max_outer = 100;
  // Consecutive outer iterations with an unchanged active set required
  // (together with coef_tol) to declare convergence.
  int max_identical_active_sets = 1;
  double coef_tol = 1e-6;
  InitKind init = InitKind::Lasso;
  // Initial coefficients on the original covariate scale (InitKind::Supplied).
  Eigen::VectorXd supplied_beta;
  std::optional<double> supplied_beta0;
  bool standardize = true;
  // Keep a copy of the coefficients after every outer iteration in the trace.
  bool record_path = false;
  std::vector<double> lasso_grid;
  // Coordinate visiting order within a sweep; empty means 0, 1, ..., p - 1.
  std::vector<Eigen::Index> sweep_order;
  CoordinateObserver observer;

  void validate(Eigen::Index p) const;
};

struct TraceEntry {
  int iteration = 0;
  std::size_t active_size = 0;
  double max_change = 0.0;
  double omega = 0.0;        // independent prior
  IsingParams ising;         // Ising prior
  double beta0 = 0.0;        // fitting design
  Eigen::VectorXd beta;      // fitting design; filled when record_path is set
};

struct ModelFit {
  Family family = Family::Gaussian;
  PriorKind prior = PriorKind::Independent;
  double alpha = kDefaultAlpha;

  // Original covariate scale. beta0 is absent for Cox.
  std::optional<double> beta0;
  Eigen::VectorXd beta;

  std::optional<double> omega;
  std::optional<IsingParams> ising;
  std::vector<Eigen::Index> active_set;
  std::vector<TraceEntry> trace;
  bool converged = false;
  int iterations = 0;

  // Pseudodata (Z, Sigma) of the last outer iteration; eta matches the
  // returned coefficients on the fitting design.
  FamilyState final_state;

  // Fitting design: xs = (x - centers) / scales.
  double beta0_internal = 0.0;
  Eigen::VectorXd beta_internal;
  Eigen::VectorXd centers;
  Eigen::VectorXd scales;
};

/// Conditional mode of omega under a uniform hyperprior: k / p, clamped to
/// [1/p, 1 - 1/p].
double update_omega(const Eigen::VectorXd& beta);

struct CoordinateUpdate {
  double beta = 0.0;
  double s = 0.0;
  double scale = 0.0;
};

/// Posterior-median update of one coefficient. `residual` is Z - eta with
/// eta including the current beta_j.
CoordinateUpdate coordinate_update(const Eigen::Ref<const Eigen::VectorXd>& xj,
                                   const Eigen::VectorXd& weights, const Eigen::VectorXd& residual,
                                   double beta_j, double w_j, double alpha);

/// Same update with eta recomputed from (beta0, beta); beta0 is ignored for
/// Cox states.
double coordinate_update(Eigen::Index j, const FamilyState& state, const Eigen::MatrixXd& x,
                         double beta0, const Eigen::VectorXd& beta, double w_j, double alpha);

/// Weighted mean of Z minus weighted mean of X times beta, weights 1/sigma^2.
double update_intercept(const FamilyState& state, const Eigen::MatrixXd& x,
                        const Eigen::VectorXd& beta);

/// Runs ICM/M with the independent or Ising prior. The family follows the
/// dataset's response type.
ModelFit fit_icmm(const Dataset& data, const FitConfig& config);

/// Runs ICM/M on an already prepared design without standardization or
/// initialization logic. Exposed for tests and the Python module.
ModelFit fit_icmm_design(const Eigen::MatrixXd& x, const ResponseVec& response,
                         const std::optional<EdgeList>& graph, const FitConfig& config,
                         double beta0_init, const Eigen::VectorXd& beta_init);

}  // namespace icmm
