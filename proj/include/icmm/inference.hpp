#pragma once

#include "icmm/data_model.hpp"
#include "icmm/engine.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace icmm {

/// Local posterior probabilities zeta_j = P(beta_j != 0 | pseudodata, rest),
/// from the last pseudodata of `fit` with every other coefficient held at
/// its estimate.
Eigen::VectorXd local_posterior_probs(const ModelFit& fit, const Dataset& data);

/// Same computation on an explicit design. `slab_weights` holds omega or
/// varpi_j per predictor.
Eigen::VectorXd local_posterior_probs(const Eigen::MatrixXd& x, const FamilyState& state,
                                      double beta0, const Eigen::VectorXd& beta,
                                      const Eigen::VectorXd& slab_weights, double alpha);

/// Prior slab weight per predictor implied by a fit: omega, or varpi_j at the
/// fit's final indicators.
Eigen::VectorXd slab_weights(const ModelFit& fit, const std::optional<EdgeList>& graph);

/// sum (1 - zeta_j) 1{zeta_j > kappa} / sum 1{zeta_j > kappa}; 0 when nothing
/// exceeds kappa.
double estimated_fdr(const Eigen::VectorXd& zeta, double kappa);

/// Fraction of truly null predictors among {zeta_j > kappa}; 0 when empty.
double true_fdr(const Eigen::VectorXd& zeta, const std::vector<bool>& truly_nonzero, double kappa);

struct FdrPoint {
  double kappa = 0.0;
  double est_fdr = 0.0;
  std::size_t n_selected = 0;
  std::optional<double> true_fdr;
};

/// One point per distinct zeta value, ascending in kappa.
std::vector<FdrPoint> fdr_curve(const Eigen::VectorXd& zeta,
                                const std::vector<bool>* truly_nonzero = nullptr);

struct Selection {
  double kappa_star = 0.0;
  std::vector<Eigen::Index> selected;
};

/// Smallest kappa among the observed zeta values with estimated FDR <= level;
/// selects {j : zeta_j > kappa_star}.
Selection select_at_fdr(const Eigen::VectorXd& zeta, double level);

struct ImportanceReport {
  Eigen::VectorXd zeta;
  std::vector<FdrPoint> fdr_curve;
  std::vector<Eigen::Index> selected;
  double kappa_star = 0.0;
  double level = 0.05;
};

ImportanceReport importance_report(const Eigen::VectorXd& zeta, double level,
                                   const std::vector<bool>* truly_nonzero = nullptr);

}  // namespace icmm
