#pragma once

#include "icmm/data_model.hpp"

#include <Eigen/Dense>

namespace icmm {

/// IRLS linearization at the current coefficients: Z is approximately
/// N(eta, diag(sigma2)).
struct FamilyState {
  Family family = Family::Gaussian;
  Eigen::VectorXd eta;     // linear predictor
  Eigen::VectorXd z;       // pseudodata
  Eigen::VectorXd sigma2;  // pseudovariances, > 0
  Eigen::VectorXd mu;      // fitted mean: eta, snapped probability, or expected event count

  Eigen::VectorXd weights() const { return sigma2.cwiseInverse(); }
};

/// Breslow estimate of the cumulative baseline hazard at the current beta.
struct BaselineHazard {
  Eigen::VectorXd event_times;  // distinct failure times, increasing
  Eigen::VectorXd increments;   // Delta H0(t_j)
  Eigen::VectorXd cumulative;   // H0(Y_i) per subject
};

namespace glm {

inline constexpr double kEtaClip = 30.0;
inline constexpr double kProbSnap = 1e-5;
inline constexpr double kCoxExpectedFloor = 1e-10;
inline constexpr double kGaussianVarianceFloor = 1e-10;

}  // namespace glm

// Gaussian: Z = y and a common residual variance RSS / max(n - k - 1, 1),
// k = number of nonzero coefficients, floored at kGaussianVarianceFloor.
FamilyState gaussian_pseudo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double beta0,
                            const Eigen::VectorXd& beta);

struct LogisticWorking {
  double z;
  double sigma2;
};

/// Hazard/tail form of the logistic working response for one observation.
/// eta is clipped to [-30, 30] first.
LogisticWorking logistic_working(double eta, double y);

/// Fitted probability with values within 1e-5 of 0 or 1 snapped to 0 or 1.
double logistic_fitted_probability(double eta);

FamilyState logistic_pseudo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double beta0,
                            const Eigen::VectorXd& beta);
FamilyState logistic_pseudo_from_eta(const Eigen::VectorXd& eta, const Eigen::VectorXd& y);

BaselineHazard breslow_baseline(const Eigen::MatrixXd& x, const SurvivalResponse& surv,
                                const Eigen::VectorXd& beta);
BaselineHazard breslow_baseline_from_eta(const Eigen::VectorXd& eta, const SurvivalResponse& surv);

/// Cox pseudodata with M_i = H0(Y_i) exp(eta_i) floored at 1e-10. The
/// baseline hazard is recomputed at the same beta.
FamilyState cox_pseudo(const Eigen::MatrixXd& x, const SurvivalResponse& surv,
                       const Eigen::VectorXd& beta);
FamilyState cox_pseudo_from_eta(const Eigen::VectorXd& eta, const SurvivalResponse& surv);

/// Dispatches on the response type. beta0 is ignored for Cox.
FamilyState pseudodata(const Eigen::MatrixXd& x, const ResponseVec& response, double beta0,
                       const Eigen::VectorXd& beta);
FamilyState pseudodata(const Dataset& data, double beta0, const Eigen::VectorXd& beta);

FamilyState gaussian_pseudo(const Dataset& data, double beta0, const Eigen::VectorXd& beta);
FamilyState logistic_pseudo(const Dataset& data, double beta0, const Eigen::VectorXd& beta);
BaselineHazard breslow_baseline(const Dataset& data, const Eigen::VectorXd& beta);
FamilyState cox_pseudo(const Dataset& data, const Eigen::VectorXd& beta);

/// Goodness-of-fit term used by BIC: Gaussian n log(RSS/n), logistic
/// -2 log-likelihood, Cox -2 Breslow partial log-likelihood.
double deviance(const Eigen::VectorXd& eta, const ResponseVec& response);

double cox_partial_loglik(const Eigen::VectorXd& eta, const SurvivalResponse& surv);

}  // namespace icmm
