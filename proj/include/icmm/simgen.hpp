#pragma once

#include "icmm/data_model.hpp"
#include "icmm/ising.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace icmm::sim {

using Rng = std::mt19937_64;

/// Simulation designs 1-6: 1-3 binary logistic, 4-6 Cox.
struct SimDesign {
  int case_id = 1;
  int n = 250;
  int p = 1000;
  double rho = 0.0;
  std::uint64_t seed = 1;
  bool with_test = true;
  // Case 3 only.
  int genes = 341;
  int max_snps_per_gene = 5;
  int total_snps = 1152;  // 0 draws the per-gene SNP counts freely
  int pathways = 7;
  int causal_genes = 15;
};

Family family_for_case(int case_id);

struct SimTruth {
  Eigen::VectorXd beta;
  double beta0 = 0.0;
  std::optional<EdgeList> graph;
  std::optional<double> censor_rate;  // realized fraction censored (Cox)

  std::vector<bool> nonzero() const;
};

struct SimData {
  Dataset train;
  std::optional<Dataset> test;  // independent draw with the same coefficients
  SimTruth truth;
};

SimData gen_case1(int n, int p, double rho, std::uint64_t seed, bool with_test = true);
SimData gen_case2(int n, int p, double rho, std::uint64_t seed, bool with_test = true);
SimData gen_case3_like(int n, int p_genes, int snps_per_gene, int n_pathways, std::uint64_t seed,
                       bool with_test = true);
SimData gen_case3_like(const SimDesign& design);
SimData gen_case4(int n, int p, double rho, std::uint64_t seed, bool with_test = false);
SimData gen_case5(int n, int p, double rho, std::uint64_t seed, bool with_test = false);
SimData gen_case6(int n, std::uint64_t seed, bool with_test = false);

/// Dispatches on design.case_id; throws InputError for an unknown case.
SimData simulate(const SimDesign& design);

// Building blocks, exposed for tests.

/// Independent blocks of AR(1) columns with lag-one correlation rho.
Eigen::MatrixXd ar1_design(int n, int p, double rho, int blocks, Rng& rng);

/// Two-state Markov chain with transition rows (0.99, 0.01) and (0.5, 0.5),
/// started from (0.5, 0.5).
Indicators simulate_indicator_chain(std::size_t length, Rng& rng);

inline constexpr double kChainStay0 = 0.99;
inline constexpr double kChainStay1 = 0.5;

struct SurvivalDraw {
  SurvivalResponse response;
  double censor_bound = 0.0;      // censoring times are Uniform[0, censor_bound]
  double realized_censoring = 0.0;
};

/// Proportional-hazards times under a Weibull(shape, scale) baseline,
/// T = scale (-log U / exp(eta))^{1/shape}, with uniform censoring whose
/// bound is bisected so the expected censored fraction equals censor_rate.
SurvivalDraw draw_survival(const Eigen::VectorXd& eta, Rng& rng, double shape = 10.0,
                           double scale = 1.0, double censor_rate = 0.5);

struct MetricRow {
  std::optional<double> mr;  // misclassification on test data (logistic)
  int fp = 0;
  int fn = 0;
  int ms = 0;
  double l1 = 0.0;
  double l2sq = 0.0;
};

MetricRow evaluate(const Eigen::VectorXd& beta_hat, std::optional<double> beta0_hat,
                   const SimTruth& truth, const Dataset* test = nullptr);

/// Metrics of a selected index set, with coefficients outside it zeroed.
MetricRow evaluate_selection(const Eigen::VectorXd& beta_hat, std::optional<double> beta0_hat,
                             const std::vector<Eigen::Index>& selected, const SimTruth& truth,
                             const Dataset* test = nullptr);

}  // namespace icmm::sim
