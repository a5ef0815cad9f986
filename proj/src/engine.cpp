#include "icmm/engine.hpp"

#include "icmm/diagnostics.hpp"
#include "icmm/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icmm {

std::string to_string(PriorKind prior) {
  return prior == PriorKind::Independent ? "independent" : "ising";
}

PriorKind parse_prior(const std::string& name) {
  if (name == "independent") return PriorKind::Independent;
  if (name == "ising") return PriorKind::Ising;
  throw InputError("unknown prior '" + name + "'");
}

void FitConfig::validate(Eigen::Index p) const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be positive");
  if (max_outer < 1) throw InputError("max_outer must be positive");
  if (max_identical_active_sets < 1) throw InputError("max_identical_active_sets must be positive");
  if (!(coef_tol > 0.0)) throw InputError("coef_tol must be positive");
  if (!sweep_order.empty()) {
    std::vector<bool> seen(static_cast<std::size_t>(p), false);
    bool ok = static_cast<Eigen::Index>(sweep_order.size()) == p;
    for (const auto j : sweep_order) {
      if (!ok) break;
      ok = j >= 0 && j < p && !seen[static_cast<std::size_t>(j)];
      if (ok) seen[static_cast<std::size_t>(j)] = true;
    }
    if (!ok) throw InputError("sweep order must be a permutation of the predictor indices");
  }
  if (init == InitKind::Supplied && supplied_beta.size() != p)
    throw InputError("supplied coefficients have length " + std::to_string(supplied_beta.size()) +
                     ", expected " + std::to_string(p));
}

double update_omega(const Eigen::VectorXd& beta) {
  const auto p = static_cast<double>(beta.size());
  if (beta.size() < 1) throw std::invalid_argument("update_omega: empty coefficient vector");
  if (beta.size() == 1) return 0.5;
  const auto k = static_cast<double>((beta.array() != 0.0).count());
  return std::clamp(k / p, 1.0 / p, 1.0 - 1.0 / p);
}

namespace {

CoordinateUpdate update_with_norm(const Eigen::Ref<const Eigen::VectorXd>& xj,
                                  const Eigen::VectorXd& weights, const Eigen::VectorXd& residual,
                                  double beta_j, double w_j, double alpha, double norm2) {
  if (!(norm2 > 0.0)) return {0.0, 0.0, 0.0};
  const double scale = std::sqrt(norm2);
  const double score = xj.dot(weights.cwiseProduct(residual)) + norm2 * beta_j;
  const double s = score / scale;
  const double median = posterior_median_value({s, w_j, alpha});
  return {unstandardize_coef(median, scale), s, scale};
}

}  // namespace

CoordinateUpdate coordinate_update(const Eigen::Ref<const Eigen::VectorXd>& xj,
                                   const Eigen::VectorXd& weights, const Eigen::VectorXd& residual,
                                   double beta_j, double w_j, double alpha) {
  const double norm2 = weights.dot(xj.cwiseAbs2());
  if (!(norm2 > 0.0)) warn("predictor has zero weighted norm; coefficient set to 0");
  return update_with_norm(xj, weights, residual, beta_j, w_j, alpha, norm2);
}

double coordinate_update(Eigen::Index j, const FamilyState& state, const Eigen::MatrixXd& x,
                         double beta0, const Eigen::VectorXd& beta, double w_j, double alpha) {
  Eigen::VectorXd eta = x * beta;
  if (state.family != Family::Cox) eta.array() += beta0;
  const Eigen::VectorXd residual = state.z - eta;
  return coordinate_update(x.col(j), state.weights(), residual, beta[j], w_j, alpha).beta;
}

double update_intercept(const FamilyState& state, const Eigen::MatrixXd& x,
                        const Eigen::VectorXd& beta) {
  if (state.family == Family::Cox) throw std::invalid_argument("Cox model has no intercept");
  const Eigen::VectorXd w = state.weights();
  const double wsum = w.sum();
  return (w.dot(state.z) - w.dot(x * beta)) / wsum;
}

ModelFit fit_icmm_design(const Eigen::MatrixXd& x, const ResponseVec& response,
                         const std::optional<EdgeList>& graph, const FitConfig& config,
                         double beta0_init, const Eigen::VectorXd& beta_init) {
  const Eigen::Index p = x.cols();
  config.validate(p);
  if (beta_init.size() != p) throw std::invalid_argument("initial coefficients have wrong length");
  if (config.prior == PriorKind::Ising && !graph) throw InputError("ising prior requires a graph");

  ModelFit fit;
  fit.family = family_of(response);
  fit.prior = config.prior;
  fit.alpha = config.alpha;
  const bool has_intercept = fit.family != Family::Cox;

  Eigen::VectorXd beta = beta_init;
  double beta0 = has_intercept ? beta0_init : 0.0;
  Eigen::VectorXd slab_weight(p);
  Eigen::VectorXd norm2(p);
  int identical = 0;

  for (int iter = 1; iter <= config.max_outer; ++iter) {
    FamilyState state = pseudodata(x, response, beta0, beta);
    if (!state.z.allFinite() || !state.sigma2.allFinite() || (state.sigma2.array() <= 0.0).any())
      throw std::runtime_error("non-finite pseudodata at outer iteration " + std::to_string(iter));

    TraceEntry entry;
    entry.iteration = iter;
    if (config.prior == PriorKind::Independent) {
      const double omega = update_omega(beta);
      slab_weight.setConstant(omega);
      entry.omega = omega;
      fit.omega = omega;
    } else {
      const Indicators tau = indicators_from(beta);
      const IsingParams params = fit_ising_pseudolikelihood(tau, *graph);
      const auto sums = neighbor_sums(tau, *graph);
      for (Eigen::Index j = 0; j < p; ++j)
        slab_weight[j] = inclusion_prob(params, sums[static_cast<std::size_t>(j)]);
      entry.ising = params;
      fit.ising = params;
    }

    const Eigen::VectorXd weights = state.weights();
    for (Eigen::Index j = 0; j < p; ++j) norm2[j] = weights.dot(x.col(j).cwiseAbs2());
    Eigen::VectorXd residual = state.z - state.eta;
    const Eigen::VectorXd previous = beta;

    for (Eigen::Index k = 0; k < p; ++k) {
      const Eigen::Index j = config.sweep_order.empty() ? k : config.sweep_order[static_cast<std::size_t>(k)];
      if (!(norm2[j] > 0.0)) {
        warn("predictor " + std::to_string(j) + " has zero weighted norm; coefficient set to 0");
      }
      const auto upd = update_with_norm(x.col(j), weights, residual, beta[j], slab_weight[j],
                                        config.alpha, norm2[j]);
      if (upd.beta != beta[j]) {
        residual -= (upd.beta - beta[j]) * x.col(j);
        beta[j] = upd.beta;
      }
      if (config.observer)
        config.observer({iter, j, upd.s, slab_weight[j], config.alpha, upd.scale, upd.beta});
    }
    if (has_intercept) {
      const double shift = weights.dot(residual) / weights.sum();
      beta0 += shift;
      residual.array() -= shift;
    }

    bool same_active = true;
    for (Eigen::Index j = 0; j < p && same_active; ++j)
      same_active = (previous[j] != 0.0) == (beta[j] != 0.0);
    identical = same_active ? identical + 1 : 0;

    entry.active_size = static_cast<std::size_t>((beta.array() != 0.0).count());
    entry.max_change = p > 0 ? (beta - previous).cwiseAbs().maxCoeff() : 0.0;
    entry.beta0 = beta0;
    if (config.record_path) entry.beta = beta;
    fit.trace.push_back(entry);
    fit.iterations = iter;
    fit.final_state = std::move(state);

    if (identical >= config.max_identical_active_sets && entry.max_change < config.coef_tol) {
      fit.converged = true;
      break;
    }
  }

  Eigen::VectorXd eta = x * beta;
  if (has_intercept) eta.array() += beta0;
  fit.final_state.eta = std::move(eta);

  fit.beta_internal = beta;
  fit.beta0_internal = beta0;
  fit.beta = beta;
  if (has_intercept) fit.beta0 = beta0;
  fit.centers = Eigen::VectorXd::Zero(p);
  fit.scales = Eigen::VectorXd::Ones(p);
  for (Eigen::Index j = 0; j < p; ++j)
    if (beta[j] != 0.0) fit.active_set.push_back(j);
  return fit;
}

namespace {

double null_intercept(const ResponseVec& response) {
  if (const auto* g = std::get_if<ContinuousResponse>(&response)) return g->y.mean();
  if (const auto* b = std::get_if<BinaryResponse>(&response)) {
    const double m = b->y.mean();
    return std::log(m) - std::log1p(-m);
  }
  return 0.0;
}

}  // namespace

ModelFit fit_icmm(const Dataset& data, const FitConfig& config) {
  const Eigen::Index p = data.p();
  config.validate(p);
  if (config.prior == PriorKind::Ising && !data.graph())
    throw InputError("ising prior requires a graph");

  Eigen::MatrixXd xs;
  Eigen::VectorXd centers = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(p);
  if (config.standardize) {
    auto st = standardize(data.x(), &data.names());
    xs = std::move(st.xs);
    centers = std::move(st.centers);
    scales = std::move(st.scales);
  } else {
    xs = data.x();
  }
  const bool has_intercept = data.family() != Family::Cox;

  double beta0 = null_intercept(data.response());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  switch (config.init) {
    case InitKind::Zero: break;
    case InitKind::Lasso: {
      const auto lasso = lasso_path_bic(xs, data.response(), config.lasso_grid).chosen();
      beta = lasso.beta;
      if (has_intercept) beta0 = lasso.beta0;
      break;
    }
    case InitKind::Supplied:
      beta = config.supplied_beta.cwiseProduct(scales);
      if (has_intercept && config.supplied_beta0)
        beta0 = *config.supplied_beta0 + config.supplied_beta.dot(centers);
      break;
  }

  ModelFit fit = fit_icmm_design(xs, data.response(), data.graph(), config, beta0, beta);
  fit.centers = centers;
  fit.scales = scales;
  fit.beta = fit.beta_internal.cwiseQuotient(scales);
  if (has_intercept) fit.beta0 = fit.beta0_internal - fit.beta.dot(centers);
  return fit;
}

}  // namespace icmm
