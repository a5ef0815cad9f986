#include "icmm/inference.hpp"

#include "icmm/spike_slab.hpp"

#include <algorithm>
#include <stdexcept>

namespace icmm {

Eigen::VectorXd local_posterior_probs(const Eigen::MatrixXd& x, const FamilyState& state,
                                      double beta0, const Eigen::VectorXd& beta,
                                      const Eigen::VectorXd& slab_weights, double alpha) {
  const Eigen::Index p = x.cols();
  if (beta.size() != p || slab_weights.size() != p)
    throw std::invalid_argument("local_posterior_probs: length mismatch");
  Eigen::VectorXd eta = x * beta;
  if (state.family != Family::Cox) eta.array() += beta0;
  const Eigen::VectorXd weights = state.weights();
  const Eigen::VectorXd weighted_residual = weights.cwiseProduct(state.z - eta);
  Eigen::VectorXd zeta(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm2 = weights.dot(x.col(j).cwiseAbs2());
    if (!(norm2 > 0.0)) {
      zeta[j] = 0.0;
      continue;
    }
    const double s = (x.col(j).dot(weighted_residual) + norm2 * beta[j]) / std::sqrt(norm2);
    zeta[j] = posterior_nonzero_prob({s, slab_weights[j], alpha});
  }
  return zeta;
}

Eigen::VectorXd slab_weights(const ModelFit& fit, const std::optional<EdgeList>& graph) {
  const Eigen::Index p = fit.beta_internal.size();
  if (fit.prior == PriorKind::Independent)
    return Eigen::VectorXd::Constant(p, fit.omega.value_or(update_omega(fit.beta_internal)));
  if (!graph) throw std::invalid_argument("Ising fit needs the predictor graph");
  const Indicators tau = indicators_from(fit.beta_internal);
  const IsingParams params = fit.ising.value_or(fit_ising_pseudolikelihood(tau, *graph));
  const auto sums = neighbor_sums(tau, *graph);
  Eigen::VectorXd w(p);
  for (Eigen::Index j = 0; j < p; ++j) w[j] = inclusion_prob(params, sums[static_cast<std::size_t>(j)]);
  return w;
}

Eigen::VectorXd local_posterior_probs(const ModelFit& fit, const Dataset& data) {
  if (fit.final_state.z.size() != data.n())
    throw std::invalid_argument("fit does not carry pseudodata for this dataset");
  const Eigen::MatrixXd xs = apply_standardization(data.x(), fit.centers, fit.scales);
  return local_posterior_probs(xs, fit.final_state, fit.beta0_internal, fit.beta_internal,
                               slab_weights(fit, data.graph()), fit.alpha);
}

double estimated_fdr(const Eigen::VectorXd& zeta, double kappa) {
  double false_mass = 0.0;
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < zeta.size(); ++j) {
    if (zeta[j] > kappa) {
      false_mass += 1.0 - zeta[j];
      ++count;
    }
  }
  return count == 0 ? 0.0 : false_mass / static_cast<double>(count);
}

double true_fdr(const Eigen::VectorXd& zeta, const std::vector<bool>& truly_nonzero, double kappa) {
  if (truly_nonzero.size() != static_cast<std::size_t>(zeta.size()))
    throw std::invalid_argument("true_fdr: truth length mismatch");
  std::size_t selected = 0, false_hits = 0;
  for (Eigen::Index j = 0; j < zeta.size(); ++j) {
    if (zeta[j] > kappa) {
      ++selected;
      if (!truly_nonzero[static_cast<std::size_t>(j)]) ++false_hits;
    }
  }
  return selected == 0 ? 0.0 : static_cast<double>(false_hits) / static_cast<double>(selected);
}

namespace {

std::vector<double> distinct_sorted(const Eigen::VectorXd& zeta) {
  std::vector<double> values(zeta.data(), zeta.data() + zeta.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace

std::vector<FdrPoint> fdr_curve(const Eigen::VectorXd& zeta, const std::vector<bool>* truly_nonzero) {
  // Sweeping kappa upward over the sorted values removes one tie group at a
  // time, so the selected count and false mass can be maintained in O(p).
  std::vector<double> sorted(zeta.data(), zeta.data() + zeta.size());
  std::sort(sorted.begin(), sorted.end());
  const auto kappas = distinct_sorted(zeta);
  std::vector<FdrPoint> curve;
  curve.reserve(kappas.size());
  std::size_t removed = 0;
  double remaining_mass = 0.0;
  for (double z : sorted) remaining_mass += 1.0 - z;
  for (double kappa : kappas) {
    while (removed < sorted.size() && sorted[removed] <= kappa) {
      remaining_mass -= 1.0 - sorted[removed];
      ++removed;
    }
    FdrPoint pt;
    pt.kappa = kappa;
    pt.n_selected = sorted.size() - removed;
    // Recompute directly to avoid drift from the running subtraction.
    pt.est_fdr = estimated_fdr(zeta, kappa);
    if (truly_nonzero) pt.true_fdr = true_fdr(zeta, *truly_nonzero, kappa);
    curve.push_back(pt);
  }
  return curve;
}

Selection select_at_fdr(const Eigen::VectorXd& zeta, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("FDR level must lie in (0, 1)");
  Selection sel;
  if (zeta.size() == 0) return sel;
  const auto kappas = distinct_sorted(zeta);
  sel.kappa_star = kappas.back();
  for (double kappa : kappas) {
    if (estimated_fdr(zeta, kappa) <= level) {
      sel.kappa_star = kappa;
      break;
    }
  }
  for (Eigen::Index j = 0; j < zeta.size(); ++j)
    if (zeta[j] > sel.kappa_star) sel.selected.push_back(j);
  return sel;
}

ImportanceReport importance_report(const Eigen::VectorXd& zeta, double level,
                                   const std::vector<bool>* truly_nonzero) {
  ImportanceReport report;
  report.zeta = zeta;
  report.level = level;
  report.fdr_curve = fdr_curve(zeta, truly_nonzero);
  const auto sel = select_at_fdr(zeta, level);
  report.kappa_star = sel.kappa_star;
  report.selected = sel.selected;
  return report;
}

}  // namespace icmm
