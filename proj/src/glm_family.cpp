#include "icmm/glm_family.hpp"

#include "normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace icmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMaxLogExpected = 700.0;

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& x, double beta0,
                                 const Eigen::VectorXd& beta) {
  if (beta.size() != x.cols()) throw std::invalid_argument("coefficient length does not match X");
  Eigen::VectorXd eta = x * beta;
  eta.array() += beta0;
  return eta;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian

FamilyState gaussian_pseudo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double beta0,
                            const Eigen::VectorXd& beta) {
  FamilyState st;
  st.family = Family::Gaussian;
  st.eta = linear_predictor(x, beta0, beta);
  st.z = y;
  st.mu = st.eta;
  const auto n = static_cast<double>(y.size());
  const auto active = static_cast<double>((beta.array() != 0.0).count());
  const double df = std::max(n - active - 1.0, 1.0);
  const double rss = (y - st.eta).squaredNorm();
  st.sigma2 = Eigen::VectorXd::Constant(y.size(), std::max(rss / df, glm::kGaussianVarianceFloor));
  return st;
}

// ---------------------------------------------------------------------------
// Logistic

LogisticWorking logistic_working(double eta, double y) {
  eta = std::clamp(eta, -glm::kEtaClip, glm::kEtaClip);
  // h_plus = F(eta), h_minus = 1 - F(eta); use exp(-eta) for eta > 0 and
  // exp(eta) otherwise so neither tail loses precision.
  double h_plus, h_minus;
  if (eta > 0.0) {
    const double e = std::exp(-eta);
    h_plus = 1.0 / (1.0 + e);
    h_minus = e / (1.0 + e);
  } else {
    const double e = std::exp(eta);
    h_plus = e / (1.0 + e);
    h_minus = 1.0 / (1.0 + e);
  }
  const double z = y == 1.0 ? eta + 1.0 / h_plus : eta - 1.0 / h_minus;
  return {z, 1.0 / (h_minus * h_plus)};
}

double logistic_fitted_probability(double eta) {
  const double p = detail::logistic(std::clamp(eta, -glm::kEtaClip, glm::kEtaClip));
  if (p < glm::kProbSnap) return 0.0;
  if (p > 1.0 - glm::kProbSnap) return 1.0;
  return p;
}

FamilyState logistic_pseudo_from_eta(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  FamilyState st;
  st.family = Family::Logistic;
  st.eta = eta;
  st.z.resize(eta.size());
  st.sigma2.resize(eta.size());
  st.mu.resize(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const auto w = logistic_working(eta[i], y[i]);
    st.z[i] = w.z;
    st.sigma2[i] = w.sigma2;
    st.mu[i] = logistic_fitted_probability(eta[i]);
  }
  return st;
}

FamilyState logistic_pseudo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double beta0,
                            const Eigen::VectorXd& beta) {
  return logistic_pseudo_from_eta(linear_predictor(x, beta0, beta), y);
}

// ---------------------------------------------------------------------------
// Cox

namespace {

// Log-domain Breslow quantities. Risk-set sums are accumulated with
// log-sum-exp so that no exp(eta) is ever formed directly.
struct LogBreslow {
  std::vector<double> event_times;
  std::vector<double> log_increments;
  std::vector<double> log_risk;  // log sum_{Y_i >= t_j} exp(eta_i)
  std::vector<double> events;    // d_j
  Eigen::VectorXd log_cumulative;
};

LogBreslow log_breslow(const Eigen::VectorXd& eta, const SurvivalResponse& surv) {
  const auto n = surv.time.size();
  if (eta.size() != n) throw std::invalid_argument("linear predictor length does not match response");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return surv.time[a] < surv.time[b]; });

  LogBreslow out;
  // Descending pass over tied-time groups.
  double log_risk = kNegInf;
  std::size_t end = order.size();
  while (end > 0) {
    std::size_t begin = end - 1;
    const double t = surv.time[order[begin]];
    while (begin > 0 && surv.time[order[begin - 1]] == t) --begin;
    double d = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      log_risk = detail::log_sum_exp(log_risk, eta[order[k]]);
      d += surv.status[order[k]];
    }
    if (d > 0.0) {
      out.event_times.push_back(t);
      out.events.push_back(d);
      out.log_risk.push_back(log_risk);
      out.log_increments.push_back(std::log(d) - log_risk);
    }
    end = begin;
  }
  std::reverse(out.event_times.begin(), out.event_times.end());
  std::reverse(out.events.begin(), out.events.end());
  std::reverse(out.log_risk.begin(), out.log_risk.end());
  std::reverse(out.log_increments.begin(), out.log_increments.end());

  // Ascending pass: running cumulative hazard at each subject's time.
  out.log_cumulative.resize(n);
  double log_h = kNegInf;
  std::size_t j = 0;
  for (const auto i : order) {
    while (j < out.event_times.size() && out.event_times[j] <= surv.time[i]) {
      log_h = detail::log_sum_exp(log_h, out.log_increments[j]);
      ++j;
    }
    out.log_cumulative[i] = log_h;
  }
  return out;
}

}  // namespace

BaselineHazard breslow_baseline_from_eta(const Eigen::VectorXd& eta, const SurvivalResponse& surv) {
  const auto lb = log_breslow(eta, surv);
  BaselineHazard out;
  const auto m = static_cast<Eigen::Index>(lb.event_times.size());
  out.event_times = Eigen::Map<const Eigen::VectorXd>(lb.event_times.data(), m);
  out.increments.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) out.increments[j] = std::exp(lb.log_increments[j]);
  out.cumulative = lb.log_cumulative.array().exp();
  return out;
}

BaselineHazard breslow_baseline(const Eigen::MatrixXd& x, const SurvivalResponse& surv,
                                const Eigen::VectorXd& beta) {
  return breslow_baseline_from_eta(linear_predictor(x, 0.0, beta), surv);
}

FamilyState cox_pseudo_from_eta(const Eigen::VectorXd& eta, const SurvivalResponse& surv) {
  const auto lb = log_breslow(eta, surv);
  FamilyState st;
  st.family = Family::Cox;
  st.eta = eta;
  const auto n = eta.size();
  st.z.resize(n);
  st.sigma2.resize(n);
  st.mu.resize(n);
  const double log_floor = std::log(glm::kCoxExpectedFloor);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double log_m = std::clamp(lb.log_cumulative[i] + eta[i], log_floor, kMaxLogExpected);
    const double m = std::exp(log_m);
    st.mu[i] = m;
    st.z[i] = eta[i] + (surv.status[i] - m) / m;
    st.sigma2[i] = 1.0 / m;
  }
  return st;
}

FamilyState cox_pseudo(const Eigen::MatrixXd& x, const SurvivalResponse& surv,
                       const Eigen::VectorXd& beta) {
  return cox_pseudo_from_eta(linear_predictor(x, 0.0, beta), surv);
}

double cox_partial_loglik(const Eigen::VectorXd& eta, const SurvivalResponse& surv) {
  const auto lb = log_breslow(eta, surv);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    if (surv.status[i] == 1.0) ll += eta[i];
  for (std::size_t j = 0; j < lb.event_times.size(); ++j) ll -= lb.events[j] * lb.log_risk[j];
  return ll;
}

// ---------------------------------------------------------------------------
// Dispatch

FamilyState pseudodata(const Eigen::MatrixXd& x, const ResponseVec& response, double beta0,
                       const Eigen::VectorXd& beta) {
  return std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ContinuousResponse>) return gaussian_pseudo(x, r.y, beta0, beta);
        else if constexpr (std::is_same_v<T, BinaryResponse>) return logistic_pseudo(x, r.y, beta0, beta);
        else return cox_pseudo(x, r, beta);
      },
      response);
}

FamilyState pseudodata(const Dataset& data, double beta0, const Eigen::VectorXd& beta) {
  return pseudodata(data.x(), data.response(), beta0, beta);
}

namespace {

template <typename T>
const T& require(const Dataset& data, const char* what) {
  if (const auto* r = std::get_if<T>(&data.response())) return *r;
  throw std::invalid_argument(std::string(what) + " requires a " +
                              (std::is_same_v<T, ContinuousResponse> ? "continuous"
                               : std::is_same_v<T, BinaryResponse>   ? "binary"
                                                                     : "survival") +
                              " response");
}

}  // namespace

FamilyState gaussian_pseudo(const Dataset& data, double beta0, const Eigen::VectorXd& beta) {
  return gaussian_pseudo(data.x(), require<ContinuousResponse>(data, "gaussian_pseudo").y, beta0, beta);
}

FamilyState logistic_pseudo(const Dataset& data, double beta0, const Eigen::VectorXd& beta) {
  return logistic_pseudo(data.x(), require<BinaryResponse>(data, "logistic_pseudo").y, beta0, beta);
}

BaselineHazard breslow_baseline(const Dataset& data, const Eigen::VectorXd& beta) {
  return breslow_baseline(data.x(), require<SurvivalResponse>(data, "breslow_baseline"), beta);
}

FamilyState cox_pseudo(const Dataset& data, const Eigen::VectorXd& beta) {
  return cox_pseudo(data.x(), require<SurvivalResponse>(data, "cox_pseudo"), beta);
}

double deviance(const Eigen::VectorXd& eta, const ResponseVec& response) {
  return std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ContinuousResponse>) {
          const auto n = static_cast<double>(r.y.size());
          const double rss = std::max((r.y - eta).squaredNorm(), 1e-300);
          return n * std::log(rss / n);
        } else if constexpr (std::is_same_v<T, BinaryResponse>) {
          double ll = 0.0;
          for (Eigen::Index i = 0; i < eta.size(); ++i) {
            const double e = std::clamp(eta[i], -glm::kEtaClip, glm::kEtaClip);
            ll += r.y[i] * e - detail::log1p_exp(e);
          }
          return -2.0 * ll;
        } else {
          return -2.0 * cox_partial_loglik(eta, r);
        }
      },
      response);
}

}  // namespace icmm
