#include "icmm/simgen.hpp"

#include "icmm/diagnostics.hpp"
#include "normal.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace icmm::sim {

namespace {

constexpr int kMaxRedraws = 1000;

double uniform(Rng& rng, double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

double standard_normal(Rng& rng) { return boost::random::normal_distribution<double>(0.0, 1.0)(rng); }

// U in (0, 1), never exactly 0.
double open_uniform(Rng& rng) {
  double u = 0.0;
  while (u <= 0.0) u = uniform(rng, 0.0, 1.0);
  return u;
}

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw InputError("rho must lie in [0, 1)");
}

void check_sizes(int n, int p) {
  if (n < 2) throw InputError("n must be at least 2");
  if (p < 1) throw InputError("p must be at least 1");
}

bool has_constant_column(const Eigen::MatrixXd& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if ((x.col(j).array() == x(0, j)).all()) return true;
  return false;
}

Eigen::VectorXd binary_response(const Eigen::VectorXd& eta, Rng& rng) {
  Eigen::VectorXd y(eta.size());
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    for (Eigen::Index i = 0; i < eta.size(); ++i)
      y[i] = open_uniform(rng) < detail::logistic(eta[i]) ? 1.0 : 0.0;
    const double s = y.sum();
    if (s > 0.0 && s < static_cast<double>(y.size())) return y;
  }
  throw InputError("simulated binary response is constant; linear predictor too extreme");
}

std::vector<std::string> names_for(Eigen::Index p) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

Dataset logistic_dataset(Eigen::MatrixXd x, const SimTruth& truth, Rng& rng) {
  Eigen::VectorXd eta = x * truth.beta;
  eta.array() += truth.beta0;
  auto y = binary_response(eta, rng);
  const auto p = x.cols();
  return Dataset(std::move(x), BinaryResponse{std::move(y)}, names_for(p), truth.graph);
}

Dataset cox_dataset(Eigen::MatrixXd x, SimTruth& truth, Rng& rng) {
  const Eigen::VectorXd eta = x * truth.beta;
  auto draw = draw_survival(eta, rng);
  truth.censor_rate = draw.realized_censoring;
  const auto p = x.cols();
  return Dataset(std::move(x), std::move(draw.response), names_for(p), truth.graph);
}

template <typename MakeX>
Eigen::MatrixXd draw_design(MakeX&& make_x) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    Eigen::MatrixXd x = make_x();
    if (!has_constant_column(x)) return x;
  }
  throw InputError("could not draw a design without constant columns");
}

EdgeList path_graph(std::size_t p) {
  EdgeList g(p);
  for (std::size_t j = 0; j + 1 < p; ++j) g.add_edge(j, j + 1);
  return g;
}

}  // namespace

Family family_for_case(int case_id) {
  if (case_id >= 1 && case_id <= 3) return Family::Logistic;
  if (case_id >= 4 && case_id <= 6) return Family::Cox;
  throw InputError("unknown simulation case " + std::to_string(case_id));
}

std::vector<bool> SimTruth::nonzero() const {
  std::vector<bool> out(static_cast<std::size_t>(beta.size()));
  for (Eigen::Index j = 0; j < beta.size(); ++j) out[static_cast<std::size_t>(j)] = beta[j] != 0.0;
  return out;
}

Eigen::MatrixXd ar1_design(int n, int p, double rho, int blocks, Rng& rng) {
  check_rho(rho);
  if (blocks < 1 || p % blocks != 0) throw InputError("p must be divisible by the block count");
  const int block = p / blocks;
  const double innovation = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < blocks; ++b) {
      double prev = standard_normal(rng);
      x(i, b * block) = prev;
      for (int k = 1; k < block; ++k) {
        prev = rho * prev + innovation * standard_normal(rng);
        x(i, b * block + k) = prev;
      }
    }
  }
  return x;
}

Indicators simulate_indicator_chain(std::size_t length, Rng& rng) {
  Indicators tau(length);
  if (length == 0) return tau;
  tau[0] = uniform(rng, 0.0, 1.0) < 0.5;
  for (std::size_t j = 1; j < length; ++j) {
    const double u = uniform(rng, 0.0, 1.0);
    tau[j] = tau[j - 1] ? (u >= kChainStay1) : (u >= kChainStay0);
  }
  return tau;
}

SurvivalDraw draw_survival(const Eigen::VectorXd& eta, Rng& rng, double shape, double scale,
                           double censor_rate) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw InputError("Weibull shape and scale must be positive");
  if (!(censor_rate >= 0.0 && censor_rate < 1.0)) throw InputError("censoring rate must lie in [0, 1)");
  const auto n = eta.size();
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double log_t = std::log(scale) + (std::log(-std::log(open_uniform(rng))) - eta[i]) / shape;
    t[i] = std::max(std::exp(log_t), std::numeric_limits<double>::min());
  }

  SurvivalDraw out;
  out.response.time.resize(n);
  out.response.status.resize(n);
  if (censor_rate == 0.0) {
    out.response.time = t;
    out.response.status.setOnes();
    out.censor_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  // With C ~ U[0, c], P(C < T_i) = min(T_i / c, 1); the mean is decreasing in c.
  auto expected = [&](double c) { return (t.array() / c).min(1.0).mean(); };
  double lo = std::log(t.minCoeff()) - 1.0;
  double hi = std::log(t.maxCoeff()) + std::log(1.0 / censor_rate) + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (expected(std::exp(mid)) > censor_rate) lo = mid;
    else hi = mid;
  }
  out.censor_bound = std::exp(0.5 * (lo + hi));

  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    double censored = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = out.censor_bound * open_uniform(rng);
      const bool event = t[i] <= c;
      out.response.time[i] = event ? t[i] : c;
      out.response.status[i] = event ? 1.0 : 0.0;
      censored += event ? 0.0 : 1.0;
    }
    out.realized_censoring = censored / static_cast<double>(n);
    if (censored < static_cast<double>(n)) return out;
  }
  throw InputError("simulated survival data has no events");
}

// ---------------------------------------------------------------------------
// Cases

SimData gen_case1(int n, int p, double rho, std::uint64_t seed, bool with_test) {
  check_sizes(n, p);
  check_rho(rho);
  if (p % 10 != 0 || p < 20) throw InputError("case 1 needs p divisible by 10 and p >= 20");
  Rng rng(seed);
  SimTruth truth;
  truth.beta = Eigen::VectorXd::Zero(p);
  truth.beta.segment(0, 5).setConstant(10.0);
  truth.beta.segment(10, 5).setConstant(-5.0);
  auto make_x = [&] { return ar1_design(n, p, rho, 10, rng); };
  Dataset train = logistic_dataset(draw_design(make_x), truth, rng);
  std::optional<Dataset> test;
  if (with_test) test = logistic_dataset(draw_design(make_x), truth, rng);
  return {std::move(train), std::move(test), std::move(truth)};
}

namespace {

Eigen::VectorXd chain_coefficients(std::size_t p, double lo, double hi, Rng& rng) {
  const auto tau = simulate_indicator_chain(p, rng);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j)
    if (tau[j]) beta[static_cast<Eigen::Index>(j)] = uniform(rng, lo, hi);
  return beta;
}

}  // namespace

SimData gen_case2(int n, int p, double rho, std::uint64_t seed, bool with_test) {
  check_sizes(n, p);
  check_rho(rho);
  Rng rng(seed);
  SimTruth truth;
  truth.beta = chain_coefficients(static_cast<std::size_t>(p), 3.0, 10.0, rng);
  truth.graph = path_graph(static_cast<std::size_t>(p));
  auto make_x = [&] { return ar1_design(n, p, rho, 1, rng); };
  Dataset train = logistic_dataset(draw_design(make_x), truth, rng);
  std::optional<Dataset> test;
  if (with_test) test = logistic_dataset(draw_design(make_x), truth, rng);
  return {std::move(train), std::move(test), std::move(truth)};
}

SimData gen_case3_like(int n, int p_genes, int snps_per_gene, int n_pathways, std::uint64_t seed,
                       bool with_test) {
  SimDesign d;
  d.case_id = 3;
  d.n = n;
  d.genes = p_genes;
  d.max_snps_per_gene = snps_per_gene;
  d.total_snps = 0;
  d.pathways = n_pathways;
  d.causal_genes = std::max(1, p_genes * 15 / 341);
  d.seed = seed;
  d.with_test = with_test;
  return gen_case3_like(d);
}

SimData gen_case3_like(const SimDesign& d) {
  check_sizes(d.n, 1);
  if (d.genes < 2 || d.max_snps_per_gene < 1 || d.pathways < 1 || d.pathways > d.genes)
    throw InputError("case 3 needs genes >= pathways >= 1 and at least one SNP per gene");
  if (d.total_snps != 0 &&
      (d.total_snps < d.genes || d.total_snps > d.genes * d.max_snps_per_gene))
    throw InputError("case 3 total SNP count is incompatible with the gene count");
  Rng rng(d.seed);

  // SNPs per gene.
  std::vector<int> snps(static_cast<std::size_t>(d.genes), 1);
  if (d.total_snps == 0) {
    boost::random::uniform_int_distribution<int> count(1, d.max_snps_per_gene);
    for (auto& s : snps) s = count(rng);
  } else {
    boost::random::uniform_int_distribution<int> pick(0, d.genes - 1);
    for (int extra = d.total_snps - d.genes; extra > 0;) {
      auto& s = snps[static_cast<std::size_t>(pick(rng))];
      if (s < d.max_snps_per_gene) {
        ++s;
        --extra;
      }
    }
  }

  // Genes per pathway: the causal pathway 0 first, the rest split evenly.
  const int causal = std::clamp(d.causal_genes, 1, d.genes - (d.pathways - 1));
  std::vector<int> gene_pathway(static_cast<std::size_t>(d.genes));
  for (int g = 0; g < d.genes; ++g) {
    if (g < causal || d.pathways == 1) gene_pathway[g] = 0;
    else gene_pathway[g] = 1 + (g - causal) * (d.pathways - 1) / (d.genes - causal);
  }

  std::vector<int> first_snp(static_cast<std::size_t>(d.genes) + 1, 0);
  for (int g = 0; g < d.genes; ++g) first_snp[g + 1] = first_snp[g] + snps[g];
  const int p = first_snp.back();

  EdgeList graph(static_cast<std::size_t>(p));
  for (int g = 0; g < d.genes; ++g)
    for (int a = first_snp[g]; a < first_snp[g + 1]; ++a)
      for (int b = a + 1; b < first_snp[g + 1]; ++b) graph.add_edge(a, b);
  for (int g = 1; g < d.genes; ++g)
    if (gene_pathway[g] == gene_pathway[g - 1]) graph.add_edge(first_snp[g - 1], first_snp[g]);

  SimTruth truth;
  truth.beta = Eigen::VectorXd::Zero(p);
  for (int g = 0; g < d.genes; ++g)
    if (gene_pathway[g] == 0)
      for (int a = first_snp[g]; a < first_snp[g + 1]; ++a) truth.beta[a] = uniform(rng, 1.0, 10.0);
  truth.graph = std::move(graph);

  // Genotypes: two latent AR(1) haplotypes per gene (linkage within the gene),
  // thresholded at the minor-allele frequency, summed and centered at 2 maf.
  constexpr double kLinkage = 0.6;
  Eigen::VectorXd maf(p);
  for (int j = 0; j < p; ++j) maf[j] = uniform(rng, 0.05, 0.5);
  const boost::math::normal_distribution<double> normal;
  Eigen::VectorXd cut(p);
  for (int j = 0; j < p; ++j) cut[j] = boost::math::quantile(boost::math::complement(normal, maf[j]));

  auto make_x = [&] {
    Eigen::MatrixXd x(d.n, p);
    const double innovation = std::sqrt(1.0 - kLinkage * kLinkage);
    for (int i = 0; i < d.n; ++i) {
      for (int g = 0; g < d.genes; ++g) {
        double h1 = standard_normal(rng), h2 = standard_normal(rng);
        for (int a = first_snp[g]; a < first_snp[g + 1]; ++a) {
          if (a > first_snp[g]) {
            h1 = kLinkage * h1 + innovation * standard_normal(rng);
            h2 = kLinkage * h2 + innovation * standard_normal(rng);
          }
          x(i, a) = (h1 > cut[a]) + (h2 > cut[a]) - 2.0 * maf[a];
        }
      }
    }
    return x;
  };
  Dataset train = logistic_dataset(draw_design(make_x), truth, rng);
  std::optional<Dataset> test;
  if (d.with_test) test = logistic_dataset(draw_design(make_x), truth, rng);
  return {std::move(train), std::move(test), std::move(truth)};
}

SimData gen_case4(int n, int p, double rho, std::uint64_t seed, bool with_test) {
  check_sizes(n, p);
  check_rho(rho);
  if (p % 10 != 0 || p < 110) throw InputError("case 4 needs p divisible by 10 and p >= 110");
  Rng rng(seed);
  SimTruth truth;
  truth.beta = Eigen::VectorXd::Zero(p);
  truth.beta.segment(0, 10).setConstant(5.0);
  truth.beta.segment(100, 10).setConstant(2.0);
  auto make_x = [&] { return ar1_design(n, p, rho, 10, rng); };
  Dataset train = cox_dataset(draw_design(make_x), truth, rng);
  std::optional<Dataset> test;
  if (with_test) {
    SimTruth copy = truth;
    test = cox_dataset(draw_design(make_x), copy, rng);
  }
  return {std::move(train), std::move(test), std::move(truth)};
}

SimData gen_case5(int n, int p, double rho, std::uint64_t seed, bool with_test) {
  check_sizes(n, p);
  check_rho(rho);
  Rng rng(seed);
  SimTruth truth;
  truth.beta = chain_coefficients(static_cast<std::size_t>(p), 0.5, 5.0, rng);
  truth.graph = path_graph(static_cast<std::size_t>(p));
  auto make_x = [&] { return ar1_design(n, p, rho, 1, rng); };
  Dataset train = cox_dataset(draw_design(make_x), truth, rng);
  std::optional<Dataset> test;
  if (with_test) {
    SimTruth copy = truth;
    test = cox_dataset(draw_design(make_x), copy, rng);
  }
  return {std::move(train), std::move(test), std::move(truth)};
}

SimData gen_case6(int n, std::uint64_t seed, bool with_test) {
  check_sizes(n, 1);
  constexpr int kPathways = 10;
  constexpr int kGenes = 100;
  constexpr int kRegulated = 10;
  constexpr int kCausalPerPathway = 6;
  constexpr double kRegulatedCorrelation = 0.7;
  const int p = kPathways * kGenes;
  Rng rng(seed);

  SimTruth truth;
  truth.beta = Eigen::VectorXd::Zero(p);
  for (int pw = 0; pw < 3; ++pw)
    for (int k = 0; k < kCausalPerPathway; ++k) truth.beta[pw * kGenes + k] = uniform(rng, 0.5, 5.0);

  // Regulated genes form a clique; the remaining genes hang off the first
  // regulated gene as a chain, so every pathway is one component.
  EdgeList graph(p);
  for (int pw = 0; pw < kPathways; ++pw) {
    const int base = pw * kGenes;
    for (int a = 0; a < kRegulated; ++a)
      for (int b = a + 1; b < kRegulated; ++b) graph.add_edge(base + a, base + b);
    graph.add_edge(base, base + kRegulated);
    for (int g = kRegulated + 1; g < kGenes; ++g) graph.add_edge(base + g - 1, base + g);
  }
  truth.graph = std::move(graph);

  auto make_x = [&] {
    Eigen::MatrixXd x(n, p);
    const double shared = std::sqrt(kRegulatedCorrelation);
    const double own = std::sqrt(1.0 - kRegulatedCorrelation);
    for (int i = 0; i < n; ++i) {
      for (int pw = 0; pw < kPathways; ++pw) {
        const double factor = standard_normal(rng);
        for (int g = 0; g < kGenes; ++g) {
          const double e = standard_normal(rng);
          x(i, pw * kGenes + g) = g < kRegulated ? shared * factor + own * e : e;
        }
      }
    }
    return x;
  };
  Dataset train = cox_dataset(draw_design(make_x), truth, rng);
  std::optional<Dataset> test;
  if (with_test) {
    SimTruth copy = truth;
    test = cox_dataset(draw_design(make_x), copy, rng);
  }
  return {std::move(train), std::move(test), std::move(truth)};
}

SimData simulate(const SimDesign& d) {
  switch (d.case_id) {
    case 1: return gen_case1(d.n, d.p, d.rho, d.seed, d.with_test);
    case 2: return gen_case2(d.n, d.p, d.rho, d.seed, d.with_test);
    case 3: return gen_case3_like(d);
    case 4: return gen_case4(d.n, d.p, d.rho, d.seed, d.with_test);
    case 5: return gen_case5(d.n, d.p, d.rho, d.seed, d.with_test);
    case 6: return gen_case6(d.n, d.seed, d.with_test);
    default: throw InputError("unknown simulation case " + std::to_string(d.case_id));
  }
}

// ---------------------------------------------------------------------------
// Metrics

MetricRow evaluate(const Eigen::VectorXd& beta_hat, std::optional<double> beta0_hat,
                   const SimTruth& truth, const Dataset* test) {
  if (beta_hat.size() != truth.beta.size()) throw std::invalid_argument("evaluate: length mismatch");
  MetricRow row;
  for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
    const bool est = beta_hat[j] != 0.0;
    const bool real = truth.beta[j] != 0.0;
    row.ms += est;
    row.fp += est && !real;
    row.fn += !est && real;
  }
  const Eigen::VectorXd diff = truth.beta - beta_hat;
  row.l1 = diff.cwiseAbs().sum();
  row.l2sq = diff.squaredNorm();
  if (test) {
    if (const auto* bin = std::get_if<BinaryResponse>(&test->response())) {
      Eigen::VectorXd eta = test->x() * beta_hat;
      eta.array() += beta0_hat.value_or(0.0);
      double wrong = 0.0;
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double predicted = detail::logistic(eta[i]) >= 0.5 ? 1.0 : 0.0;
        wrong += predicted != bin->y[i];
      }
      row.mr = wrong / static_cast<double>(eta.size());
    }
  }
  return row;
}

MetricRow evaluate_selection(const Eigen::VectorXd& beta_hat, std::optional<double> beta0_hat,
                             const std::vector<Eigen::Index>& selected, const SimTruth& truth,
                             const Dataset* test) {
  Eigen::VectorXd masked = Eigen::VectorXd::Zero(beta_hat.size());
  for (const auto j : selected) {
    // A selected predictor with a zero estimate still counts as selected.
    masked[j] = beta_hat[j] != 0.0 ? beta_hat[j] : std::numeric_limits<double>::min();
  }
  return evaluate(masked, beta0_hat, truth, test);
}

}  // namespace icmm::sim
