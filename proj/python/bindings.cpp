#include "icmm/data_model.hpp"
#include "icmm/diagnostics.hpp"
#include "icmm/engine.hpp"
#include "icmm/inference.hpp"
#include "icmm/simgen.hpp"
#include "icmm/spike_slab.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace icmm;

namespace {

ResponseVec make_response(const std::string& family, const Eigen::VectorXd& y,
                          const std::optional<Eigen::VectorXd>& status) {
  switch (parse_family(family)) {
    case Family::Gaussian: return ContinuousResponse{y};
    case Family::Logistic: return BinaryResponse{y};
    case Family::Cox:
      if (!status) throw InputError("cox family needs status");
      return SurvivalResponse{y, *status};
  }
  throw InputError("unknown family");
}

std::optional<EdgeList> make_graph(const std::optional<std::vector<std::pair<std::size_t, std::size_t>>>& edges,
                                   std::size_t p) {
  if (!edges) return std::nullopt;
  EdgeList g(p);
  for (const auto& [j, l] : *edges) g.add_edge(j, l);
  return g;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(const EdgeList& g) {
  return {g.edges().begin(), g.edges().end()};
}

py::dict fit_to_dict(const ModelFit& fit, const Eigen::VectorXd& zeta) {
  py::dict d;
  d["family"] = to_string(fit.family);
  d["prior"] = to_string(fit.prior);
  d["alpha"] = fit.alpha;
  d["beta"] = fit.beta;
  d["beta0"] = fit.beta0;
  d["zeta"] = zeta;
  d["active_set"] = fit.active_set;
  d["converged"] = fit.converged;
  d["iterations"] = fit.iterations;
  d["omega"] = fit.omega;
  if (fit.ising)
    d["ising"] = py::make_tuple(fit.ising->a, fit.ising->b);
  else
    d["ising"] = py::none();
  return d;
}

py::dict fit_py(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::string& family,
                const std::optional<Eigen::VectorXd>& status, const std::string& prior,
                const std::optional<std::vector<std::pair<std::size_t, std::size_t>>>& edges,
                double alpha, const std::string& init, int max_outer, bool standardize) {
  const auto p = static_cast<std::size_t>(x.cols());
  Dataset data(x, make_response(family, y, status));
  if (edges) data = data.with_graph(make_graph(edges, p));
  FitConfig cfg;
  cfg.prior = parse_prior(prior);
  cfg.alpha = alpha;
  cfg.max_outer = max_outer;
  cfg.standardize = standardize;
  if (init == "lasso")
    cfg.init = InitKind::Lasso;
  else if (init == "zero")
    cfg.init = InitKind::Zero;
  else
    throw InputError("unknown init '" + init + "'");
  ModelFit fit;
  Eigen::VectorXd zeta;
  {
    py::gil_scoped_release release;
    fit = fit_icmm(data, cfg);
    zeta = local_posterior_probs(fit, data);
  }
  return fit_to_dict(fit, zeta);
}

py::dict simulate_py(int case_id, int n, int p, double rho, std::uint64_t seed) {
  sim::SimDesign design;
  design.case_id = case_id;
  design.n = n;
  design.p = p;
  design.rho = rho;
  design.seed = seed;
  design.with_test = false;
  const auto s = sim::simulate(design);
  py::dict d;
  d["x"] = s.train.x();
  d["family"] = to_string(s.train.family());
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SurvivalResponse>) {
          d["y"] = r.time;
          d["status"] = r.status;
        } else {
          d["y"] = r.y;
          d["status"] = py::none();
        }
      },
      s.train.response());
  d["beta"] = s.truth.beta;
  d["beta0"] = s.truth.beta0;
  if (s.truth.graph)
    d["edges"] = edge_pairs(*s.truth.graph);
  else
    d["edges"] = py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Iterated conditional modes/medians for spike-and-slab GLMs";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("posterior_median", [](double s, double w, double alpha) {
    const auto r = posterior_median({s, w, alpha});
    return py::make_tuple(r.median, r.prob_nonzero, r.threshold);
  }, py::arg("s"), py::arg("w") = 0.5, py::arg("alpha") = kDefaultAlpha,
     "Posterior median, P(nonzero) and threshold for one standardized statistic.");
  m.def("threshold", &threshold, py::arg("w"), py::arg("alpha") = kDefaultAlpha);

  m.def("fit", &fit_py, py::arg("x"), py::arg("y"), py::arg("family") = "gaussian",
        py::arg("status") = py::none(), py::arg("prior") = "independent", py::arg("edges") = py::none(),
        py::arg("alpha") = kDefaultAlpha, py::arg("init") = "lasso", py::arg("max_outer") = 100,
        py::arg("standardize") = true,
        "Fit the model; returns a dict with beta, beta0, zeta, active_set and diagnostics.");

  m.def("estimated_fdr", &estimated_fdr, py::arg("zeta"), py::arg("kappa"));
  m.def("select_at_fdr", [](const Eigen::VectorXd& zeta, double level) {
    const auto s = select_at_fdr(zeta, level);
    return py::make_tuple(s.kappa_star, s.selected);
  }, py::arg("zeta"), py::arg("level") = 0.05, "Returns (kappa_star, selected indices).");

  m.def("simulate", &simulate_py, py::arg("case_id"), py::arg("n"), py::arg("p"), py::arg("rho") = 0.0,
        py::arg("seed") = 1);
}
