// icmm: fit, simulate, importance and fdr-curve commands.

#include "icmm/data_model.hpp"
#include "icmm/diagnostics.hpp"
#include "icmm/engine.hpp"
#include "icmm/inference.hpp"
#include "icmm/lasso.hpp"
#include "icmm/simgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using namespace icmm;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

const std::string kIntercept = "(intercept)";

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------
// Options

struct FitFlags {
  std::string data;
  std::string response = "y";
  std::string time = "time";
  std::string status = "status";
  std::string family;
  std::string prior = "independent";
  std::string graph;
  double alpha = kDefaultAlpha;
  std::string init = "lasso";
  std::string init_file;
  std::uint64_t seed = 1;
  int max_outer = 100;
  bool no_standardize = false;
};

struct OutFlags {
  std::string out_dir = ".";
  std::string format = "csv";
  double level = 0.05;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--data", f.data, "CSV file with response and covariate columns")->required();
  cmd->add_option("--response", f.response, "response column (gaussian, logistic)");
  cmd->add_option("--time", f.time, "survival time column (cox)");
  cmd->add_option("--status", f.status, "event indicator column (cox)");
  cmd->add_option("--family", f.family, "gaussian, logistic or cox")
      ->required()
      ->check(CLI::IsMember({"gaussian", "logistic", "cox"}));
  cmd->add_option("--prior", f.prior, "independent or ising")
      ->check(CLI::IsMember({"independent", "ising"}));
  cmd->add_option("--graph", f.graph, "edge list over 0-based predictor indices");
  cmd->add_option("--alpha", f.alpha, "Laplace slab rate");
  cmd->add_option("--init", f.init, "zero, lasso or file")->check(CLI::IsMember({"zero", "lasso", "file"}));
  cmd->add_option("--init-file", f.init_file, "CSV with name,beta columns for --init file");
  cmd->add_option("--seed", f.seed, "recorded in the output; the fit itself is deterministic");
  cmd->add_option("--max-outer", f.max_outer, "maximum outer iterations");
  cmd->add_flag("--no-standardize", f.no_standardize, "fit on the raw covariates");
}

void add_out_flags(CLI::App* cmd, OutFlags& o, bool with_level) {
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--format", o.format, "csv, or json in addition to csv")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_level) cmd->add_option("--level", o.level, "target estimated FDR");
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("--level must lie in (0, 1)");
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const ordered_json& j) { open_out(path) << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------
// Fitting

Dataset load_from_flags(const FitFlags& f) {
  ResponseSpec spec;
  spec.family = parse_family(f.family);
  spec.y = f.response;
  spec.time = f.time;
  spec.status = f.status;
  std::optional<fs::path> graph;
  if (!f.graph.empty()) graph = f.graph;
  return load_dataset(f.data, spec, graph);
}

struct Coefficients {
  std::optional<double> beta0;
  std::map<std::string, double> beta;
};

Coefficients read_coefficients(const fs::path& path) {
  const auto table = read_csv(path);
  const auto name_col = table.column("name");
  const auto beta_col = table.column("beta");
  Coefficients out;
  for (const auto& row : table.rows) {
    const auto v = parse_double(row[beta_col]);
    if (!v) throw InputError("non-numeric beta '" + row[beta_col] + "' in " + path.string());
    if (row[name_col] == kIntercept) out.beta0 = *v;
    else if (!out.beta.emplace(row[name_col], *v).second)
      throw InputError("duplicate coefficient '" + row[name_col] + "' in " + path.string());
  }
  return out;
}

FitConfig config_from_flags(const FitFlags& f, const Dataset& data) {
  FitConfig cfg;
  cfg.prior = parse_prior(f.prior);
  if (cfg.prior == PriorKind::Ising && f.graph.empty()) throw InputError("ising prior requires --graph");
  cfg.alpha = f.alpha;
  cfg.max_outer = f.max_outer;
  cfg.standardize = !f.no_standardize;
  if (f.init == "zero") {
    cfg.init = InitKind::Zero;
  } else if (f.init == "lasso") {
    cfg.init = InitKind::Lasso;
  } else {
    if (f.init_file.empty()) throw InputError("--init file requires --init-file");
    const auto coef = read_coefficients(f.init_file);
    cfg.init = InitKind::Supplied;
    cfg.supplied_beta = Eigen::VectorXd::Zero(data.p());
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      const auto it = coef.beta.find(data.names()[j]);
      if (it == coef.beta.end())
        throw InputError("initial coefficient for '" + data.names()[j] + "' missing from " + f.init_file);
      cfg.supplied_beta[j] = it->second;
    }
    cfg.supplied_beta0 = coef.beta0;
  }
  cfg.validate(data.p());
  return cfg;
}

struct FitOutputs {
  ModelFit fit;
  Eigen::VectorXd zeta;
};

FitOutputs run_fit(const FitFlags& f, const Dataset& data) {
  const FitConfig cfg = config_from_flags(f, data);
  FitOutputs out{fit_icmm(data, cfg), {}};
  out.zeta = local_posterior_probs(out.fit, data);
  return out;
}

ordered_json hyperparameters(const FitFlags& f, const ModelFit& fit) {
  ordered_json h;
  h["family"] = to_string(fit.family);
  h["prior"] = to_string(fit.prior);
  h["alpha"] = fit.alpha;
  h["init"] = f.init;
  h["standardize"] = !f.no_standardize;
  h["seed"] = f.seed;
  if (fit.beta0) h["beta0"] = *fit.beta0;
  if (fit.omega) h["omega"] = *fit.omega;
  if (fit.ising) {
    h["ising_a"] = fit.ising->a;
    h["ising_b"] = fit.ising->b;
  }
  h["active_size"] = fit.active_set.size();
  h["iterations"] = fit.iterations;
  h["converged"] = fit.converged;
  return h;
}

std::string json_scalar(const ordered_json& v) {
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_string()) return csv_field(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void write_fit_files(const fs::path& dir, const std::string& format, const FitFlags& f,
                     const Dataset& data, const FitOutputs& r) {
  const auto& fit = r.fit;
  {
    auto out = open_out(dir / "coefficients.csv");
    out << "name,beta,zeta\n";
    for (Eigen::Index j = 0; j < data.p(); ++j)
      out << csv_field(data.names()[j]) << ',' << fmt(fit.beta[j]) << ',' << fmt(r.zeta[j]) << '\n';
  }
  const auto hyper = hyperparameters(f, fit);
  {
    auto out = open_out(dir / "hyperparameters.csv");
    out << "key,value\n";
    for (const auto& [k, v] : hyper.items()) out << k << ',' << json_scalar(v) << '\n';
  }
  const bool ising = fit.prior == PriorKind::Ising;
  {
    auto out = open_out(dir / "trace.csv");
    out << "iteration,active_size,max_change," << (ising ? "ising_a,ising_b" : "omega") << ",beta0\n";
    for (const auto& t : fit.trace) {
      out << t.iteration << ',' << t.active_size << ',' << fmt(t.max_change) << ',';
      if (ising) out << fmt(t.ising.a) << ',' << fmt(t.ising.b);
      else out << fmt(t.omega);
      out << ',' << fmt(t.beta0) << '\n';
    }
  }
  if (format == "json") {
    ordered_json j;
    j["coefficients"] = ordered_json::array();
    for (Eigen::Index k = 0; k < data.p(); ++k)
      j["coefficients"].push_back({{"name", data.names()[k]}, {"beta", fit.beta[k]}, {"zeta", r.zeta[k]}});
    j["hyperparameters"] = hyper;
    j["trace"] = ordered_json::array();
    for (const auto& t : fit.trace) {
      ordered_json row{{"iteration", t.iteration}, {"active_size", t.active_size}, {"max_change", t.max_change}};
      if (ising) {
        row["ising_a"] = t.ising.a;
        row["ising_b"] = t.ising.b;
      } else {
        row["omega"] = t.omega;
      }
      row["beta0"] = t.beta0;
      j["trace"].push_back(row);
    }
    write_json(dir / "fit.json", j);
  }
}

// ---------------------------------------------------------------------------
// FDR outputs

void write_fdr_files(const fs::path& dir, const std::string& format, const std::vector<std::string>& names,
                     const Eigen::VectorXd& zeta, double level, const std::vector<bool>* truth) {
  const auto report = importance_report(zeta, level, truth);
  std::vector<bool> selected(static_cast<std::size_t>(zeta.size()), false);
  for (const auto j : report.selected) selected[static_cast<std::size_t>(j)] = true;
  {
    auto out = open_out(dir / "fdr_curve.csv");
    out << "kappa,est_fdr" << (truth ? ",true_fdr" : "") << ",n_selected\n";
    for (const auto& pt : report.fdr_curve) {
      out << fmt(pt.kappa) << ',' << fmt(pt.est_fdr);
      if (truth) out << ',' << fmt(*pt.true_fdr);
      out << ',' << pt.n_selected << '\n';
    }
  }
  {
    auto out = open_out(dir / "selection.csv");
    out << "name,zeta,selected\n";
    for (Eigen::Index j = 0; j < zeta.size(); ++j)
      out << csv_field(names[j]) << ',' << fmt(zeta[j]) << ',' << (selected[j] ? 1 : 0) << '\n';
  }
  std::optional<double> tfdr;
  if (truth) tfdr = true_fdr(zeta, *truth, report.kappa_star);
  {
    auto out = open_out(dir / "fdr_summary.csv");
    out << "level,kappa_star,n_selected" << (truth ? ",true_fdr" : "") << '\n';
    out << fmt(level) << ',' << fmt(report.kappa_star) << ',' << report.selected.size();
    if (truth) out << ',' << fmt(*tfdr);
    out << '\n';
  }
  if (format == "json") {
    ordered_json j;
    j["level"] = level;
    j["kappa_star"] = report.kappa_star;
    j["n_selected"] = report.selected.size();
    if (tfdr) j["true_fdr"] = *tfdr;
    j["fdr_curve"] = ordered_json::array();
    for (const auto& pt : report.fdr_curve) {
      ordered_json row{{"kappa", pt.kappa}, {"est_fdr", pt.est_fdr}};
      if (pt.true_fdr) row["true_fdr"] = *pt.true_fdr;
      row["n_selected"] = pt.n_selected;
      j["fdr_curve"].push_back(row);
    }
    j["selection"] = ordered_json::array();
    for (Eigen::Index k = 0; k < zeta.size(); ++k)
      j["selection"].push_back({{"name", names[k]}, {"zeta", zeta[k]}, {"selected", selected[k]}});
    write_json(dir / "fdr.json", j);
  }
}

std::vector<bool> truth_for(const std::vector<std::string>& names, const fs::path& truth_path) {
  const auto coef = read_coefficients(truth_path);
  std::vector<bool> out(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto it = coef.beta.find(names[j]);
    if (it == coef.beta.end()) throw InputError("truth file has no entry for '" + names[j] + "'");
    out[j] = it->second != 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

struct SimFlags {
  sim::SimDesign design;
  int replicates = 1;
  bool fit = false;
  std::string methods = "icmm,lasso";
  bool with_test = false;
  double alpha = kDefaultAlpha;
  int max_outer = 100;
};

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ICMM_THREADS")) {
    const auto v = parse_double(env);
    if (!v || *v < 1 || *v != std::floor(*v)) throw InputError("ICMM_THREADS must be a positive integer");
    n = std::min(n, static_cast<std::size_t>(*v));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs body(i) for i in [0, jobs) on a small pool; the first exception wins.
template <typename Body>
void parallel_for(std::size_t jobs, Body&& body) {
  const std::size_t workers = worker_count(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t replicate_seed(std::uint64_t seed, int r) { return seed + static_cast<std::uint64_t>(r); }

void write_truth(const fs::path& path, const Dataset& data, const sim::SimTruth& truth) {
  auto out = open_out(path);
  out << "name,beta\n";
  if (data.family() != Family::Cox) out << kIntercept << ',' << fmt(truth.beta0) << '\n';
  for (Eigen::Index j = 0; j < data.p(); ++j)
    out << csv_field(data.names()[j]) << ',' << fmt(truth.beta[j]) << '\n';
}

void write_sim_files(const fs::path& dir, const sim::SimData& s) {
  ResponseSpec spec;
  spec.family = s.train.family();
  write_dataset(s.train, dir / "data.csv", spec);
  write_truth(dir / "truth.csv", s.train, s.truth);
  write_graph(s.truth.graph ? *s.truth.graph : EdgeList(static_cast<std::size_t>(s.train.p())),
              dir / "graph.txt");
  if (s.test) write_dataset(*s.test, dir / "test.csv", spec);
}

std::vector<std::string> parse_methods(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string m; std::getline(ss, m, ',');) {
    if (m != "icmm" && m != "lasso" && m != "icmm_fdr") throw InputError("unknown method '" + m + "'");
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw InputError("--methods is empty");
  return out;
}

struct ReplicateResult {
  std::vector<sim::MetricRow> rows;  // one per method
  bool converged = true;
};

std::string mean_sd(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return fmt(mean) + "(" + fmt(sd) + ")";
}

int cmd_simulate(const SimFlags& sf, const OutFlags& of) {
  auto design = sf.design;
  sim::family_for_case(design.case_id);  // validates the case number
  if (sf.replicates < 1) throw InputError("--replicates must be positive");
  check_level(of.level);
  const fs::path dir = prepare_dir(of.out_dir);
  design.with_test = sf.with_test || (sf.fit && design.case_id <= 3);

  if (!sf.fit) {
    std::vector<std::optional<sim::SimData>> draws(static_cast<std::size_t>(sf.replicates));
    parallel_for(draws.size(), [&](std::size_t r) {
      auto d = design;
      d.seed = replicate_seed(design.seed, static_cast<int>(r));
      draws[r] = sim::simulate(d);
    });
    for (std::size_t r = 0; r < draws.size(); ++r) {
      fs::path sub = dir;
      if (sf.replicates > 1) {
        char name[32];
        std::snprintf(name, sizeof name, "replicate_%03zu", r + 1);
        sub = prepare_dir((dir / name).string());
      }
      write_sim_files(sub, *draws[r]);
    }
    return kExitOk;
  }

  const auto methods = parse_methods(sf.methods);
  const bool structured = design.case_id == 2 || design.case_id == 3 || design.case_id == 5 ||
                          design.case_id == 6;
  std::vector<ReplicateResult> results(static_cast<std::size_t>(sf.replicates));
  parallel_for(results.size(), [&](std::size_t r) {
    auto d = design;
    d.seed = replicate_seed(design.seed, static_cast<int>(r));
    const auto s = sim::simulate(d);
    const Dataset* test = s.test ? &*s.test : nullptr;
    FitConfig cfg;
    cfg.prior = structured ? PriorKind::Ising : PriorKind::Independent;
    cfg.alpha = sf.alpha;
    cfg.max_outer = sf.max_outer;
    // The lasso initializer doubles as the lasso baseline.
    const auto lasso = fit_lasso_init(s.train);
    cfg.init = InitKind::Supplied;
    cfg.supplied_beta = lasso.beta;
    if (s.train.family() != Family::Cox) cfg.supplied_beta0 = lasso.beta0;
    std::optional<ModelFit> fit;
    auto& res = results[r];
    for (const auto& m : methods) {
      if (m == "lasso") {
        std::optional<double> b0;
        if (s.train.family() != Family::Cox) b0 = lasso.beta0;
        res.rows.push_back(sim::evaluate(lasso.beta, b0, s.truth, test));
        continue;
      }
      if (!fit) {
        fit = fit_icmm(s.train, cfg);
        res.converged = fit->converged;
      }
      if (m == "icmm") {
        res.rows.push_back(sim::evaluate(fit->beta, fit->beta0, s.truth, test));
      } else {
        const auto zeta = local_posterior_probs(*fit, s.train);
        const auto sel = select_at_fdr(zeta, of.level);
        res.rows.push_back(sim::evaluate_selection(fit->beta, fit->beta0, sel.selected, s.truth, test));
      }
    }
  });

  const bool has_mr = results.front().rows.front().mr.has_value();
  {
    auto out = open_out(dir / "replicates.csv");
    out << "replicate,seed,method," << (has_mr ? "mr," : "") << "fp,fn,ms,l1,l2sq\n";
    for (std::size_t r = 0; r < results.size(); ++r)
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto& row = results[r].rows[m];
        out << r + 1 << ',' << replicate_seed(design.seed, static_cast<int>(r)) << ',' << methods[m] << ',';
        if (has_mr) out << fmt(*row.mr) << ',';
        out << row.fp << ',' << row.fn << ',' << row.ms << ',' << fmt(row.l1) << ',' << fmt(row.l2sq) << '\n';
      }
  }
  ordered_json summary = ordered_json::array();
  {
    auto out = open_out(dir / "metrics.csv");
    out << "method," << (has_mr ? "MR," : "") << "FP,FN,MS,L1,L2sq\n";
    for (std::size_t m = 0; m < methods.size(); ++m) {
      std::vector<double> mr, fp, fn, ms, l1, l2;
      for (const auto& res : results) {
        const auto& row = res.rows[m];
        if (has_mr) mr.push_back(*row.mr);
        fp.push_back(row.fp);
        fn.push_back(row.fn);
        ms.push_back(row.ms);
        l1.push_back(row.l1);
        l2.push_back(row.l2sq);
      }
      out << methods[m] << ',';
      if (has_mr) out << mean_sd(mr) << ',';
      out << mean_sd(fp) << ',' << mean_sd(fn) << ',' << mean_sd(ms) << ',' << mean_sd(l1) << ','
          << mean_sd(l2) << '\n';
      ordered_json j{{"method", methods[m]}};
      if (has_mr) j["MR"] = mean_sd(mr);
      j["FP"] = mean_sd(fp);
      j["FN"] = mean_sd(fn);
      j["MS"] = mean_sd(ms);
      j["L1"] = mean_sd(l1);
      j["L2sq"] = mean_sd(l2);
      summary.push_back(j);
    }
  }
  if (of.format == "json") write_json(dir / "metrics.json", summary);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_fit(const FitFlags& f, const OutFlags& of) {
  if (f.prior == "ising" && f.graph.empty()) throw InputError("ising prior requires --graph");
  const Dataset data = load_from_flags(f);
  const auto r = run_fit(f, data);
  const fs::path dir = prepare_dir(of.out_dir);
  write_fit_files(dir, of.format, f, data, r);
  if (!r.fit.converged) {
    std::cerr << "warning: no convergence after " << r.fit.iterations << " outer iterations\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_importance(const FitFlags& f, const OutFlags& of, const std::string& truth) {
  check_level(of.level);
  if (f.prior == "ising" && f.graph.empty()) throw InputError("ising prior requires --graph");
  const Dataset data = load_from_flags(f);
  const auto r = run_fit(f, data);
  const fs::path dir = prepare_dir(of.out_dir);
  write_fit_files(dir, of.format, f, data, r);
  std::optional<std::vector<bool>> t;
  if (!truth.empty()) t = truth_for(data.names(), truth);
  write_fdr_files(dir, of.format, data.names(), r.zeta, of.level, t ? &*t : nullptr);
  return r.fit.converged ? kExitOk : kExitNotConverged;
}

int cmd_fdr_curve(const std::string& fit_dir, std::string coefficients, const std::string& truth,
                  const OutFlags& of) {
  check_level(of.level);
  if (coefficients.empty()) {
    if (fit_dir.empty()) throw InputError("fdr-curve needs --fit-dir or --coefficients");
    coefficients = (fs::path(fit_dir) / "coefficients.csv").string();
  }
  const auto table = read_csv(coefficients);
  const auto name_col = table.column("name");
  const auto zeta_col = table.column("zeta");
  std::vector<std::string> names;
  Eigen::VectorXd zeta(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto v = parse_double(table.rows[k][zeta_col]);
    if (!v || *v < 0.0 || *v > 1.0) throw InputError("invalid zeta '" + table.rows[k][zeta_col] + "'");
    names.push_back(table.rows[k][name_col]);
    zeta[static_cast<Eigen::Index>(k)] = *v;
  }
  std::optional<std::vector<bool>> t;
  if (!truth.empty()) t = truth_for(names, truth);
  const fs::path dir = prepare_dir(of.out_dir);
  write_fdr_files(dir, of.format, names, zeta, of.level, t ? &*t : nullptr);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Bayes variable selection for GLMs by iterated conditional modes/medians"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "icmm 0.1.0");

  FitFlags fit_flags;
  OutFlags fit_out;
  auto* fit_cmd = app.add_subcommand("fit", "fit ICM/M and write coefficients, hyperparameters and trace");
  add_fit_flags(fit_cmd, fit_flags);
  add_out_flags(fit_cmd, fit_out, false);

  FitFlags imp_flags;
  OutFlags imp_out;
  std::string imp_truth;
  auto* imp_cmd = app.add_subcommand("importance", "fit, then local posterior probabilities and FDR selection");
  add_fit_flags(imp_cmd, imp_flags);
  add_out_flags(imp_cmd, imp_out, true);
  imp_cmd->add_option("--truth", imp_truth, "CSV with name,beta of the true coefficients");

  std::string fdr_fit_dir, fdr_coef, fdr_truth;
  OutFlags fdr_out;
  auto* fdr_cmd = app.add_subcommand("fdr-curve", "estimated (and true) FDR curve from fitted zeta values");
  fdr_cmd->add_option("--fit-dir", fdr_fit_dir, "directory holding coefficients.csv");
  fdr_cmd->add_option("--coefficients", fdr_coef, "CSV with name and zeta columns");
  fdr_cmd->add_option("--truth", fdr_truth, "CSV with name,beta of the true coefficients");
  add_out_flags(fdr_cmd, fdr_out, true);

  SimFlags sim_flags;
  OutFlags sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "generate simulation data, optionally fitting replicates");
  auto& d = sim_flags.design;
  sim_cmd->add_option("--case", d.case_id, "simulation case 1-6")->required();
  sim_cmd->add_option("--n", d.n, "sample size");
  sim_cmd->add_option("--p", d.p, "number of predictors (cases 1, 2, 4, 5)");
  sim_cmd->add_option("--rho", d.rho, "AR(1) correlation");
  sim_cmd->add_option("--seed", d.seed, "seed of the first replicate; replicate r uses seed + r - 1");
  sim_cmd->add_option("--replicates", sim_flags.replicates, "number of replicates");
  sim_cmd->add_flag("--fit", sim_flags.fit, "fit each replicate and write metrics");
  sim_cmd->add_option("--methods", sim_flags.methods, "comma list of icmm, lasso, icmm_fdr");
  sim_cmd->add_flag("--with-test", sim_flags.with_test, "also draw a test set");
  sim_cmd->add_option("--alpha", sim_flags.alpha, "Laplace slab rate for --fit");
  sim_cmd->add_option("--max-outer", sim_flags.max_outer, "maximum outer iterations for --fit");
  sim_cmd->add_option("--genes", d.genes, "case 3: number of genes");
  sim_cmd->add_option("--max-snps-per-gene", d.max_snps_per_gene, "case 3: SNPs per gene at most");
  sim_cmd->add_option("--total-snps", d.total_snps, "case 3: total SNP count, 0 for free counts");
  sim_cmd->add_option("--pathways", d.pathways, "case 3: number of pathways");
  sim_cmd->add_option("--causal-genes", d.causal_genes, "case 3: genes in the causal pathway");
  add_out_flags(sim_cmd, sim_out, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_flags, fit_out);
    if (*imp_cmd) return cmd_importance(imp_flags, imp_out, imp_truth);
    if (*fdr_cmd) return cmd_fdr_curve(fdr_fit_dir, fdr_coef, fdr_truth, fdr_out);
    if (*sim_cmd) return cmd_simulate(sim_flags, sim_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
