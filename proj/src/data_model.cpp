#include "icmm/data_model.hpp"

#include "icmm/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace icmm {

std::string to_string(Family family) {
  switch (family) {
    case Family::Gaussian: return "gaussian";
    case Family::Logistic: return "logistic";
    case Family::Cox: return "cox";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "logistic") return Family::Logistic;
  if (name == "cox") return Family::Cox;
  throw InputError("unknown family '" + name + "'");
}

Family family_of(const ResponseVec& response) {
  return std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ContinuousResponse>) return Family::Gaussian;
        else if constexpr (std::is_same_v<T, BinaryResponse>) return Family::Logistic;
        else return Family::Cox;
      },
      response);
}

std::size_t response_size(const ResponseVec& response) {
  return std::visit(
      [](const auto& r) -> std::size_t {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SurvivalResponse>) return r.time.size();
        else return r.y.size();
      },
      response);
}

// ---------------------------------------------------------------------------
// EdgeList

EdgeList::EdgeList(std::size_t num_nodes) : adjacency_(num_nodes) {}

bool EdgeList::add_edge(std::size_t j, std::size_t l) {
  if (j == l) throw InputError("self-loop at predictor " + std::to_string(j));
  if (j >= num_nodes() || l >= num_nodes()) {
    throw InputError("edge (" + std::to_string(j) + ", " + std::to_string(l) +
                     ") references a predictor outside [0, " + std::to_string(num_nodes()) + ")");
  }
  if (has_edge(j, l)) return false;
  edges_.emplace_back(std::min(j, l), std::max(j, l));
  auto insert_sorted = [](std::vector<std::size_t>& v, std::size_t x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  };
  insert_sorted(adjacency_[j], l);
  insert_sorted(adjacency_[l], j);
  return true;
}

bool EdgeList::has_edge(std::size_t j, std::size_t l) const {
  if (j >= num_nodes() || l >= num_nodes()) return false;
  const auto& nb = adjacency_[j];
  return std::binary_search(nb.begin(), nb.end(), l);
}

EdgeList EdgeList::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != num_nodes()) throw std::invalid_argument("permutation size mismatch");
  EdgeList out(num_nodes());
  for (const auto& [j, l] : edges_) out.add_edge(perm[j], perm[l]);
  return out;
}

bool operator==(const EdgeList& lhs, const EdgeList& rhs) {
  if (lhs.num_nodes() != rhs.num_nodes() || lhs.num_edges() != rhs.num_edges()) return false;
  auto a = lhs.edges_;
  auto b = rhs.edges_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::size_t connected_components(const EdgeList& graph) {
  const std::size_t p = graph.num_nodes();
  std::vector<std::size_t> parent(p);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = p;
  for (const auto& [j, l] : graph.edges()) {
    auto rj = find(j), rl = find(l);
    if (rj != rl) {
      parent[rj] = rl;
      --components;
    }
  }
  return components;
}

// ---------------------------------------------------------------------------
// Dataset

namespace {

std::vector<std::string> default_names(Eigen::Index p) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

void validate_response(const ResponseVec& response) {
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ContinuousResponse>) {
          for (Eigen::Index i = 0; i < r.y.size(); ++i)
            if (!std::isfinite(r.y[i]))
              throw InputError("non-finite response at row " + std::to_string(i + 1));
        } else if constexpr (std::is_same_v<T, BinaryResponse>) {
          bool seen0 = false, seen1 = false;
          for (Eigen::Index i = 0; i < r.y.size(); ++i) {
            if (r.y[i] == 0.0) seen0 = true;
            else if (r.y[i] == 1.0) seen1 = true;
            else
              throw InputError("binary response outside {0,1} at row " + std::to_string(i + 1));
          }
          if (!seen0 || !seen1)
            throw InputError("binary response needs at least one 0 and one 1");
        } else {
          if (r.time.size() != r.status.size())
            throw InputError("survival time and status lengths differ");
          bool any_event = false;
          for (Eigen::Index i = 0; i < r.time.size(); ++i) {
            if (!std::isfinite(r.time[i]) || r.time[i] <= 0.0)
              throw InputError("nonpositive survival time at row " + std::to_string(i + 1));
            if (r.status[i] == 1.0) any_event = true;
            else if (r.status[i] != 0.0)
              throw InputError("survival status outside {0,1} at row " + std::to_string(i + 1));
          }
          if (!any_event) throw InputError("survival response has no events");
        }
      },
      response);
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd x, ResponseVec response, std::vector<std::string> names,
                 std::optional<EdgeList> graph)
    : x_(std::move(x)), response_(std::move(response)), names_(std::move(names)),
      graph_(std::move(graph)) {
  if (x_.rows() < 2) throw InputError("dataset needs at least 2 observations");
  if (x_.cols() < 1) throw InputError("dataset needs at least 1 predictor");
  if (static_cast<Eigen::Index>(response_size(response_)) != x_.rows())
    throw InputError("response length does not match the number of rows");
  if (!x_.allFinite()) {
    for (Eigen::Index i = 0; i < x_.rows(); ++i)
      for (Eigen::Index j = 0; j < x_.cols(); ++j)
        if (!std::isfinite(x_(i, j)))
          throw InputError("non-finite covariate at row " + std::to_string(i + 1) + ", column " +
                           std::to_string(j));
  }
  if (static_cast<Eigen::Index>(names_.size()) != x_.cols())
    throw InputError("expected " + std::to_string(x_.cols()) + " predictor names, got " +
                     std::to_string(names_.size()));
  std::unordered_set<std::string> seen;
  for (const auto& name : names_)
    if (!seen.insert(name).second) throw InputError("duplicate predictor name '" + name + "'");
  if (graph_ && static_cast<Eigen::Index>(graph_->num_nodes()) != x_.cols())
    throw InputError("graph node count does not match the number of predictors");
  validate_response(response_);
}

Dataset::Dataset(Eigen::MatrixXd x, ResponseVec response)
    : Dataset(x, std::move(response), default_names(x.cols())) {}

Dataset Dataset::with_graph(std::optional<EdgeList> graph) const {
  return Dataset(x_, response_, names_, std::move(graph));
}

bool operator==(const Dataset& lhs, const Dataset& rhs) {
  if (lhs.x_.rows() != rhs.x_.rows() || lhs.x_.cols() != rhs.x_.cols()) return false;
  if (lhs.x_ != rhs.x_ || lhs.names_ != rhs.names_ || lhs.graph_ != rhs.graph_) return false;
  if (lhs.response_.index() != rhs.response_.index()) return false;
  return std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        const auto& b = std::get<T>(rhs.response_);
        if constexpr (std::is_same_v<T, SurvivalResponse>)
          return a.time == b.time && a.status == b.status;
        else
          return a.y == b.y;
      },
      lhs.response_);
}

std::vector<std::string> ResponseSpec::columns() const {
  if (family == Family::Cox) return {time, status};
  return {y};
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record. Double-quoted fields may contain commas; "" is an
// escaped quote.
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw InputError("malformed CSV: unterminated quote on line " + std::to_string(line_no));
  fields.push_back(was_quoted ? field : trim(field));
  return fields;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA" || field == "NaN" || field == "nan" || field == "?";
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& data_path, const ResponseSpec& spec,
                     const std::optional<std::filesystem::path>& graph_path) {
  std::ifstream in(data_path);
  if (!in) throw InputError("cannot open data file " + data_path.string());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_csv(line, line_no);
      break;
    }
  }
  if (header.empty()) throw InputError("malformed CSV: missing header row");

  std::unordered_map<std::string, std::size_t> column_index;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw InputError("malformed CSV: empty column name at position " + std::to_string(c));
    if (!column_index.emplace(header[c], c).second)
      throw InputError("malformed CSV: duplicate column '" + header[c] + "'");
  }
  std::vector<std::size_t> response_cols;
  for (const auto& name : spec.columns()) {
    auto it = column_index.find(name);
    if (it == column_index.end()) throw InputError("response column '" + name + "' not found");
    response_cols.push_back(it->second);
  }
  std::vector<std::size_t> covariate_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (std::find(response_cols.begin(), response_cols.end(), c) == response_cols.end()) {
      covariate_cols.push_back(c);
      names.push_back(header[c]);
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_csv(line, line_no);
    if (fields.size() != header.size())
      throw InputError("malformed CSV: row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    std::vector<double> values(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (is_missing(fields[c]))
        throw InputError("missing value at row " + std::to_string(row) + ", column '" +
                         header[c] + "'");
      if (!parse_number(fields[c], values[c]))
        throw InputError("non-numeric value '" + fields[c] + "' at row " + std::to_string(row) +
                         ", column '" + header[c] + "'");
    }
    rows.push_back(std::move(values));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(covariate_cols.size());
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rows[i][covariate_cols[j]];

  auto column = [&](std::size_t c) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rows[i][c];
    return v;
  };
  ResponseVec response;
  switch (spec.family) {
    case Family::Gaussian: response = ContinuousResponse{column(response_cols[0])}; break;
    case Family::Logistic: response = BinaryResponse{column(response_cols[0])}; break;
    case Family::Cox:
      response = SurvivalResponse{column(response_cols[0]), column(response_cols[1])};
      break;
  }

  std::optional<EdgeList> graph;
  if (graph_path) graph = load_graph(*graph_path, static_cast<std::size_t>(p));
  return Dataset(std::move(x), std::move(response), std::move(names), std::move(graph));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_csv(line, line_no);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw InputError("malformed CSV: " + path.string() + " line " + std::to_string(line_no) +
                       " has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw InputError("malformed CSV: missing header row in " + path.string());
  return table;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError("column '" + name + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0.0;
  if (!parse_number(text, v)) return std::nullopt;
  return v;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_dataset(const Dataset& data, const std::filesystem::path& data_path,
                   const ResponseSpec& spec) {
  if (spec.family != data.family())
    throw InputError("response spec family does not match the dataset");
  const auto response_names = spec.columns();
  for (const auto& name : data.names())
    if (std::find(response_names.begin(), response_names.end(), name) != response_names.end())
      throw InputError("predictor name '" + name + "' collides with a response column");

  std::ofstream out(data_path);
  if (!out) throw InputError("cannot write " + data_path.string());
  std::string header;
  for (const auto& name : response_names) header += csv_field(name) + ",";
  for (std::size_t j = 0; j < data.names().size(); ++j) {
    header += csv_field(data.names()[j]);
    if (j + 1 < data.names().size()) header += ',';
  }
  out << header << '\n';

  const auto& x = data.x();
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, SurvivalResponse>)
            out << format_double(r.time[i]) << ',' << format_double(r.status[i]) << ',';
          else
            out << format_double(r.y[i]) << ',';
        },
        data.response());
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      out << format_double(x(i, j));
      out << (j + 1 < data.p() ? ',' : '\n');
    }
  }
  if (!out) throw InputError("failed writing " + data_path.string());
}

EdgeList load_graph(const std::filesystem::path& path, std::size_t num_nodes) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file " + path.string());
  EdgeList graph(num_nodes);
  std::string line;
  std::size_t line_no = 0;
  std::size_t duplicates = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    std::istringstream fields(text);
    long long j = -1, l = -1;
    std::string extra;
    if (!(fields >> j >> l) || (fields >> extra))
      throw InputError("malformed edge on line " + std::to_string(line_no) + " of " +
                       path.string());
    if (j < 0 || l < 0 || static_cast<std::size_t>(j) >= num_nodes ||
        static_cast<std::size_t>(l) >= num_nodes)
      throw InputError("out-of-range graph index on line " + std::to_string(line_no) +
                       " (p = " + std::to_string(num_nodes) + ")");
    if (j == l) throw InputError("self-loop at predictor " + std::to_string(j));
    if (!graph.add_edge(static_cast<std::size_t>(j), static_cast<std::size_t>(l))) ++duplicates;
  }
  if (duplicates > 0)
    warn("ignored " + std::to_string(duplicates) + " duplicate edge(s) in " + path.string());
  return graph;
}

void write_graph(const EdgeList& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "# " << graph.num_nodes() << " nodes, " << graph.num_edges() << " edges\n";
  for (const auto& [j, l] : graph.edges()) out << j << ' ' << l << '\n';
}

// ---------------------------------------------------------------------------
// Standardization

Standardization standardize(const Eigen::MatrixXd& x, const std::vector<std::string>* names) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw InputError("standardize needs at least 2 rows");
  Standardization out{x, Eigen::VectorXd(x.cols()), Eigen::VectorXd(x.cols())};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double center = x.col(j).mean();
    const double ss = (x.col(j).array() - center).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0) || sd <= 1e-14 * std::max(1.0, std::abs(center))) {
      const std::string label = names ? "'" + (*names)[static_cast<std::size_t>(j)] + "'"
                                      : std::to_string(j);
      throw InputError("constant column " + label + " cannot be standardized");
    }
    out.centers[j] = center;
    out.scales[j] = sd;
    out.xs.col(j) = (x.col(j).array() - center) / sd;
  }
  return out;
}

Eigen::MatrixXd unstandardize(const Eigen::MatrixXd& xs, const Eigen::VectorXd& centers,
                              const Eigen::VectorXd& scales) {
  Eigen::MatrixXd x(xs.rows(), xs.cols());
  for (Eigen::Index j = 0; j < xs.cols(); ++j)
    x.col(j) = xs.col(j).array() * scales[j] + centers[j];
  return x;
}

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& x, const Eigen::VectorXd& centers,
                                      const Eigen::VectorXd& scales) {
  Eigen::MatrixXd xs(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    xs.col(j) = (x.col(j).array() - centers[j]) / scales[j];
  return xs;
}

}  // namespace icmm
