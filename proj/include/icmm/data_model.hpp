#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace icmm {

enum class Family { Gaussian, Logistic, Cox };

std::string to_string(Family family);
Family parse_family(const std::string& name);

struct ContinuousResponse {
  Eigen::VectorXd y;
};

// Values are stored as 0.0 / 1.0.
struct BinaryResponse {
  Eigen::VectorXd y;
};

struct SurvivalResponse {
  Eigen::VectorXd time;
  Eigen::VectorXd status;
};

using ResponseVec = std::variant<ContinuousResponse, BinaryResponse, SurvivalResponse>;

Family family_of(const ResponseVec& response);
std::size_t response_size(const ResponseVec& response);

/// Undirected simple graph over predictor indices [0, p).
///
/// Edges are stored once as (min, max) pairs in insertion order. Neighbor
/// lists are kept sorted, so adjacency queries do not depend on the order in
/// which edges were added.
class EdgeList {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  EdgeList() = default;
  explicit EdgeList(std::size_t num_nodes);

  /// Adds the undirected edge {j, l}. Returns false (and leaves the graph
  /// unchanged) if the edge already exists. Throws InputError on a self-loop
  /// or an index outside [0, num_nodes).
  bool add_edge(std::size_t j, std::size_t l);

  bool has_edge(std::size_t j, std::size_t l) const;
  const std::vector<std::size_t>& neighbors(std::size_t j) const { return adjacency_.at(j); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_nodes() const { return adjacency_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  // Relabels node j as perm[j].
  EdgeList permuted(const std::vector<std::size_t>& perm) const;

  /// Equal when both graphs have the same node count and edge set.
  friend bool operator==(const EdgeList& lhs, const EdgeList& rhs);

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Number of connected components (isolated nodes count as components).
std::size_t connected_components(const EdgeList& graph);

/// Design matrix, response, predictor names and an optional predictor graph.
/// Validated on construction and immutable afterwards.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd x, ResponseVec response, std::vector<std::string> names,
          std::optional<EdgeList> graph = std::nullopt);

  // Default names x0, x1, ...
  Dataset(Eigen::MatrixXd x, ResponseVec response);

  const Eigen::MatrixXd& x() const { return x_; }
  const ResponseVec& response() const { return response_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::optional<EdgeList>& graph() const { return graph_; }
  Family family() const { return family_of(response_); }
  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index p() const { return x_.cols(); }

  Dataset with_graph(std::optional<EdgeList> graph) const;

  friend bool operator==(const Dataset& lhs, const Dataset& rhs);

 private:
  Eigen::MatrixXd x_;
  ResponseVec response_;
  std::vector<std::string> names_;
  std::optional<EdgeList> graph_;
};

/// Names the response column(s) of a CSV file. Gaussian and logistic use
/// `y`; Cox uses `time` and `status`.
struct ResponseSpec {
  Family family = Family::Gaussian;
  std::string y = "y";
  std::string time = "time";
  std::string status = "status";

  std::vector<std::string> columns() const;
};

Dataset load_dataset(const std::filesystem::path& data_path, const ResponseSpec& spec,
                     const std::optional<std::filesystem::path>& graph_path = std::nullopt);

// Response columns first, then covariates; 17 significant digits.
void write_dataset(const Dataset& data, const std::filesystem::path& data_path,
                   const ResponseSpec& spec);

EdgeList load_graph(const std::filesystem::path& path, std::size_t num_nodes);
void write_graph(const EdgeList& graph, const std::filesystem::path& path);

struct Standardization {
  Eigen::MatrixXd xs;
  Eigen::VectorXd centers;
  Eigen::VectorXd scales;
};

/// Centers each column to mean 0 and scales to sample standard deviation 1.
/// Throws InputError naming the first constant column.
Standardization standardize(const Eigen::MatrixXd& x,
                            const std::vector<std::string>* names = nullptr);

Eigen::MatrixXd unstandardize(const Eigen::MatrixXd& xs, const Eigen::VectorXd& centers,
                              const Eigen::VectorXd& scales);

// Applies previously computed centers/scales to a new matrix.
Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& x, const Eigen::VectorXd& centers,
                                      const Eigen::VectorXd& scales);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

// Strict numeric parse of a whole field; no locale, no trailing text.
std::optional<double> parse_double(const std::string& text);

/// Header plus string fields of a small CSV file (blank lines skipped).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws InputError if absent
};

CsvTable read_csv(const std::filesystem::path& path);

// Quotes a field when it contains a comma, quote, newline or edge spaces.
std::string csv_field(const std::string& s);

}  // namespace icmm
