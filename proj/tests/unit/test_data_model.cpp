#include "icmm/data_model.hpp"
#include "icmm/diagnostics.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace icmm;
using testutil::TempDir;
using testutil::error_message;
using testutil::write_text;

TEST_CASE("load a minimal binary dataset") {
  TempDir dir;
  write_text(dir / "d.csv", "y,a,b\n0,1.5,2\n1,0.5,-1\n1,3,4\n");
  const auto d = load_dataset(dir / "d.csv", {Family::Logistic});
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(d.family() == Family::Logistic);
  CHECK(d.names() == std::vector<std::string>{"a", "b"});
  CHECK(d.x()(2, 1) == 4.0);
}

TEST_CASE("nonpositive survival time is reported with its row") {
  TempDir dir;
  write_text(dir / "s.csv", "time,status,a\n1.0,1,0.3\n0,1,0.1\n2.0,0,0.2\n");
  const auto msg = error_message([&] { load_dataset(dir / "s.csv", {Family::Cox}); });
  CHECK(msg == "nonpositive survival time at row 2");
}

TEST_CASE("self-loop in the graph file") {
  TempDir dir;
  write_text(dir / "d.csv", "y,a,b,c,d,e,f\n0,1,2,3,4,5,6\n1,2,3,4,5,6,8\n");
  write_text(dir / "g.txt", "# edges\n0 1\n5 5\n");
  const auto msg = error_message([&] { load_dataset(dir / "d.csv", {Family::Logistic}, dir / "g.txt"); });
  CHECK(msg == "self-loop at predictor 5");
}

TEST_CASE("input errors") {
  TempDir dir;
  auto fails = [&](const std::string& text, Family fam, const std::string& needle) {
    write_text(dir / "bad.csv", text);
    const auto msg = error_message([&] { load_dataset(dir / "bad.csv", {fam}); });
    INFO(msg);
    CHECK(msg.find(needle) != std::string::npos);
  };
  fails("y,a\n0,1\n1,\n", Family::Logistic, "missing value at row 2");
  fails("y,a\n0,1\n1,abc\n", Family::Logistic, "non-numeric");
  fails("y,a\n0,1\n2,3\n", Family::Logistic, "binary response outside {0,1} at row 2");
  fails("y,a\n1,1\n1,3\n", Family::Logistic, "at least one 0 and one 1");
  fails("y,a\n0,1,5\n1,3\n", Family::Gaussian, "malformed CSV");
  fails("a,b\n0,1\n1,3\n", Family::Gaussian, "response column 'y' not found");
  fails("time,status,a\n1,0,1\n2,0,2\n", Family::Cox, "no events");

  write_text(dir / "d.csv", "y,a,b\n0,1,2\n1,3,5\n");
  write_text(dir / "g.txt", "0 7\n");
  CHECK(error_message([&] { load_dataset(dir / "d.csv", {Family::Logistic}, dir / "g.txt"); })
            .find("out-of-range graph index") != std::string::npos);
}

TEST_CASE("duplicate graph edges are deduplicated with a warning") {
  TempDir dir;
  write_text(dir / "g.txt", "0 1\n1 0\n1 2\n");
  std::vector<std::string> warnings;
  auto old = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
  const auto g = load_graph(dir / "g.txt", 3);
  set_warning_sink(old);
  CHECK(g.num_edges() == 2);
  CHECK(warnings.size() == 1);
}

TEST_CASE("edge list adjacency ignores insertion order") {
  EdgeList a(5), b(5);
  a.add_edge(0, 3); a.add_edge(3, 1); a.add_edge(4, 3);
  b.add_edge(3, 4); b.add_edge(1, 3); b.add_edge(0, 3);
  CHECK(a.neighbors(3) == b.neighbors(3));
  CHECK(a == b);
  CHECK(a.has_edge(3, 0));
  CHECK(a.has_edge(0, 3));
  CHECK_FALSE(a.add_edge(3, 0));
  CHECK_THROWS_AS(a.add_edge(2, 2), InputError);
  CHECK_THROWS_AS(a.add_edge(2, 5), InputError);
  CHECK(connected_components(a) == 2);
}

TEST_CASE("dataset invariants") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  ContinuousResponse y{Eigen::Vector3d(1, 2, 3)};
  CHECK_THROWS_AS(Dataset(x, y, {"a", "a"}), InputError);
  CHECK_THROWS_AS(Dataset(x, y, {"a"}), InputError);
  CHECK_THROWS_AS(Dataset(x.topRows(1), ContinuousResponse{Eigen::VectorXd::Ones(1)}), InputError);
  Eigen::MatrixXd bad = x;
  bad(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Dataset(bad, y), InputError);
  CHECK_THROWS_AS(Dataset(x, y, {"a", "b"}, EdgeList(3)), InputError);
}

TEST_CASE("standardize examples") {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  const auto st = standardize(x);
  CHECK(std::fabs(st.xs.col(0).mean()) < 1e-15);
  const double sd = std::sqrt(st.xs.col(0).squaredNorm() / 2.0);
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(st.centers[0] == 2.0);
  CHECK(st.scales[0] == 1.0);

  const auto again = standardize(st.xs);
  CHECK((again.xs - st.xs).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::fabs(again.centers[0]) <= 1e-12);
  CHECK(std::fabs(again.scales[0] - 1.0) <= 1e-12);

  Eigen::MatrixXd c(3, 2);
  c << 1, 4, 2, 4, 3, 4;
  const std::vector<std::string> names{"keep", "flat"};
  const auto msg = error_message([&] { standardize(c, &names); });
  CHECK(msg.find("flat") != std::string::npos);
}

TEST_CASE("standardize round trip") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(40, 7);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 100.0 * z(rng) + 3.0;
  const auto st = standardize(x);
  CHECK((unstandardize(st.xs, st.centers, st.scales) - x).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((apply_standardization(x, st.centers, st.scales) - st.xs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("write and load round trip is exact") {
  TempDir dir;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = 25, p = 4;
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng) * std::pow(10.0, i % 7 - 3);
  Eigen::VectorXd y(n), t(n), st(n), b(n);
  for (int i = 0; i < n; ++i) {
    y[i] = z(rng) / 3.0;
    t[i] = std::exp(z(rng));
    st[i] = i % 3 == 0 ? 0.0 : 1.0;
    b[i] = i % 2;
  }
  EdgeList g(p);
  g.add_edge(0, 2);
  g.add_edge(3, 1);
  const std::vector<std::string> names{"g1", "with space", "q\"uote", "c,omma"};

  struct Case {
    ResponseVec r;
    Family f;
  };
  for (const auto& c : {Case{ContinuousResponse{y}, Family::Gaussian}, Case{BinaryResponse{b}, Family::Logistic},
                        Case{SurvivalResponse{t, st}, Family::Cox}}) {
    const Dataset d(x, c.r, names, g);
    write_dataset(d, dir / "rt.csv", {c.f});
    write_graph(g, dir / "rt.txt");
    const auto back = load_dataset(dir / "rt.csv", {c.f}, dir / "rt.txt");
    CHECK(back == d);
  }
}

TEST_CASE("format and parse doubles") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.123456789}) CHECK(*parse_double(format_double(v)) == v);
  CHECK_FALSE(parse_double("1.0abc"));
  CHECK_FALSE(parse_double(""));
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("plain") == "plain");
}
