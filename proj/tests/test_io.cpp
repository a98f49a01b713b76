#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpower/errors.hpp"
#include "tpower/io.hpp"
#include "tpower/matrix.hpp"
#include "tpower/rng.hpp"
#include "tpower/spca.hpp"

using namespace tpower;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("io_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("matrix market array format") {
  TempFile f("id3.mtx",
             "%%MatrixMarket matrix array real general\n"
             "3 3\n1\n0\n0\n0\n1\n0\n0\n0\n1\n");
  SymmetricMatrix A = load_matrix_market(f.path);
  CHECK(A.dim() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(A.entry(i, j) == (i == j ? 1.0 : 0.0));

  // Symmetric array stores the lower triangle column by column.
  TempFile g("sym_array.mtx",
             "%%MatrixMarket matrix array real symmetric\n"
             "2 2\n4\n1\n9\n");
  SymmetricMatrix B = load_matrix_market(g.path);
  CHECK(B.entry(0, 0) == 4.0);
  CHECK(B.entry(0, 1) == 1.0);
  CHECK(B.entry(1, 0) == 1.0);
  CHECK(B.entry(1, 1) == 9.0);
}

TEST_CASE("matrix market symmetric coordinate expands the stored triangle") {
  TempFile f("offdiag.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "% comment line\n"
             "2 2 1\n"
             "2 1 1.0\n");
  SymmetricMatrix A = load_matrix_market(f.path);
  CHECK(A.entry(0, 0) == 0.0);
  CHECK(A.entry(0, 1) == 1.0);
  CHECK(A.entry(1, 0) == 1.0);
  CHECK(A.entry(1, 1) == 0.0);
}

TEST_CASE("matrix market general coordinate symmetrizes by averaging") {
  TempFile f("oneside.mtx",
             "%%MatrixMarket matrix coordinate real general\n"
             "2 2 1\n"
             "2 1 5.0\n");
  SymmetricMatrix A = load_matrix_market(f.path);
  CHECK(A.entry(0, 1) == doctest::Approx(2.5));
  CHECK(A.entry(1, 0) == doctest::Approx(2.5));

  TempFile g("bothsides.mtx",
             "%%MatrixMarket matrix coordinate real general\n"
             "2 2 2\n"
             "1 2 3.0\n"
             "2 1 3.0\n");
  CHECK(load_matrix_market(g.path).entry(0, 1) == doctest::Approx(3.0));
}

TEST_CASE("matrix market parse errors carry line numbers") {
  TempFile bad_header("bad_header.mtx", "not a matrix\n1 1 0\n");
  CHECK_THROWS_AS(load_matrix_market(bad_header.path), ParseError);

  TempFile dup("dup.mtx",
               "%%MatrixMarket matrix coordinate real symmetric\n"
               "2 2 2\n"
               "2 1 1.0\n"
               "1 2 2.0\n");  // same edge after canonicalization
  CHECK_THROWS_AS(load_matrix_market(dup.path), ParseError);

  TempFile asym("asym.mtx",
                "%%MatrixMarket matrix coordinate real general\n"
                "2 2 2\n"
                "1 2 3.0\n"
                "2 1 -3.0\n");
  CHECK_THROWS_AS(load_matrix_market(asym.path), ParseError);

  TempFile truncated("short.mtx",
                     "%%MatrixMarket matrix coordinate real symmetric\n"
                     "3 3 2\n"
                     "1 1 1.0\n");
  try {
    load_matrix_market(truncated.path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line >= 3);
  }

  TempFile range("range.mtx",
                 "%%MatrixMarket matrix coordinate real symmetric\n"
                 "2 2 1\n"
                 "3 1 1.0\n");
  CHECK_THROWS_AS(load_matrix_market(range.path), ParseError);

  CHECK_THROWS_AS(load_matrix_market("does_not_exist.mtx"), IoError);
}

TEST_CASE("matrix market round trip is exact") {
  Rng rng(61);
  std::vector<double> m(49);
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      double v = rng.next_gaussian();
      if (rng.next_double() < 0.3) v = 0.0;  // exercise sparsity
      m[i * 7 + j] = v;
      m[j * 7 + i] = v;
    }
  SymmetricMatrix A = SymmetricMatrix::from_dense(7, m);
  write_matrix_market(A, "io_test_rt.mtx");
  SymmetricMatrix B = load_matrix_market("io_test_rt.mtx");
  std::remove("io_test_rt.mtx");
  REQUIRE(B.dim() == 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(B.entry(i, j) == doctest::Approx(A.entry(i, j)).epsilon(1e-15));

  CHECK_THROWS_AS(write_matrix_market(A, "no_such_dir/out.mtx"), IoError);
}

TEST_CASE("edge list parsing") {
  TempFile path_graph("path.txt", "# a comment\n0 1\n1 2\n");
  WeightedGraph g = load_edge_list(path_graph.path, false);
  CHECK(g.n == 3);
  SymmetricMatrix W = adjacency_matrix(g);
  CHECK(W.entry(0, 1) == 1.0);
  CHECK(W.entry(1, 2) == 1.0);
  CHECK(W.entry(0, 2) == 0.0);

  // Both orientations of one undirected edge merge to its weight.
  TempFile dup("dup.txt", "0 1 2.0\n1 0 2.0\n");
  SymmetricMatrix D = adjacency_matrix(load_edge_list(dup.path, false));
  CHECK(D.entry(0, 1) == doctest::Approx(2.0));

  // A directed arc is averaged with the missing reverse direction.
  SymmetricMatrix Dd = adjacency_matrix(load_edge_list(dup.path, true));
  CHECK(Dd.entry(0, 1) == doctest::Approx(2.0));
  TempFile arc("arc.txt", "0 1 2.0\n");
  CHECK(adjacency_matrix(load_edge_list(arc.path, true)).entry(0, 1) ==
        doctest::Approx(1.0));

  TempFile loops("loops.txt", "0 0 5\n0 1 1\n");
  WeightedGraph l = load_edge_list(loops.path, false);
  CHECK(l.dropped_self_loops == 1);
  CHECK(adjacency_matrix(l).entry(0, 1) == 1.0);
  CHECK(adjacency_matrix(l).entry(0, 0) == 0.0);

  // Repeated identical lines sum.
  TempFile rep("rep.txt", "0 1 1.5\n0 1 1.5\n");
  CHECK(adjacency_matrix(load_edge_list(rep.path, false)).entry(0, 1) ==
        doctest::Approx(3.0));
}

TEST_CASE("edge list parse errors") {
  TempFile bad("bad.txt", "0 1\nnope\n");
  try {
    load_edge_list(bad.path, false);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  TempFile extra("extra.txt", "0 1 1.0 surplus\n");
  CHECK_THROWS_AS(load_edge_list(extra.path, false), ParseError);
  TempFile neg("neg.txt", "-1 2\n");
  CHECK_THROWS_AS(load_edge_list(neg.path, false), ParseError);
  CHECK_THROWS_AS(load_edge_list("does_not_exist.txt", false), IoError);
}

TEST_CASE("csv data parsing") {
  TempFile id2("id2.csv", "1,0\n0,1\n");
  DataMatrix D = load_csv_data(id2.path, false);
  CHECK(D.n == 2);
  CHECK(D.p == 2);
  CHECK(D.at(0, 0) == 1.0);
  CHECK(D.at(1, 0) == 0.0);

  TempFile hdr("hdr.csv", "alpha,beta\n1.5,2.5\n");
  DataMatrix H = load_csv_data(hdr.path, true);
  CHECK(H.n == 1);
  CHECK(H.column_names == std::vector<std::string>{"alpha", "beta"});
  CHECK(H.at(0, 1) == 2.5);

  TempFile ragged("ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(load_csv_data(ragged.path, false), ParseError);
  TempFile alpha("alpha.csv", "1,two\n");
  try {
    load_csv_data(alpha.path, false);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }
}

TEST_CASE("gen_spiked_covariance: determinism, ground truth, CLT check") {
  auto [d1, g1] = gen_spiked_covariance_default(20, 40, 7);
  auto [d2, g2] = gen_spiked_covariance_default(20, 40, 7);
  CHECK(d1.values == d2.values);  // bit-identical per seed
  auto [d3, g3] = gen_spiked_covariance_default(20, 40, 8);
  CHECK(d1.values != d3.values);

  REQUIRE(g1.true_loadings.size() == 2);
  CHECK(std::abs(dot(g1.true_loadings[0].vector, g1.true_loadings[1].vector)) <
        1e-12);
  CHECK(g1.eigenvalue_spec[0] == 400.0);
  CHECK(g1.eigenvalue_spec[1] == 300.0);

  // Empirical covariance of many samples approaches the model covariance.
  int p = 20, n = 100000;
  auto [big, gt] = gen_spiked_covariance_default(p, n, 11);
  SymmetricMatrix S = covariance_from_data(big, false, true);
  const auto& v1 = gt.true_loadings[0].vector;
  const auto& v2 = gt.true_loadings[1].vector;
  auto sigma = [&](int i, int j) {
    return 399.0 * v1[i] * v1[j] + 299.0 * v2[i] * v2[j] +
           (i == j ? 1.0 : 0.0);
  };
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) {
      // Var of an empirical covariance entry is (S_ii S_jj + S_ij^2)/n.
      double sd = std::sqrt(
          (sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
      CHECK(std::abs(S.entry(i, j) - sigma(i, j)) <= 5.0 * sd + 1e-6);
    }

  // Orthonormality gate and parameter validation.
  SparseUnitVector a = make_sparse_unit({1, 1, 0, 0});
  SparseUnitVector b = make_sparse_unit({1, 0, 0, 0});
  std::vector<double> lam = {4, 3, 1, 1};
  CHECK_THROWS_AS(gen_spiked_covariance(4, 5, {a, b}, lam, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_spiked_covariance(4, 5, {b}, {1, 2, 3, 4}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_spiked_covariance(4, 5, {b}, {4, 3}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_spiked_covariance_default(10, 5, 1),
                  std::invalid_argument);
}

TEST_CASE("gen_spiked_covariance general completion matches its spectrum") {
  // Non-flat tail forces the explicit basis completion path.
  SparseUnitVector v = make_sparse_unit({1, 0, 0, 0, 0});
  std::vector<double> lam = {10, 5, 4, 3, 2};
  auto [D, gt] = gen_spiked_covariance(5, 50000, {v}, lam, 13);
  SymmetricMatrix S = covariance_from_data(D, false, true);
  // Total variance concentrates near the eigenvalue sum.
  double tr = 0.0;
  for (int i = 0; i < 5; ++i) tr += S.entry(i, i);
  CHECK(tr == doctest::Approx(24.0).epsilon(0.05));
  // The planted direction carries close to its planted variance.
  CHECK(rayleigh_quotient(S, v.vector) == doctest::Approx(10.0).epsilon(0.1));
}

TEST_CASE("gen_planted_subgraph extremes and validation") {
  auto [g, gt] = gen_planted_subgraph(12, 4, 1.0, 0.0, 5);
  CHECK(static_cast<int>(gt.planted_vertices.size()) == 4);
  SymmetricMatrix W = adjacency_matrix(g);
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) {
      bool in_i = std::find(gt.planted_vertices.begin(),
                            gt.planted_vertices.end(),
                            i) != gt.planted_vertices.end();
      bool in_j = std::find(gt.planted_vertices.begin(),
                            gt.planted_vertices.end(),
                            j) != gt.planted_vertices.end();
      CHECK(W.entry(i, j) == ((in_i && in_j) ? 1.0 : 0.0));
    }

  auto [g2, gt2] = gen_planted_subgraph(12, 4, 1.0, 0.0, 5);
  CHECK(gt2.planted_vertices == gt.planted_vertices);  // seed determinism

  CHECK_THROWS_AS(gen_planted_subgraph(10, 11, 0.8, 0.1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_planted_subgraph(10, 3, 0.2, 0.5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_planted_subgraph(10, 3, 1.2, 0.1, 1),
                  std::invalid_argument);
}
