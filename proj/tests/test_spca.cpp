#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpower/errors.hpp"
#include "tpower/matrix.hpp"
#include "tpower/rng.hpp"
#include "tpower/spca.hpp"
#include "tpower/theory.hpp"

using namespace tpower;

namespace {

SymmetricMatrix random_psd(Rng& rng, int p) {
  std::vector<double> g(static_cast<std::size_t>(p) * p);
  for (double& v : g) v = rng.next_gaussian();
  std::vector<double> m(static_cast<std::size_t>(p) * p, 0.0);
  for (int r = 0; r < p; ++r)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        m[i * (std::size_t)p + j] += g[r * (std::size_t)p + i] * g[r * (std::size_t)p + j];
  return SymmetricMatrix::from_dense(p, m);
}

DataMatrix make_data(int n, int p, std::vector<double> values) {
  DataMatrix D;
  D.n = n;
  D.p = p;
  D.values = std::move(values);
  return D;
}

double trace_of(const SymmetricMatrix& A) {
  double t = 0.0;
  for (int i = 0; i < A.dim(); ++i) t += A.entry(i, i);
  return t;
}

SparseUnitVector unit(const DenseVector& x) { return make_sparse_unit(x); }

}  // namespace

TEST_CASE("covariance_from_data on closed forms") {
  SymmetricMatrix I2 = covariance_from_data(make_data(2, 2, {1, 0, 0, 1}), false);
  CHECK(I2.entry(0, 0) == 1.0);
  CHECK(I2.entry(0, 1) == 0.0);
  CHECK(I2.entry(1, 1) == 1.0);

  SymmetricMatrix R = covariance_from_data(make_data(2, 2, {1, 0, 1, 0}), false);
  CHECK(R.entry(0, 0) == 2.0);
  CHECK(R.entry(0, 1) == 0.0);
  CHECK(R.entry(1, 1) == 0.0);

  CHECK_THROWS_AS(covariance_from_data(make_data(0, 0, {}), false),
                  std::invalid_argument);
}

TEST_CASE("covariance_from_data matches the triple-loop product") {
  Rng rng(31);
  int n = 20, p = 5;
  std::vector<double> d(static_cast<std::size_t>(n) * p);
  for (double& v : d) v = rng.next_gaussian();
  DataMatrix D = make_data(n, p, d);
  SymmetricMatrix S = covariance_from_data(D, false);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      double want = 0.0;
      for (int t = 0; t < n; ++t) want += D.at(t, a) * D.at(t, b);
      CHECK(S.entry(a, b) == doctest::Approx(want).epsilon(1e-12));
    }

  // Centering drives every column mean to zero in the implied data.
  SymmetricMatrix C = covariance_from_data(D, true);
  // Quadratic form with the all-ones direction shrinks after centering.
  DenseVector ones(p, 1.0);
  CHECK(rayleigh_quotient(C, ones) <= rayleigh_quotient(S, ones) + 1e-9);

  // scale_by_n divides everything by n.
  SymmetricMatrix Sn = covariance_from_data(D, false, true);
  CHECK(Sn.entry(0, 0) == doctest::Approx(S.entry(0, 0) / n));
}

TEST_CASE("projection_deflate on closed forms") {
  SymmetricMatrix I3 = SymmetricMatrix::identity(3);
  SymmetricMatrix D = projection_deflate(I3, unit({1, 0, 0}));
  CHECK(D.entry(0, 0) == doctest::Approx(0.0));
  CHECK(D.entry(1, 1) == doctest::Approx(1.0));
  CHECK(D.entry(2, 2) == doctest::Approx(1.0));

  // Sigma = 2 e1 e1^T + e2 e2^T deflated by e1 leaves e2 e2^T.
  SymmetricMatrix S = SymmetricMatrix::diagonal({2, 1, 0});
  SymmetricMatrix S2 = projection_deflate(S, unit({1, 0, 0}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(S2.entry(i, j) == doctest::Approx(i == 1 && j == 1 ? 1.0 : 0.0));
}

TEST_CASE("projection_deflate annihilates the deflated direction") {
  Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    int p = 5 + static_cast<int>(rng.next_below(6));
    SymmetricMatrix S = random_psd(rng, p);
    DenseVector x(p);
    for (double& v : x) v = rng.next_gaussian();
    SparseUnitVector xu = unit(x);
    SymmetricMatrix S2 = projection_deflate(S, xu);
    double snorm = jacobi_eigenvalues(S).front();
    CHECK(norm2(matvec(S2, xu.vector)) <= 1e-9 * snorm);
    // PSD is preserved.
    CHECK(jacobi_eigenvalues(S2).back() >= -1e-8 * snorm);
  }
}

TEST_CASE("spca_extract on a diagonal covariance") {
  SymmetricMatrix S = SymmetricMatrix::diagonal({4, 3, 2, 1});
  SolveConfig cfg;
  SpcaResult r = spca_extract(S, {1, 1}, cfg);
  CHECK(r.loadings[0].support == IndexSet{0});
  CHECK(r.loadings[1].support == IndexSet{1});
  CHECK(r.adjusted_variance[0] == doctest::Approx(4.0));
  CHECK(r.adjusted_variance[1] == doctest::Approx(3.0));
  CHECK(r.proportion_explained == doctest::Approx(0.7));
}

TEST_CASE("spca_extract deflation chain annihilates prior loadings") {
  Rng rng(33);
  SymmetricMatrix S = random_psd(rng, 10);
  double snorm = jacobi_eigenvalues(S).front();
  SolveConfig cfg;
  cfg.tol = 1e-10;
  SpcaResult r = spca_extract(S, {3, 3, 3}, cfg);
  SymmetricMatrix cur = S;
  for (std::size_t c = 0; c + 1 < r.loadings.size(); ++c) {
    cur = projection_deflate(cur, r.loadings[c]);
    for (std::size_t j = 0; j <= c; ++j)
      CHECK(norm2(matvec(cur, r.loadings[j].vector)) <= 1e-8 * snorm);
    CHECK(jacobi_eigenvalues(cur).back() >= -1e-8 * snorm);
  }
  CHECK(r.proportion_explained <= 1.0 + 1e-9);
  for (double v : r.adjusted_variance) CHECK(v >= 0.0);
}

TEST_CASE("full-cardinality extraction reproduces ordinary PCA") {
  Rng rng(34);
  int p = 5;
  SymmetricMatrix S = random_psd(rng, p);
  auto dec = jacobi_eigen(S);
  SolveConfig cfg;
  cfg.tol = 1e-13;
  cfg.max_iter = 100000;
  SpcaResult r = spca_extract(S, {p, p, p}, cfg);
  for (int c = 0; c < 3; ++c) {
    CHECK(r.per_component_results[c].objective ==
          doctest::Approx(dec.values[c]).epsilon(1e-6));
    CHECK(std::abs(dot(r.loadings[c].vector, dec.vectors[c])) ==
          doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("adjusted_variance on closed forms") {
  SymmetricMatrix S = SymmetricMatrix::diagonal({4, 1});
  auto [per, prop] = adjusted_variance(S, {unit({1, 0})});
  CHECK(per.size() == 1);
  CHECK(per[0] == doctest::Approx(4.0));
  CHECK(prop == doctest::Approx(0.8));
}

TEST_CASE("adjusted_variance with Sigma-orthogonal loadings is per-direction") {
  Rng rng(35);
  SymmetricMatrix S = random_psd(rng, 6);
  auto dec = jacobi_eigen(S);
  std::vector<SparseUnitVector> loadings = {
      unit(dec.vectors[0]), unit(dec.vectors[1]), unit(dec.vectors[2])};
  auto [per, prop] = adjusted_variance(S, loadings);
  for (int j = 0; j < 3; ++j)
    CHECK(per[j] == doctest::Approx(rayleigh_quotient(S, loadings[j].vector)));
  double total = per[0] + per[1] + per[2];
  CHECK(prop == doctest::Approx(total / trace_of(S)));
}

TEST_CASE("adjusted_variance corrects for overlapping loadings") {
  // Two nearly identical loadings must not double-count variance.
  SymmetricMatrix S = SymmetricMatrix::diagonal({4, 1, 1});
  DenseVector a = {1, 0, 0};
  DenseVector b = {0.99, std::sqrt(1 - 0.99 * 0.99), 0};
  auto [per, prop] = adjusted_variance(S, {unit(a), unit(b)});
  CHECK(per[0] == doctest::Approx(4.0));
  CHECK(per[1] < 1.5);  // far below b's own Rayleigh quotient ~3.9
  CHECK(prop <= 1.0 + 1e-9);
}

TEST_CASE("adjusted_variance rejects dependent loadings") {
  SymmetricMatrix S = SymmetricMatrix::identity(3);
  SparseUnitVector x = unit({1, 1, 0});
  CHECK_THROWS_AS(adjusted_variance(S, {x, x}), DegenerateLoadingsError);
}

TEST_CASE("greedy_forward_spca on closed forms and against the oracle") {
  SymmetricMatrix D = SymmetricMatrix::diagonal({3, 2, 1});
  SparseEigenResult r = greedy_forward_spca(D, 2);
  CHECK(r.x.support == IndexSet{0, 1});
  CHECK(r.objective == doctest::Approx(3.0));

  Rng rng(36);
  for (int trial = 0; trial < 10; ++trial) {
    SymmetricMatrix A = random_psd(rng, 10);
    double opt = brute_force_sparse_eig(A, 3).first;
    CHECK(greedy_forward_spca(A, 3).objective <= opt + 1e-9);
  }
}

TEST_CASE("variance_cardinality_sweep on a diagonal matrix") {
  SymmetricMatrix D = SymmetricMatrix::diagonal({3, 2, 1});
  auto curve = variance_cardinality_sweep(D, {1, 2, 3}, SweepMethod::tpower);
  REQUIRE(curve.size() == 3);
  for (auto& [k, v] : curve) CHECK(v == doctest::Approx(3.0));
  CHECK(curve[0].first == 1);
  CHECK(curve[2].first == 3);

  auto full = variance_cardinality_sweep(D, {3}, SweepMethod::greedy_forward);
  CHECK(full[0].second == doctest::Approx(3.0));
}

TEST_CASE("greedy sweep is monotone and below the oracle curve") {
  Rng rng(37);
  SymmetricMatrix A = random_psd(rng, 12);
  auto curve =
      variance_cardinality_sweep(A, {1, 2, 3, 4, 5}, SweepMethod::greedy_forward);
  for (std::size_t i = 1; i < curve.size(); ++i)
    CHECK(curve[i].second >= curve[i - 1].second - 1e-9);
  for (auto& [k, v] : curve)
    CHECK(v <= brute_force_sparse_eig(A, k).first + 1e-9);
}

TEST_CASE("spca_extract propagates solver errors with the component index") {
  SymmetricMatrix Z = SymmetricMatrix::zero(3);
  SolveConfig cfg;
  cfg.shift_policy = ShiftPolicy::none;
  try {
    spca_extract(Z, {1}, cfg);
    FAIL("expected failure on the zero matrix");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("component 1") != std::string::npos);
  }
}
