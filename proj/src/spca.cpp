#include "tpower/spca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tpower/errors.hpp"

namespace tpower {

namespace {

// Cholesky G = L L^T for a symmetric PSD m x m matrix (row-major). Returns
// false if a pivot drops below tol.
bool cholesky(std::vector<double>& g, int m, double tol) {
  for (int j = 0; j < m; ++j) {
    double d = g[j * (std::size_t)m + j];
    for (int t = 0; t < j; ++t) d -= g[j * (std::size_t)m + t] * g[j * (std::size_t)m + t];
    if (d < tol) return false;
    double l = std::sqrt(d);
    g[j * (std::size_t)m + j] = l;
    for (int i = j + 1; i < m; ++i) {
      double s = g[i * (std::size_t)m + j];
      for (int t = 0; t < j; ++t)
        s -= g[i * (std::size_t)m + t] * g[j * (std::size_t)m + t];
      g[i * (std::size_t)m + j] = s / l;
    }
  }
  // Zero the strict upper triangle so g holds L only.
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) g[i * (std::size_t)m + j] = 0.0;
  return true;
}

double trace_of(const SymmetricMatrix& A) {
  double t = 0.0;
  for (int i = 0; i < A.dim(); ++i) t += A.entry(i, i);
  return t;
}

}  // namespace

SymmetricMatrix covariance_from_data(const DataMatrix& D, bool center,
                                     bool scale_by_n) {
  if (D.n < 1 || D.p < 1)
    throw std::invalid_argument("covariance_from_data: empty data matrix");
  std::vector<double> work = D.values;
  int n = D.n, p = D.p;
  if (center) {
    for (int j = 0; j < p; ++j) {
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += work[i * (std::size_t)p + j];
      mean /= n;
      for (int i = 0; i < n; ++i) work[i * (std::size_t)p + j] -= mean;
    }
  }
  // Upper triangle via rank-1 accumulation over samples; the inner loop
  // runs over contiguous memory.
  std::vector<double> cov(static_cast<std::size_t>(p) * p, 0.0);
  for (int t = 0; t < n; ++t) {
    const double* row = work.data() + t * (std::size_t)p;
    for (int a = 0; a < p; ++a) {
      double ra = row[a];
      if (ra == 0.0) continue;
      double* out = cov.data() + a * (std::size_t)p;
      for (int b = a; b < p; ++b) out[b] += ra * row[b];
    }
  }
  double scale = scale_by_n ? 1.0 / n : 1.0;
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      double v = cov[a * (std::size_t)p + b] * scale;
      cov[a * (std::size_t)p + b] = v;
      cov[b * (std::size_t)p + a] = v;
    }
  return SymmetricMatrix::from_dense(p, cov, 0.0, Storage::dense);
}

SymmetricMatrix projection_deflate(const SymmetricMatrix& Sigma,
                                   const SparseUnitVector& x_hat) {
  int p = Sigma.dim();
  if (static_cast<int>(x_hat.vector.size()) != p)
    throw std::invalid_argument("projection_deflate: dimension mismatch");
  const DenseVector& x = x_hat.vector;
  DenseVector sx = matvec(Sigma, x);
  double q = dot(x, sx);
  // (I - xx^T) S (I - xx^T) = S - x (Sx)^T - (Sx) x^T + q x x^T.
  std::vector<double> out(static_cast<std::size_t>(p) * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      out[i * (std::size_t)p + j] = Sigma.entry(i, j) - x[i] * sx[j] -
                                    sx[i] * x[j] + q * x[i] * x[j];
  return SymmetricMatrix::from_dense(p, out, -1.0,
                                     Sigma.is_dense() ? Storage::dense
                                                      : Storage::automatic);
}

SpcaResult spca_extract(const SymmetricMatrix& Sigma,
                        const std::vector<int>& cardinalities,
                        const SolveConfig& config) {
  int p = Sigma.dim();
  for (int k : cardinalities)
    if (k < 1 || k > p)
      throw std::invalid_argument("spca_extract: cardinality out of range");

  SpcaResult res;
  res.cardinalities = cardinalities;
  SymmetricMatrix current = Sigma;
  for (std::size_t c = 0; c < cardinalities.size(); ++c) {
    SolveConfig cfg = config;
    cfg.k = cardinalities[c];
    SparseEigenResult solve;
    try {
      solve = tpower(current, cfg);
    } catch (const std::exception& e) {
      throw std::runtime_error("spca_extract: component " +
                               std::to_string(c + 1) + ": " + e.what());
    }
    res.loadings.push_back(solve.x);
    res.per_component_results.push_back(std::move(solve));
    if (c + 1 < cardinalities.size())
      current = projection_deflate(current, res.loadings.back());
  }
  res.adjusted_variance = adjusted_variance(Sigma, res.loadings).first;
  // Explained proportion: per-component variance against the original
  // matrix. The overlap-corrected per-component values are reported
  // separately; deflation keeps the loadings near-orthogonal, so the plain
  // sum is the conventional headline number.
  double explained = 0.0;
  for (const auto& l : res.loadings)
    explained += rayleigh_quotient(Sigma, l.vector);
  double tr = 0.0;
  for (int i = 0; i < p; ++i) tr += Sigma.entry(i, i);
  res.proportion_explained = explained / tr;
  return res;
}

SpcaResult spca_extract(const DataMatrix& D,
                        const std::vector<int>& cardinalities,
                        const SolveConfig& config) {
  return spca_extract(covariance_from_data(D, !D.centered), cardinalities,
                      config);
}

std::pair<std::vector<double>, double> adjusted_variance(
    const SymmetricMatrix& Sigma,
    const std::vector<SparseUnitVector>& loadings) {
  int p = Sigma.dim();
  int m = static_cast<int>(loadings.size());
  if (m == 0) throw std::invalid_argument("adjusted_variance: no loadings");
  for (const auto& l : loadings)
    if (static_cast<int>(l.vector.size()) != p)
      throw std::invalid_argument("adjusted_variance: dimension mismatch");

  // Linear independence gate on the loadings' own Gram matrix.
  std::vector<double> gram_u(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      gram_u[i * (std::size_t)m + j] = dot(loadings[i].vector, loadings[j].vector);
  {
    std::vector<double> chol = gram_u;
    if (!cholesky(chol, m, 0.0))
      throw DegenerateLoadingsError(
          "adjusted_variance: loadings are linearly dependent");
    double det = 1.0;
    for (int i = 0; i < m; ++i) det *= chol[i * (std::size_t)m + i] * chol[i * (std::size_t)m + i];
    if (det <= 1e-12)
      throw DegenerateLoadingsError(
          "adjusted_variance: loadings Gram determinant below 1e-12");
  }

  // G = U^T Sigma U, then G = R^T R with R upper triangular; R_jj^2 are the
  // per-component adjusted variances.
  std::vector<DenseVector> sigma_u(m);
  for (int j = 0; j < m; ++j) sigma_u[j] = matvec(Sigma, loadings[j].vector);
  std::vector<double> g(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g[i * (std::size_t)m + j] = dot(loadings[i].vector, sigma_u[j]);
  if (!cholesky(g, m, -1e-12))
    throw DegenerateLoadingsError(
        "adjusted_variance: Gram factorization failed (Sigma not PSD on the "
        "loading span?)");

  std::vector<double> per(m);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    per[j] = g[j * (std::size_t)m + j] * g[j * (std::size_t)m + j];
    total += per[j];
  }
  return {per, total / trace_of(Sigma)};
}

SparseEigenResult greedy_forward_spca(const SymmetricMatrix& Sigma, int k) {
  int p = Sigma.dim();
  if (k < 1 || k > p)
    throw std::invalid_argument("greedy_forward_spca: bad k");

  SparseEigenResult res;
  IndexSet F;
  std::vector<bool> in(p, false);
  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_val = -1e300;
    for (int cand = 0; cand < p; ++cand) {
      if (in[cand]) continue;
      IndexSet G = F;
      G.insert(std::lower_bound(G.begin(), G.end(), cand), cand);
      double lam = largest_eigenpair(principal_submatrix(Sigma, G)).value;
      if (lam > best_val) {
        best_val = lam;
        best = cand;
      }
    }
    in[best] = true;
    F.insert(std::lower_bound(F.begin(), F.end(), best), best);
    res.trace.push_back({best_val, F});
  }
  EigenPair e = largest_eigenpair(principal_submatrix(Sigma, F));
  DenseVector x(p, 0.0);
  for (std::size_t q = 0; q < F.size(); ++q) x[F[q]] = e.vector[q];
  res.x = make_sparse_unit(x);
  res.objective = rayleigh_quotient(Sigma, res.x.vector);
  res.iterations = k;
  res.converged = true;
  return res;
}

std::vector<std::pair<int, double>> variance_cardinality_sweep(
    const SymmetricMatrix& Sigma, const std::vector<int>& k_values,
    SweepMethod method, const SolveConfig& config) {
  std::vector<std::pair<int, double>> curve;
  for (int k : k_values) {
    double value;
    if (method == SweepMethod::greedy_forward) {
      value = greedy_forward_spca(Sigma, k).objective;
    } else {
      SolveConfig cfg = config;
      cfg.k = k;
      value = tpower(Sigma, cfg).objective;
    }
    curve.emplace_back(k, value);
  }
  std::sort(curve.begin(), curve.end());
  return curve;
}

}  // namespace tpower
