#include "tpower/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tpower/errors.hpp"

namespace tpower {

namespace {

void validate_config(const SymmetricMatrix& A, const SolveConfig& cfg) {
  if (cfg.k < 1 || cfg.k > A.dim())
    throw std::invalid_argument("SolveConfig: k out of range");
  if (cfg.tol < 0.0) throw std::invalid_argument("SolveConfig: tol < 0");
  if (cfg.max_iter < 1)
    throw std::invalid_argument("SolveConfig: max_iter < 1");
  if (cfg.init.kind == InitKind::warm_start) {
    int k0 = cfg.init.k0 > 0 ? cfg.init.k0 : std::min(A.dim(), 4 * cfg.k);
    if (k0 < cfg.k)
      throw std::invalid_argument("SolveConfig: warm-start k0 < k");
    if (cfg.init.factor <= 0.0 || cfg.init.factor >= 1.0)
      throw std::invalid_argument("SolveConfig: warm-start factor not in (0,1)");
  }
  if (cfg.init.kind == InitKind::custom &&
      static_cast<int>(cfg.init.x0.size()) != A.dim())
    throw std::invalid_argument("SolveConfig: custom x0 dimension mismatch");
}

// Crude extreme-eigenvalue probes for the auto-shift decision: a short
// power run on the Gershgorin-shifted matrix isolates the algebraic
// extreme on each end.
double probe_lambda_max(const SymmetricMatrix& A, int iters) {
  double g = gershgorin_shift_bound(A);
  int p = A.dim();
  DenseVector x(p, 1.0 / std::sqrt(static_cast<double>(p))), y;
  for (int t = 0; t < iters; ++t) {
    A.apply(x, y, g);
    double n = norm2(y);
    if (n <= 1e-300) return -g;
    for (int i = 0; i < p; ++i) x[i] = y[i] / n;
  }
  return rayleigh_quotient(A, x);
}

double probe_lambda_min(const SymmetricMatrix& A, int iters) {
  // Power run on cI - A converges toward the smallest eigenvalue of A;
  // the absolute row-sum bound makes cI - A PSD.
  double c = 0.0;
  for (int i = 0; i < A.dim(); ++i) {
    double r = 0.0;
    for (int j = 0; j < A.dim(); ++j) r += std::abs(A.entry(i, j));
    c = std::max(c, r);
  }
  int p = A.dim();
  DenseVector x(p, 1.0 / std::sqrt(static_cast<double>(p))), y;
  for (int t = 0; t < iters; ++t) {
    A.apply(x, y);
    for (int i = 0; i < p; ++i) y[i] = c * x[i] - y[i];
    double n = norm2(y);
    if (n <= 1e-300) return 0.0;
    for (int i = 0; i < p; ++i) x[i] = y[i] / n;
  }
  return rayleigh_quotient(A, x);
}

DenseVector initial_vector(const SymmetricMatrix& A, const SolveConfig& cfg) {
  switch (cfg.init.kind) {
    case InitKind::top_diagonal_single:
      return init_top_diagonal(A, cfg.k, DiagonalInitMode::single).vector;
    case InitKind::top_diagonal_indicator:
      return init_top_diagonal(A, cfg.k, DiagonalInitMode::indicator).vector;
    case InitKind::warm_start: {
      int k0 = cfg.init.k0 > 0 ? cfg.init.k0 : std::min(A.dim(), 4 * cfg.k);
      return init_warm_start_schedule(A, cfg.k, k0, cfg.init.factor).vector;
    }
    case InitKind::backward_elimination:
      return init_backward_elimination(A, cfg.k).vector;
    case InitKind::custom: {
      // Kept as given (normalized only): the first iteration applies A to
      // the full vector, so a dense start can escape poor k-subsets.
      DenseVector x = cfg.init.x0;
      if (norm2(x) == 0.0)
        throw std::invalid_argument("SolveConfig: custom x0 is zero");
      normalize(x);
      return x;
    }
  }
  throw std::invalid_argument("SolveConfig: unknown init kind");
}

// The core iteration. apply_op realizes y = M x for the (possibly shifted
// or complemented) iteration matrix; objectives are always reported against
// report_matrix. For unit iterates a spectral shift only adds a constant to
// the objective, so the stopping rule is unaffected by which matrix it is
// evaluated on.
template <typename ApplyOp>
SparseEigenResult run_iteration(const SymmetricMatrix& report_matrix,
                                ApplyOp&& apply_op, DenseVector x,
                                const SolveConfig& cfg, double shift_used) {
  SparseEigenResult res;
  res.shift_used = shift_used;
  double q_prev = rayleigh_quotient(report_matrix, x);
  res.trace.push_back({q_prev, nonzero_support(x)});

  DenseVector y;
  for (int t = 1; t <= cfg.max_iter; ++t) {
    apply_op(x, y);
    double ny = norm2(y);
    if (ny == 0.0)
      throw DegenerateIterateError(
          "tpower: A x vanished at iteration " + std::to_string(t), t);
    for (double& v : y) v /= ny;
    IndexSet F = top_k_support(y, cfg.k);
    DenseVector xt = truncate(y, F);
    normalize(xt);
    double q = rayleigh_quotient(report_matrix, xt);
    res.trace.push_back({q, F});
    x = std::move(xt);
    res.iterations = t;
    if (std::abs(q - q_prev) <= cfg.tol) {
      res.converged = true;
      break;
    }
    q_prev = q;
  }
  res.x = make_sparse_unit(x);
  res.objective = rayleigh_quotient(report_matrix, x);
  return res;
}

// M = cI - A, same storage kind as A.
SymmetricMatrix complement_matrix(const SymmetricMatrix& A, double c) {
  int p = A.dim();
  if (A.is_dense()) {
    std::vector<double> vals = A.dense_values();
    for (auto& v : vals) v = -v;
    for (int i = 0; i < p; ++i) vals[i * (std::size_t)p + i] += c;
    return SymmetricMatrix::from_dense(p, vals, 0.0);
  }
  std::vector<std::tuple<int, int, double>> trip;
  const auto& rp = A.row_ptr();
  const auto& ci = A.col_idx();
  const auto& v = A.csr_values();
  std::vector<bool> has_diag(p, false);
  for (int i = 0; i < p; ++i)
    for (int t = rp[i]; t < rp[i + 1]; ++t) {
      double w = (ci[t] == i) ? c - v[t] : -v[t];
      if (ci[t] == i) has_diag[i] = true;
      trip.emplace_back(i, ci[t], w);
    }
  for (int i = 0; i < p; ++i)
    if (!has_diag[i]) trip.emplace_back(i, i, c);
  return SymmetricMatrix::from_triplets(p, trip, 0.0, Storage::sparse);
}

double lambda_max_upper_bound(const SymmetricMatrix& A) {
  int p = A.dim();
  double c = 0.0;
  for (int i = 0; i < p; ++i) {
    double r = A.entry(i, i);
    for (int j = 0; j < p; ++j)
      if (j != i) r += std::abs(A.entry(i, j));
    c = std::max(c, r);
  }
  return c;
}

}  // namespace

SparseEigenResult tpower(const SymmetricMatrix& A, const SolveConfig& cfg) {
  validate_config(A, cfg);
  double shift = 0.0;
  switch (cfg.shift_policy) {
    case ShiftPolicy::none:
      break;
    case ShiftPolicy::fixed:
      shift = cfg.fixed_shift;
      break;
    case ShiftPolicy::automatic: {
      double est_max = probe_lambda_max(A, 20);
      double est_min = probe_lambda_min(A, 20);
      if (-est_min > est_max) shift = gershgorin_shift_bound(A);
      break;
    }
  }
  DenseVector x0 = initial_vector(A, cfg);
  return run_iteration(
      A, [&A, shift](const DenseVector& x, DenseVector& y) { A.apply(x, y, shift); },
      std::move(x0), cfg, shift);
}

SparseEigenResult smallest_sparse_eig(const SymmetricMatrix& A,
                                      const SolveConfig& cfg) {
  validate_config(A, cfg);
  // Strictly above lambda_max so cI - A cannot vanish when A = lambda I.
  double c = lambda_max_upper_bound(A);
  c += 1.0 + 1e-3 * std::abs(c);
  SymmetricMatrix M = complement_matrix(A, c);
  SolveConfig inner = cfg;
  inner.shift_policy = ShiftPolicy::none;
  DenseVector x0 = initial_vector(M, inner);
  return run_iteration(
      A, [&M](const DenseVector& x, DenseVector& y) { M.apply(x, y); },
      std::move(x0), inner, 0.0);
}

SparseUnitVector init_top_diagonal(const SymmetricMatrix& A, int k,
                                   DiagonalInitMode mode) {
  int p = A.dim();
  if (k < 1 || k > p) throw std::invalid_argument("init_top_diagonal: bad k");
  DenseVector diag(p);
  for (int i = 0; i < p; ++i) diag[i] = A.entry(i, i);
  DenseVector x(p, 0.0);
  if (mode == DiagonalInitMode::single) {
    int j = 0;
    for (int i = 1; i < p; ++i)
      if (diag[i] > diag[j]) j = i;
    x[j] = 1.0;
  } else {
    IndexSet idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return diag[a] > diag[b]; });
    for (int t = 0; t < k; ++t) x[idx[t]] = 1.0 / std::sqrt(double(k));
  }
  return make_sparse_unit(x);
}

SparseUnitVector init_warm_start_schedule(const SymmetricMatrix& A, int k,
                                          int k0, double factor) {
  int p = A.dim();
  if (k < 1 || k > p || k0 < k || k0 > p)
    throw std::invalid_argument("init_warm_start_schedule: bad cardinalities");
  if (factor <= 0.0 || factor >= 1.0)
    throw std::invalid_argument("init_warm_start_schedule: factor not in (0,1)");

  std::vector<int> schedule;
  int c = k0;
  while (c > k) {
    schedule.push_back(c);
    int next = static_cast<int>(std::ceil(factor * c));
    c = std::min(c - 1, std::max(k, next));
  }
  schedule.push_back(k);

  DenseVector x = init_top_diagonal(A, schedule.front(),
                                    DiagonalInitMode::indicator)
                      .vector;
  for (int card : schedule) {
    SolveConfig cfg;
    cfg.k = card;
    cfg.init.kind = InitKind::custom;
    cfg.init.x0 = x;
    x = tpower(A, cfg).x.vector;
  }
  return make_sparse_unit(x);
}

SparseUnitVector init_backward_elimination(const SymmetricMatrix& A, int k) {
  int p = A.dim();
  if (k < 1 || k > p)
    throw std::invalid_argument("init_backward_elimination: bad k");
  IndexSet F(p);
  std::iota(F.begin(), F.end(), 0);
  while (static_cast<int>(F.size()) > k) {
    int best_pos = -1;
    double best_val = -1e300;
    for (std::size_t pos = 0; pos < F.size(); ++pos) {
      IndexSet G;
      G.reserve(F.size() - 1);
      for (std::size_t q = 0; q < F.size(); ++q)
        if (q != pos) G.push_back(F[q]);
      double lam = largest_eigenpair(principal_submatrix(A, G)).value;
      // Ties drop the highest index, keeping the lower-indexed variables.
      if (lam >= best_val) {
        best_val = lam;
        best_pos = static_cast<int>(pos);
      }
    }
    F.erase(F.begin() + best_pos);
  }
  EigenPair e = largest_eigenpair(principal_submatrix(A, F));
  DenseVector x(p, 0.0);
  for (std::size_t q = 0; q < F.size(); ++q) x[F[q]] = e.vector[q];
  return make_sparse_unit(x);
}

SparseUnitVector make_sparse_unit(const DenseVector& x) {
  SparseUnitVector s;
  s.vector = x;
  normalize(s.vector);
  s.support = nonzero_support(s.vector);
  return s;
}

}  // namespace tpower
