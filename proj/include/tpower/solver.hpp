#pragma once

#include <cstdint>
#include <vector>

#include "tpower/matrix.hpp"

namespace tpower {

enum class ShiftPolicy { none, automatic, fixed };

enum class InitKind {
  top_diagonal_single,
  top_diagonal_indicator,
  warm_start,
  backward_elimination,
  custom,
};

struct InitScheme {
  InitKind kind = InitKind::top_diagonal_single;
  int k0 = 0;           // warm_start: starting cardinality, 0 -> min(p, 4k)
  double factor = 0.5;  // warm_start: cardinality decay per stage, in (0,1)
  DenseVector x0;       // custom
};

struct SolveConfig {
  int k = 1;
  double tol = 1e-4;
  int max_iter = 1000;
  ShiftPolicy shift_policy = ShiftPolicy::automatic;
  double fixed_shift = 0.0;
  InitScheme init;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  double objective;  // against the original (unshifted) matrix
  IndexSet support;
};

struct SparseEigenResult {
  SparseUnitVector x;
  double objective = 0.0;  // Q(x) in the original matrix
  int iterations = 0;
  bool converged = false;
  double shift_used = 0.0;
  std::vector<IterationRecord> trace;
};

// Truncated power iteration: x'_t = A x_{t-1} / ||A x_{t-1}||, keep the k
// largest magnitudes, renormalize. Stops when |Q(x_t) - Q(x_{t-1})| <= tol.
// With ShiftPolicy::automatic a short power probe on +-A decides whether to
// add the Gershgorin bound times I before iterating; the reported objective
// is always against the unshifted matrix.
SparseEigenResult tpower(const SymmetricMatrix& A, const SolveConfig& config);

// Runs tpower on cI - A with c an upper bound on lambda_max(A); reports
// x^T A x against the original matrix. Heuristic minimizer over k-sparse
// unit vectors.
SparseEigenResult smallest_sparse_eig(const SymmetricMatrix& A,
                                      const SolveConfig& config);

enum class DiagonalInitMode { single, indicator };

SparseUnitVector init_top_diagonal(const SymmetricMatrix& A, int k,
                                   DiagonalInitMode mode);

// Two-stage warm start: solve at cardinality k0, then ceil(factor*k0), ...
// down to k, each stage seeded from the previous stage's output truncated
// to the new cardinality.
SparseUnitVector init_warm_start_schedule(const SymmetricMatrix& A, int k,
                                          int k0, double factor);

// Greedy backward elimination: drop the variable whose removal keeps
// lambda_max largest until k remain; returns the restricted dominant
// eigenvector x(F). Cost grows as p^4; intended for small p.
SparseUnitVector init_backward_elimination(const SymmetricMatrix& A, int k);

SparseUnitVector make_sparse_unit(const DenseVector& x);

}  // namespace tpower
