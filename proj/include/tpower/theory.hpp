#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tpower/matrix.hpp"

namespace tpower {

// Full symmetric eigendecomposition by cyclic Jacobi sweeps. Values sorted
// descending; vectors[i] is the unit eigenvector for values[i]. Used as the
// self-contained oracle behind the enumeration routines below.
struct EigenDecomposition {
  std::vector<double> values;
  std::vector<DenseVector> vectors;
};

EigenDecomposition jacobi_eigen(const SymmetricMatrix& A,
                                double off_tol = 1e-12, int max_sweeps = 100);

std::vector<double> jacobi_eigenvalues(const SymmetricMatrix& A);

enum class NormMode { exact, sampled };

struct RestrictedNorm {
  double value;
  bool is_exact;
};

// rho(E, s): the largest spectral norm over all s x s principal
// submatrices. Exact mode enumerates (rejected above subset_budget
// subsets); sampled mode is a lower bound from random subsets refined by
// greedy single-index swaps.
RestrictedNorm restricted_spectral_norm(const SymmetricMatrix& E, int s,
                                        NormMode mode, int trials = 100,
                                        std::uint64_t seed = 0,
                                        std::int64_t subset_budget = 100000);

struct TheoryQuantities {
  double lambda = 0.0;
  double gap = 0.0;
  double rho_s = 0.0;
  double gamma_s = 0.0;
  double delta_s = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu = 0.0;
  int k = 0;
  int k_bar = 0;
  int s = 0;
  double u = 0.0;
  bool preconditions_met = false;
};

// Contraction-rate and error-floor quantities of the recovery bound.
// Out-of-range hypotheses set preconditions_met = false rather than throw.
TheoryQuantities recovery_bound_quantities(double lambda, double gap, double rho_s,
                                     int k, int k_bar, double u);

struct TrajectoryRecord {
  std::vector<double> overlaps;
  std::vector<double> bound_values;
  bool pass = false;
  int violation_index = -1;  // -1 when pass
};

// Checks sqrt(1 - |x_t^T xbar|) <= mu^t sqrt(1 - |x_0^T xbar|)
//   + sqrt(5) delta(s) / (1 - mu2) for every t, with 1e-9 slack.
// Throws PreconditionViolation when q.preconditions_met is false or the
// initial overlap is below u + delta(s).
TrajectoryRecord recovery_bound_check(const std::vector<double>& overlaps,
                                      const TheoryQuantities& q);

// Exhaustive k-subset enumeration oracles; subsets compared lexicographically
// on ties (the first maximizer encountered wins).
std::pair<double, IndexSet> brute_force_sparse_eig(
    const SymmetricMatrix& A, int k, std::int64_t subset_budget = 1000000);

std::pair<double, IndexSet> brute_force_dks(const SymmetricMatrix& W, int k,
                                            std::int64_t subset_budget =
                                                1000000);

// Weyl inequalities: lambda_k(B) + lambda_p(U) <= lambda_k(B+U)
//   <= lambda_k(B) + lambda_1(U), all k, 1e-9 slack.
bool check_weyl(const SymmetricMatrix& B, const SymmetricMatrix& U);

// Restricted perturbation lemma on A = A_bar + E over index set F: the
// eigenvalue ratio of A_F is at most gamma(s) and the restricted dominant
// eigenvector is within delta(s) of the true one. Throws
// PreconditionViolation when supp(xbar) is not inside F or
// rho(E, s) > gap/2.
bool check_perturbation_lemma(const SymmetricMatrix& A_bar,
                              const SymmetricMatrix& E, const IndexSet& F);

// One-step power progress: |y^T x'| >= |y^T x| [1 + (1-gamma^2)
//   (1-(y^T x)^2)/2] with x' = A x / ||A x||, 1e-12 slack. Throws
// PreconditionViolation when the dominant eigenvalue is not strictly
// largest in magnitude or y^T x <= 0 after sign alignment.
bool check_power_progress(const SymmetricMatrix& A_F, const DenseVector& x);

// Truncation overlap loss: |Truncate(y,F)^T xbar| >= |y^T xbar|
//   - sqrt(kbar/k) min[1, (1+sqrt(kbar/k))(1-(y^T xbar)^2)], 1e-12 slack.
bool check_truncation_lemma(const DenseVector& y, const DenseVector& x_bar,
                            int k);

// Number of s-subsets of p, saturating at cap+1 to keep budget checks cheap.
std::int64_t subset_count(int p, int s, std::int64_t cap);

}  // namespace tpower
