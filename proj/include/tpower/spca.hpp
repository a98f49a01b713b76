#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tpower/matrix.hpp"
#include "tpower/solver.hpp"

namespace tpower {

struct DataMatrix {
  int n = 0;  // samples (rows)
  int p = 0;  // variables (columns)
  std::vector<double> values;  // row-major n x p
  bool centered = false;
  std::vector<std::string> column_names;  // optional, for reporting

  double at(int i, int j) const { return values[i * (std::size_t)p + j]; }
};

// Sigma = D^T D after optional column centering. scale_by_n divides by n
// (the empirical-covariance convention used by the spiked-model runs).
SymmetricMatrix covariance_from_data(const DataMatrix& D, bool center,
                                     bool scale_by_n = false);

// Sigma' = (I - x x^T) Sigma (I - x x^T); PSD-preserving and annihilates x.
SymmetricMatrix projection_deflate(const SymmetricMatrix& Sigma,
                                   const SparseUnitVector& x_hat);

struct SpcaResult {
  std::vector<SparseUnitVector> loadings;
  std::vector<int> cardinalities;
  std::vector<double> adjusted_variance;  // per component, overlap-corrected
  // Sum of x_j^T Sigma x_j on the original matrix over trace(Sigma).
  double proportion_explained = 0.0;
  std::vector<SparseEigenResult> per_component_results;
};

// Multi-component extraction: one truncated power solve per cardinality,
// deflating between components; adjusted variance computed at the end over
// all loadings.
SpcaResult spca_extract(const SymmetricMatrix& Sigma,
                        const std::vector<int>& cardinalities,
                        const SolveConfig& config);

SpcaResult spca_extract(const DataMatrix& D,
                        const std::vector<int>& cardinalities,
                        const SolveConfig& config);

// Adjusted (overlap-corrected) explained variance for possibly
// non-orthogonal loadings: triangular factorization R^T R of the Gram
// matrix U^T Sigma U; per-component R_jj^2 and their sum over trace(Sigma).
std::pair<std::vector<double>, double> adjusted_variance(
    const SymmetricMatrix& Sigma,
    const std::vector<SparseUnitVector>& loadings);

// Greedy forward selection: add the variable maximizing lambda_max of the
// augmented principal submatrix, k steps; returns the restricted dominant
// eigenvector on the selected set.
SparseEigenResult greedy_forward_spca(const SymmetricMatrix& Sigma, int k);

enum class SweepMethod { tpower, greedy_forward };

// One extraction per k; (k, x^T Sigma x) sorted by k.
std::vector<std::pair<int, double>> variance_cardinality_sweep(
    const SymmetricMatrix& Sigma, const std::vector<int>& k_values,
    SweepMethod method, const SolveConfig& config = {});

}  // namespace tpower
