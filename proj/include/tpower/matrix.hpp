#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

namespace tpower {

using DenseVector = std::vector<double>;

// Sorted, duplicate-free list of 0-based indices.
using IndexSet = std::vector<int>;

struct SparseUnitVector {
  DenseVector vector;
  IndexSet support;
};

enum class Storage { automatic, dense, sparse };

// Square symmetric real matrix. Dense row-major below kDenseLimit rows,
// CSR above, overridable at construction. Immutable once built; all
// operations below are pure functions.
class SymmetricMatrix {
 public:
  static constexpr int kDenseLimit = 2048;

  // values is p*p row-major. Symmetrizes when max |A_ij - A_ji| is within
  // tol (default 1e-9 * max|A|), rejects otherwise.
  static SymmetricMatrix from_dense(int p, const std::vector<double>& values,
                                    double symmetry_tol = -1.0,
                                    Storage storage = Storage::automatic);

  // Duplicate (i, j) coordinates are rejected. An entry (i, j) with i != j
  // implies the mirrored entry; supplying both with differing values is
  // subject to the same symmetry tolerance.
  static SymmetricMatrix from_triplets(
      int p, const std::vector<std::tuple<int, int, double>>& entries,
      double symmetry_tol = -1.0, Storage storage = Storage::automatic);

  static SymmetricMatrix identity(int p);
  static SymmetricMatrix diagonal(const DenseVector& d);
  static SymmetricMatrix zero(int p);

  int dim() const { return dim_; }
  bool is_dense() const { return dense_; }
  double entry(int i, int j) const;
  std::int64_t nonzero_count() const;

  // Dense row-major view; only valid when is_dense().
  const std::vector<double>& dense_values() const { return data_; }

  // CSR view of the sparse storage; only valid when !is_dense().
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& csr_values() const { return val_; }

  // y = A x + shift * x; the workhorse of every iteration here.
  void apply(const DenseVector& x, DenseVector& y, double shift = 0.0) const;

 private:
  SymmetricMatrix() = default;

  int dim_ = 0;
  bool dense_ = true;
  std::vector<double> data_;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> val_;
};

struct EigenPair {
  double value;
  DenseVector vector;
};

DenseVector truncate(const DenseVector& x, const IndexSet& F);

// Indices of the k largest |entries|, ties at the cutoff broken toward the
// smaller index.
IndexSet top_k_support(const DenseVector& x, int k);

DenseVector matvec(const SymmetricMatrix& A, const DenseVector& x);

SymmetricMatrix principal_submatrix(const SymmetricMatrix& A,
                                    const IndexSet& F);

double rayleigh_quotient(const SymmetricMatrix& A, const DenseVector& x);

// Eigenvalue of largest absolute value and its unit eigenvector, by plain
// power iteration from the normalized all-ones vector. Sign convention:
// first nonzero component of the eigenvector is positive. Throws
// ConvergenceError after max_iter.
EigenPair dominant_eigenpair(const SymmetricMatrix& A, double tol = 1e-10,
                             int max_iter = 5000);

// Algebraically largest eigenpair, via power iteration on the
// Gershgorin-shifted (PSD) matrix.
EigenPair largest_eigenpair(const SymmetricMatrix& A, double tol = 1e-10,
                            int max_iter = 5000);

// s = max_i (sum_j |A_ij| - A_ii); A + s I is positive semidefinite.
double gershgorin_shift_bound(const SymmetricMatrix& A);

// Shared small helpers.
double norm2(const DenseVector& x);
double dot(const DenseVector& a, const DenseVector& b);
void normalize(DenseVector& x);
IndexSet nonzero_support(const DenseVector& x, double tol = 0.0);

}  // namespace tpower
