#include "tpower/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tpower/errors.hpp"

namespace tpower {

namespace {

bool use_dense(int p, Storage storage) {
  switch (storage) {
    case Storage::dense:
      return true;
    case Storage::sparse:
      return false;
    case Storage::automatic:
    default:
      return p <= SymmetricMatrix::kDenseLimit;
  }
}

}  // namespace

SymmetricMatrix SymmetricMatrix::from_dense(int p,
                                            const std::vector<double>& values,
                                            double symmetry_tol,
                                            Storage storage) {
  if (p < 1) throw std::invalid_argument("matrix dimension must be >= 1");
  if (static_cast<std::size_t>(p) * p != values.size())
    throw std::invalid_argument("dense value count does not match dimension");

  double max_abs = 0.0;
  for (double v : values) max_abs = std::max(max_abs, std::abs(v));
  if (symmetry_tol < 0.0) symmetry_tol = 1e-9 * max_abs;

  double max_dev = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      max_dev = std::max(
          max_dev, std::abs(values[i * (std::size_t)p + j] -
                            values[j * (std::size_t)p + i]));
  if (max_dev > symmetry_tol)
    throw std::invalid_argument("matrix is asymmetric: max |A_ij - A_ji| = " +
                                std::to_string(max_dev));

  SymmetricMatrix A;
  A.dim_ = p;
  A.dense_ = use_dense(p, storage);
  if (A.dense_) {
    A.data_.assign(values.size(), 0.0);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        A.data_[i * (std::size_t)p + j] =
            0.5 * (values[i * (std::size_t)p + j] +
                   values[j * (std::size_t)p + i]);
  } else {
    A.row_ptr_.assign(p + 1, 0);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        double v = 0.5 * (values[i * (std::size_t)p + j] +
                          values[j * (std::size_t)p + i]);
        if (v != 0.0) {
          A.col_idx_.push_back(j);
          A.val_.push_back(v);
        }
      }
      A.row_ptr_[i + 1] = static_cast<int>(A.col_idx_.size());
    }
  }
  return A;
}

SymmetricMatrix SymmetricMatrix::from_triplets(
    int p, const std::vector<std::tuple<int, int, double>>& entries,
    double symmetry_tol, Storage storage) {
  if (p < 1) throw std::invalid_argument("matrix dimension must be >= 1");

  std::map<std::pair<int, int>, double> coo;
  double max_abs = 0.0;
  for (const auto& [i, j, v] : entries) {
    if (i < 0 || i >= p || j < 0 || j >= p)
      throw std::invalid_argument("triplet index out of range");
    if (!coo.emplace(std::make_pair(i, j), v).second)
      throw std::invalid_argument("duplicate (i,j) coordinate in triplets");
    max_abs = std::max(max_abs, std::abs(v));
  }
  if (symmetry_tol < 0.0) symmetry_tol = 1e-9 * max_abs;

  // Mirror and check: entries present on both sides must agree within tol.
  std::map<std::pair<int, int>, double> sym;
  for (const auto& [key, v] : coo) {
    auto [i, j] = key;
    auto it = coo.find({j, i});
    double w = (it == coo.end()) ? v : 0.5 * (v + it->second);
    if (it != coo.end() && std::abs(v - it->second) > symmetry_tol)
      throw std::invalid_argument(
          "matrix is asymmetric: max |A_ij - A_ji| = " +
          std::to_string(std::abs(v - it->second)));
    sym[{i, j}] = w;
    sym[{j, i}] = w;
  }

  SymmetricMatrix A;
  A.dim_ = p;
  A.dense_ = use_dense(p, storage);
  if (A.dense_) {
    A.data_.assign(static_cast<std::size_t>(p) * p, 0.0);
    for (const auto& [key, v] : sym)
      A.data_[key.first * (std::size_t)p + key.second] = v;
  } else {
    A.row_ptr_.assign(p + 1, 0);
    for (const auto& [key, v] : sym) {
      (void)v;
      ++A.row_ptr_[key.first + 1];
    }
    for (int i = 0; i < p; ++i) A.row_ptr_[i + 1] += A.row_ptr_[i];
    A.col_idx_.resize(sym.size());
    A.val_.resize(sym.size());
    std::vector<int> cursor(A.row_ptr_.begin(), A.row_ptr_.end() - 1);
    for (const auto& [key, v] : sym) {
      int slot = cursor[key.first]++;
      A.col_idx_[slot] = key.second;
      A.val_[slot] = v;
    }
  }
  return A;
}

SymmetricMatrix SymmetricMatrix::identity(int p) {
  DenseVector d(p, 1.0);
  return diagonal(d);
}

SymmetricMatrix SymmetricMatrix::diagonal(const DenseVector& d) {
  int p = static_cast<int>(d.size());
  std::vector<std::tuple<int, int, double>> trip;
  trip.reserve(d.size());
  for (int i = 0; i < p; ++i)
    if (d[i] != 0.0) trip.emplace_back(i, i, d[i]);
  return from_triplets(p, trip);
}

SymmetricMatrix SymmetricMatrix::zero(int p) { return from_triplets(p, {}); }

double SymmetricMatrix::entry(int i, int j) const {
  if (i < 0 || i >= dim_ || j < 0 || j >= dim_)
    throw std::invalid_argument("entry index out of range");
  if (dense_) return data_[i * (std::size_t)dim_ + j];
  for (int t = row_ptr_[i]; t < row_ptr_[i + 1]; ++t)
    if (col_idx_[t] == j) return val_[t];
  return 0.0;
}

std::int64_t SymmetricMatrix::nonzero_count() const {
  if (!dense_) return static_cast<std::int64_t>(val_.size());
  std::int64_t c = 0;
  for (double v : data_)
    if (v != 0.0) ++c;
  return c;
}

void SymmetricMatrix::apply(const DenseVector& x, DenseVector& y,
                            double shift) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("matvec dimension mismatch");
  y.assign(dim_, 0.0);
  if (dense_) {
    for (int i = 0; i < dim_; ++i) {
      const double* row = data_.data() + i * (std::size_t)dim_;
      double acc = 0.0;
      for (int j = 0; j < dim_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
  } else {
    for (int i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (int t = row_ptr_[i]; t < row_ptr_[i + 1]; ++t)
        acc += val_[t] * x[col_idx_[t]];
      y[i] = acc;
    }
  }
  if (shift != 0.0)
    for (int i = 0; i < dim_; ++i) y[i] += shift * x[i];
}

DenseVector truncate(const DenseVector& x, const IndexSet& F) {
  DenseVector out(x.size(), 0.0);
  for (int i : F) {
    if (i < 0 || i >= static_cast<int>(x.size()))
      throw std::invalid_argument("truncate: index out of range");
    out[i] = x[i];
  }
  return out;
}

IndexSet top_k_support(const DenseVector& x, int k) {
  int p = static_cast<int>(x.size());
  if (k < 1 || k > p) throw std::invalid_argument("top_k_support: bad k");
  IndexSet idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  // Stable sort on |x| descending keeps the lowest index first on ties.
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(x[a]) > std::abs(x[b]);
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

DenseVector matvec(const SymmetricMatrix& A, const DenseVector& x) {
  DenseVector y;
  A.apply(x, y);
  return y;
}

SymmetricMatrix principal_submatrix(const SymmetricMatrix& A,
                                    const IndexSet& F) {
  if (F.empty())
    throw std::invalid_argument("principal_submatrix: empty index set");
  int m = static_cast<int>(F.size());
  std::vector<double> vals(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) vals[a * (std::size_t)m + b] = A.entry(F[a], F[b]);
  return SymmetricMatrix::from_dense(m, vals, 0.0);
}

double rayleigh_quotient(const SymmetricMatrix& A, const DenseVector& x) {
  DenseVector y;
  A.apply(x, y);
  return dot(x, y);
}

EigenPair dominant_eigenpair(const SymmetricMatrix& A, double tol,
                             int max_iter) {
  if (tol <= 0.0) throw std::invalid_argument("dominant_eigenpair: tol <= 0");
  int p = A.dim();
  DenseVector x(p, 1.0 / std::sqrt(static_cast<double>(p)));
  DenseVector y;
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    A.apply(x, y);
    double ny = norm2(y);
    lambda = dot(x, y);
    if (ny <= 1e-300) {
      // x is (numerically) in the null space; eigenvalue 0 is dominant only
      // if A itself vanishes on the reachable subspace, which is what a
      // stationary power iterate means.
      break;
    }
    double resid = 0.0;
    for (int i = 0; i < p; ++i) {
      double r = y[i] - lambda * x[i];
      resid += r * r;
    }
    resid = std::sqrt(resid);
    if (resid <= tol * std::max(1.0, std::abs(lambda))) {
      for (int i = 0; i < p; ++i) x[i] = y[i] / ny;
      // One more Rayleigh evaluation on the refreshed iterate.
      lambda = rayleigh_quotient(A, x);
      break;
    }
    for (int i = 0; i < p; ++i) x[i] = y[i] / ny;
    if (it + 1 == max_iter)
      throw ConvergenceError("dominant_eigenpair: no convergence after " +
                                 std::to_string(max_iter) + " iterations",
                             x, resid);
  }
  for (double v : x) {
    if (v != 0.0) {
      if (v < 0.0)
        for (double& w : x) w = -w;
      break;
    }
  }
  return {lambda, x};
}

EigenPair largest_eigenpair(const SymmetricMatrix& A, double tol,
                            int max_iter) {
  double g = gershgorin_shift_bound(A);
  int p = A.dim();
  DenseVector x(p, 1.0 / std::sqrt(static_cast<double>(p)));
  DenseVector y;
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    A.apply(x, y, g);
    double ny = norm2(y);
    lambda = dot(x, y);
    if (ny <= 1e-300) break;
    double resid = 0.0;
    for (int i = 0; i < p; ++i) {
      double r = y[i] - lambda * x[i];
      resid += r * r;
    }
    resid = std::sqrt(resid);
    if (resid <= tol * std::max(1.0, std::abs(lambda))) {
      for (int i = 0; i < p; ++i) x[i] = y[i] / ny;
      A.apply(x, y, g);
      lambda = dot(x, y);
      break;
    }
    for (int i = 0; i < p; ++i) x[i] = y[i] / ny;
    if (it + 1 == max_iter)
      throw ConvergenceError("largest_eigenpair: no convergence after " +
                                 std::to_string(max_iter) + " iterations",
                             x, resid);
  }
  for (double v : x) {
    if (v != 0.0) {
      if (v < 0.0)
        for (double& w : x) w = -w;
      break;
    }
  }
  return {lambda - g, x};
}

double gershgorin_shift_bound(const SymmetricMatrix& A) {
  int p = A.dim();
  double s = 0.0;
  if (A.is_dense()) {
    const auto& d = A.dense_values();
    for (int i = 0; i < p; ++i) {
      double radius = 0.0;
      for (int j = 0; j < p; ++j)
        if (j != i) radius += std::abs(d[i * (std::size_t)p + j]);
      s = std::max(s, radius - d[i * (std::size_t)p + i]);
    }
  } else {
    const auto& rp = A.row_ptr();
    const auto& ci = A.col_idx();
    const auto& v = A.csr_values();
    for (int i = 0; i < p; ++i) {
      double radius = 0.0, diag = 0.0;
      for (int t = rp[i]; t < rp[i + 1]; ++t) {
        if (ci[t] == i)
          diag = v[t];
        else
          radius += std::abs(v[t]);
      }
      s = std::max(s, radius - diag);
    }
  }
  return s;
}

double norm2(const DenseVector& x) { return std::sqrt(dot(x, x)); }

double dot(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(DenseVector& x) {
  double n = norm2(x);
  if (n == 0.0) throw std::invalid_argument("normalize: zero vector");
  for (double& v : x) v /= n;
}

IndexSet nonzero_support(const DenseVector& x, double tol) {
  IndexSet F;
  for (int i = 0; i < static_cast<int>(x.size()); ++i)
    if (std::abs(x[i]) > tol) F.push_back(i);
  return F;
}

}  // namespace tpower
