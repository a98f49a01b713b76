#include "tpower/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tpower/errors.hpp"
#include "tpower/rng.hpp"

namespace tpower {

namespace {

// Next k-combination of {0..p-1} in lexicographic order. Returns false when
// exhausted.
bool next_combination(IndexSet& c, int p) {
  int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[i] < p - k + i) {
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double spectral_norm_of(const SymmetricMatrix& M) {
  auto vals = jacobi_eigenvalues(M);
  return std::max(std::abs(vals.front()), std::abs(vals.back()));
}

double submatrix_spectral_norm(const SymmetricMatrix& E, const IndexSet& F) {
  return spectral_norm_of(principal_submatrix(E, F));
}

double subset_weight(const SymmetricMatrix& W, const IndexSet& S) {
  double total = 0.0;
  for (int i : S)
    for (int j : S) total += W.entry(i, j);
  return total;
}

}  // namespace

std::int64_t subset_count(int p, int s, std::int64_t cap) {
  if (s < 0 || s > p) return 0;
  std::int64_t c = 1;
  s = std::min(s, p - s);
  for (int i = 1; i <= s; ++i) {
    c = c * (p - s + i) / i;
    if (c > cap) return cap + 1;
  }
  return c;
}

EigenDecomposition jacobi_eigen(const SymmetricMatrix& A, double off_tol,
                                int max_sweeps) {
  int p = A.dim();
  std::vector<double> a(static_cast<std::size_t>(p) * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a[i * (std::size_t)p + j] = A.entry(i, j);
  std::vector<double> v(static_cast<std::size_t>(p) * p, 0.0);
  for (int i = 0; i < p; ++i) v[i * (std::size_t)p + i] = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        s += 2.0 * a[i * (std::size_t)p + j] * a[i * (std::size_t)p + j];
    return std::sqrt(s);
  };
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  double threshold = off_tol * std::max(1.0, scale);

  for (int sweep = 0; sweep < max_sweeps && off_norm() > threshold; ++sweep) {
    for (int i = 0; i < p - 1; ++i) {
      for (int j = i + 1; j < p; ++j) {
        double apq = a[i * (std::size_t)p + j];
        if (std::abs(apq) <= 1e-300) continue;
        double app = a[i * (std::size_t)p + i];
        double aqq = a[j * (std::size_t)p + j];
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int r = 0; r < p; ++r) {
          double ari = a[r * (std::size_t)p + i];
          double arj = a[r * (std::size_t)p + j];
          a[r * (std::size_t)p + i] = c * ari - s * arj;
          a[r * (std::size_t)p + j] = s * ari + c * arj;
        }
        for (int r = 0; r < p; ++r) {
          double air = a[i * (std::size_t)p + r];
          double ajr = a[j * (std::size_t)p + r];
          a[i * (std::size_t)p + r] = c * air - s * ajr;
          a[j * (std::size_t)p + r] = s * air + c * ajr;
        }
        for (int r = 0; r < p; ++r) {
          double vri = v[r * (std::size_t)p + i];
          double vrj = v[r * (std::size_t)p + j];
          v[r * (std::size_t)p + i] = c * vri - s * vrj;
          v[r * (std::size_t)p + j] = s * vri + c * vrj;
        }
      }
    }
  }

  EigenDecomposition dec;
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return a[x * (std::size_t)p + x] > a[y * (std::size_t)p + y];
  });
  dec.values.resize(p);
  dec.vectors.resize(p);
  for (int r = 0; r < p; ++r) {
    int col = order[r];
    dec.values[r] = a[col * (std::size_t)p + col];
    DenseVector vec(p);
    for (int i = 0; i < p; ++i) vec[i] = v[i * (std::size_t)p + col];
    for (double x : vec) {
      if (x != 0.0) {
        if (x < 0.0)
          for (double& w : vec) w = -w;
        break;
      }
    }
    dec.vectors[r] = std::move(vec);
  }
  return dec;
}

std::vector<double> jacobi_eigenvalues(const SymmetricMatrix& A) {
  return jacobi_eigen(A).values;
}

RestrictedNorm restricted_spectral_norm(const SymmetricMatrix& E, int s,
                                        NormMode mode, int trials,
                                        std::uint64_t seed,
                                        std::int64_t subset_budget) {
  int p = E.dim();
  if (s < 1 || s > p)
    throw std::invalid_argument("restricted_spectral_norm: bad s");

  if (mode == NormMode::exact) {
    if (subset_count(p, s, subset_budget) > subset_budget)
      throw BudgetExceededError(
          "restricted_spectral_norm: C(p,s) exceeds the exact-mode budget; "
          "use sampled mode");
    IndexSet F(s);
    std::iota(F.begin(), F.end(), 0);
    double best = 0.0;
    do {
      best = std::max(best, submatrix_spectral_norm(E, F));
    } while (next_combination(F, p));
    return {best, true};
  }

  // Sampled: random starts, each refined by best single-index swaps.
  Rng rng(seed);
  double best = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    IndexSet perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = p - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.next_below(i + 1)]);
    IndexSet F(perm.begin(), perm.begin() + s);
    std::sort(F.begin(), F.end());
    double cur = submatrix_spectral_norm(E, F);
    bool improved = true;
    while (improved) {
      improved = false;
      std::vector<bool> in(p, false);
      for (int i : F) in[i] = true;
      IndexSet best_swap;
      double best_gain = cur;
      for (std::size_t pos = 0; pos < F.size(); ++pos) {
        for (int cand = 0; cand < p; ++cand) {
          if (in[cand]) continue;
          IndexSet G = F;
          G[pos] = cand;
          std::sort(G.begin(), G.end());
          double val = submatrix_spectral_norm(E, G);
          if (val > best_gain + 1e-15) {
            best_gain = val;
            best_swap = G;
          }
        }
      }
      if (!best_swap.empty()) {
        F = best_swap;
        cur = best_gain;
        improved = true;
      }
    }
    best = std::max(best, cur);
  }
  return {best, false};
}

TheoryQuantities recovery_bound_quantities(double lambda, double gap, double rho_s,
                                     int k, int k_bar, double u) {
  if (lambda <= 0.0)
    throw std::invalid_argument("recovery_bound_quantities: lambda <= 0");
  if (gap <= 0.0 || gap > lambda)
    throw std::invalid_argument("recovery_bound_quantities: gap not in (0, lambda]");
  if (k < 1) throw std::invalid_argument("recovery_bound_quantities: k < 1");

  TheoryQuantities q;
  q.lambda = lambda;
  q.gap = gap;
  q.rho_s = rho_s;
  q.k = k;
  q.k_bar = k_bar;
  q.s = 2 * k + k_bar;
  q.u = u;
  q.gamma_s = (lambda - gap + rho_s) / (lambda - rho_s);
  q.delta_s =
      rho_s == 0.0
          ? 0.0
          : std::sqrt(2.0) * rho_s /
                std::sqrt(rho_s * rho_s +
                          (gap - 2.0 * rho_s) * (gap - 2.0 * rho_s));
  double ratio = std::sqrt(static_cast<double>(k_bar) / k);
  double g2 = q.gamma_s * q.gamma_s;
  q.mu1 = (1.0 - g2) * u * (1.0 - u * u) / 2.0 - (2.0 * q.delta_s + ratio);
  q.mu2 = std::sqrt((1.0 + 3.0 * ratio) * (1.0 - 0.45 * (1.0 - g2)));
  q.mu = std::max(std::sqrt(std::max(0.0, 1.0 - q.mu1)), q.mu2);
  q.preconditions_met = rho_s <= gap / 2.0 && k >= 4 * k_bar &&
                        q.mu1 > 0.0 && q.mu1 < 1.0 && q.mu2 < 1.0 &&
                        u >= 0.0 && u <= 1.0;
  return q;
}

TrajectoryRecord recovery_bound_check(const std::vector<double>& overlaps,
                                      const TheoryQuantities& q) {
  if (!q.preconditions_met)
    throw PreconditionViolation(
        "recovery_bound_check: bound hypotheses not met");
  if (overlaps.empty())
    throw std::invalid_argument("recovery_bound_check: empty trajectory");
  if (overlaps.front() < q.u + q.delta_s)
    throw PreconditionViolation(
        "recovery_bound_check: |x_0^T xbar| below u + delta(s)");

  TrajectoryRecord rec;
  rec.overlaps = overlaps;
  double base = std::sqrt(std::max(0.0, 1.0 - std::abs(overlaps.front())));
  double floor = std::sqrt(5.0) * q.delta_s / (1.0 - q.mu2);
  rec.pass = true;
  double mu_t = 1.0;
  for (std::size_t t = 0; t < overlaps.size(); ++t) {
    double bound = mu_t * base + floor;
    rec.bound_values.push_back(bound);
    double lhs = std::sqrt(std::max(0.0, 1.0 - std::abs(overlaps[t])));
    if (lhs > bound + 1e-9 && rec.pass) {
      rec.pass = false;
      rec.violation_index = static_cast<int>(t);
    }
    mu_t *= q.mu;
  }
  return rec;
}

std::pair<double, IndexSet> brute_force_sparse_eig(const SymmetricMatrix& A,
                                                   int k,
                                                   std::int64_t subset_budget) {
  int p = A.dim();
  if (k < 1 || k > p)
    throw std::invalid_argument("brute_force_sparse_eig: bad k");
  if (subset_count(p, k, subset_budget) > subset_budget)
    throw BudgetExceededError("brute_force_sparse_eig: C(p,k) over budget");
  IndexSet F(k);
  std::iota(F.begin(), F.end(), 0);
  double best = -1e300;
  IndexSet best_set;
  do {
    double lam = jacobi_eigenvalues(principal_submatrix(A, F)).front();
    if (lam > best) {
      best = lam;
      best_set = F;
    }
  } while (next_combination(F, p));
  return {best, best_set};
}

std::pair<double, IndexSet> brute_force_dks(const SymmetricMatrix& W, int k,
                                            std::int64_t subset_budget) {
  int n = W.dim();
  if (k < 1 || k > n) throw std::invalid_argument("brute_force_dks: bad k");
  if (subset_count(n, k, subset_budget) > subset_budget)
    throw BudgetExceededError("brute_force_dks: C(n,k) over budget");
  IndexSet S(k);
  std::iota(S.begin(), S.end(), 0);
  double best = -1e300;
  IndexSet best_set;
  do {
    double d = subset_weight(W, S) / k;
    if (d > best) {
      best = d;
      best_set = S;
    }
  } while (next_combination(S, n));
  return {best, best_set};
}

bool check_weyl(const SymmetricMatrix& B, const SymmetricMatrix& U) {
  if (B.dim() != U.dim())
    throw std::invalid_argument("check_weyl: dimension mismatch");
  int p = B.dim();
  auto lb = jacobi_eigenvalues(B);
  auto lu = jacobi_eigenvalues(U);
  std::vector<double> sum(static_cast<std::size_t>(p) * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      sum[i * (std::size_t)p + j] = B.entry(i, j) + U.entry(i, j);
  auto ls = jacobi_eigenvalues(SymmetricMatrix::from_dense(p, sum));
  for (int i = 0; i < p; ++i) {
    if (lb[i] + lu[p - 1] > ls[i] + 1e-9) return false;
    if (ls[i] > lb[i] + lu[0] + 1e-9) return false;
  }
  return true;
}

bool check_perturbation_lemma(const SymmetricMatrix& A_bar,
                              const SymmetricMatrix& E, const IndexSet& F) {
  if (A_bar.dim() != E.dim())
    throw std::invalid_argument("check_perturbation_lemma: dim mismatch");
  int s = static_cast<int>(F.size());

  auto bar = jacobi_eigen(A_bar);
  double lambda = bar.values.front();
  double second = 0.0;
  for (std::size_t j = 1; j < bar.values.size(); ++j)
    second = std::max(second, std::abs(bar.values[j]));
  double gap = lambda - second;
  if (lambda <= 0.0 || gap <= 0.0)
    throw PreconditionViolation(
        "check_perturbation_lemma: degenerate dominant eigenvalue");
  const DenseVector& xbar = bar.vectors.front();

  std::vector<bool> in(A_bar.dim(), false);
  for (int i : F) in[i] = true;
  for (int i = 0; i < A_bar.dim(); ++i)
    if (!in[i] && std::abs(xbar[i]) > 1e-8)
      throw PreconditionViolation(
          "check_perturbation_lemma: supp(xbar) not contained in F");

  double rho = restricted_spectral_norm(E, s, NormMode::exact).value;
  if (rho > gap / 2.0)
    throw PreconditionViolation(
        "check_perturbation_lemma: rho(E,s) > gap/2");

  double gamma = (lambda - gap + rho) / (lambda - rho);
  double delta = rho == 0.0
                     ? 0.0
                     : std::sqrt(2.0) * rho /
                           std::sqrt(rho * rho +
                                     (gap - 2.0 * rho) * (gap - 2.0 * rho));

  int p = A_bar.dim();
  std::vector<double> avals(static_cast<std::size_t>(p) * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      avals[i * (std::size_t)p + j] = A_bar.entry(i, j) + E.entry(i, j);
  SymmetricMatrix A = SymmetricMatrix::from_dense(p, avals);
  auto sub = jacobi_eigen(principal_submatrix(A, F));

  double top = sub.values.front();
  double sub_second = 0.0;
  for (std::size_t j = 1; j < sub.values.size(); ++j)
    sub_second = std::max(sub_second, std::abs(sub.values[j]));
  if (sub_second > gamma * top + 1e-9) return false;

  DenseVector xF(p, 0.0);
  for (std::size_t q = 0; q < F.size(); ++q) xF[F[q]] = sub.vectors.front()[q];
  if (dot(xF, xbar) < 0.0)
    for (double& v : xF) v = -v;
  double dist = 0.0;
  for (int i = 0; i < p; ++i) {
    double d = xF[i] - xbar[i];
    dist += d * d;
  }
  return std::sqrt(dist) <= delta + 1e-9;
}

bool check_power_progress(const SymmetricMatrix& A_F, const DenseVector& x) {
  auto dec = jacobi_eigen(A_F);
  int p = A_F.dim();
  // Dominant = largest in absolute value.
  int dom = 0;
  for (int j = 1; j < p; ++j)
    if (std::abs(dec.values[j]) > std::abs(dec.values[dom])) dom = j;
  double lead = std::abs(dec.values[dom]);
  double second = 0.0;
  for (int j = 0; j < p; ++j)
    if (j != dom) second = std::max(second, std::abs(dec.values[j]));
  if (lead <= 0.0 || second >= lead)
    throw PreconditionViolation(
        "check_power_progress: dominant eigenvalue not strictly largest");
  double gamma = second / lead;

  DenseVector y = dec.vectors[dom];
  double align = dot(y, x);
  if (align < 0.0) {
    for (double& v : y) v = -v;
    align = -align;
  }
  if (align <= 0.0)
    throw PreconditionViolation("check_power_progress: y^T x <= 0");

  DenseVector xp = matvec(A_F, x);
  double n = norm2(xp);
  if (n == 0.0)
    throw DegenerateIterateError("check_power_progress: A_F x = 0", 0);
  for (double& v : xp) v /= n;

  double lhs = std::abs(dot(y, xp));
  double rhs = align * (1.0 + (1.0 - gamma * gamma) *
                                  (1.0 - align * align) / 2.0);
  return lhs >= rhs - 1e-12;
}

bool check_truncation_lemma(const DenseVector& y, const DenseVector& x_bar,
                            int k) {
  if (y.size() != x_bar.size())
    throw std::invalid_argument("check_truncation_lemma: dim mismatch");
  int k_bar = static_cast<int>(nonzero_support(x_bar).size());
  if (k <= k_bar)
    throw std::invalid_argument("check_truncation_lemma: requires k > kbar");
  IndexSet F = top_k_support(y, k);
  double overlap = std::abs(dot(y, x_bar));
  double trunc_overlap = std::abs(dot(truncate(y, F), x_bar));
  double ratio = std::sqrt(static_cast<double>(k_bar) / k);
  double rhs = overlap -
               ratio * std::min(1.0, (1.0 + ratio) * (1.0 - overlap * overlap));
  return trunc_overlap >= rhs - 1e-12;
}

}  // namespace tpower
