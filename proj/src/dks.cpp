#include "tpower/dks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tpower/errors.hpp"

namespace tpower {

namespace {

// Top-k by value (not magnitude), ties toward the lower index.
IndexSet top_k_values(const DenseVector& x, int k) {
  int n = static_cast<int>(x.size());
  IndexSet idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return x[a] > x[b]; });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double subset_weight(const SymmetricMatrix& W, const IndexSet& S) {
  double total = 0.0;
  for (int i : S)
    for (int j : S) total += W.entry(i, j);
  return total;
}

DenseVector weighted_degrees(const SymmetricMatrix& W) {
  DenseVector ones(W.dim(), 1.0);
  return matvec(W, ones);
}

}  // namespace

IndicatorVector indicator_from_set(const IndexSet& S, int n) {
  IndicatorVector pi;
  pi.bits.assign(n, 0);
  for (int i : S) {
    if (i < 0 || i >= n)
      throw std::invalid_argument("indicator_from_set: index out of range");
    pi.bits[i] = 1;
  }
  pi.cardinality = static_cast<int>(S.size());
  return pi;
}

IndexSet set_from_indicator(const IndicatorVector& pi) {
  IndexSet S;
  for (int i = 0; i < static_cast<int>(pi.bits.size()); ++i)
    if (pi.bits[i]) S.push_back(i);
  return S;
}

SymmetricMatrix symmetrize(int n, const std::vector<double>& values) {
  if (static_cast<std::size_t>(n) * n != values.size())
    throw std::invalid_argument("symmetrize: value count mismatch");
  for (double v : values)
    if (v < 0.0) throw std::invalid_argument("symmetrize: negative weight");
  std::vector<double> sym(values.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sym[i * (std::size_t)n + j] =
          0.5 * (values[i * (std::size_t)n + j] + values[j * (std::size_t)n + i]);
  return SymmetricMatrix::from_dense(n, sym, 0.0);
}

SymmetricMatrix adjacency_matrix(const WeightedGraph& g) {
  std::map<std::pair<int, int>, double> sym;
  if (g.directed) {
    // Each arc contributes half its weight to the undirected edge.
    for (const auto& [key, w] : g.weights) {
      auto [u, v] = key;
      if (u == v) continue;
      sym[{std::min(u, v), std::max(u, v)}] += 0.5 * w;
    }
  } else {
    // The two orientations are duplicate listings of one edge: averaged
    // when both appear, taken as-is when only one does.
    for (const auto& [key, w] : g.weights) {
      auto [u, v] = key;
      if (u == v) continue;
      auto [it, fresh] =
          sym.emplace(std::make_pair(std::min(u, v), std::max(u, v)), w);
      if (!fresh) it->second = 0.5 * (it->second + w);
    }
  }
  std::vector<std::tuple<int, int, double>> trip;
  trip.reserve(sym.size());
  for (const auto& [key, w] : sym)
    if (w != 0.0) trip.emplace_back(key.first, key.second, w);
  return SymmetricMatrix::from_triplets(g.n, trip);
}

IndicatorVector init_top_degree(const SymmetricMatrix& W, int k) {
  int n = W.dim();
  if (k < 1 || k > n) throw std::invalid_argument("init_top_degree: bad k");
  IndexSet S = top_k_values(weighted_degrees(W), k);
  return indicator_from_set(S, n);
}

DksResult tpower_dks(const SymmetricMatrix& W, int k,
                     const IndicatorVector& pi0, const SolveConfig& config) {
  int n = W.dim();
  if (k < 1 || k > n) throw std::invalid_argument("tpower_dks: k out of range");
  if (static_cast<int>(pi0.bits.size()) != n)
    throw std::invalid_argument("tpower_dks: init dimension mismatch");

  double g = gershgorin_shift_bound(W);
  double shift = 0.0;

  IndexSet S = set_from_indicator(pi0);
  if (static_cast<int>(S.size()) != k)
    throw std::invalid_argument("tpower_dks: init cardinality != k");
  double obj = subset_weight(W, S);

  DksResult res;
  res.trace.emplace_back(obj, shift);
  double last_obj = obj;

  DenseVector pi(n, 0.0), y;
  for (int i : S) pi[i] = 1.0;

  for (int t = 1; t <= config.max_iter; ++t) {
    IndexSet F;
    double cand_obj = 0.0;
    // Shift loop: repeat the current iteration with a larger shift until
    // the original objective does not decrease. At shift == g the matrix is
    // PSD and the ascent is guaranteed, so this terminates.
    for (;;) {
      W.apply(pi, y, shift);
      F = top_k_values(y, k);
      cand_obj = subset_weight(W, F);
      if (cand_obj >= obj - 1e-12 || shift >= g) break;
      shift = std::min(std::max(2.0 * shift, 0.1 * g), g);
    }
    res.iterations = t;
    res.trace.emplace_back(cand_obj, shift);
    bool same = (F == S);
    S = F;
    std::fill(pi.begin(), pi.end(), 0.0);
    for (int i : S) pi[i] = 1.0;
    obj = std::max(obj, cand_obj);
    // Fixed point of the support set, or an objective stall: tied supports
    // can alternate forever at the same objective, so both checks matter.
    if (same || std::abs(cand_obj - last_obj) <= config.tol) {
      res.converged = true;
      break;
    }
    last_obj = cand_obj;
  }

  res.vertices = S;
  res.density = subset_weight(W, S) / k;
  res.final_shift = shift;
  return res;
}

double density(const SymmetricMatrix& W, const IndexSet& S) {
  if (S.empty()) throw std::invalid_argument("density: empty vertex set");
  return subset_weight(W, S) / static_cast<double>(S.size());
}

DksResult greedy_feige(const SymmetricMatrix& W, int k) {
  int n = W.dim();
  if (k < 1 || k > n) throw std::invalid_argument("greedy_feige: bad k");
  int half_up = (k + 1) / 2;

  IndexSet S = top_k_values(weighted_degrees(W), half_up);
  std::vector<bool> in(n, false);
  for (int i : S) in[i] = true;

  DenseVector to_s(n, 0.0);
  for (int v = 0; v < n; ++v) {
    if (in[v]) continue;
    double w = 0.0;
    for (int u : S) w += W.entry(v, u);
    to_s[v] = w;
  }
  IndexSet order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return to_s[a] > to_s[b]; });
  IndexSet result = S;
  for (int v : order) {
    if (static_cast<int>(result.size()) == k) break;
    if (!in[v]) result.push_back(v);
  }
  std::sort(result.begin(), result.end());

  DksResult res;
  res.vertices = result;
  res.density = density(W, result);
  res.iterations = 1;
  res.converged = true;
  return res;
}

DksResult greedy_ravi(const SymmetricMatrix& W, int k) {
  int n = W.dim();
  if (k < 2 || k > n) throw std::invalid_argument("greedy_ravi: bad k");

  // Heaviest edge, ties toward the lexicographically smallest pair.
  int bi = -1, bj = -1;
  double bw = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double w = W.entry(i, j);
      if (w > bw) {
        bw = w;
        bi = i;
        bj = j;
      }
    }
  if (bi < 0) throw NoEdgeError("greedy_ravi: graph has no edge");

  IndexSet S = {bi, bj};
  std::vector<bool> in(n, false);
  in[bi] = in[bj] = true;
  while (static_cast<int>(S.size()) < k) {
    int best = -1;
    double best_gain = -1.0;
    for (int v = 0; v < n; ++v) {
      if (in[v]) continue;
      double gain = 0.0;
      for (int u : S) gain += W.entry(v, u);
      if (gain > best_gain) {
        best_gain = gain;
        best = v;
      }
    }
    in[best] = true;
    S.insert(std::lower_bound(S.begin(), S.end(), best), best);
  }

  DksResult res;
  res.vertices = S;
  res.density = density(W, S);
  res.iterations = k - 2;
  res.converged = true;
  return res;
}

DksResult solve_dks(const SymmetricMatrix& W, int k, DksMethod method,
                    const SolveConfig& config) {
  switch (method) {
    case DksMethod::tpower:
      return tpower_dks(W, k, init_top_degree(W, k), config);
    case DksMethod::feige:
      return greedy_feige(W, k);
    case DksMethod::ravi:
      return greedy_ravi(W, k);
    case DksMethod::relaxed: {
      // Relax the indicator to a k-sparse unit vector and run the standard
      // truncated power solver; the support is the vertex set.
      SolveConfig cfg = config;
      cfg.k = k;
      cfg.init.kind = InitKind::custom;
      DenseVector x0(W.dim(), 0.0);
      for (int i : set_from_indicator(init_top_degree(W, k)))
        x0[i] = 1.0 / std::sqrt(static_cast<double>(k));
      cfg.init.x0 = std::move(x0);
      SparseEigenResult solve = tpower(W, cfg);
      IndexSet S = top_k_support(solve.x.vector, k);
      DksResult res;
      res.vertices = S;
      res.density = density(W, S);
      res.iterations = solve.iterations;
      res.converged = solve.converged;
      res.final_shift = solve.shift_used;
      return res;
    }
  }
  throw std::invalid_argument("solve_dks: unknown method");
}

SequentialDksResult sequential_dks(const SymmetricMatrix& W, int k, int m,
                                   DksMethod method,
                                   const SolveConfig& config) {
  int n = W.dim();
  if (k < 1 || m < 1)
    throw std::invalid_argument("sequential_dks: bad parameters");
  if (static_cast<std::int64_t>(m) * k > n)
    throw std::invalid_argument("sequential_dks: m*k exceeds vertex count");

  SequentialDksResult out;
  IndexSet active(n);
  std::iota(active.begin(), active.end(), 0);

  for (int round = 0; round < m; ++round) {
    if (static_cast<int>(active.size()) < k) {
      out.truncated = true;
      break;
    }
    SymmetricMatrix sub = principal_submatrix(W, active);
    DksResult local;
    try {
      local = solve_dks(sub, k, method, config);
    } catch (const NoEdgeError&) {
      out.truncated = true;
      break;
    }
    // Map back to original vertex ids.
    IndexSet verts;
    verts.reserve(local.vertices.size());
    for (int i : local.vertices) verts.push_back(active[i]);
    std::sort(verts.begin(), verts.end());
    local.vertices = verts;
    out.total_density += local.density;
    out.rounds.push_back(std::move(local));

    IndexSet remaining;
    std::set_difference(active.begin(), active.end(), verts.begin(),
                        verts.end(), std::back_inserter(remaining));
    active = std::move(remaining);
  }
  return out;
}

}  // namespace tpower
