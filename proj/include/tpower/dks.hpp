#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tpower/matrix.hpp"
#include "tpower/solver.hpp"

namespace tpower {

// Weighted graph as accumulated arc weights, stored as listed. For
// undirected graphs the two orientations of an edge are duplicate listings
// and are merged by adjacency_matrix.
struct WeightedGraph {
  int n = 0;
  bool directed = false;
  std::map<std::pair<int, int>, double> weights;
  long dropped_self_loops = 0;
};

struct IndicatorVector {
  std::vector<std::uint8_t> bits;
  int cardinality = 0;
};

IndicatorVector indicator_from_set(const IndexSet& S, int n);
IndexSet set_from_indicator(const IndicatorVector& pi);

struct DksResult {
  IndexSet vertices;
  double density = 0.0;  // pi^T W pi / k
  int iterations = 0;
  double final_shift = 0.0;
  std::vector<std::pair<double, double>> trace;  // (objective, shift)
  bool converged = false;
};

// (W + W^T)/2 from a square row-major matrix with non-negative entries.
SymmetricMatrix symmetrize(int n, const std::vector<double>& values);

// Adjacency matrix of the graph: symmetrized for directed input, diagonal
// forced to zero.
SymmetricMatrix adjacency_matrix(const WeightedGraph& g);

// Indicator of the k largest weighted degrees (row sums), ties toward the
// lower index.
IndicatorVector init_top_degree(const SymmetricMatrix& W, int k);

// Truncated power iteration over indicator vectors with the gradual-shift
// monotonicity fix: on an objective decrease the shift is raised (doubling,
// capped at the Gershgorin bound) and the iteration is repeated, so the
// accepted objective sequence is non-decreasing. Stops when the support set
// repeats.
DksResult tpower_dks(const SymmetricMatrix& W, int k,
                     const IndicatorVector& pi0, const SolveConfig& config);

double density(const SymmetricMatrix& W, const IndexSet& S);

// Top ceil(k/2) degrees plus the floor(k/2) outside vertices with the
// largest weight into that set.
DksResult greedy_feige(const SymmetricMatrix& W, int k);

// Grow from a heaviest edge, each step adding the vertex that adds the most
// induced weight.
DksResult greedy_ravi(const SymmetricMatrix& W, int k);

enum class DksMethod { tpower, feige, ravi, relaxed };

DksResult solve_dks(const SymmetricMatrix& W, int k, DksMethod method,
                    const SolveConfig& config = {});

struct SequentialDksResult {
  std::vector<DksResult> rounds;
  double total_density = 0.0;
  bool truncated = false;  // graph exhausted before m rounds
};

// m rounds of solve-and-remove on the remaining induced subgraph.
SequentialDksResult sequential_dks(const SymmetricMatrix& W, int k, int m,
                                   DksMethod method,
                                   const SolveConfig& config = {});

}  // namespace tpower
