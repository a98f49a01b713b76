#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tpower/dks.hpp"
#include "tpower/matrix.hpp"
#include "tpower/spca.hpp"

namespace tpower {

// Matrix Market: coordinate and array formats, real, symmetric or general
// headers. General inputs are symmetrized within the matrix-core tolerance.
SymmetricMatrix load_matrix_market(const std::string& path);

void write_matrix_market(const SymmetricMatrix& A, const std::string& path);

// Whitespace-separated "u v [w]" lines, weight defaults to 1; '#'/'%'
// comments skipped. Repeated identical arcs are summed; self-loops dropped
// and counted. Arcs are stored as listed; adjacency_matrix merges the two
// orientations.
WeightedGraph load_edge_list(const std::string& path, bool directed);

DataMatrix load_csv_data(const std::string& path, bool has_header);

struct GroundTruth {
  std::vector<SparseUnitVector> true_loadings;
  IndexSet planted_vertices;
  std::vector<double> eigenvalue_spec;
};

// Spiked covariance sampler: completes the given orthonormal sparse
// loadings to a basis V (seeded random completion), draws n Gaussian rows
// with covariance V diag(eigenvalues) V^T. When the trailing eigenvalues
// are all equal the completion is done implicitly through a projector.
std::pair<DataMatrix, GroundTruth> gen_spiked_covariance(
    int p, int n, const std::vector<SparseUnitVector>& loadings,
    const std::vector<double>& eigenvalues, std::uint64_t seed);

// The default toy instance: v1 on coordinates 0-9, v2 on 10-19, both with
// entries 1/sqrt(10); eigenvalues (400, 300, 1, ..., 1).
std::pair<DataMatrix, GroundTruth> gen_spiked_covariance_default(
    int p, int n, std::uint64_t seed);

// Erdos-Renyi with a planted dense k-set: edge probability p_in inside a
// random k-subset, p_out elsewhere.
std::pair<WeightedGraph, GroundTruth> gen_planted_subgraph(int n, int k,
                                                           double p_in,
                                                           double p_out,
                                                           std::uint64_t seed);

}  // namespace tpower
