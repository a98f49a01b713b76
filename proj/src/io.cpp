#include "tpower/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tpower/errors.hpp"
#include "tpower/rng.hpp"

namespace tpower {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '%' || c == '#';
  }
  return true;
}

}  // namespace

SymmetricMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string header;
  if (!std::getline(in, header))
    throw ParseError(path + ": empty file", 0);
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw ParseError(path + ": not a MatrixMarket matrix header", 1);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer")
    throw ParseError(path + ": unsupported field '" + field + "'", 1);
  if (symmetry != "symmetric" && symmetry != "general")
    throw ParseError(path + ": unsupported symmetry '" + symmetry + "'", 1);

  long lineno = 1;
  std::string line;
  auto next_data_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!is_comment_or_blank(line)) return true;
    }
    return false;
  };

  if (!next_data_line()) throw ParseError(path + ": missing size line", lineno);

  if (format == "array") {
    std::istringstream ss(line);
    int rows = 0, cols = 0;
    if (!(ss >> rows >> cols) || rows < 1 || cols != rows)
      throw ParseError(path + ": bad array size line (need square)", lineno);
    std::vector<double> vals(static_cast<std::size_t>(rows) * rows, 0.0);
    // Array format is column-major, full for general, lower triangle for
    // symmetric.
    std::vector<double> buf;
    double v;
    while (next_data_line()) {
      std::istringstream ds(line);
      while (ds >> v) buf.push_back(v);
    }
    if (symmetry == "general") {
      if (buf.size() != vals.size())
        throw ParseError(path + ": array entry count mismatch", lineno);
      for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
          vals[i * (std::size_t)rows + j] = buf[j * (std::size_t)rows + i];
    } else {
      std::size_t expect = static_cast<std::size_t>(rows) * (rows + 1) / 2;
      if (buf.size() != expect)
        throw ParseError(path + ": array entry count mismatch", lineno);
      std::size_t t = 0;
      for (int j = 0; j < cols; ++j)
        for (int i = j; i < rows; ++i) {
          vals[i * (std::size_t)rows + j] = buf[t];
          vals[j * (std::size_t)rows + i] = buf[t];
          ++t;
        }
    }
    return SymmetricMatrix::from_dense(rows, vals);
  }

  if (format != "coordinate")
    throw ParseError(path + ": unsupported format '" + format + "'", 1);

  std::istringstream ss(line);
  int rows = 0, cols = 0;
  long nnz = 0;
  if (!(ss >> rows >> cols >> nnz) || rows < 1 || cols != rows)
    throw ParseError(path + ": bad coordinate size line (need square)",
                     lineno);

  // Raw oriented entries; exact duplicate coordinates are malformed input.
  std::map<std::pair<int, int>, double> raw;
  double max_abs = 0.0;
  for (long e = 0; e < nnz; ++e) {
    if (!next_data_line())
      throw ParseError(path + ": expected " + std::to_string(nnz) +
                           " entries, file ended early",
                       lineno);
    std::istringstream ds(line);
    int i = 0, j = 0;
    double v = 0.0;
    if (!(ds >> i >> j >> v))
      throw ParseError(path + ": malformed coordinate entry", lineno);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError(path + ": index out of range", lineno);
    --i;
    --j;
    if (symmetry == "symmetric" && i != j) {
      // Canonicalize; the format stores one triangle.
      int a = std::max(i, j), b = std::min(i, j);
      i = a;
      j = b;
    }
    if (!raw.emplace(std::make_pair(i, j), v).second)
      throw ParseError(path + ": duplicate coordinate entry", lineno);
    max_abs = std::max(max_abs, std::abs(v));
  }

  std::vector<std::tuple<int, int, double>> trip;
  if (symmetry == "symmetric") {
    trip.reserve(raw.size());
    for (const auto& [key, v] : raw) trip.emplace_back(key.first, key.second, v);
  } else {
    // General: symmetrize as (M + M^T)/2, a missing mirror counting as 0.
    // When both orientations are present they must agree within tolerance.
    double tol = 1e-9 * max_abs;
    std::map<std::pair<int, int>, double> sym;
    for (const auto& [key, v] : raw) {
      auto [i, j] = key;
      if (i == j) {
        sym[{i, j}] = v;
        continue;
      }
      auto mirror = raw.find({j, i});
      double other = mirror == raw.end() ? 0.0 : mirror->second;
      if (mirror != raw.end() && std::abs(v - other) > tol)
        throw ParseError(path + ": asymmetric beyond tolerance, max |A_ij - "
                                "A_ji| = " +
                             std::to_string(std::abs(v - other)),
                         lineno);
      sym[{std::min(i, j), std::max(i, j)}] = 0.5 * (v + other);
    }
    trip.reserve(sym.size());
    for (const auto& [key, v] : sym) trip.emplace_back(key.first, key.second, v);
  }
  return SymmetricMatrix::from_triplets(rows, trip);
}

void write_matrix_market(const SymmetricMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  int p = A.dim();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  long nnz = 0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j)
      if (A.entry(i, j) != 0.0) ++nnz;
  out << p << " " << p << " " << nnz << "\n";
  char buf[64];
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = A.entry(i, j);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, j + 1, v);
      out << buf;
    }
  if (!out) throw IoError("write failed for " + path);
}

WeightedGraph load_edge_list(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  WeightedGraph g;
  g.directed = directed;
  std::string line;
  long lineno = 0;
  int max_vertex = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    std::istringstream ss(line);
    long u = -1, v = -1;
    double w = 1.0;
    if (!(ss >> u >> v))
      throw ParseError(path + ": malformed edge line", lineno);
    ss >> w;  // optional weight
    std::string extra;
    if (ss >> extra)
      throw ParseError(path + ": trailing tokens on edge line", lineno);
    if (u < 0 || v < 0)
      throw ParseError(path + ": negative vertex id", lineno);
    if (w < 0.0) throw ParseError(path + ": negative edge weight", lineno);
    if (u == v) {
      ++g.dropped_self_loops;
      max_vertex = std::max(max_vertex, static_cast<int>(u));
      continue;
    }
    int ui = static_cast<int>(u), vi = static_cast<int>(v);
    g.weights[{ui, vi}] += w;
    max_vertex = std::max({max_vertex, ui, vi});
  }
  g.n = max_vertex + 1;
  return g;
}

DataMatrix load_csv_data(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  DataMatrix D;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (lineno == 1 && has_header) {
      D.column_names = cells;
      continue;
    }
    if (D.p == 0) {
      D.p = static_cast<int>(cells.size());
    } else if (static_cast<int>(cells.size()) != D.p) {
      throw ParseError(path + ": ragged row (expected " +
                           std::to_string(D.p) + " cells, got " +
                           std::to_string(cells.size()) + ")",
                       lineno);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        double v = std::stod(cells[c], &used);
        while (used < cells[c].size() &&
               std::isspace(static_cast<unsigned char>(cells[c][used])))
          ++used;
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
        D.values.push_back(v);
      } catch (const std::exception&) {
        throw ParseError(path + ": non-numeric cell at row " +
                             std::to_string(lineno) + ", column " +
                             std::to_string(c + 1),
                         lineno);
      }
    }
    ++D.n;
  }
  if (D.n == 0 || D.p == 0)
    throw std::invalid_argument(path + ": empty CSV data matrix");
  D.centered = false;
  return D;
}

std::pair<DataMatrix, GroundTruth> gen_spiked_covariance(
    int p, int n, const std::vector<SparseUnitVector>& loadings,
    const std::vector<double>& eigenvalues, std::uint64_t seed) {
  int m = static_cast<int>(loadings.size());
  if (p < 1 || n < 1)
    throw std::invalid_argument("gen_spiked_covariance: bad dimensions");
  if (static_cast<int>(eigenvalues.size()) != p)
    throw std::invalid_argument(
        "gen_spiked_covariance: eigenvalues must have length p");
  for (int i = 1; i < p; ++i)
    if (eigenvalues[i] > eigenvalues[i - 1] || eigenvalues[i] < 0.0)
      throw std::invalid_argument(
          "gen_spiked_covariance: eigenvalues must be non-negative and "
          "descending");
  for (const auto& l : loadings)
    if (static_cast<int>(l.vector.size()) != p)
      throw std::invalid_argument(
          "gen_spiked_covariance: loading dimension mismatch");
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double g = dot(loadings[a].vector, loadings[b].vector);
      double want = (a == b) ? 1.0 : 0.0;
      if (std::abs(g - want) > 1e-8)
        throw std::invalid_argument(
            "gen_spiked_covariance: loadings are not orthonormal");
    }

  Rng rng = Rng(seed).stream("spiked");

  bool flat_tail = true;
  for (int i = m + 1; i < p; ++i)
    if (eigenvalues[i] != eigenvalues[m]) flat_tail = false;

  DataMatrix D;
  D.n = n;
  D.p = p;
  D.values.assign(static_cast<std::size_t>(n) * p, 0.0);

  if (m < p && flat_tail) {
    // x = sum_i sqrt(lambda_i) z_i v_i + sqrt(lambda_tail) P w, with P the
    // projector onto the complement of the given loadings. Exact when the
    // tail eigenvalues are all equal; avoids a p x p basis completion.
    double tail = m < p ? std::sqrt(eigenvalues[m]) : 0.0;
    for (int t = 0; t < n; ++t) {
      double* row = D.values.data() + t * (std::size_t)p;
      DenseVector w(p);
      for (int i = 0; i < p; ++i) w[i] = rng.next_gaussian();
      std::vector<double> z(m);
      for (int i = 0; i < m; ++i) z[i] = rng.next_gaussian();
      // Project w off the loading span.
      for (int i = 0; i < m; ++i) {
        double c = dot(w, loadings[i].vector);
        for (int j = 0; j < p; ++j) w[j] -= c * loadings[i].vector[j];
      }
      for (int j = 0; j < p; ++j) row[j] = tail * w[j];
      for (int i = 0; i < m; ++i) {
        double c = std::sqrt(eigenvalues[i]) * z[i];
        for (int j = 0; j < p; ++j) row[j] += c * loadings[i].vector[j];
      }
    }
  } else {
    // Full random orthonormal completion by Gram-Schmidt.
    std::vector<DenseVector> basis;
    for (const auto& l : loadings) basis.push_back(l.vector);
    while (static_cast<int>(basis.size()) < p) {
      DenseVector v(p);
      for (int i = 0; i < p; ++i) v[i] = rng.next_gaussian();
      for (const auto& b : basis) {
        double c = dot(v, b);
        for (int j = 0; j < p; ++j) v[j] -= c * b[j];
      }
      double nv = norm2(v);
      if (nv < 1e-8) continue;  // unlucky draw, retry
      for (double& x : v) x /= nv;
      basis.push_back(std::move(v));
    }
    for (int t = 0; t < n; ++t) {
      double* row = D.values.data() + t * (std::size_t)p;
      for (int i = 0; i < p; ++i) {
        double c = std::sqrt(eigenvalues[i]) * rng.next_gaussian();
        for (int j = 0; j < p; ++j) row[j] += c * basis[i][j];
      }
    }
  }

  GroundTruth gt;
  gt.true_loadings = loadings;
  gt.eigenvalue_spec = eigenvalues;
  return {std::move(D), std::move(gt)};
}

std::pair<DataMatrix, GroundTruth> gen_spiked_covariance_default(
    int p, int n, std::uint64_t seed) {
  if (p < 20)
    throw std::invalid_argument(
        "gen_spiked_covariance_default: p must be at least 20");
  auto make_block = [&](int lo) {
    DenseVector v(p, 0.0);
    for (int i = lo; i < lo + 10; ++i) v[i] = 1.0 / std::sqrt(10.0);
    return make_sparse_unit(v);
  };
  std::vector<double> lam(p, 1.0);
  lam[0] = 400.0;
  lam[1] = 300.0;
  return gen_spiked_covariance(p, n, {make_block(0), make_block(10)}, lam,
                               seed);
}

std::pair<WeightedGraph, GroundTruth> gen_planted_subgraph(int n, int k,
                                                           double p_in,
                                                           double p_out,
                                                           std::uint64_t seed) {
  if (k < 1 || k > n)
    throw std::invalid_argument("gen_planted_subgraph: bad k");
  if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0))
    throw std::invalid_argument(
        "gen_planted_subgraph: need 0 <= p_out <= p_in <= 1");

  Rng rng = Rng(seed).stream("planted");
  // Random k-set by partial Fisher-Yates.
  IndexSet perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = 0; i < k; ++i)
    std::swap(perm[i], perm[i + rng.next_below(n - i)]);
  IndexSet planted(perm.begin(), perm.begin() + k);
  std::sort(planted.begin(), planted.end());
  std::vector<bool> in(n, false);
  for (int i : planted) in[i] = true;

  WeightedGraph g;
  g.n = n;
  g.directed = false;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      double prob = (in[u] && in[v]) ? p_in : p_out;
      if (rng.next_double() < prob) g.weights[{u, v}] = 1.0;
    }

  GroundTruth gt;
  gt.planted_vertices = planted;
  return {std::move(g), std::move(gt)};
}

}  // namespace tpower
