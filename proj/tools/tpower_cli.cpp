#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpower/dks.hpp"
#include "tpower/errors.hpp"
#include "tpower/io.hpp"
#include "tpower/matrix.hpp"
#include "tpower/rng.hpp"
#include "tpower/solver.hpp"
#include "tpower/spca.hpp"
#include "tpower/theory.hpp"
#include "tpower/version.hpp"

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int worker_count() {
  if (const char* env = std::getenv("TPOWER_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw tpower::IoError("cannot open output file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw tpower::IoError("write failed: " + path);
}

struct SolverFlags {
  double tol = 1e-4;
  int max_iter = 1000;
  std::string init = "diag";
  std::string shift = "auto";
  std::uint64_t seed = 0;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--tol", f.tol, "objective-change stopping tolerance");
  cmd->add_option("--max-iter", f.max_iter, "iteration cap");
  cmd->add_option("--init", f.init, "init scheme")
      ->check(CLI::IsMember({"diag", "diag-set", "warm", "backward"}));
  cmd->add_option("--shift", f.shift, "spectral shift policy")
      ->check(CLI::IsMember({"none", "auto"}));
  cmd->add_option("--seed", f.seed, "master seed");
}

tpower::SolveConfig to_config(const SolverFlags& f, int k) {
  tpower::SolveConfig cfg;
  cfg.k = k;
  cfg.tol = f.tol;
  cfg.max_iter = f.max_iter;
  cfg.seed = f.seed;
  cfg.shift_policy = f.shift == "none" ? tpower::ShiftPolicy::none
                                       : tpower::ShiftPolicy::automatic;
  if (f.init == "diag")
    cfg.init.kind = tpower::InitKind::top_diagonal_single;
  else if (f.init == "diag-set")
    cfg.init.kind = tpower::InitKind::top_diagonal_indicator;
  else if (f.init == "warm")
    cfg.init.kind = tpower::InitKind::warm_start;
  else
    cfg.init.kind = tpower::InitKind::backward_elimination;
  return cfg;
}

json config_json(const SolverFlags& f, const json& extra) {
  json c;
  c["tol"] = f.tol;
  c["max_iter"] = f.max_iter;
  c["init"] = f.init;
  c["shift"] = f.shift;
  c["seed"] = f.seed;
  for (auto& [key, val] : extra.items()) c[key] = val;
  return c;
}

tpower::SymmetricMatrix load_input(const std::string& path,
                                   const std::string& kind, bool directed) {
  if (kind == "covariance") return tpower::load_matrix_market(path);
  if (kind == "data") {
    tpower::DataMatrix d = tpower::load_csv_data(path, false);
    return tpower::covariance_from_data(d, true);
  }
  return tpower::adjacency_matrix(tpower::load_edge_list(path, directed));
}

std::vector<int> parse_cardinalities(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, '-')) {
    if (tok.empty()) throw CLI::ValidationError("--cardinalities", "empty part");
    out.push_back(std::stoi(tok));
  }
  if (out.empty())
    throw CLI::ValidationError("--cardinalities", "no cardinalities given");
  return out;
}

int run_eig(const std::string& input, const std::string& kind, bool directed,
            int k, const SolverFlags& flags, const std::string& output) {
  auto t0 = Clock::now();
  tpower::SymmetricMatrix A = load_input(input, kind, directed);
  tpower::SparseEigenResult r = tpower::tpower(A, to_config(flags, k));

  json j;
  j["task"] = "eig";
  j["config"] = config_json(flags, {{"input", input},
                                    {"input_kind", kind},
                                    {"k", k}});
  j["objective"] = r.objective;
  j["support"] = r.x.support;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["shift_used"] = r.shift_used;
  j["timing_ms"] = ms_since(t0);
  j["library_version"] = tpower::kLibraryVersion;
  emit(j, output);
  return 0;
}

int run_spca(const std::string& input, const std::string& kind,
             const std::string& cards, const SolverFlags& flags,
             const std::string& output) {
  auto t0 = Clock::now();
  std::vector<int> ks = parse_cardinalities(cards);
  tpower::SymmetricMatrix Sigma = load_input(input, kind, false);
  tpower::SpcaResult r =
      tpower::spca_extract(Sigma, ks, to_config(flags, ks.front()));

  json comps = json::array();
  for (std::size_t c = 0; c < r.loadings.size(); ++c) {
    const auto& pc = r.per_component_results[c];
    json e;
    e["cardinality"] = ks[c];
    e["objective"] = pc.objective;
    e["support"] = pc.x.support;
    e["loadings"] = pc.x.vector;
    e["iterations"] = pc.iterations;
    e["converged"] = pc.converged;
    e["adjusted_variance"] = r.adjusted_variance[c];
    comps.push_back(std::move(e));
  }
  json j;
  j["task"] = "spca";
  j["config"] = config_json(flags, {{"input", input},
                                    {"input_kind", kind},
                                    {"cardinalities", ks}});
  j["components"] = std::move(comps);
  j["proportion_explained"] = r.proportion_explained;
  j["timing_ms"] = ms_since(t0);
  j["library_version"] = tpower::kLibraryVersion;
  emit(j, output);
  return 0;
}

json dks_record(const tpower::DksResult& r) {
  json e;
  e["vertices"] = r.vertices;
  e["density"] = r.density;
  e["iterations"] = r.iterations;
  e["converged"] = r.converged;
  e["shift_used"] = r.final_shift;
  return e;
}

int run_dks(const std::string& input, bool directed, int k,
            const std::string& method, int rounds, const SolverFlags& flags,
            const std::string& output) {
  auto t0 = Clock::now();
  tpower::SymmetricMatrix W =
      tpower::adjacency_matrix(tpower::load_edge_list(input, directed));

  json j;
  j["task"] = "dks";
  j["config"] = config_json(flags, {{"input", input},
                                    {"k", k},
                                    {"method", method},
                                    {"rounds", rounds}});

  auto method_of = [](const std::string& m) {
    if (m == "tpower") return tpower::DksMethod::tpower;
    if (m == "feige") return tpower::DksMethod::feige;
    if (m == "ravi") return tpower::DksMethod::ravi;
    return tpower::DksMethod::relaxed;
  };

  tpower::SolveConfig cfg = to_config(flags, k);
  if (method == "all") {
    json table = json::object();
    for (const char* m : {"tpower", "feige", "ravi", "relaxed"}) {
      tpower::DksResult r = tpower::solve_dks(W, k, method_of(m), cfg);
      json e = dks_record(r);
      table[m] = std::move(e);
    }
    j["results"] = std::move(table);
  } else if (rounds > 1) {
    tpower::SequentialDksResult seq =
        tpower::sequential_dks(W, k, rounds, method_of(method), cfg);
    json arr = json::array();
    for (const auto& r : seq.rounds) arr.push_back(dks_record(r));
    j["rounds"] = std::move(arr);
    j["total_density"] = seq.total_density;
    j["truncated"] = seq.truncated;
  } else {
    tpower::DksResult r = tpower::solve_dks(W, k, method_of(method), cfg);
    j["density"] = r.density;
    j["support"] = r.vertices;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["shift_used"] = r.final_shift;
  }
  j["timing_ms"] = ms_since(t0);
  j["library_version"] = tpower::kLibraryVersion;
  emit(j, output);
  return 0;
}

int run_synth(const std::string& kind, int p, int n, int k, double p_in,
              double p_out, std::uint64_t seed, const std::string& output) {
  if (output.empty())
    throw CLI::ValidationError("--output", "synth needs an output prefix");

  json truth;
  if (kind == "spiked") {
    auto [data, gt] = tpower::gen_spiked_covariance_default(p, n, seed);
    std::ofstream csv(output + ".csv");
    if (!csv) throw tpower::IoError("cannot open " + output + ".csv");
    for (int i = 0; i < data.n; ++i) {
      for (int j = 0; j < data.p; ++j) {
        if (j) csv << ",";
        csv << data.at(i, j);
      }
      csv << "\n";
    }
    json loadings = json::array();
    for (const auto& l : gt.true_loadings)
      loadings.push_back({{"support", l.support}, {"vector", l.vector}});
    truth["true_loadings"] = std::move(loadings);
    truth["eigenvalue_spec"] = gt.eigenvalue_spec;
  } else {
    auto [graph, gt] = tpower::gen_planted_subgraph(p, k, p_in, p_out, seed);
    std::ofstream edges(output + ".txt");
    if (!edges) throw tpower::IoError("cannot open " + output + ".txt");
    for (const auto& [key, w] : graph.weights)
      if (key.first < key.second)
        edges << key.first << " " << key.second << " " << w << "\n";
    truth["planted_vertices"] = gt.planted_vertices;
  }

  json j;
  j["task"] = "synth";
  j["config"] = {{"kind", kind}, {"p", p},       {"n", n},
                 {"k", k},       {"p_in", p_in}, {"p_out", p_out},
                 {"seed", seed}};
  j["ground_truth"] = std::move(truth);
  j["library_version"] = tpower::kLibraryVersion;
  emit(j, output + ".json");
  return 0;
}

// Theory report: random-draw suites for the four inequality checkers.
int run_verify(int trials, std::uint64_t seed, const std::string& output) {
  auto t0 = Clock::now();
  tpower::Rng master(seed);

  auto random_symmetric = [](tpower::Rng& r, int p, double scale) {
    std::vector<double> m(static_cast<std::size_t>(p) * p);
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) {
        double v = scale * r.next_gaussian();
        m[i * (std::size_t)p + j] = v;
        m[j * (std::size_t)p + i] = v;
      }
    return tpower::SymmetricMatrix::from_dense(p, m);
  };

  json report;
  {
    tpower::Rng r = master.stream("weyl");
    int fails = 0;
    for (int t = 0; t < trials; ++t) {
      int p = 3 + static_cast<int>(r.next_below(6));
      if (!tpower::check_weyl(random_symmetric(r, p, 1.0),
                              random_symmetric(r, p, 1.0)))
        ++fails;
    }
    report["weyl"] = {{"draws", trials}, {"violations", fails}};
  }
  {
    tpower::Rng r = master.stream("perturbation");
    int fails = 0, skipped = 0;
    for (int t = 0; t < trials; ++t) {
      int p = 6;
      tpower::DenseVector xbar(p, 0.0);
      xbar[0] = xbar[1] = xbar[2] = 1.0 / std::sqrt(3.0);
      std::vector<double> ab(static_cast<std::size_t>(p) * p, 0.0);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) ab[i * (std::size_t)p + j] = 2.0 * xbar[i] * xbar[j];
      tpower::SymmetricMatrix A_bar = tpower::SymmetricMatrix::from_dense(p, ab);
      tpower::SymmetricMatrix E = random_symmetric(r, p, 0.02);
      tpower::IndexSet F = {0, 1, 2, 3};
      try {
        if (!tpower::check_perturbation_lemma(A_bar, E, F)) ++fails;
      } catch (const tpower::PreconditionViolation&) {
        ++skipped;
      }
    }
    report["perturbation"] = {
        {"draws", trials}, {"violations", fails}, {"skipped", skipped}};
  }
  {
    tpower::Rng r = master.stream("progress");
    int fails = 0, skipped = 0;
    for (int t = 0; t < trials; ++t) {
      int p = 4 + static_cast<int>(r.next_below(4));
      tpower::SymmetricMatrix A = random_symmetric(r, p, 1.0);
      tpower::DenseVector x(p);
      for (double& v : x) v = r.next_gaussian();
      tpower::normalize(x);
      try {
        if (!tpower::check_power_progress(A, x)) ++fails;
      } catch (const tpower::PreconditionViolation&) {
        ++skipped;
      }
    }
    report["power_progress"] = {
        {"draws", trials}, {"violations", fails}, {"skipped", skipped}};
  }
  {
    tpower::Rng r = master.stream("truncation");
    int fails = 0;
    for (int t = 0; t < trials; ++t) {
      int p = 10;
      tpower::DenseVector y(p), xbar(p, 0.0);
      for (double& v : y) v = r.next_gaussian();
      tpower::normalize(y);
      xbar[r.next_below(p)] = 1.0;
      if (!tpower::check_truncation_lemma(y, xbar, 3)) ++fails;
    }
    report["truncation"] = {{"draws", trials}, {"violations", fails}};
  }

  bool all_pass = true;
  for (auto& [name, suite] : report.items())
    if (suite["violations"].get<int>() != 0) all_pass = false;

  json j;
  j["task"] = "verify";
  j["config"] = {{"trials", trials}, {"seed", seed}};
  j["suites"] = std::move(report);
  j["pass"] = all_pass;
  j["timing_ms"] = ms_since(t0);
  j["library_version"] = tpower::kLibraryVersion;
  emit(j, output);
  return all_pass ? 0 : 1;
}

int run_bench(int p, int n, double k_frac, int trials,
              const SolverFlags& flags, const std::string& output) {
  auto t0 = Clock::now();
  int k = std::max(1, static_cast<int>(std::lround(k_frac * p)));

  struct Trial {
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    double ms = 0.0;
  };
  std::vector<Trial> results(trials);

  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= trials) break;
      auto tick = Clock::now();
      auto [data, gt] = tpower::gen_spiked_covariance_default(
          p, n, tpower::Rng(flags.seed).stream(t).next_u64());
      tpower::SymmetricMatrix Sigma =
          tpower::covariance_from_data(data, true, true);
      tpower::SparseEigenResult r = tpower::tpower(Sigma, to_config(flags, k));
      results[t] = {r.objective, r.iterations, r.converged, ms_since(tick)};
    }
  };
  int threads = std::min(worker_count(), trials);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  json arr = json::array();
  double mean_ms = 0.0;
  for (const auto& r : results) {
    arr.push_back({{"objective", r.objective},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"solve_ms", r.ms}});
    mean_ms += r.ms / trials;
  }
  json j;
  j["task"] = "bench";
  j["config"] = config_json(flags, {{"p", p},
                                    {"n", n},
                                    {"k_frac", k_frac},
                                    {"k", k},
                                    {"trials", trials},
                                    {"threads", threads}});
  j["trials"] = std::move(arr);
  j["mean_solve_ms"] = mean_ms;
  j["timing_ms"] = ms_since(t0);
  j["library_version"] = tpower::kLibraryVersion;
  emit(j, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse eigenvalue solvers by truncated power iteration"};
  app.require_subcommand(1);

  std::string input, input_kind = "covariance", output, cards, method = "tpower";
  std::string synth_kind = "spiked";
  bool directed = false;
  int k = 1, rounds = 1, trials = 1;
  int p = 100, n = 50;
  double p_in = 0.8, p_out = 0.05, k_frac = 0.1;
  SolverFlags flags;

  auto* eig = app.add_subcommand("eig", "one k-sparse dominant eigenvector");
  eig->add_option("--input", input)->required();
  eig->add_option("--input-kind", input_kind)
      ->check(CLI::IsMember({"covariance", "data", "graph"}));
  eig->add_flag("--directed", directed, "graph input lists directed arcs");
  eig->add_option("--k", k)->required();
  eig->add_option("--output", output);
  add_solver_flags(eig, flags);

  auto* spca = app.add_subcommand("spca", "multi-component sparse PCA");
  spca->add_option("--input", input)->required();
  spca->add_option("--input-kind", input_kind)
      ->check(CLI::IsMember({"covariance", "data"}));
  spca->add_option("--cardinalities", cards, "per-component k, e.g. 7-2-1")
      ->required();
  spca->add_option("--output", output);
  add_solver_flags(spca, flags);

  auto* dks = app.add_subcommand("dks", "densest k-subgraph");
  dks->add_option("--input", input)->required();
  dks->add_flag("--directed", directed);
  dks->add_option("--k", k)->required();
  dks->add_option("--method", method)
      ->check(CLI::IsMember({"tpower", "feige", "ravi", "relaxed", "all"}));
  dks->add_option("--rounds", rounds, "sequential extract-and-remove rounds");
  dks->add_option("--output", output);
  add_solver_flags(dks, flags);

  auto* synth = app.add_subcommand("synth", "emit a generated instance");
  synth->add_option("--kind", synth_kind)
      ->check(CLI::IsMember({"spiked", "planted"}));
  synth->add_option("--p", p, "dimension (spiked) / vertex count (planted)");
  synth->add_option("--n", n, "sample count (spiked)");
  synth->add_option("--k", k, "planted set size");
  synth->add_option("--p-in", p_in);
  synth->add_option("--p-out", p_out);
  synth->add_option("--seed", flags.seed);
  synth->add_option("--output", output, "output path prefix")->required();

  auto* verify = app.add_subcommand("verify", "run the theory check suites");
  verify->add_option("--trials", trials);
  verify->add_option("--seed", flags.seed);
  verify->add_option("--output", output);

  auto* bench = app.add_subcommand("bench", "timed solves on spiked instances");
  bench->add_option("--p", p);
  bench->add_option("--n", n);
  bench->add_option("--k-frac", k_frac);
  bench->add_option("--trials", trials);
  bench->add_option("--output", output);
  add_solver_flags(bench, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  auto error_record = [](const char* type, const std::string& what) {
    json err = {{"error", type}, {"message", what}};
    std::cerr << err.dump() << "\n";
  };

  try {
    if (eig->parsed())
      return run_eig(input, input_kind, directed, k, flags, output);
    if (spca->parsed()) return run_spca(input, input_kind, cards, flags, output);
    if (dks->parsed())
      return run_dks(input, directed, k, method, rounds, flags, output);
    if (synth->parsed())
      return run_synth(synth_kind, p, n, k, p_in, p_out, flags.seed, output);
    if (verify->parsed()) return run_verify(trials, flags.seed, output);
    if (bench->parsed()) return run_bench(p, n, k_frac, trials, flags, output);
  } catch (const CLI::ValidationError& e) {
    error_record("usage", e.what());
    return 2;
  } catch (const tpower::ParseError& e) {
    error_record("parse", std::string(e.what()) + " (line " +
                              std::to_string(e.line) + ")");
    return 2;
  } catch (const tpower::IoError& e) {
    error_record("io", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    error_record("usage", e.what());
    return 2;
  } catch (const std::exception& e) {
    error_record("solver", e.what());
    return 1;
  }
  return 2;
}
