#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

using json = nlohmann::ordered_json;

namespace {

std::string g_cli;

int run_cli(const std::string& args, std::string* stderr_out = nullptr) {
  std::string cmd = g_cli + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
  int status = std::system(cmd.c_str());
  if (stderr_out) {
    std::ifstream in("cli_stderr.txt");
    std::ostringstream ss;
    ss << in.rdbuf();
    *stderr_out = ss.str();
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

struct Cleanup {
  std::vector<std::string> paths;
  ~Cleanup() {
    for (const auto& p : paths) std::remove(p.c_str());
  }
};

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("eig") == 2);             // missing required flags
  CHECK(run_cli("eig --bogus 1") == 2);   // unknown flag
  CHECK(run_cli("nonsense --k 1") == 2);  // unknown subcommand

  std::string err;
  CHECK(run_cli("eig --input missing.mtx --k 1", &err) == 2);
  json rec = json::parse(err);
  CHECK(rec["error"] == "io");
  CHECK(rec.contains("message"));
}

TEST_CASE("parse errors exit with code 2 and name the line") {
  Cleanup c{{"cli_bad.mtx"}};
  write_file("cli_bad.mtx", "garbage header\n1 1 0\n");
  std::string err;
  CHECK(run_cli("eig --input cli_bad.mtx --k 1", &err) == 2);
  json rec = json::parse(err);
  CHECK(rec["error"] == "parse");
  CHECK(rec["message"].get<std::string>().find("line") != std::string::npos);
}

TEST_CASE("eig happy path emits the full result schema") {
  Cleanup c{{"cli_diag.mtx", "cli_eig.json"}};
  write_file("cli_diag.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "3 3 3\n1 1 3.0\n2 2 2.0\n3 3 1.0\n");
  CHECK(run_cli("eig --input cli_diag.mtx --k 1 --output cli_eig.json") == 0);
  json j = read_json("cli_eig.json");
  CHECK(j["task"] == "eig");
  for (const char* key : {"config", "objective", "support", "iterations",
                          "converged", "shift_used", "timing_ms",
                          "library_version"})
    CHECK(j.contains(key));
  CHECK(j["config"]["k"] == 1);
  CHECK(j["config"].contains("seed"));
  CHECK(j["objective"].get<double>() == doctest::Approx(3.0));
  CHECK(j["support"] == json::array({0}));
  CHECK(j["converged"] == true);
}

TEST_CASE("solver failure exits with code 1") {
  Cleanup c{{"cli_zero.mtx"}};
  write_file("cli_zero.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "2 2 0\n");
  std::string err;
  CHECK(run_cli("eig --input cli_zero.mtx --k 1 --shift none", &err) == 1);
  json rec = json::parse(err);
  CHECK(rec["error"] == "solver");
}

TEST_CASE("same seed gives identical output except timing") {
  Cleanup c{{"cli_diag2.mtx", "cli_a.json", "cli_b.json"}};
  write_file("cli_diag2.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "4 4 4\n1 1 4.0\n2 2 3.0\n3 3 2.0\n4 4 1.0\n");
  std::string cmd =
      "eig --input cli_diag2.mtx --k 2 --init diag-set --seed 7 --output ";
  CHECK(run_cli(cmd + "cli_a.json") == 0);
  CHECK(run_cli(cmd + "cli_b.json") == 0);
  json a = read_json("cli_a.json");
  json b = read_json("cli_b.json");
  a.erase("timing_ms");
  b.erase("timing_ms");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("spca reports per-component records and proportion") {
  Cleanup c{{"cli_spca.mtx", "cli_spca.json"}};
  write_file("cli_spca.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "4 4 4\n1 1 4.0\n2 2 3.0\n3 3 2.0\n4 4 1.0\n");
  CHECK(run_cli("spca --input cli_spca.mtx --cardinalities 1-1 "
                "--output cli_spca.json") == 0);
  json j = read_json("cli_spca.json");
  CHECK(j["task"] == "spca");
  REQUIRE(j["components"].size() == 2);
  CHECK(j["components"][0]["support"] == json::array({0}));
  CHECK(j["components"][1]["support"] == json::array({1}));
  CHECK(j["proportion_explained"].get<double>() == doctest::Approx(0.7));
}

TEST_CASE("dks single, sequential, and comparison-table modes") {
  Cleanup c{{"cli_graph.txt", "cli_dks.json", "cli_seq.json", "cli_all.json"}};
  // Two disjoint triangles.
  write_file("cli_graph.txt", "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n");

  CHECK(run_cli("dks --input cli_graph.txt --k 3 --output cli_dks.json") == 0);
  json j = read_json("cli_dks.json");
  CHECK(j["density"].get<double>() == doctest::Approx(2.0));
  CHECK(j["support"].size() == 3);

  CHECK(run_cli("dks --input cli_graph.txt --k 3 --rounds 2 "
                "--output cli_seq.json") == 0);
  json s = read_json("cli_seq.json");
  REQUIRE(s["rounds"].size() == 2);
  CHECK(s["total_density"].get<double>() == doctest::Approx(4.0));
  CHECK(s["truncated"] == false);

  CHECK(run_cli("dks --input cli_graph.txt --k 3 --method all "
                "--output cli_all.json") == 0);
  json t = read_json("cli_all.json");
  for (const char* m : {"tpower", "feige", "ravi", "relaxed"})
    CHECK(t["results"].contains(m));
}

TEST_CASE("verify runs the lemma suites") {
  Cleanup c{{"cli_verify.json"}};
  CHECK(run_cli("verify --trials 25 --seed 3 --output cli_verify.json") == 0);
  json j = read_json("cli_verify.json");
  CHECK(j["pass"] == true);
  for (const char* s : {"weyl", "perturbation", "power_progress", "truncation"})
    CHECK(j["suites"][s]["violations"] == 0);
}

TEST_CASE("synth writes instance files plus ground truth") {
  Cleanup c{{"cli_synth.txt", "cli_synth.json"}};
  CHECK(run_cli("synth --kind planted --p 20 --k 5 --p-in 1.0 --p-out 0.0 "
                "--seed 9 --output cli_synth") == 0);
  json j = read_json("cli_synth.json");
  CHECK(j["ground_truth"]["planted_vertices"].size() == 5);
  std::ifstream edges("cli_synth.txt");
  CHECK(edges.good());
  int lines = 0;
  std::string line;
  while (std::getline(edges, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 10);  // C(5,2) clique edges

  CHECK(run_cli("synth --kind planted --p 20 --k 5") == 2);  // needs --output
}

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[argc - 1];
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv);
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary>\n");
    return 1;
  }
  return ctx.run();
}
