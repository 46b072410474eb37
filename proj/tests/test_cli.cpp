// End-to-end checks of the mql binary: spawns the real executable against the
// bundled model corpus and inspects exit codes and output.

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#ifndef MQL_BIN
#error "MQL_BIN must point at the mql executable"
#endif
#ifndef MQL_MODELS_DIR
#error "MQL_MODELS_DIR must point at the bundled models"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  std::string command = std::string(MQL_BIN) + " " + args + " 2>&1";
  std::array<char, 4096> buffer{};
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), n);
  }
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string model(const std::string& name) {
  return std::string(MQL_MODELS_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("simplicity on the bundled reflection model") {
  auto r = run("simplicity --model " + model("reflection.json") + " --json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["verdict"] == "not_simple");
  CHECK(j["condition_l"]["verdict"] == "certified_at_refinements");
  CHECK(j["strongly_absorbing_count"].get<long long>() == 51);
  CHECK(j["strongly_absorbing_count"].get<long long>() >= 50);
  CHECK(j.contains("approximation"));
}

TEST_CASE("analyze flags the three-cycle witness") {
  auto r = run("analyze --model " + model("three_cycle.json") + " --json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["condition_l"]["verdict"] == "fails");
  REQUIRE(j["condition_l"].contains("witness_cycle"));
  CHECK(j["condition_l"]["witness_cycle"].size() == 3);
}

TEST_CASE("dual on the bundled two-loop graph") {
  auto r = run("dual --model " + model("o2_graph.json") + " --json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["realization_verified"] == true);
  CHECK(j["k_theory_equal"] == true);
  CHECK(j["k_theory_base"]["display"] == "K0 = 0, K1 = 0");
}

TEST_CASE("ifs on the bundled tent system") {
  auto r = run("ifs --model " + model("tent_ifs.json") + " --json --maxlen 6");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["classification"] == "branch_overlap_only");
  CHECK(j["certificate"]["verdict"] == "holds");
  CHECK(j["isometry"]["max_deviation"].get<double>() <= 1e-9);
  CHECK(j["branch_points"].size() == 1);
}

TEST_CASE("ifs rejects the non-contractive reflection system") {
  auto r = run("ifs --model " + model("reflection.json"));
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("contraction") != std::string::npos);
}

TEST_CASE("simplicity needs a Markov model, not a quiver") {
  auto r = run("simplicity --model " + model("o2_graph.json"));
  CHECK(r.exit_code == 2);
}

TEST_CASE("uniform model is simple from the command line") {
  auto r = run("simplicity --model " + model("uniform4.json") + " --json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["verdict"] == "simple");
  CHECK(j["irreducible"] == true);
}

TEST_CASE("malformed and invalid inputs exit with status 2") {
  auto missing = run("analyze --model /no/such/model.json");
  CHECK(missing.exit_code == 2);

  std::string bad_path = "/tmp/mql_bad_model.json";
  {
    std::ofstream out(bad_path);
    out << "{\"kind\": \"finite_kernel\", \"states\": [\"a\"], \"kernel\": [[\"0.9\"]]}";
  }
  auto invalid = run("analyze --model " + bad_path);
  CHECK(invalid.exit_code == 2);
  CHECK(invalid.output.find("column 0") != std::string::npos);
  std::remove(bad_path.c_str());

  auto usage = run("analyze");
  CHECK(usage.exit_code == 2);
}

TEST_CASE("machine reports are byte-identical across runs") {
  std::string args = "simplicity --model " + model("finite_chain.json") + " --json --seed 42";
  auto first = run(args);
  auto second = run(args);
  REQUIRE(first.exit_code == 0);
  CHECK(first.output == second.output);

  std::string ifs_args = "ifs --model " + model("cantor_ifs.json") + " --json --seed 7";
  CHECK(run(ifs_args).output == run(ifs_args).output);
}

TEST_CASE("artifact exports land in the output directory") {
  std::string out_dir = "/tmp/mql_cli_out";
  auto r = run("dual --model " + model("o2_graph.json") + " --dot --out " + out_dir);
  REQUIRE(r.exit_code == 0);
  std::ifstream base(out_dir + "/base.dot");
  std::ifstream dual(out_dir + "/dual.dot");
  std::ifstream report(out_dir + "/report.json");
  CHECK(base.good());
  CHECK(dual.good());
  CHECK(report.good());

  auto ifs = run("ifs --model " + model("cantor_ifs.json") + " --csv --out " + out_dir);
  REQUIRE(ifs.exit_code == 0);
  std::ifstream csv(out_dir + "/attractor.csv");
  CHECK(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "point");
}

TEST_CASE("selftest passes end to end") {
  auto r = run("selftest");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("10/10") != std::string::npos);
}
