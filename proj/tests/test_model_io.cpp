#include <cstdio>
#include <fstream>

#include "doctest.h"

#include "mql/model_io.hpp"
#include "mql/selftest.hpp"

using namespace mql;
namespace st = mql::selftest;

#ifndef MQL_MODELS_DIR
#define MQL_MODELS_DIR "models"
#endif

namespace {

std::string models_dir() { return MQL_MODELS_DIR; }

MarkovModel model_of(const ParsedInput& input) { return std::get<MarkovModel>(input); }

}  // namespace

TEST_CASE("bundled finite kernel loads as the two-state chain") {
  auto parsed = parse_model_file(models_dir() + "/finite_chain.json");
  MarkovModel model = model_of(parsed);
  const auto& kernel = std::get<FiniteKernel>(model);
  CHECK(kernel.states == std::vector<std::string>{"x1", "x2"});
  CHECK(kernel == st::chain_kernel());
}

TEST_CASE("bundled tent system loads with two affine maps") {
  auto parsed = parse_model_file(models_dir() + "/tent_ifs.json");
  MarkovModel model = model_of(parsed);
  const auto& system = std::get<MapSystem>(model);
  REQUIRE(system.maps.size() == 2);
  CHECK(std::get<AffineMap>(system.maps[0]) == AffineMap{Rational(1, 2), Rational(0)});
  CHECK(std::get<AffineMap>(system.maps[1]) == AffineMap{Rational(-1, 2), Rational(1)});
  CHECK(space_mode(system.space) == InteriorMode::Continuum);
}

TEST_CASE("bundled quiver loads with named edges") {
  auto parsed = parse_model_file(models_dir() + "/o2_graph.json");
  const auto& q = std::get<Quiver>(parsed);
  CHECK(q == st::o2_quiver());
}

TEST_CASE("a bad column sum is rejected with the offending column") {
  std::string text = R"({
    "kind": "finite_kernel",
    "states": ["a", "b"],
    "kernel": [["1", "2/5"], ["0", "1/2"]]
  })";
  CHECK_THROWS_WITH_AS(parse_model_text(text), "column 1 sums to 9/10, expected 1",
                       validation_error);
}

TEST_CASE("parse errors carry the failing field") {
  CHECK_THROWS_AS(parse_model_text("not json at all"), parse_error);
  CHECK_THROWS_AS(parse_model_text(R"({"kind": "nonsense"})"), parse_error);
  CHECK_THROWS_AS(parse_model_text(R"({"states": []})"), parse_error);
  CHECK_THROWS_AS(parse_model_file("/no/such/file.json"), parse_error);

  std::string bad_rational = R"({
    "kind": "finite_kernel",
    "states": ["a"],
    "kernel": [["one"]]
  })";
  CHECK_THROWS_AS(parse_model_text(bad_rational), parse_error);
}

TEST_CASE("the transpose flag accepts row-stochastic input") {
  std::string text = R"({
    "kind": "finite_kernel",
    "states": ["x1", "x2"],
    "kernel": [["1", "0"], ["1/2", "1/2"]],
    "transpose": true
  })";
  auto parsed = parse_model_text(text);
  CHECK(std::get<FiniteKernel>(model_of(parsed)) == st::chain_kernel());
}

TEST_CASE("map-system weights default to uniform") {
  std::string text = R"({
    "kind": "map_system",
    "space": {"type": "interval_grid", "lower": "0", "upper": "1", "points": 11},
    "maps": [
      {"slope": "1/2", "intercept": "0"},
      {"slope": "-1/2", "intercept": "1"}
    ]
  })";
  MarkovModel model = model_of(parse_model_text(text));
  const auto& system = std::get<MapSystem>(model);
  CHECK(system.weights == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
}

TEST_CASE("serialize/parse round trip is exact on every bundled model") {
  for (const char* name :
       {"finite_chain.json", "three_cycle.json", "tent_ifs.json", "cantor_ifs.json",
        "reflection.json", "uniform4.json", "cycle_homeomorphism.json"}) {
    auto parsed = parse_model_file(models_dir() + "/" + name);
    MarkovModel model = model_of(parsed);
    auto reparsed = parse_model_text(serialize_model(model));
    CHECK(model_of(reparsed) == model);
  }
  auto quiver_parsed = parse_model_file(models_dir() + "/o2_graph.json");
  const auto& q = std::get<Quiver>(quiver_parsed);
  CHECK(std::get<Quiver>(parse_model_text(serialize_quiver(q))) == q);
}

TEST_CASE("round trip is exact on random kernels and quivers") {
  std::uint64_t state = 2024;
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(state % 6);
    MarkovModel model(st::random_kernel(state, n, false));
    CHECK(std::get<MarkovModel>(parse_model_text(serialize_model(model))) == model);

    Quiver g = st::random_multigraph(state, 2, 5, 3);
    CHECK(std::get<Quiver>(parse_model_text(serialize_quiver(g))) == g);
  }
}
