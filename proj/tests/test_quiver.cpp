#include <algorithm>
#include <set>

#include "doctest.h"

#include "mql/quiver.hpp"
#include "mql/selftest.hpp"

using namespace mql;
namespace st = mql::selftest;

TEST_CASE("quiver of the chain kernel has three weighted edges") {
  Quiver q = build_quiver(MarkovModel(st::chain_kernel()));
  CHECK(q.vertex_count() == 2);
  REQUIRE(q.edge_count() == 3);
  std::multiset<std::string> weights;
  for (const auto& e : q.edges) weights.insert(e.weight.to_string());
  CHECK(weights == std::multiset<std::string>{"1", "1/2", "1/2"});
  CHECK_NOTHROW(q.validate());
}

TEST_CASE("quiver of a point-mass cycle is the cycle graph") {
  Quiver q = build_quiver(MarkovModel(st::cycle_kernel(3)));
  CHECK(q.vertex_count() == 3);
  REQUIRE(q.edge_count() == 3);
  for (const auto& e : q.edges) CHECK(e.weight == Rational(1));
}

TEST_CASE("quiver of a 4-state uniform kernel is complete with weight 1/4") {
  Quiver q = build_quiver(MarkovModel(st::uniform_model(4)));
  CHECK(q.edge_count() == 16);
  for (const auto& e : q.edges) CHECK(e.weight == Rational(1, 4));
}

TEST_CASE("unital models give quivers without sources") {
  std::uint64_t state = 17;
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(state % 6);
    Quiver q = build_quiver(MarkovModel(st::random_kernel(state, n, false)));
    auto in = q.in_edges();
    for (const auto& incoming : in) CHECK_FALSE(incoming.empty());
    CHECK_NOTHROW(q.validate());
  }
}

TEST_CASE("vertex classification separates sinks from regular vertices") {
  Quiver cycle = build_quiver(MarkovModel(st::cycle_kernel(3)));
  auto c = classify_vertices(cycle);
  CHECK(c.sinks.empty());
  CHECK(c.regular == IndexSet{0, 1, 2});
  CHECK(c.infinite_emitters.empty());

  // p(.|y) = point mass at x2 for every y: x1 emits nothing
  FiniteKernel k;
  k.states = {"x1", "x2"};
  k.kernel = {{Rational(0), Rational(0)}, {Rational(1), Rational(1)}};
  auto c2 = classify_vertices(build_quiver(MarkovModel(k)));
  CHECK(c2.sinks == IndexSet{0});
  CHECK(c2.regular == IndexSet{1});

  Quiver tent = build_quiver(MarkovModel(st::tent_system(21)));
  CHECK(classify_vertices(tent).sinks.empty());
}

TEST_CASE("reachability by exact path length") {
  Quiver chain = build_quiver(MarkovModel(st::chain_kernel()));
  CHECK(reachable(chain, 0, 1, 2));

  Quiver cycle = build_quiver(MarkovModel(st::cycle_kernel(3)));
  CHECK(reachable(cycle, 0, 0, 3));
  CHECK_FALSE(reachable(cycle, 0, 0, 2));
  CHECK_THROWS_AS(reachable(cycle, 0, 0, 0), precondition_error);
}

TEST_CASE("reachability along cograph compositions on a Cantor grid") {
  MapSystem cantor = st::cantor_system(28);
  MarkovModel model(cantor);
  Quiver q = build_quiver(model);
  const auto& grid = std::get<IntervalGridSpace>(cantor.space);
  for (int y : {0, 9, 14, 27}) {
    // edges run from f_i(y) to y, so the snapped image of f_1 o f_2 reaches y
    // through the intermediate vertex snap(f_2(y)) in exactly two steps
    int mid = grid.snap(std::get<AffineMap>(cantor.maps[1])(grid.point(y)));
    int src = grid.snap(std::get<AffineMap>(cantor.maps[0])(grid.point(mid)));
    CHECK(reachable(q, src, y, 2));
  }
}

TEST_CASE("enumerate_paths agrees with reachable") {
  std::uint64_t state = 23;
  for (int trial = 0; trial < 10; ++trial) {
    Quiver q = build_quiver(MarkovModel(st::random_kernel(state, 4, false)));
    for (int v = 0; v < 4; ++v) {
      for (int w = 0; w < 4; ++w) {
        for (int len = 1; len <= 4; ++len) {
          auto paths = enumerate_paths(q, v, w, len);
          CHECK(reachable(q, v, w, len) == !paths.empty());
          for (const auto& p : paths) {
            CHECK(p.source == v);
            CHECK(p.range == w);
            CHECK(p.edges.size() == static_cast<std::size_t>(len));
            CHECK(p.is_loop == (v == w));
          }
        }
      }
    }
  }
}

TEST_CASE("loops without exit") {
  // single vertex with one loop
  FiniteKernel loop;
  loop.states = {"v"};
  loop.kernel = {{Rational(1)}};
  Quiver lq = build_quiver(MarkovModel(loop));
  CHECK(loops_without_exit(lq, 1) == IndexSet{0});

  // reflection system on an odd grid: only the midpoint loop has no exit
  Quiver rq = build_quiver(MarkovModel(st::reflection_system(11)));
  CHECK(loops_without_exit(rq, rq.vertex_count()) == IndexSet{5});
  CHECK(rq.vertices[5] == "0.5");

  Quiver uq = build_quiver(MarkovModel(st::uniform_model(4)));
  CHECK(loops_without_exit(uq, 4).empty());
}

TEST_CASE("no-exit cycles match a brute-force cycle scan") {
  std::uint64_t state = 31;
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(state % 5);
    Quiver q = build_quiver(MarkovModel(st::random_kernel(state, n, false)));
    auto out = q.out_edges();
    // brute force: walk every simple cycle via DFS over vertices
    std::set<int> expected;
    std::vector<int> stack;
    auto dfs = [&](auto&& self, int start, int at) -> void {
      for (int e : out[static_cast<std::size_t>(at)]) {
        int next = q.edges[static_cast<std::size_t>(e)].range;
        if (next == start) {
          bool exitless = true;
          for (int v : stack) exitless &= out[static_cast<std::size_t>(v)].size() == 1;
          if (exitless) expected.insert(stack.begin(), stack.end());
        } else if (next > start &&
                   std::find(stack.begin(), stack.end(), next) == stack.end()) {
          stack.push_back(next);
          self(self, start, next);
          stack.pop_back();
        }
      }
    };
    for (int v = 0; v < n; ++v) {
      stack.assign(1, v);
      dfs(dfs, v, v);
    }
    IndexSet got = loops_without_exit(q, n);
    CHECK(got == IndexSet(expected.begin(), expected.end()));
  }
}

TEST_CASE("condition (L) on discrete quivers") {
  auto cycle_report = condition_l(build_quiver(MarkovModel(st::cycle_kernel(3))));
  CHECK(cycle_report.verdict == ConditionLVerdict::Fails);
  CHECK(cycle_report.witness_cycle == std::vector<int>{0, 1, 2});

  auto uniform_report = condition_l(MarkovModel(st::uniform_model(4)));
  CHECK(uniform_report.verdict == ConditionLVerdict::Holds);
}

TEST_CASE("condition (L) certificate on refined grids") {
  auto report = condition_l(MarkovModel(st::reflection_system(11)), 3);
  CHECK(report.verdict == ConditionLVerdict::CertifiedAtRefinements);
  CHECK(report.grid_sizes == std::vector<int>{11, 101, 1001});
  CHECK(report.base_point_counts == std::vector<long long>{1, 1, 1});
  CHECK_FALSE(report.ambiguous);

  // single map x -> x on a continuum grid: every grid point is a no-exit
  // loop, so the count grows with the grid and condition (L) fails
  MapSystem identity;
  identity.space = IntervalGridSpace{Rational(0), Rational(1), 11, InteriorMode::Continuum};
  identity.maps.emplace_back(AffineMap{Rational(1), Rational(0)});
  identity.weights = {Rational(1)};
  auto failing = condition_l(MarkovModel(identity), 3);
  CHECK(failing.verdict == ConditionLVerdict::Fails);
  CHECK_FALSE(failing.ambiguous);
  CHECK(failing.base_point_counts == std::vector<long long>{11, 101, 1001});
}

TEST_CASE("refinement-count classification covers every branch") {
  using V = std::vector<long long>;
  CHECK(classify_refinement_counts(V{0, 0, 0}).verdict == ConditionLVerdict::Holds);
  CHECK(classify_refinement_counts(V{1, 1, 1}).verdict ==
        ConditionLVerdict::CertifiedAtRefinements);
  // parity artifact: a base point appearing once grids gain a midpoint
  CHECK(classify_refinement_counts(V{0, 1, 1}).verdict ==
        ConditionLVerdict::CertifiedAtRefinements);
  CHECK(classify_refinement_counts(V{5, 3, 3}).verdict ==
        ConditionLVerdict::CertifiedAtRefinements);

  auto growing = classify_refinement_counts(V{11, 101, 1001});
  CHECK(growing.verdict == ConditionLVerdict::Fails);
  CHECK_FALSE(growing.ambiguous);

  auto sudden = classify_refinement_counts(V{0, 0, 5});
  CHECK(sudden.verdict == ConditionLVerdict::Fails);
  CHECK_FALSE(sudden.ambiguous);

  auto creeping = classify_refinement_counts(V{2, 2, 3});
  CHECK(creeping.verdict == ConditionLVerdict::Fails);
  CHECK(creeping.ambiguous);

  CHECK_THROWS_AS(classify_refinement_counts(V{1}), precondition_error);
}

TEST_CASE("even base grids still certify the reflection system") {
  auto report = condition_l(MarkovModel(st::reflection_system(12)), 3);
  CHECK(report.verdict == ConditionLVerdict::CertifiedAtRefinements);
  CHECK(report.grid_sizes == std::vector<int>{12, 111, 1101});
  CHECK(report.base_point_counts == std::vector<long long>{0, 1, 1});
}

TEST_CASE("cut-down removes a hereditary set and its incoming edges") {
  Quiver chain = build_quiver(MarkovModel(st::chain_kernel()));
  Quiver cut = cut_down(chain, {1});
  CHECK(cut.vertices == std::vector<std::string>{"x1"});
  REQUIRE(cut.edge_count() == 1);
  CHECK(cut.edges[0].source == 0);
  CHECK(cut.edges[0].range == 0);
  CHECK(cut.edges[0].weight == Rational(1));

  CHECK(cut_down(chain, {}) == chain);
  CHECK_THROWS_AS(cut_down(chain, {0}), precondition_error);  // {x1} is not hereditary

  Quiver reflection = build_quiver(MarkovModel(st::reflection_system(11)));
  IndexSet keep{3, 7};
  Quiver pair = cut_down(reflection, complement_set(keep, reflection.vertex_count()));
  CHECK(pair.vertex_count() == 2);
  CHECK(pair.edge_count() == 4);
}

TEST_CASE("cut-down commutes with restriction on small models") {
  std::uint64_t state = 57;
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + static_cast<int>(state % 4);  // up to 5 states
    FiniteKernel k = st::random_kernel(state, n, false);
    MarkovModel model(k);
    Quiver q = build_quiver(model);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      IndexSet u;
      for (int v = 0; v < n; ++v) {
        if (mask & (1u << v)) u.push_back(v);
      }
      if (static_cast<int>(u.size()) == n || !is_hereditary(q, u)) continue;
      Quiver via_cut = cut_down(q, u);
      Quiver via_restrict = build_quiver(restrict_to(model, complement_set(u, n)));
      CHECK(via_cut == via_restrict);
    }
  }
}

TEST_CASE("sparse map-system quivers equal the dense-kernel construction") {
  for (int points : {3, 11, 12, 41}) {
    for (const MapSystem& system :
         {st::reflection_system(points), st::tent_system(points), st::cantor_system(points)}) {
      Quiver sparse = build_quiver(MarkovModel(system));
      Quiver dense = build_quiver(MarkovModel(induced_kernel(MarkovModel(system))));
      // the dense route loses the continuum tag but must agree structurally
      CHECK(sparse.vertices == dense.vertices);
      CHECK(sparse.edges == dense.edges);
    }
  }
}

TEST_CASE("incoming weights sum to one on random quivers") {
  std::uint64_t state = 71;
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(state % 6);
    Quiver q = build_quiver(MarkovModel(st::random_kernel(state, n, false)));
    auto in = q.in_edges();
    for (int v = 0; v < n; ++v) {
      Rational sum;
      for (int e : in[static_cast<std::size_t>(v)]) {
        CHECK(Rational(0) < q.edges[static_cast<std::size_t>(e)].weight);
        sum += q.edges[static_cast<std::size_t>(e)].weight;
      }
      CHECK(sum == Rational(1));
    }
  }
}

TEST_CASE("DOT export is deterministic and labels weights") {
  Quiver q = build_quiver(MarkovModel(st::chain_kernel()));
  std::string dot = to_dot(q);
  CHECK(dot == to_dot(q));
  CHECK(dot.find("digraph quiver {") == 0);
  CHECK(dot.find("\"x1\" -> \"x2\" [label=\"0.5\"]") != std::string::npos);
}

TEST_CASE("make_path validates composability") {
  Quiver q = build_quiver(MarkovModel(st::cycle_kernel(3)));
  // edge i runs v_{i} -> v_{i+1}; find edge indices by source
  auto out = q.out_edges();
  int e0 = out[0][0];
  int e1 = out[1][0];
  Path p = make_path(q, {e0, e1});
  CHECK(p.source == 0);
  CHECK(p.range == 2);
  CHECK_FALSE(p.is_loop);
  CHECK_THROWS_AS(make_path(q, {e0, e0}), precondition_error);
  CHECK_THROWS_AS(make_path(q, {}), precondition_error);
}
