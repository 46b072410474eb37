#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mql/ifs.hpp"
#include "mql/markov.hpp"
#include "mql/quiver.hpp"

namespace mql::selftest {

inline constexpr std::uint64_t kDefaultSeed = 0x6d716c01;

// Desk-scale builders shared by the self-test suite and the bundled corpus.
FiniteKernel chain_kernel();             // [[1, 1/2], [0, 1/2]]
FiniteKernel cycle_kernel(int n);        // point-mass kernel of an n-cycle
MapSystem reflection_system(int points); // {x, 1-x} on [0, 1]
MapSystem tent_system(int points);       // {x/2, 1-x/2} on [0, 1]
MapSystem cantor_system(int points);     // {x/3, x/3 + 2/3} on [0, 1]
UniformKernelModel uniform_model(int n); // uniform kernel on n labeled states
Quiver o2_quiver();                      // one vertex, two loops of weight 1/2

IfsSystem tent_ifs();
IfsSystem cantor_ifs();

// Deterministic random model generators.
FiniteKernel random_kernel(std::uint64_t& state, int n, bool sink_free);
Quiver random_multigraph(std::uint64_t& state, int min_vertices, int max_vertices,
                         int max_parallel);

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the full acceptance suite; one result per criterion, in order.
std::vector<CheckResult> run_acceptance(std::uint64_t seed = kDefaultSeed);

}  // namespace mql::selftest
