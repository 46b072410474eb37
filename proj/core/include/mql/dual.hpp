#pragma once

#include <string>
#include <vector>

#include "mql/markov.hpp"
#include "mql/quiver.hpp"

namespace mql {

// Dual quiver: one vertex per edge of the base, one edge per composable pair
// (e1, e2), with source e1, range e2, and weight equal to the base weight of
// e1 (the mass lambda_{s(e2)} gives e1).
Quiver dual_quiver(const Quiver& q);

// Markov operator on the edge set of q: p({e1}, e2) = weight(e1) when
// range(e1) = source(e2), else 0. Requires a surjective range map and
// per-vertex probability weights.
FiniteKernel markov_from_quiver(const Quiver& q);

// True when the quiver of markov_from_quiver(q) is isomorphic to the dual
// quiver of q.
bool verify_dual_realization(const Quiver& q);

// Weight-preserving multigraph isomorphism, found by signature refinement
// plus backtracking. Exact; intended for small instances.
bool quivers_isomorphic(const Quiver& a, const Quiver& b);

struct SmithNormalForm {
  std::vector<long long> invariant_factors;  // nonzero diagonal, d1 | d2 | ...
  int rank = 0;                              // rank over the rationals
};

// Exact Smith normal form by unimodular row/column reduction; 64-bit with
// overflow checks.
SmithNormalForm smith_normal_form(std::vector<std::vector<long long>> m);

struct KTheoryInvariant {
  int free_rank_K0 = 0;
  std::vector<long long> torsion_K0;  // invariant factors > 1
  int rank_K1 = 0;

  bool operator==(const KTheoryInvariant&) const = default;
  std::string to_string() const;  // "K0 = Z^a (+) Z/d1 (+) ..., K1 = Z^b"
};

// K-theory of the algebra of a finite sink-free graph, computed from the
// Smith normal form of I - A^t (A = vertex adjacency with multiplicity):
// K0 = coker, K1 = ker. Graphs with sinks are refused.
KTheoryInvariant k_theory_finite_graph(const Quiver& q);

}  // namespace mql
