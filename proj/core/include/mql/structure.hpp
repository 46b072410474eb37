#pragma once

#include <string>
#include <vector>

#include "mql/markov.hpp"
#include "mql/quiver.hpp"

namespace mql {

struct SubsetReport {
  IndexSet subset;
  bool hereditary = false;
  bool saturated = false;
  bool absorbing = false;
  bool strongly_absorbing = false;
};

// Every regular vertex whose outgoing edges all land in U must itself lie
// in U.
bool is_saturated(const Quiver& q, const IndexSet& u);

SubsetReport classify_subset(const Quiver& q, const MarkovModel& model, const IndexSet& u);

// Smallest saturated hereditary superset of S. Closed under adding ranges of
// edges leaving the set and regular vertices emitting only into the set;
// idempotent and monotone.
IndexSet saturated_hereditary_closure(const Quiver& q, const IndexSet& s);

enum class EnumerationMode { ClosureLattice, BruteForce };

// Complete list of saturated hereditary vertex sets, always including the
// empty set and the full set. ClosureLattice walks the closure system and
// accepts up to 20 vertices; BruteForce checks all 2^n subsets and accepts
// up to 15.
std::vector<IndexSet> enumerate_saturated_hereditary(
    const Quiver& q, EnumerationMode mode = EnumerationMode::ClosureLattice);

struct CommunicatingClasses {
  std::vector<IndexSet> classes;  // strongly connected components of the support
  bool irreducible = false;
};

CommunicatingClasses communicating_classes(const FiniteKernel& kernel);

// Minimal nonempty strongly absorbing sets. Each is the full preimage (under
// reachability) of a cyclic strongly connected component with no cyclic
// component above it; the full vertex set appears when no proper one exists.
std::vector<IndexSet> minimal_strongly_absorbing(const Quiver& q);

// Minimal nonempty saturated hereditary sets: the inclusion-minimal
// single-vertex closures.
std::vector<IndexSet> minimal_saturated_hereditary(const Quiver& q);

enum class SimplicityVerdict { Simple, NotSimple, Inconclusive };

struct SimplicityWitness {
  std::string type;  // "no_exit_cycle" | "saturated_hereditary" | "strongly_absorbing"
  IndexSet vertices;
  std::vector<std::string> labels;
};

struct SimplicityReport {
  SimplicityVerdict verdict = SimplicityVerdict::Simple;
  ConditionLReport condition_l;
  // Minimal nontrivial (proper, nonzero) sets; counts are exact, listed sets
  // are truncated to max_witnesses.
  long long saturated_hereditary_count = 0;
  std::vector<IndexSet> saturated_hereditary_sets;
  long long strongly_absorbing_count = 0;
  std::vector<IndexSet> strongly_absorbing_sets;
  bool truncated = false;
  std::vector<SimplicityWitness> witnesses;
  CommunicatingClasses classes;
  std::vector<std::string> vertex_labels;
  bool used_continuum_heuristics = false;
  std::vector<std::string> notes;
};

struct SimplicityOptions {
  int refinements = 3;
  std::size_t max_witnesses = 16;
};

// Simple iff condition (L) holds (or is certified at refinements) and the
// only saturated hereditary sets are trivial; NotSimple carries a checkable
// witness; Inconclusive only when the continuum certificate is ambiguous.
SimplicityReport decide_simplicity(const MarkovModel& model, const SimplicityOptions& options = {});

}  // namespace mql
