#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mql/markov.hpp"

namespace mql {

struct QuiverEdge {
  std::string id;  // empty means the positional default "e<index>"
  int source = 0;
  int range = 0;
  Rational weight;

  bool operator==(const QuiverEdge&) const = default;
};

// Finite topological quiver: ordered vertices, weighted edges with source and
// range, and the per-vertex weight family lambda_v on incoming edges.
// Parallel edges are allowed; quivers built from Markov models never have
// them.
struct Quiver {
  std::vector<std::string> vertices;
  std::vector<QuiverEdge> edges;
  InteriorMode interior_mode = InteriorMode::Discrete;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  std::string edge_id(int e) const;
  int vertex_index(const std::string& label) const;  // domain_error when missing

  std::vector<std::vector<int>> out_edges() const;  // edge indices by source
  std::vector<std::vector<int>> in_edges() const;   // edge indices by range
  std::vector<std::vector<int>> out_neighbors() const;  // deduplicated
  // A[v][w] = number of edges v -> w, with multiplicity.
  std::vector<std::vector<long long>> adjacency() const;

  // Positive weights; incoming weights sum to 1 at every vertex that has
  // incoming edges.
  void validate() const;

  bool operator==(const Quiver&) const = default;
};

struct VertexClassification {
  IndexSet sinks;
  IndexSet finite_emitters;
  IndexSet regular;
  IndexSet infinite_emitters;  // always empty on finite quivers
};

struct Path {
  std::vector<int> edges;  // edge indices, consecutive under range = source
  int source = 0;
  int range = 0;
  bool is_loop = false;
};

Path make_path(const Quiver& q, std::vector<int> edge_indices);

// Vertices are the model's states; edges are the support pairs weighted by
// the kernel entries.
Quiver build_quiver(const MarkovModel& model);

VertexClassification classify_vertices(const Quiver& q);

// Whether some path of length exactly n runs from v to w.
bool reachable(const Quiver& q, int v, int w, int n);
std::vector<Path> enumerate_paths(const Quiver& q, int v, int w, int n,
                                  std::size_t max_paths = 100000);

// Every simple cycle whose vertices all have out-degree one, as a vertex
// sequence starting at its smallest vertex. maxlen = vertex count is
// exhaustive.
std::vector<std::vector<int>> no_exit_cycles(const Quiver& q, int maxlen);
// Base points of loops with no exit, i.e. the union of the cycles above.
IndexSet loops_without_exit(const Quiver& q, int maxlen);

enum class ConditionLVerdict { Holds, Fails, CertifiedAtRefinements };

struct ConditionLReport {
  ConditionLVerdict verdict = ConditionLVerdict::Holds;
  // Grid sizes inspected and the no-exit base-point count at each. Discrete
  // models report a single count and no grid sizes.
  std::vector<int> grid_sizes;
  std::vector<long long> base_point_counts;
  std::vector<int> witness_cycle;  // vertex indices on the quiver that failed
  // labels for the witness vertices; on refined grids these come from the
  // finest grid, not the base quiver
  std::vector<std::string> witness_labels;
  bool used_refinements = false;
  // Set when the refinement counts neither stay bounded nor clearly grow;
  // downstream decisions treat this as inconclusive.
  bool ambiguous = false;
};

// Discrete evidence from a single quiver: Holds iff no no-exit cycle exists.
ConditionLReport condition_l(const Quiver& q);

struct RefinementClassification {
  ConditionLVerdict verdict = ConditionLVerdict::Holds;
  bool ambiguous = false;
};

// Classifies no-exit base-point counts across grid refinements: all zero is
// Holds; a final count no larger than the previous refinement's is
// CertifiedAtRefinements (stable while the grid grew 10x); a final count at
// least double the previous one is Fails; strictly in between is Fails with
// the ambiguous flag set.
RefinementClassification classify_refinement_counts(const std::vector<long long>& counts);

// Model-level check. Discrete models defer to the single-quiver form. For
// continuum grids the model is rebuilt at `refinements` grids (each step
// scales n-1 by 10) and the base-point counts are compared: all zero means
// Holds, counts that do not grow yield CertifiedAtRefinements (a certificate,
// not a proof), clearly growing counts yield Fails.
ConditionLReport condition_l(const MarkovModel& model, int refinements = 3);

// Removes a hereditary vertex set U and every edge whose range lies in U.
Quiver cut_down(const Quiver& q, const IndexSet& u);

bool is_hereditary(const Quiver& q, const IndexSet& u);

std::string to_dot(const Quiver& q, const std::string& name = "quiver");

}  // namespace mql
