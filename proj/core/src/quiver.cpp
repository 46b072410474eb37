#include "mql/quiver.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace mql {

std::string Quiver::edge_id(int e) const {
  const std::string& id = edges[static_cast<std::size_t>(e)].id;
  if (!id.empty()) return id;
  return "e" + std::to_string(e);
}

int Quiver::vertex_index(const std::string& label) const {
  auto it = std::find(vertices.begin(), vertices.end(), label);
  if (it == vertices.end()) throw domain_error("unknown vertex label '" + label + "'");
  return static_cast<int>(it - vertices.begin());
}

std::vector<std::vector<int>> Quiver::out_edges() const {
  std::vector<std::vector<int>> out(vertices.size());
  for (int e = 0; e < edge_count(); ++e) {
    out[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].source)].push_back(e);
  }
  return out;
}

std::vector<std::vector<int>> Quiver::in_edges() const {
  std::vector<std::vector<int>> in(vertices.size());
  for (int e = 0; e < edge_count(); ++e) {
    in[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].range)].push_back(e);
  }
  return in;
}

std::vector<std::vector<int>> Quiver::out_neighbors() const {
  std::vector<std::vector<int>> out(vertices.size());
  for (const auto& e : edges) {
    out[static_cast<std::size_t>(e.source)].push_back(e.range);
  }
  for (auto& nbrs : out) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return out;
}

std::vector<std::vector<long long>> Quiver::adjacency() const {
  std::vector<std::vector<long long>> a(
      vertices.size(), std::vector<long long>(vertices.size(), 0));
  for (const auto& e : edges) {
    ++a[static_cast<std::size_t>(e.source)][static_cast<std::size_t>(e.range)];
  }
  return a;
}

void Quiver::validate() const {
  int n = vertex_count();
  if (n == 0) throw validation_error("quiver must have at least one vertex");
  std::vector<Rational> in_sum(static_cast<std::size_t>(n));
  std::vector<char> has_in(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges) {
    if (e.source < 0 || e.source >= n || e.range < 0 || e.range >= n) {
      throw validation_error("edge endpoint out of range");
    }
    if (!(Rational(0) < e.weight)) {
      throw validation_error("edge weights must be strictly positive");
    }
    in_sum[static_cast<std::size_t>(e.range)] += e.weight;
    has_in[static_cast<std::size_t>(e.range)] = 1;
  }
  for (int v = 0; v < n; ++v) {
    if (has_in[static_cast<std::size_t>(v)] && !in_sum[static_cast<std::size_t>(v)].is_one()) {
      throw validation_error("incoming weights at vertex '" + vertices[static_cast<std::size_t>(v)] +
                             "' sum to " + in_sum[static_cast<std::size_t>(v)].to_string() +
                             ", expected 1");
    }
  }
}

Path make_path(const Quiver& q, std::vector<int> edge_indices) {
  if (edge_indices.empty()) throw precondition_error("paths have length at least one");
  for (std::size_t i = 0; i + 1 < edge_indices.size(); ++i) {
    const auto& a = q.edges[static_cast<std::size_t>(edge_indices[i])];
    const auto& b = q.edges[static_cast<std::size_t>(edge_indices[i + 1])];
    if (a.range != b.source) {
      throw precondition_error("edge sequence is not composable at position " + std::to_string(i));
    }
  }
  Path p;
  p.source = q.edges[static_cast<std::size_t>(edge_indices.front())].source;
  p.range = q.edges[static_cast<std::size_t>(edge_indices.back())].range;
  p.is_loop = p.source == p.range;
  p.edges = std::move(edge_indices);
  return p;
}

Quiver build_quiver(const MarkovModel& model) {
  validate_model(model);
  Quiver q;
  q.vertices = state_labels(model);
  q.interior_mode = model_mode(model);
  int n = state_count(model);
  if (std::holds_alternative<UniformKernelModel>(model) && n > 1500) {
    throw capacity_error("uniform kernel quiver has n^2 edges; limit is 1500 states");
  }
  if (const auto* ms = std::get_if<MapSystem>(&model)) {
    // sparse: group snapped images per range vertex
    for (int y = 0; y < n; ++y) {
      std::map<int, Rational> column;
      for (std::size_t i = 0; i < ms->maps.size(); ++i) {
        column[map_image_index(*ms, static_cast<int>(i), y)] += ms->weights[i];
      }
      for (const auto& [x, w] : column) {
        q.edges.push_back(QuiverEdge{"", x, y, w});
      }
    }
  } else {
    for (const auto& [x, y] : support(model)) {
      q.edges.push_back(QuiverEdge{"", x, y, kernel_entry(model, x, y)});
    }
  }
  return q;
}

VertexClassification classify_vertices(const Quiver& q) {
  int n = q.vertex_count();
  std::vector<char> emits(static_cast<std::size_t>(n), 0);
  for (const auto& e : q.edges) emits[static_cast<std::size_t>(e.source)] = 1;
  VertexClassification c;
  c.finite_emitters = full_set(n);
  for (int v = 0; v < n; ++v) {
    if (emits[static_cast<std::size_t>(v)]) {
      c.regular.push_back(v);
    } else {
      c.sinks.push_back(v);
    }
  }
  return c;
}

bool reachable(const Quiver& q, int v, int w, int n) {
  if (n < 1) throw precondition_error("reachable needs path length n >= 1");
  auto nbrs = q.out_neighbors();
  std::vector<char> frontier(q.vertices.size(), 0);
  frontier[static_cast<std::size_t>(v)] = 1;
  for (int step = 0; step < n; ++step) {
    std::vector<char> next(q.vertices.size(), 0);
    for (std::size_t u = 0; u < frontier.size(); ++u) {
      if (!frontier[u]) continue;
      for (int t : nbrs[u]) next[static_cast<std::size_t>(t)] = 1;
    }
    frontier = std::move(next);
  }
  return frontier[static_cast<std::size_t>(w)] != 0;
}

namespace {

void path_dfs(const Quiver& q, const std::vector<std::vector<int>>& out, int at, int target,
              int remaining, std::vector<int>& stack, std::vector<Path>& found,
              std::size_t max_paths) {
  if (remaining == 0) {
    if (at == target) {
      if (found.size() >= max_paths) {
        throw capacity_error("path enumeration exceeds " + std::to_string(max_paths) + " paths");
      }
      found.push_back(make_path(q, stack));
    }
    return;
  }
  for (int e : out[static_cast<std::size_t>(at)]) {
    stack.push_back(e);
    path_dfs(q, out, q.edges[static_cast<std::size_t>(e)].range, target, remaining - 1, stack,
             found, max_paths);
    stack.pop_back();
  }
}

}  // namespace

std::vector<Path> enumerate_paths(const Quiver& q, int v, int w, int n, std::size_t max_paths) {
  if (n < 1) throw precondition_error("enumerate_paths needs path length n >= 1");
  auto out = q.out_edges();
  std::vector<Path> found;
  std::vector<int> stack;
  path_dfs(q, out, v, w, n, stack, found, max_paths);
  return found;
}

std::vector<std::vector<int>> no_exit_cycles(const Quiver& q, int maxlen) {
  if (maxlen < 1) throw precondition_error("no_exit_cycles needs maxlen >= 1");
  int n = q.vertex_count();
  // a loop with no exit walks only vertices of out-degree one, so it follows
  // the unique-successor map; cycles of that map are exactly the witnesses
  std::vector<int> unique_next(static_cast<std::size_t>(n), -1);
  std::vector<int> out_degree(static_cast<std::size_t>(n), 0);
  for (const auto& e : q.edges) {
    ++out_degree[static_cast<std::size_t>(e.source)];
    unique_next[static_cast<std::size_t>(e.source)] = e.range;
  }
  std::vector<std::vector<int>> cycles;
  std::vector<char> on_known_cycle(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    if (out_degree[static_cast<std::size_t>(v)] != 1 || on_known_cycle[static_cast<std::size_t>(v)]) {
      continue;
    }
    std::vector<int> walk{v};
    int at = v;
    for (int step = 0; step < maxlen; ++step) {
      if (out_degree[static_cast<std::size_t>(at)] != 1) break;
      at = unique_next[static_cast<std::size_t>(at)];
      if (at == v) {
        for (int u : walk) on_known_cycle[static_cast<std::size_t>(u)] = 1;
        std::rotate(walk.begin(), std::min_element(walk.begin(), walk.end()), walk.end());
        cycles.push_back(std::move(walk));
        break;
      }
      if (std::find(walk.begin(), walk.end(), at) != walk.end()) break;  // cycle missing v
      walk.push_back(at);
    }
  }
  std::sort(cycles.begin(), cycles.end());
  cycles.erase(std::unique(cycles.begin(), cycles.end()), cycles.end());
  return cycles;
}

IndexSet loops_without_exit(const Quiver& q, int maxlen) {
  IndexSet base;
  for (const auto& cycle : no_exit_cycles(q, maxlen)) {
    base.insert(base.end(), cycle.begin(), cycle.end());
  }
  return normalized_set(std::move(base), q.vertex_count());
}

ConditionLReport condition_l(const Quiver& q) {
  ConditionLReport report;
  auto cycles = no_exit_cycles(q, q.vertex_count());
  long long count = 0;
  for (const auto& c : cycles) count += static_cast<long long>(c.size());
  report.base_point_counts = {count};
  if (cycles.empty()) {
    report.verdict = ConditionLVerdict::Holds;
  } else {
    report.verdict = ConditionLVerdict::Fails;
    report.witness_cycle = cycles.front();
    for (int v : report.witness_cycle) {
      report.witness_labels.push_back(q.vertices[static_cast<std::size_t>(v)]);
    }
  }
  return report;
}

namespace {

long long count_no_exit_base_points(const MarkovModel& model) {
  if (std::holds_alternative<UniformKernelModel>(model)) {
    // complete support: out-degree n everywhere, so only n = 1 has a
    // no-exit loop; avoids materializing n^2 edges on fine grids
    return state_count(model) == 1 ? 1 : 0;
  }
  Quiver q = build_quiver(model);
  return static_cast<long long>(loops_without_exit(q, q.vertex_count()).size());
}

}  // namespace

RefinementClassification classify_refinement_counts(const std::vector<long long>& counts) {
  if (counts.size() < 2) {
    throw precondition_error("refinement classification needs at least two counts");
  }
  RefinementClassification out;
  bool all_zero =
      std::all_of(counts.begin(), counts.end(), [](long long c) { return c == 0; });
  if (all_zero) {
    out.verdict = ConditionLVerdict::Holds;
    return out;
  }
  long long prev = counts[counts.size() - 2];
  long long last = counts.back();
  if (last <= prev) {
    out.verdict = ConditionLVerdict::CertifiedAtRefinements;
    return out;
  }
  out.verdict = ConditionLVerdict::Fails;
  out.ambiguous = last < 2 * prev;
  return out;
}

ConditionLReport condition_l(const MarkovModel& model, int refinements) {
  if (model_mode(model) == InteriorMode::Discrete) {
    if (std::holds_alternative<UniformKernelModel>(model)) {
      ConditionLReport report;
      long long count = count_no_exit_base_points(model);
      report.base_point_counts = {count};
      report.verdict = count == 0 ? ConditionLVerdict::Holds : ConditionLVerdict::Fails;
      if (count > 0) {
        report.witness_cycle = {0};
        report.witness_labels = {state_labels(model).front()};
      }
      return report;
    }
    return condition_l(build_quiver(model));
  }

  if (refinements < 3) refinements = 3;

  ConditionLReport report;
  report.used_refinements = true;
  int points = 0;
  if (const auto* ms = std::get_if<MapSystem>(&model)) {
    points = std::get<IntervalGridSpace>(ms->space).points;
  } else {
    points = std::get<IntervalGridSpace>(std::get<UniformKernelModel>(model).space).points;
  }
  MarkovModel finest = model;
  for (int r = 0; r < refinements; ++r) {
    MarkovModel staged = with_grid_points(model, points);
    report.grid_sizes.push_back(points);
    report.base_point_counts.push_back(count_no_exit_base_points(staged));
    finest = std::move(staged);
    points = 10 * (points - 1) + 1;
  }

  RefinementClassification cls = classify_refinement_counts(report.base_point_counts);
  report.verdict = cls.verdict;
  report.ambiguous = cls.ambiguous;
  if (report.verdict != ConditionLVerdict::Fails) return report;
  if (!std::holds_alternative<UniformKernelModel>(finest)) {
    Quiver fine = build_quiver(finest);
    auto cycles = no_exit_cycles(fine, fine.vertex_count());
    if (!cycles.empty()) {
      report.witness_cycle = cycles.front();
      for (int v : report.witness_cycle) {
        report.witness_labels.push_back(fine.vertices[static_cast<std::size_t>(v)]);
      }
    }
  }
  return report;
}

bool is_hereditary(const Quiver& q, const IndexSet& u) {
  IndexSet set = normalized_set(u, q.vertex_count());
  for (const auto& e : q.edges) {
    if (set_contains(set, e.source) && !set_contains(set, e.range)) return false;
  }
  return true;
}

Quiver cut_down(const Quiver& q, const IndexSet& u) {
  IndexSet set = normalized_set(u, q.vertex_count());
  if (!is_hereditary(q, set)) {
    throw precondition_error("cut-down requires a hereditary vertex set");
  }
  Quiver out;
  out.interior_mode = q.interior_mode;
  std::vector<int> remap(q.vertices.size(), -1);
  for (int v = 0; v < q.vertex_count(); ++v) {
    if (!set_contains(set, v)) {
      remap[static_cast<std::size_t>(v)] = out.vertex_count();
      out.vertices.push_back(q.vertices[static_cast<std::size_t>(v)]);
    }
  }
  for (int e = 0; e < q.edge_count(); ++e) {
    const auto& edge = q.edges[static_cast<std::size_t>(e)];
    if (set_contains(set, edge.range)) continue;
    // hereditary u means the source survives too
    out.edges.push_back(QuiverEdge{edge.id, remap[static_cast<std::size_t>(edge.source)],
                                   remap[static_cast<std::size_t>(edge.range)], edge.weight});
  }
  return out;
}

std::string to_dot(const Quiver& q, const std::string& name) {
  std::ostringstream out;
  out << "digraph " << name << " {\n";
  out << "  rankdir=LR;\n";
  for (const auto& v : q.vertices) {
    out << "  \"" << v << "\";\n";
  }
  char buf[64];
  for (const auto& e : q.edges) {
    std::snprintf(buf, sizeof(buf), "%.6g", e.weight.to_double());
    out << "  \"" << q.vertices[static_cast<std::size_t>(e.source)] << "\" -> \""
        << q.vertices[static_cast<std::size_t>(e.range)] << "\" [label=\"" << buf << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace mql
