#include "mql/structure.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace mql {

namespace {

// Iterative Tarjan; comp ids are assigned in reverse topological order
// (component 0 has no successors outside itself).
struct SccResult {
  std::vector<int> comp;
  int count = 0;
};

SccResult tarjan_scc(int n, const std::vector<std::vector<int>>& adj) {
  SccResult res;
  res.comp.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  int next_index = 0;

  struct Frame {
    int v;
    std::size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = 1;
    while (!call.empty()) {
      Frame& frame = call.back();
      int v = frame.v;
      const auto& nbrs = adj[static_cast<std::size_t>(v)];
      if (frame.child < nbrs.size()) {
        int w = nbrs[frame.child++];
        if (index[static_cast<std::size_t>(w)] == -1) {
          index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = 1;
          call.push_back({w, 0});
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(v)] =
              std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
        }
      } else {
        if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = 0;
            res.comp[static_cast<std::size_t>(w)] = res.count;
            if (w == v) break;
          }
          ++res.count;
        }
        call.pop_back();
        if (!call.empty()) {
          int parent = call.back().v;
          low[static_cast<std::size_t>(parent)] =
              std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(v)]);
        }
      }
    }
  }
  return res;
}

std::vector<std::vector<int>> support_adjacency(const MarkovModel& model) {
  int n = state_count(model);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [x, y] : support(model)) {
    adj[static_cast<std::size_t>(x)].push_back(y);
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return adj;
}

CommunicatingClasses classes_from_adjacency(int n, const std::vector<std::vector<int>>& adj) {
  SccResult scc = tarjan_scc(n, adj);
  CommunicatingClasses out;
  out.classes.assign(static_cast<std::size_t>(scc.count), {});
  for (int v = 0; v < n; ++v) {
    out.classes[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])].push_back(v);
  }
  std::sort(out.classes.begin(), out.classes.end());
  out.irreducible = scc.count == 1;
  return out;
}

}  // namespace

bool is_saturated(const Quiver& q, const IndexSet& u) {
  IndexSet set = normalized_set(u, q.vertex_count());
  auto nbrs = q.out_neighbors();
  for (int x = 0; x < q.vertex_count(); ++x) {
    const auto& out = nbrs[static_cast<std::size_t>(x)];
    if (out.empty()) continue;  // sinks are not regular
    if (set_contains(set, x)) continue;
    bool all_in = std::all_of(out.begin(), out.end(),
                              [&](int w) { return set_contains(set, w); });
    if (all_in) return false;
  }
  return true;
}

SubsetReport classify_subset(const Quiver& q, const MarkovModel& model, const IndexSet& u) {
  SubsetReport report;
  report.subset = normalized_set(u, q.vertex_count());
  report.hereditary = is_hereditary(q, report.subset);
  report.saturated = is_saturated(q, report.subset);
  report.absorbing = is_absorbing(model, report.subset);
  report.strongly_absorbing = is_strongly_absorbing(model, report.subset);
  return report;
}

IndexSet saturated_hereditary_closure(const Quiver& q, const IndexSet& s) {
  int n = q.vertex_count();
  IndexSet seed = normalized_set(s, n);
  auto nbrs = q.out_neighbors();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  std::vector<int> work(seed.begin(), seed.end());
  for (int v : seed) in[static_cast<std::size_t>(v)] = 1;

  bool changed = true;
  while (changed) {
    // hereditary: push ranges of edges leaving the set
    while (!work.empty()) {
      int v = work.back();
      work.pop_back();
      for (int w : nbrs[static_cast<std::size_t>(v)]) {
        if (!in[static_cast<std::size_t>(w)]) {
          in[static_cast<std::size_t>(w)] = 1;
          work.push_back(w);
        }
      }
    }
    // saturation: regular vertices emitting only into the set join it
    changed = false;
    for (int x = 0; x < n; ++x) {
      if (in[static_cast<std::size_t>(x)]) continue;
      const auto& out = nbrs[static_cast<std::size_t>(x)];
      if (out.empty()) continue;
      bool all_in = std::all_of(out.begin(), out.end(),
                                [&](int w) { return in[static_cast<std::size_t>(w)] != 0; });
      if (all_in) {
        in[static_cast<std::size_t>(x)] = 1;
        work.push_back(x);
        changed = true;
      }
    }
  }

  IndexSet out;
  for (int v = 0; v < n; ++v) {
    if (in[static_cast<std::size_t>(v)]) out.push_back(v);
  }
  return out;
}

std::vector<IndexSet> enumerate_saturated_hereditary(const Quiver& q, EnumerationMode mode) {
  int n = q.vertex_count();
  std::vector<IndexSet> found;

  if (mode == EnumerationMode::BruteForce) {
    if (n > 15) {
      throw capacity_error("brute-force enumeration is limited to 15 vertices");
    }
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      IndexSet u;
      for (int v = 0; v < n; ++v) {
        if (mask & (1u << v)) u.push_back(v);
      }
      if (is_hereditary(q, u) && is_saturated(q, u)) found.push_back(std::move(u));
    }
  } else {
    if (n > 20) {
      throw capacity_error("closure-lattice enumeration is limited to 20 vertices");
    }
    constexpr std::size_t kLatticeCap = 1u << 20;
    auto to_mask = [](const IndexSet& s) {
      std::uint32_t m = 0;
      for (int v : s) m |= 1u << v;
      return m;
    };
    auto from_mask = [&](std::uint32_t m) {
      IndexSet s;
      for (int v = 0; v < n; ++v) {
        if (m & (1u << v)) s.push_back(v);
      }
      return s;
    };
    std::unordered_set<std::uint32_t> closed;
    std::vector<std::uint32_t> queue;
    std::uint32_t bottom = to_mask(saturated_hereditary_closure(q, {}));
    closed.insert(bottom);
    queue.push_back(bottom);
    while (!queue.empty()) {
      std::uint32_t m = queue.back();
      queue.pop_back();
      for (int v = 0; v < n; ++v) {
        if (m & (1u << v)) continue;
        IndexSet seed = from_mask(m | (1u << v));
        std::uint32_t c = to_mask(saturated_hereditary_closure(q, seed));
        if (closed.insert(c).second) {
          if (closed.size() > kLatticeCap) {
            throw capacity_error("saturated-hereditary lattice exceeds 2^20 sets");
          }
          queue.push_back(c);
        }
      }
    }
    found.reserve(closed.size());
    for (std::uint32_t m : closed) found.push_back(from_mask(m));
  }

  std::sort(found.begin(), found.end(), [](const IndexSet& a, const IndexSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return found;
}

CommunicatingClasses communicating_classes(const FiniteKernel& kernel) {
  return classes_from_adjacency(kernel.size(), support_adjacency(kernel));
}

std::vector<IndexSet> minimal_strongly_absorbing(const Quiver& q) {
  int n = q.vertex_count();
  auto adj = q.out_neighbors();
  SccResult scc = tarjan_scc(n, adj);

  std::vector<char> cyclic(static_cast<std::size_t>(scc.count), 0);
  std::vector<int> comp_size(static_cast<std::size_t>(scc.count), 0);
  for (int v = 0; v < n; ++v) ++comp_size[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(v)])];
  for (int v = 0; v < n; ++v) {
    int c = scc.comp[static_cast<std::size_t>(v)];
    if (comp_size[static_cast<std::size_t>(c)] >= 2) {
      cyclic[static_cast<std::size_t>(c)] = 1;
    } else {
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (w == v) cyclic[static_cast<std::size_t>(c)] = 1;
      }
    }
  }

  // Tarjan emits components in reverse topological order, so component ids
  // along any edge are non-increasing; scanning ids downward visits every
  // predecessor component first.
  std::vector<char> has_cyclic_ancestor(static_cast<std::size_t>(scc.count), 0);
  std::vector<std::vector<int>> comp_edges(static_cast<std::size_t>(scc.count));
  for (int v = 0; v < n; ++v) {
    for (int w : adj[static_cast<std::size_t>(v)]) {
      int a = scc.comp[static_cast<std::size_t>(v)];
      int b = scc.comp[static_cast<std::size_t>(w)];
      if (a != b) comp_edges[static_cast<std::size_t>(a)].push_back(b);
    }
  }
  for (int c = scc.count - 1; c >= 0; --c) {
    for (int d : comp_edges[static_cast<std::size_t>(c)]) {
      if (cyclic[static_cast<std::size_t>(c)] || has_cyclic_ancestor[static_cast<std::size_t>(c)]) {
        has_cyclic_ancestor[static_cast<std::size_t>(d)] = 1;
      }
    }
  }

  // reverse adjacency for ancestor closures
  std::vector<std::vector<int>> radj(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    for (int w : adj[static_cast<std::size_t>(v)]) radj[static_cast<std::size_t>(w)].push_back(v);
  }

  std::vector<IndexSet> out;
  for (int c = 0; c < scc.count; ++c) {
    if (!cyclic[static_cast<std::size_t>(c)] || has_cyclic_ancestor[static_cast<std::size_t>(c)]) {
      continue;
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> work;
    for (int v = 0; v < n; ++v) {
      if (scc.comp[static_cast<std::size_t>(v)] == c) {
        seen[static_cast<std::size_t>(v)] = 1;
        work.push_back(v);
      }
    }
    while (!work.empty()) {
      int v = work.back();
      work.pop_back();
      for (int u : radj[static_cast<std::size_t>(v)]) {
        if (!seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = 1;
          work.push_back(u);
        }
      }
    }
    IndexSet b;
    for (int v = 0; v < n; ++v) {
      if (seen[static_cast<std::size_t>(v)]) b.push_back(v);
    }
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(), [](const IndexSet& a, const IndexSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<IndexSet> minimal_saturated_hereditary(const Quiver& q) {
  int n = q.vertex_count();
  std::set<IndexSet> distinct;
  for (int v = 0; v < n; ++v) {
    distinct.insert(saturated_hereditary_closure(q, {v}));
  }
  std::vector<IndexSet> candidates(distinct.begin(), distinct.end());
  std::sort(candidates.begin(), candidates.end(), [](const IndexSet& a, const IndexSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  std::vector<IndexSet> minimal;
  for (const auto& c : candidates) {
    bool dominated = std::any_of(minimal.begin(), minimal.end(), [&](const IndexSet& m) {
      return std::includes(c.begin(), c.end(), m.begin(), m.end());
    });
    if (!dominated) minimal.push_back(c);
  }
  return minimal;
}

SimplicityReport decide_simplicity(const MarkovModel& model, const SimplicityOptions& options) {
  validate_model(model);
  SimplicityReport report;
  report.vertex_labels = state_labels(model);
  report.condition_l = condition_l(model, options.refinements);
  report.used_continuum_heuristics = report.condition_l.used_refinements;

  int n = state_count(model);
  const bool uniform = std::holds_alternative<UniformKernelModel>(model);

  if (uniform) {
    // complete support: one communicating class, trivial lattice
    report.classes.classes = {full_set(n)};
    report.classes.irreducible = true;
    report.notes.push_back(
        "finite uniform model is fully regular; infinite-emitter behavior of the "
        "continuum uniform kernel is not modeled");
  } else {
    if (n > 20000) {
      throw capacity_error("simplicity analysis is limited to 20000 states");
    }
    Quiver q = build_quiver(model);

    if (!classify_vertices(q).sinks.empty()) {
      report.notes.push_back(
          "model has sinks: strongly absorbing sets never contain them, and the "
          "saturated-hereditary/strongly-absorbing complement correspondence holds "
          "on sink-free models only");
    }

    auto sh = minimal_saturated_hereditary(q);
    for (const auto& u : sh) {
      if (static_cast<int>(u.size()) == n) continue;  // trivial
      ++report.saturated_hereditary_count;
      if (report.saturated_hereditary_sets.size() < options.max_witnesses) {
        report.saturated_hereditary_sets.push_back(u);
      }
    }

    auto sa = minimal_strongly_absorbing(q);
    for (const auto& b : sa) {
      if (static_cast<int>(b.size()) == n) continue;
      ++report.strongly_absorbing_count;
      if (report.strongly_absorbing_sets.size() < options.max_witnesses) {
        report.strongly_absorbing_sets.push_back(b);
      }
    }
    report.truncated =
        static_cast<std::size_t>(report.saturated_hereditary_count) >
            report.saturated_hereditary_sets.size() ||
        static_cast<std::size_t>(report.strongly_absorbing_count) >
            report.strongly_absorbing_sets.size();

    report.classes = classes_from_adjacency(n, support_adjacency(model));
  }

  if (report.used_continuum_heuristics) {
    report.notes.push_back(
        "condition (L) was certified on refined grids; the certificate is evidence, not a proof");
  }

  auto base_labels = [&](const IndexSet& s) {
    std::vector<std::string> out;
    for (int v : s) out.push_back(report.vertex_labels[static_cast<std::size_t>(v)]);
    return out;
  };
  if (report.saturated_hereditary_count > 0) {
    report.verdict = SimplicityVerdict::NotSimple;
    report.witnesses.push_back({"saturated_hereditary", report.saturated_hereditary_sets.front(),
                                base_labels(report.saturated_hereditary_sets.front())});
    if (!report.strongly_absorbing_sets.empty()) {
      report.witnesses.push_back({"strongly_absorbing", report.strongly_absorbing_sets.front(),
                                  base_labels(report.strongly_absorbing_sets.front())});
    }
    return report;
  }
  if (report.condition_l.verdict == ConditionLVerdict::Fails && !report.condition_l.ambiguous) {
    report.verdict = SimplicityVerdict::NotSimple;
    report.witnesses.push_back({"no_exit_cycle", report.condition_l.witness_cycle,
                                report.condition_l.witness_labels});
    return report;
  }
  if (report.condition_l.ambiguous) {
    report.verdict = SimplicityVerdict::Inconclusive;
    return report;
  }
  report.verdict = SimplicityVerdict::Simple;
  return report;
}

}  // namespace mql
