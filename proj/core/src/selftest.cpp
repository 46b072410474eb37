#include "mql/selftest.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "mql/dual.hpp"
#include "mql/structure.hpp"

namespace mql::selftest {

namespace {

// splitmix64; deterministic across platforms, unlike <random> distributions
std::uint64_t next_u64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

int next_below(std::uint64_t& state, int n) {
  return static_cast<int>(next_u64(state) % static_cast<std::uint64_t>(n));
}

double next_unit(std::uint64_t& state) {
  return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

FiniteKernel chain_kernel() {
  FiniteKernel k;
  k.states = {"x1", "x2"};
  k.kernel = {{Rational(1), Rational(1, 2)}, {Rational(0), Rational(1, 2)}};
  return k;
}

FiniteKernel cycle_kernel(int n) {
  FiniteKernel k;
  for (int i = 0; i < n; ++i) k.states.push_back("v" + std::to_string(i + 1));
  k.kernel.assign(static_cast<std::size_t>(n),
                  std::vector<Rational>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    k.kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + 1) % n)] = Rational(1);
  }
  return k;
}

namespace {

MapSystem interval_system(std::vector<AffineMap> maps, int points) {
  MapSystem system;
  system.space = IntervalGridSpace{Rational(0), Rational(1), points, InteriorMode::Continuum};
  for (auto& m : maps) system.maps.emplace_back(m);
  system.weights = uniform_weights(static_cast<int>(system.maps.size()));
  return system;
}

}  // namespace

MapSystem reflection_system(int points) {
  return interval_system({AffineMap{Rational(1), Rational(0)}, AffineMap{Rational(-1), Rational(1)}},
                         points);
}

MapSystem tent_system(int points) {
  return interval_system(
      {AffineMap{Rational(1, 2), Rational(0)}, AffineMap{Rational(-1, 2), Rational(1)}}, points);
}

MapSystem cantor_system(int points) {
  return interval_system(
      {AffineMap{Rational(1, 3), Rational(0)}, AffineMap{Rational(1, 3), Rational(2, 3)}}, points);
}

UniformKernelModel uniform_model(int n) {
  UniformKernelModel m;
  FiniteSetSpace space;
  for (int i = 0; i < n; ++i) space.labels.push_back("u" + std::to_string(i + 1));
  m.space = std::move(space);
  return m;
}

Quiver o2_quiver() {
  Quiver q;
  q.vertices = {"v"};
  q.edges.push_back(QuiverEdge{"a", 0, 0, Rational(1, 2)});
  q.edges.push_back(QuiverEdge{"b", 0, 0, Rational(1, 2)});
  return q;
}

IfsSystem tent_ifs() { return IfsSystem::from_map_system(tent_system(11)); }
IfsSystem cantor_ifs() { return IfsSystem::from_map_system(cantor_system(11)); }

FiniteKernel random_kernel(std::uint64_t& state, int n, bool sink_free) {
  std::vector<std::vector<char>> pattern(static_cast<std::size_t>(n),
                                         std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int j = 0; j < n; ++j) {
    bool any = false;
    for (int i = 0; i < n; ++i) {
      if (next_below(state, 2) == 0) {
        pattern[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
        any = true;
      }
    }
    if (!any) pattern[static_cast<std::size_t>(next_below(state, n))][static_cast<std::size_t>(j)] = 1;
  }
  if (sink_free) {
    for (int i = 0; i < n; ++i) {
      bool emits = false;
      for (int j = 0; j < n; ++j) emits |= pattern[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0;
      if (!emits) pattern[static_cast<std::size_t>(i)][static_cast<std::size_t>(next_below(state, n))] = 1;
    }
  }
  FiniteKernel k;
  for (int i = 0; i < n; ++i) k.states.push_back("s" + std::to_string(i + 1));
  k.kernel.assign(static_cast<std::size_t>(n),
                  std::vector<Rational>(static_cast<std::size_t>(n)));
  // dyadic columns (total mass 16) keep exact kernel powers within 64 bits
  constexpr long long kColumnMass = 16;
  for (int j = 0; j < n; ++j) {
    std::vector<int> holders;
    for (int i = 0; i < n; ++i) {
      if (pattern[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) holders.push_back(i);
    }
    std::vector<long long> mass(holders.size(), 1);
    for (long long extra = kColumnMass - static_cast<long long>(holders.size()); extra > 0;
         --extra) {
      ++mass[static_cast<std::size_t>(next_below(state, static_cast<int>(holders.size())))];
    }
    for (std::size_t h = 0; h < holders.size(); ++h) {
      k.kernel[static_cast<std::size_t>(holders[h])][static_cast<std::size_t>(j)] =
          Rational(mass[h], kColumnMass);
    }
  }
  k.validate();
  return k;
}

Quiver random_multigraph(std::uint64_t& state, int min_vertices, int max_vertices,
                         int max_parallel) {
  int n = min_vertices + next_below(state, max_vertices - min_vertices + 1);
  std::vector<std::vector<int>> mult(static_cast<std::size_t>(n),
                                     std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int v = 0; v < n; ++v) {
    for (int w = 0; w < n; ++w) {
      if (next_below(state, 10) < 4) {
        mult[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] =
            1 + next_below(state, max_parallel);
      }
    }
  }
  // no sinks, no sources: every vertex emits and receives
  for (int v = 0; v < n; ++v) {
    bool emits = false;
    for (int w = 0; w < n; ++w) emits |= mult[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] > 0;
    if (!emits) mult[static_cast<std::size_t>(v)][static_cast<std::size_t>(next_below(state, n))] = 1;
  }
  for (int w = 0; w < n; ++w) {
    bool receives = false;
    for (int v = 0; v < n; ++v) receives |= mult[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] > 0;
    if (!receives) mult[static_cast<std::size_t>(next_below(state, n))][static_cast<std::size_t>(w)] = 1;
  }

  Quiver q;
  for (int v = 0; v < n; ++v) q.vertices.push_back("g" + std::to_string(v + 1));
  // incoming masses per range vertex, normalized to probability weights
  for (int w = 0; w < n; ++w) {
    long long total = 0;
    std::vector<std::vector<long long>> mass(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      for (int c = 0; c < mult[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)]; ++c) {
        long long m = 1 + next_below(state, 9);
        mass[static_cast<std::size_t>(v)].push_back(m);
        total += m;
      }
    }
    for (int v = 0; v < n; ++v) {
      for (long long m : mass[static_cast<std::size_t>(v)]) {
        q.edges.push_back(QuiverEdge{"", v, w, Rational(m, total)});
      }
    }
  }
  q.validate();
  return q;
}

// ---------------------------------------------------------------------------
// Independent oracles. These re-derive everything from first definitions and
// stay off the code paths they are checking.
namespace oracle {

using Pattern = std::vector<std::vector<char>>;  // adj[u][v] = edge u -> v

Pattern pattern_of(const FiniteKernel& k) {
  int n = k.size();
  Pattern adj(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          k.kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero() ? 0 : 1;
    }
  }
  return adj;
}

Pattern bool_power(const Pattern& a, int n) {
  std::size_t dim = a.size();
  Pattern acc = a;
  for (int step = 1; step < n; ++step) {
    Pattern next(dim, std::vector<char>(dim, 0));
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        if (!acc[i][k]) continue;
        for (std::size_t j = 0; j < dim; ++j) {
          if (a[k][j]) next[i][j] = 1;
        }
      }
    }
    acc = std::move(next);
  }
  return acc;
}

bool subset_hereditary(const Pattern& adj, std::uint32_t mask) {
  int n = static_cast<int>(adj.size());
  for (int u = 0; u < n; ++u) {
    if (!(mask & (1u << u))) continue;
    for (int v = 0; v < n; ++v) {
      if (adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] && !(mask & (1u << v))) {
        return false;
      }
    }
  }
  return true;
}

bool subset_saturated(const Pattern& adj, std::uint32_t mask) {
  int n = static_cast<int>(adj.size());
  for (int x = 0; x < n; ++x) {
    if (mask & (1u << x)) continue;
    bool has_edge = false;
    bool all_in = true;
    for (int v = 0; v < n; ++v) {
      if (adj[static_cast<std::size_t>(x)][static_cast<std::size_t>(v)]) {
        has_edge = true;
        if (!(mask & (1u << v))) all_in = false;
      }
    }
    if (has_edge && all_in) return false;  // regular vertex pulled in
  }
  return true;
}

bool nontrivial_sh_exists(const Pattern& adj) {
  int n = static_cast<int>(adj.size());
  std::uint32_t full = (1u << n) - 1;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    if (subset_hereditary(adj, mask) && subset_saturated(adj, mask)) return true;
  }
  return false;
}

void cycle_dfs(const Pattern& adj, int start, int at, std::uint32_t visited,
               std::vector<int>& stack, std::vector<std::vector<int>>& cycles) {
  int n = static_cast<int>(adj.size());
  for (int next = 0; next < n; ++next) {
    if (!adj[static_cast<std::size_t>(at)][static_cast<std::size_t>(next)]) continue;
    if (next == start) {
      cycles.push_back(stack);
      continue;
    }
    if (next < start || (visited & (1u << next))) continue;
    stack.push_back(next);
    cycle_dfs(adj, start, next, visited | (1u << next), stack, cycles);
    stack.pop_back();
  }
}

// all simple cycles, each rooted at its smallest vertex
std::vector<std::vector<int>> simple_cycles(const Pattern& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<std::vector<int>> cycles;
  for (int start = 0; start < n; ++start) {
    std::vector<int> stack{start};
    cycle_dfs(adj, start, start, 1u << start, stack, cycles);
  }
  return cycles;
}

bool no_exit_cycle_exists(const Pattern& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<int> outdeg(static_cast<std::size_t>(n), 0);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      outdeg[static_cast<std::size_t>(u)] += adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
    }
  }
  for (const auto& cycle : simple_cycles(adj)) {
    bool exitless = true;
    for (int v : cycle) exitless &= outdeg[static_cast<std::size_t>(v)] == 1;
    if (exitless) return true;
  }
  return false;
}

bool simple(const Pattern& adj) {
  return !no_exit_cycle_exists(adj) && !nontrivial_sh_exists(adj);
}

}  // namespace oracle

// ---------------------------------------------------------------------------

namespace {

struct Criterion {
  int id;
  std::string name;
  bool (*run)(std::uint64_t seed, std::string& detail);
};

bool check_three_state_oracle(std::uint64_t, std::string& detail) {
  int agreements = 0;
  int total = 0;
  for (int c0 = 1; c0 < 8; ++c0) {
    for (int c1 = 1; c1 < 8; ++c1) {
      for (int c2 = 1; c2 < 8; ++c2) {
        int cols[3] = {c0, c1, c2};
        FiniteKernel k;
        k.states = {"a", "b", "c"};
        k.kernel.assign(3, std::vector<Rational>(3));
        for (int j = 0; j < 3; ++j) {
          int count = __builtin_popcount(static_cast<unsigned>(cols[j]));
          for (int i = 0; i < 3; ++i) {
            if (cols[j] & (1 << i)) {
              k.kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                  Rational(1, count);
            }
          }
        }
        ++total;
        bool expected = oracle::simple(oracle::pattern_of(k));
        auto report = decide_simplicity(MarkovModel(k));
        bool got = report.verdict == SimplicityVerdict::Simple;
        if (report.verdict == SimplicityVerdict::Inconclusive) return false;
        if (expected == got) ++agreements;
      }
    }
  }
  std::ostringstream s;
  s << agreements << "/" << total << " support patterns agree with the brute-force oracle";
  detail = s.str();
  return agreements == total && total == 343;
}

bool check_correspondence(std::uint64_t seed, std::string& detail) {
  std::uint64_t state = seed ^ 0x02;
  int models = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int n = 2 + next_below(state, 4);  // 2..5 states
    FiniteKernel k = random_kernel(state, n, /*sink_free=*/true);
    MarkovModel model(k);
    Quiver q = build_quiver(model);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      IndexSet u;
      for (int v = 0; v < n; ++v) {
        if (mask & (1u << v)) u.push_back(v);
      }
      SubsetReport r = classify_subset(q, model, u);
      bool sh = r.hereditary && r.saturated;
      bool sa = is_strongly_absorbing(model, complement_set(u, n));
      if (sh != sa) {
        detail = "mismatch on a " + std::to_string(n) + "-state model, subset mask " +
                 std::to_string(mask);
        return false;
      }
    }
    ++models;
  }
  detail = std::to_string(models) + " sink-free models, all subsets match";
  return models == 500;
}

bool check_reflection_grids(std::uint64_t, std::string& detail) {
  std::ostringstream s;
  for (int base : {11, 101, 1001}) {
    MarkovModel model(reflection_system(base));
    auto report = decide_simplicity(model);
    if (report.verdict != SimplicityVerdict::NotSimple) {
      detail = "grid " + std::to_string(base) + ": expected not_simple";
      return false;
    }
    if (report.condition_l.verdict != ConditionLVerdict::CertifiedAtRefinements) {
      detail = "grid " + std::to_string(base) + ": condition (L) not certified";
      return false;
    }
    for (long long count : report.condition_l.base_point_counts) {
      if (count != 1) {
        detail = "grid " + std::to_string(base) + ": base-point count " + std::to_string(count);
        return false;
      }
    }
    long long expected_sets = (base + 1) / 2;
    if (report.strongly_absorbing_count != expected_sets) {
      detail = "grid " + std::to_string(base) + ": " +
               std::to_string(report.strongly_absorbing_count) + " minimal strongly absorbing, " +
               "expected " + std::to_string(expected_sets);
      return false;
    }
    s << "grid " << base << ": certified, " << expected_sets << " minimal sets; ";
  }
  detail = s.str();
  return true;
}

bool check_uniform_simple(std::uint64_t, std::string& detail) {
  for (int n = 2; n <= 8; ++n) {
    auto report = decide_simplicity(MarkovModel(uniform_model(n)));
    if (report.verdict != SimplicityVerdict::Simple) {
      detail = "uniform kernel on " + std::to_string(n) + " states not judged simple";
      return false;
    }
  }
  detail = "uniform kernels on 2..8 states are simple";
  return true;
}

bool check_dual_k_theory(std::uint64_t seed, std::string& detail) {
  std::uint64_t state = seed ^ 0x05;
  for (int trial = 0; trial < 200; ++trial) {
    Quiver g = random_multigraph(state, 2, 6, 3);
    Quiver dual = dual_quiver(g);
    KTheoryInvariant base_k = k_theory_finite_graph(g);
    KTheoryInvariant dual_k = k_theory_finite_graph(dual);
    if (!(base_k == dual_k)) {
      detail = "K-theory mismatch at trial " + std::to_string(trial) + ": " + base_k.to_string() +
               " vs " + dual_k.to_string();
      return false;
    }
    if (!verify_dual_realization(g)) {
      detail = "dual realization failed at trial " + std::to_string(trial);
      return false;
    }
  }
  detail = "200 sink-free graphs: K-theory equal and dual realization verified";
  return true;
}

bool check_isometry_bound(std::uint64_t seed, std::string& detail) {
  std::uint64_t state = seed ^ 0x06;
  double worst = 0.0;
  for (const IfsSystem& ifs : {tent_ifs(), cantor_ifs()}) {
    for (int wv = 0; wv < 10; ++wv) {
      std::vector<double> weights(static_cast<std::size_t>(ifs.map_count()));
      double total = 0.0;
      for (double& w : weights) {
        w = 0.05 + next_unit(state);
        total += w;
      }
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        weights[i] /= total;
        acc += weights[i];
      }
      weights.back() = 1.0 - acc;  // exact unit sum
      double dev = check_isometry(ifs, weights, 100, 2, next_u64(state));
      worst = std::max(worst, dev);
    }
  }
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << "max inner-product deviation " << worst;
  detail = s.str();
  return worst <= 1e-9;
}

bool check_path_power(std::uint64_t seed, std::string& detail) {
  std::uint64_t state = seed ^ 0x07;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + next_below(state, 5);  // 2..6 states
    FiniteKernel k = random_kernel(state, n, false);
    Quiver q = build_quiver(MarkovModel(k));
    auto pattern = oracle::pattern_of(k);
    for (int len = 1; len <= 6; ++len) {
      auto power = oracle::bool_power(pattern, len);
      for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) {
          bool via_paths = reachable(q, v, w, len);
          bool via_power = power[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] != 0;
          if (via_paths != via_power) {
            detail = "trial " + std::to_string(trial) + ": reachability disagrees at length " +
                     std::to_string(len);
            return false;
          }
        }
      }
    }
  }
  detail = "100 kernels, all lengths <= 6: reachability matches support-pattern powers";
  return true;
}

bool check_absorbing_powers(std::uint64_t seed, std::string& detail) {
  std::uint64_t state = seed ^ 0x08;
  long long absorbing_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + next_below(state, 7);  // 2..8 states
    FiniteKernel k = random_kernel(state, n, false);
    MarkovModel model(k);
    std::vector<FiniteKernel> powers;
    for (int m = 2; m <= 5; ++m) powers.push_back(kernel_power(k, m));
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      IndexSet b;
      for (int v = 0; v < n; ++v) {
        if (mask & (1u << v)) b.push_back(v);
      }
      if (!is_absorbing(model, b)) continue;
      ++absorbing_seen;
      for (const auto& p : powers) {
        if (!is_absorbing(MarkovModel(p), b)) {
          detail = "absorbing set lost under a kernel power at trial " + std::to_string(trial);
          return false;
        }
      }
    }
  }
  detail = std::to_string(absorbing_seen) + " absorbing sets stay absorbing for powers 2..5";
  return absorbing_seen > 0;
}

bool check_hutchinson(std::uint64_t, std::string& detail) {
  IfsSystem cantor = cantor_ifs();
  auto conv = hereditary_triviality_check(cantor, {0.0}, 10);
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << "tolerance " << conv.tolerance << ";";
  for (int n = 1; n <= 10; ++n) {
    double bound = std::pow(3.0, -n) + conv.tolerance;
    double d = conv.distances[static_cast<std::size_t>(n - 1)];
    if (d > bound) {
      detail = "d_H at n=" + std::to_string(n) + " exceeds 3^-n + tolerance";
      return false;
    }
  }
  s << " all 10 distances within 3^-n + tolerance";
  detail = s.str();
  return true;
}

bool check_word_fixed_points(std::uint64_t, std::string& detail) {
  long long words = 0;
  for (const IfsSystem& ifs : {tent_ifs(), cantor_ifs()}) {
    std::vector<int> word;
    for (int len = 1; len <= 8; ++len) {
      word.assign(static_cast<std::size_t>(len), 0);
      while (true) {
        AffineMap composed = compose_word(ifs, word);
        double x = word_fixed_point(ifs, word);
        if (std::abs(composed.eval(x) - x) > 1e-12) {
          detail = "fixed-point residual too large for a word of length " + std::to_string(len);
          return false;
        }
        // Banach iteration from the interval midpoint as the oracle
        double it = 0.5 * (ifs.lower.to_double() + ifs.upper.to_double());
        for (int step = 0; step < 200; ++step) {
          double nxt = composed.eval(it);
          if (std::abs(nxt - it) < 1e-15) {
            it = nxt;
            break;
          }
          it = nxt;
        }
        if (std::abs(it - x) > 1e-10) {
          detail = "closed form and iteration disagree for a word of length " + std::to_string(len);
          return false;
        }
        ++words;
        int pos = len - 1;
        while (pos >= 0 && word[static_cast<std::size_t>(pos)] == ifs.map_count() - 1) {
          word[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
        ++word[static_cast<std::size_t>(pos)];
      }
    }
  }
  detail = std::to_string(words) + " words checked against the iteration oracle";
  return words == 2 * (2 + 4 + 8 + 16 + 32 + 64 + 128 + 256);
}

}  // namespace

std::vector<CheckResult> run_acceptance(std::uint64_t seed) {
  static const Criterion criteria[] = {
      {1, "three-state simplicity matches the brute-force oracle", check_three_state_oracle},
      {2, "saturated+hereditary <=> complement strongly absorbing", check_correspondence},
      {3, "reflection system: certified condition (L), minimal absorbing pairs",
       check_reflection_grids},
      {4, "uniform kernels are simple", check_uniform_simple},
      {5, "dual graphs: equal K-theory and verified realization", check_dual_k_theory},
      {6, "weight-rescaling isometry deviation <= 1e-9", check_isometry_bound},
      {7, "path reachability equals support-pattern powers", check_path_power},
      {8, "absorbing sets stay absorbing under kernel powers", check_absorbing_powers},
      {9, "Hutchinson iteration contracts at rate 1/3", check_hutchinson},
      {10, "word fixed points: closed form vs iteration", check_word_fixed_points},
  };
  std::vector<CheckResult> results;
  for (const auto& c : criteria) {
    CheckResult r;
    r.id = c.id;
    r.name = c.name;
    auto start = std::chrono::steady_clock::now();
    try {
      r.passed = c.run(seed, r.detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace mql::selftest
