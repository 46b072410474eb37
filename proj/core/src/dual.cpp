#include "mql/dual.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace mql {

Quiver dual_quiver(const Quiver& q) {
  q.validate();
  Quiver dual;
  dual.interior_mode = InteriorMode::Discrete;
  dual.vertices.reserve(static_cast<std::size_t>(q.edge_count()));
  for (int e = 0; e < q.edge_count(); ++e) {
    dual.vertices.push_back(q.edge_id(e));
  }
  auto by_source = q.out_edges();
  for (int e1 = 0; e1 < q.edge_count(); ++e1) {
    int mid = q.edges[static_cast<std::size_t>(e1)].range;
    for (int e2 : by_source[static_cast<std::size_t>(mid)]) {
      dual.edges.push_back(QuiverEdge{"(" + q.edge_id(e1) + "," + q.edge_id(e2) + ")", e1, e2,
                                      q.edges[static_cast<std::size_t>(e1)].weight});
    }
  }
  return dual;
}

FiniteKernel markov_from_quiver(const Quiver& q) {
  try {
    q.validate();
  } catch (const validation_error& e) {
    // per-vertex probability weights are a precondition here
    throw precondition_error(e.what());
  }
  auto in = q.in_edges();
  for (int v = 0; v < q.vertex_count(); ++v) {
    if (in[static_cast<std::size_t>(v)].empty()) {
      throw precondition_error(
          "dual realization needs a surjective range map and per-vertex probability weights; "
          "vertex '" + q.vertices[static_cast<std::size_t>(v)] + "' has no incoming edge");
    }
  }
  int m = q.edge_count();
  FiniteKernel kernel;
  kernel.states.reserve(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) kernel.states.push_back(q.edge_id(e));
  kernel.kernel.assign(static_cast<std::size_t>(m),
                       std::vector<Rational>(static_cast<std::size_t>(m)));
  for (int e1 = 0; e1 < m; ++e1) {
    for (int e2 = 0; e2 < m; ++e2) {
      if (q.edges[static_cast<std::size_t>(e1)].range ==
          q.edges[static_cast<std::size_t>(e2)].source) {
        kernel.kernel[static_cast<std::size_t>(e1)][static_cast<std::size_t>(e2)] =
            q.edges[static_cast<std::size_t>(e1)].weight;
      }
    }
  }
  kernel.validate();
  return kernel;
}

namespace {

struct VertexSignature {
  std::size_t out_degree = 0;
  std::size_t in_degree = 0;
  std::vector<Rational> out_weights;  // sorted
  std::vector<Rational> in_weights;   // sorted

  bool operator==(const VertexSignature&) const = default;
};

std::vector<VertexSignature> signatures(const Quiver& q) {
  std::vector<VertexSignature> sig(q.vertices.size());
  for (const auto& e : q.edges) {
    auto& s = sig[static_cast<std::size_t>(e.source)];
    auto& r = sig[static_cast<std::size_t>(e.range)];
    ++s.out_degree;
    ++r.in_degree;
    s.out_weights.push_back(e.weight);
    r.in_weights.push_back(e.weight);
  }
  for (auto& s : sig) {
    std::sort(s.out_weights.begin(), s.out_weights.end());
    std::sort(s.in_weights.begin(), s.in_weights.end());
  }
  return sig;
}

// multiset of weights on edges v -> w
std::map<std::pair<int, int>, std::vector<Rational>> weight_table(const Quiver& q) {
  std::map<std::pair<int, int>, std::vector<Rational>> table;
  for (const auto& e : q.edges) {
    table[{e.source, e.range}].push_back(e.weight);
  }
  for (auto& [key, weights] : table) std::sort(weights.begin(), weights.end());
  return table;
}

bool match(int pos, const std::vector<int>& order, std::vector<int>& image,
           std::vector<char>& used, const std::vector<VertexSignature>& sig_a,
           const std::vector<VertexSignature>& sig_b,
           const std::map<std::pair<int, int>, std::vector<Rational>>& tab_a,
           const std::map<std::pair<int, int>, std::vector<Rational>>& tab_b) {
  if (pos == static_cast<int>(order.size())) return true;
  int v = order[static_cast<std::size_t>(pos)];
  for (int w = 0; w < static_cast<int>(sig_b.size()); ++w) {
    if (used[static_cast<std::size_t>(w)]) continue;
    if (!(sig_a[static_cast<std::size_t>(v)] == sig_b[static_cast<std::size_t>(w)])) continue;
    bool ok = true;
    for (int p = 0; p < pos && ok; ++p) {
      int u = order[static_cast<std::size_t>(p)];
      int fu = image[static_cast<std::size_t>(u)];
      auto eq = [&](int a1, int a2, int b1, int b2) {
        auto ia = tab_a.find({a1, a2});
        auto ib = tab_b.find({b1, b2});
        bool ea = ia == tab_a.end();
        bool eb = ib == tab_b.end();
        if (ea != eb) return false;
        if (ea) return true;
        return ia->second == ib->second;
      };
      ok = eq(v, u, w, fu) && eq(u, v, fu, w);
    }
    if (!ok) continue;
    if (!(tab_a.count({v, v}) == 0
              ? tab_b.count({w, w}) == 0
              : tab_b.count({w, w}) != 0 && tab_a.at({v, v}) == tab_b.at({w, w}))) {
      continue;
    }
    image[static_cast<std::size_t>(v)] = w;
    used[static_cast<std::size_t>(w)] = 1;
    if (match(pos + 1, order, image, used, sig_a, sig_b, tab_a, tab_b)) return true;
    used[static_cast<std::size_t>(w)] = 0;
    image[static_cast<std::size_t>(v)] = -1;
  }
  return false;
}

}  // namespace

bool quivers_isomorphic(const Quiver& a, const Quiver& b) {
  if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
  auto sig_a = signatures(a);
  auto sig_b = signatures(b);
  {
    auto sa = sig_a;
    auto sb = sig_b;
    auto key = [](const VertexSignature& s) {
      return std::make_tuple(s.out_degree, s.in_degree, s.out_weights, s.in_weights);
    };
    std::sort(sa.begin(), sa.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    std::sort(sb.begin(), sb.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    if (!(sa == sb)) return false;
  }
  auto tab_a = weight_table(a);
  auto tab_b = weight_table(b);

  // most-constrained first: rare signatures early
  std::map<std::tuple<std::size_t, std::size_t, std::vector<Rational>, std::vector<Rational>>, int>
      freq;
  for (const auto& s : sig_a) {
    ++freq[std::make_tuple(s.out_degree, s.in_degree, s.out_weights, s.in_weights)];
  }
  std::vector<int> order(static_cast<std::size_t>(a.vertex_count()));
  for (int v = 0; v < a.vertex_count(); ++v) order[static_cast<std::size_t>(v)] = v;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const auto& sx = sig_a[static_cast<std::size_t>(x)];
    const auto& sy = sig_a[static_cast<std::size_t>(y)];
    int fx = freq[std::make_tuple(sx.out_degree, sx.in_degree, sx.out_weights, sx.in_weights)];
    int fy = freq[std::make_tuple(sy.out_degree, sy.in_degree, sy.out_weights, sy.in_weights)];
    if (fx != fy) return fx < fy;
    return x < y;
  });

  std::vector<int> image(static_cast<std::size_t>(a.vertex_count()), -1);
  std::vector<char> used(static_cast<std::size_t>(b.vertex_count()), 0);
  return match(0, order, image, used, sig_a, sig_b, tab_a, tab_b);
}

bool verify_dual_realization(const Quiver& q) {
  Quiver from_operator = build_quiver(MarkovModel(markov_from_quiver(q)));
  Quiver dual = dual_quiver(q);
  return quivers_isomorphic(from_operator, dual);
}

namespace {

long long checked_mul(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) * b;
  if (r > std::numeric_limits<long long>::max() || r < std::numeric_limits<long long>::min()) {
    throw std::overflow_error("integer overflow in Smith reduction");
  }
  return static_cast<long long>(r);
}

long long checked_add(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) + b;
  if (r > std::numeric_limits<long long>::max() || r < std::numeric_limits<long long>::min()) {
    throw std::overflow_error("integer overflow in Smith reduction");
  }
  return static_cast<long long>(r);
}

}  // namespace

SmithNormalForm smith_normal_form(std::vector<std::vector<long long>> m) {
  SmithNormalForm out;
  if (m.empty()) return out;
  std::size_t rows = m.size();
  std::size_t cols = m[0].size();
  for (const auto& row : m) {
    if (row.size() != cols) throw dimension_error("ragged matrix");
  }

  std::size_t limit = rows < cols ? rows : cols;
  for (std::size_t s = 0; s < limit; ++s) {
    while (true) {
      // smallest nonzero entry of the trailing block becomes the pivot
      std::size_t pr = s;
      std::size_t pc = s;
      long long best = 0;
      for (std::size_t i = s; i < rows; ++i) {
        for (std::size_t j = s; j < cols; ++j) {
          long long v = m[i][j] < 0 ? -m[i][j] : m[i][j];
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            pr = i;
            pc = j;
          }
        }
      }
      if (best == 0) {
        s = limit;  // trailing block vanished
        break;
      }
      std::swap(m[s], m[pr]);
      for (std::size_t i = 0; i < rows; ++i) std::swap(m[i][s], m[i][pc]);

      bool reduced = true;
      for (std::size_t i = s + 1; i < rows; ++i) {
        if (m[i][s] != 0) {
          long long f = m[i][s] / m[s][s];
          for (std::size_t j = s; j < cols; ++j) {
            m[i][j] = checked_add(m[i][j], -checked_mul(f, m[s][j]));
          }
          if (m[i][s] != 0) reduced = false;
        }
      }
      for (std::size_t j = s + 1; j < cols; ++j) {
        if (m[s][j] != 0) {
          long long f = m[s][j] / m[s][s];
          for (std::size_t i = s; i < rows; ++i) {
            m[i][j] = checked_add(m[i][j], -checked_mul(f, m[i][s]));
          }
          if (m[s][j] != 0) reduced = false;
        }
      }
      if (!reduced) continue;

      // divisibility: fold a non-divisible entry into the pivot row
      bool divides = true;
      for (std::size_t i = s + 1; i < rows && divides; ++i) {
        for (std::size_t j = s + 1; j < cols && divides; ++j) {
          if (m[i][j] % m[s][s] != 0) {
            for (std::size_t jj = s; jj < cols; ++jj) {
              m[s][jj] = checked_add(m[s][jj], m[i][jj]);
            }
            divides = false;
          }
        }
      }
      if (divides) break;
    }
    if (s >= limit) break;
  }

  for (std::size_t s = 0; s < limit; ++s) {
    long long d = m[s][s] < 0 ? -m[s][s] : m[s][s];
    if (d != 0) {
      out.invariant_factors.push_back(d);
      ++out.rank;
    }
  }
  return out;
}

KTheoryInvariant k_theory_finite_graph(const Quiver& q) {
  auto classification = classify_vertices(q);
  if (!classification.sinks.empty()) {
    throw precondition_error("K-theory formula applies to sink-free graphs only; vertex '" +
                             q.vertices[static_cast<std::size_t>(classification.sinks.front())] +
                             "' is a sink");
  }
  int n = q.vertex_count();
  auto a = q.adjacency();
  std::vector<std::vector<long long>> m(static_cast<std::size_t>(n),
                                        std::vector<long long>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          (i == j ? 1 : 0) - a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
  }
  SmithNormalForm snf = smith_normal_form(std::move(m));
  KTheoryInvariant inv;
  inv.free_rank_K0 = n - snf.rank;
  inv.rank_K1 = n - snf.rank;
  for (long long d : snf.invariant_factors) {
    if (d > 1) inv.torsion_K0.push_back(d);
  }
  return inv;
}

std::string KTheoryInvariant::to_string() const {
  std::ostringstream out;
  out << "K0 = ";
  bool wrote = false;
  if (free_rank_K0 == 1) {
    out << "Z";
    wrote = true;
  } else if (free_rank_K0 > 1) {
    out << "Z^" << free_rank_K0;
    wrote = true;
  }
  for (long long d : torsion_K0) {
    if (wrote) out << " ⊕ ";
    out << "Z/" << d;
    wrote = true;
  }
  if (!wrote) out << "0";
  out << ", K1 = ";
  if (rank_K1 == 0) {
    out << "0";
  } else if (rank_K1 == 1) {
    out << "Z";
  } else {
    out << "Z^" << rank_K1;
  }
  return out.str();
}

}  // namespace mql
