#ifndef HAMLAB_DIGRAPH_HPP
#define HAMLAB_DIGRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hamlab/error.hpp"

namespace hamlab {

using Edge = std::pair<int, int>;
using VertexSet = std::vector<int>;  // sorted, duplicate-free

enum class Direction { out, in };

/// Loop-free digraph on vertices [0, n) with at most one edge per ordered pair.
/// Immutable after construction; the in-lists are the exact transpose of the out-lists.
class Digraph {
 public:
  Digraph() = default;

  /// Throws malformed_input on out-of-range endpoints, self-loops or duplicate edges.
  Digraph(int n, std::span<const Edge> edges) : out_(check_n(n)), in_(n) {
    for (const auto& [u, v] : edges) {
      if (u < 0 || u >= n || v < 0 || v >= n)
        fail(ErrorKind::malformed_input,
             "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
      if (u == v) fail(ErrorKind::malformed_input, "self-loop at vertex " + std::to_string(u));
      out_[u].push_back(v);
      in_[v].push_back(u);
    }
    for (int v = 0; v < n; ++v) {
      std::sort(out_[v].begin(), out_[v].end());
      std::sort(in_[v].begin(), in_[v].end());
      if (std::adjacent_find(out_[v].begin(), out_[v].end()) != out_[v].end())
        fail(ErrorKind::malformed_input, "duplicate edge out of vertex " + std::to_string(v));
    }
    edge_count_ = edges.size();
  }

  Digraph(int n, const std::vector<Edge>& edges) : Digraph(n, std::span<const Edge>(edges)) {}

  static Digraph complete(int n) {
    std::vector<Edge> e;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v) e.emplace_back(u, v);
    return Digraph(n, e);
  }

  static Digraph cycle(int n) {
    std::vector<Edge> e;
    for (int u = 0; u < n; ++u) e.emplace_back(u, (u + 1) % n);
    return Digraph(n, e);
  }

  static Digraph path(int n) {
    std::vector<Edge> e;
    for (int u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
    return Digraph(n, e);
  }

  int order() const noexcept { return static_cast<int>(out_.size()); }
  std::size_t size() const noexcept { return edge_count_; }

  const std::vector<int>& out(int v) const { return out_[v]; }
  const std::vector<int>& in(int v) const { return in_[v]; }
  const std::vector<int>& neighbors(int v, Direction dir) const {
    return dir == Direction::out ? out_[v] : in_[v];
  }
  int out_degree(int v) const { return static_cast<int>(out_[v].size()); }
  int in_degree(int v) const { return static_cast<int>(in_[v].size()); }

  bool has_edge(int u, int v) const {
    return std::binary_search(out_[u].begin(), out_[u].end(), v);
  }

  /// Edges in canonical lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> e;
    e.reserve(edge_count_);
    for (int u = 0; u < order(); ++u)
      for (int v : out_[u]) e.emplace_back(u, v);
    return e;
  }

  int min_out_degree() const {
    int best = order() == 0 ? 0 : out_degree(0);
    for (int v = 1; v < order(); ++v) best = std::min(best, out_degree(v));
    return best;
  }
  int min_in_degree() const {
    int best = order() == 0 ? 0 : in_degree(0);
    for (int v = 1; v < order(); ++v) best = std::min(best, in_degree(v));
    return best;
  }
  int min_semidegree() const { return std::min(min_out_degree(), min_in_degree()); }

  bool is_complete() const {
    const auto n = static_cast<std::size_t>(order());
    return edge_count_ == n * (n == 0 ? 0 : n - 1);
  }

  friend bool operator==(const Digraph& a, const Digraph& b) { return a.out_ == b.out_; }

 private:
  static int check_n(int n) {
    if (n < 0) fail(ErrorKind::malformed_input, "negative vertex count");
    return n;
  }

  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::size_t edge_count_ = 0;
};

/// Sorted in/out degree sequences.  Storage is 0-based; `out_at`/`in_at` take the
/// 1-based index i of d_i and are the only place the conversion happens.
struct DegreeSequences {
  std::vector<int> out_sorted;
  std::vector<int> in_sorted;

  int n() const { return static_cast<int>(out_sorted.size()); }
  bool in_range(long long i) const { return i >= 1 && i <= n(); }
  int out_at(long long i) const { return out_sorted[static_cast<std::size_t>(i - 1)]; }
  int in_at(long long i) const { return in_sorted[static_cast<std::size_t>(i - 1)]; }
  int at(Direction dir, long long i) const { return dir == Direction::out ? out_at(i) : in_at(i); }
};

inline DegreeSequences degree_sequences(const Digraph& g) {
  DegreeSequences s;
  for (int v = 0; v < g.order(); ++v) {
    s.out_sorted.push_back(g.out_degree(v));
    s.in_sorted.push_back(g.in_degree(v));
  }
  std::sort(s.out_sorted.begin(), s.out_sorted.end());
  std::sort(s.in_sorted.begin(), s.in_sorted.end());
  return s;
}

/// Bipartite graph with classes A = [0, a_size) and B = [0, b_size).
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(int a_size, int b_size, std::vector<Edge> edges)
      : a_size_(a_size), b_size_(b_size), adj_(a_size) {
    if (a_size < 0 || b_size < 0) fail(ErrorKind::malformed_input, "negative class size");
    for (const auto& [a, b] : edges) {
      if (a < 0 || a >= a_size || b < 0 || b >= b_size)
        fail(ErrorKind::malformed_input, "bipartite edge out of range");
      adj_[a].push_back(b);
    }
    for (auto& row : adj_) {
      std::sort(row.begin(), row.end());
      if (std::adjacent_find(row.begin(), row.end()) != row.end())
        fail(ErrorKind::malformed_input, "duplicate bipartite edge");
    }
    edge_count_ = edges.size();
  }

  /// The bipartite graph (A,B)_G of edges of g directed from A to B.
  static BipartiteGraph from_pair(const Digraph& g, std::span<const int> a, std::span<const int> b) {
    std::vector<int> index_in_b(static_cast<std::size_t>(g.order()), -1);
    for (std::size_t j = 0; j < b.size(); ++j) index_in_b[static_cast<std::size_t>(b[j])] = static_cast<int>(j);
    std::vector<Edge> e;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (int w : g.out(a[i]))
        if (index_in_b[static_cast<std::size_t>(w)] >= 0) e.emplace_back(static_cast<int>(i), index_in_b[static_cast<std::size_t>(w)]);
    return BipartiteGraph(static_cast<int>(a.size()), static_cast<int>(b.size()), std::move(e));
  }

  int a_size() const noexcept { return a_size_; }
  int b_size() const noexcept { return b_size_; }
  std::size_t size() const noexcept { return edge_count_; }
  const std::vector<int>& adj(int a) const { return adj_[a]; }
  bool has_edge(int a, int b) const { return std::binary_search(adj_[a].begin(), adj_[a].end(), b); }

  std::vector<Edge> edges() const {
    std::vector<Edge> e;
    for (int a = 0; a < a_size_; ++a)
      for (int b : adj_[a]) e.emplace_back(a, b);
    return e;
  }

 private:
  int a_size_ = 0;
  int b_size_ = 0;
  std::vector<std::vector<int>> adj_;
  std::size_t edge_count_ = 0;
};

/// A spanning collection of vertex-disjoint cycles, stored as a successor permutation.
class OneFactor {
 public:
  OneFactor() = default;

  /// Builds from a successor map; validates it is a permutation without fixed points.
  explicit OneFactor(std::vector<int> succ) : succ_(std::move(succ)), pred_(succ_.size(), -1) {
    const int n = static_cast<int>(succ_.size());
    for (int v = 0; v < n; ++v) {
      const int s = succ_[v];
      if (s < 0 || s >= n) fail(ErrorKind::malformed_input, "successor out of range");
      if (s == v) fail(ErrorKind::malformed_input, "fixed point in successor map");
      if (pred_[s] != -1) fail(ErrorKind::malformed_input, "successor map is not a bijection");
      pred_[s] = v;
    }
    cycle_of_.assign(succ_.size(), -1);
    position_.assign(succ_.size(), -1);
    for (int v = 0; v < n; ++v) {
      if (cycle_of_[v] != -1) continue;
      std::vector<int> cyc;
      for (int x = v; cycle_of_[x] == -1; x = succ_[x]) {
        cycle_of_[x] = static_cast<int>(cycles_.size());
        position_[x] = static_cast<int>(cyc.size());
        cyc.push_back(x);
      }
      cycles_.push_back(std::move(cyc));
    }
  }

  static OneFactor from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
    std::vector<int> succ(static_cast<std::size_t>(n), -1);
    for (const auto& c : cycles) {
      if (c.size() < 2) fail(ErrorKind::malformed_input, "cycle shorter than 2");
      for (std::size_t i = 0; i < c.size(); ++i) {
        const int v = c[i];
        if (v < 0 || v >= n) fail(ErrorKind::malformed_input, "cycle vertex out of range");
        if (succ[v] != -1) fail(ErrorKind::malformed_input, "vertex on two cycles");
        succ[v] = c[(i + 1) % c.size()];
      }
    }
    for (int s : succ)
      if (s == -1) fail(ErrorKind::malformed_input, "cycles do not cover every vertex");
    return OneFactor(std::move(succ));
  }

  int order() const noexcept { return static_cast<int>(succ_.size()); }
  int successor(int x) const { return succ_[x]; }
  int predecessor(int x) const { return pred_[x]; }
  const std::vector<int>& successors() const noexcept { return succ_; }
  const std::vector<std::vector<int>>& cycles() const noexcept { return cycles_; }
  int cycle_of(int x) const { return cycle_of_[x]; }
  int position(int x) const { return position_[x]; }
  int cycle_length(int x) const { return static_cast<int>(cycles_[cycle_of_[x]].size()); }

  /// True iff every successor edge exists in `host` and the orders match.
  bool is_factor_of(const Digraph& host) const {
    if (host.order() != order()) return false;
    for (int v = 0; v < order(); ++v)
      if (!host.has_edge(v, succ_[v])) return false;
    return true;
  }

 private:
  std::vector<int> succ_;
  std::vector<int> pred_;
  std::vector<std::vector<int>> cycles_;
  std::vector<int> cycle_of_;
  std::vector<int> position_;
};

inline int factor_successor(const OneFactor& f, int x) { return f.successor(x); }
inline int factor_predecessor(const OneFactor& f, int x) { return f.predecessor(x); }

/// {dist(x->y), dist(y->x)} along the common F-cycle, or {} on different cycles.
/// For x == y this is {0, |C|}.
inline std::set<int> distances_on_factor(const OneFactor& f, int x, int y) {
  if (f.cycle_of(x) != f.cycle_of(y)) return {};
  const int len = f.cycle_length(x);
  const int forward = ((f.position(y) - f.position(x)) % len + len) % len;
  if (x == y) return {0, len};
  return {forward, len - forward};
}

struct HamiltonCertificate {
  std::vector<int> order;
};

inline bool verify_hamilton_cycle(const Digraph& g, const HamiltonCertificate& cert) {
  const int n = g.order();
  if (static_cast<int>(cert.order.size()) != n)
    fail(ErrorKind::malformed_input, "certificate has length " + std::to_string(cert.order.size()) +
                                         ", expected " + std::to_string(n));
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : cert.order) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (!g.has_edge(cert.order[i], cert.order[(i + 1) % n])) return false;
  return true;
}

inline void check_vertices(const Digraph& g, std::span<const int> a) {
  for (int v : a)
    if (v < 0 || v >= g.order())
      fail(ErrorKind::malformed_input, "vertex " + std::to_string(v) + " out of range");
}

/// G[A]; vertex i of the result is the i-th smallest element of A.
inline Digraph induced_subdigraph(const Digraph& g, std::span<const int> a) {
  check_vertices(g, a);
  VertexSet sorted(a.begin(), a.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> index(static_cast<std::size_t>(g.order()), -1);
  for (std::size_t i = 0; i < sorted.size(); ++i) index[sorted[i]] = static_cast<int>(i);
  std::vector<Edge> e;
  for (int u : sorted)
    for (int v : g.out(u))
      if (index[v] >= 0) e.emplace_back(index[u], index[v]);
  return Digraph(static_cast<int>(sorted.size()), e);
}

/// G \ A = G[V \ A].
inline Digraph remove_vertices(const Digraph& g, std::span<const int> a) {
  check_vertices(g, a);
  std::vector<char> drop(static_cast<std::size_t>(g.order()), 0);
  for (int v : a) drop[v] = 1;
  VertexSet keep;
  for (int v = 0; v < g.order(); ++v)
    if (!drop[v]) keep.push_back(v);
  return induced_subdigraph(g, keep);
}

/// N^+(A) or N^-(A): union of the out- (in-) neighbourhoods of the members of A.
inline VertexSet neighborhood(const Digraph& g, std::span<const int> a, Direction dir) {
  check_vertices(g, a);
  std::vector<char> hit(static_cast<std::size_t>(g.order()), 0);
  for (int v : a)
    for (int w : g.neighbors(v, dir)) hit[w] = 1;
  VertexSet out;
  for (int v = 0; v < g.order(); ++v)
    if (hit[v]) out.push_back(v);
  return out;
}

/// Vertices reachable from `source` (including it), optionally ignoring `blocked`.
inline std::vector<char> reachable_from(const Digraph& g, int source, Direction dir,
                                        const std::vector<char>* blocked = nullptr) {
  std::vector<char> seen(static_cast<std::size_t>(g.order()), 0);
  if (blocked && (*blocked)[source]) return seen;
  std::vector<int> stack{source};
  seen[source] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : g.neighbors(v, dir)) {
      if (seen[w] || (blocked && (*blocked)[w])) continue;
      seen[w] = 1;
      stack.push_back(w);
    }
  }
  return seen;
}

inline bool is_strongly_connected(const Digraph& g) {
  if (g.order() <= 1) return true;
  auto fwd = reachable_from(g, 0, Direction::out);
  auto bwd = reachable_from(g, 0, Direction::in);
  return std::all_of(fwd.begin(), fwd.end(), [](char c) { return c != 0; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](char c) { return c != 0; });
}

}  // namespace hamlab

#endif  // HAMLAB_DIGRAPH_HPP
