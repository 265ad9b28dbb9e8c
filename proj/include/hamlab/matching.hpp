#ifndef HAMLAB_MATCHING_HPP
#define HAMLAB_MATCHING_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

#include "hamlab/digraph.hpp"

namespace hamlab {

struct Matching {
  std::vector<Edge> pairs;  // (a, b), sorted by a
  std::size_t size() const { return pairs.size(); }
};

struct Cover {
  VertexSet a_side;
  VertexSet b_side;
  std::size_t size() const { return a_side.size() + b_side.size(); }
};

namespace detail {

/// Hopcroft-Karp on a BipartiteGraph.  Vertices are scanned in index order and
/// adjacency lists are sorted, so results are deterministic.
class HopcroftKarp {
 public:
  explicit HopcroftKarp(const BipartiteGraph& b)
      : b_(b), mate_a_(b.a_size(), -1), mate_b_(b.b_size(), -1), dist_(b.a_size()) {
    while (bfs()) {
      for (int a = 0; a < b_.a_size(); ++a)
        if (mate_a_[a] == -1) dfs(a);
    }
  }

  const std::vector<int>& mate_a() const { return mate_a_; }
  const std::vector<int>& mate_b() const { return mate_b_; }

  Matching matching() const {
    Matching m;
    for (int a = 0; a < b_.a_size(); ++a)
      if (mate_a_[a] != -1) m.pairs.emplace_back(a, mate_a_[a]);
    return m;
  }

  /// Alternating reachability from unmatched A-vertices: (in_z_a, in_z_b).
  std::pair<std::vector<char>, std::vector<char>> alternating_reach() const {
    std::vector<char> za(b_.a_size(), 0), zb(b_.b_size(), 0);
    std::queue<int> q;
    for (int a = 0; a < b_.a_size(); ++a)
      if (mate_a_[a] == -1) {
        za[a] = 1;
        q.push(a);
      }
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (int bv : b_.adj(a)) {
        if (zb[bv]) continue;
        zb[bv] = 1;
        const int next = mate_b_[bv];
        if (next != -1 && !za[next]) {
          za[next] = 1;
          q.push(next);
        }
      }
    }
    return {std::move(za), std::move(zb)};
  }

 private:
  static constexpr int inf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> q;
    bool found = false;
    for (int a = 0; a < b_.a_size(); ++a) {
      if (mate_a_[a] == -1) {
        dist_[a] = 0;
        q.push(a);
      } else {
        dist_[a] = inf;
      }
    }
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (int bv : b_.adj(a)) {
        const int next = mate_b_[bv];
        if (next == -1) {
          found = true;
        } else if (dist_[next] == inf) {
          dist_[next] = dist_[a] + 1;
          q.push(next);
        }
      }
    }
    return found;
  }

  // iterative to stay safe on long augmenting paths
  bool dfs(int root) {
    struct Frame {
      int a;
      std::size_t edge;
    };
    std::vector<Frame> stack{{root, 0}};
    std::vector<int> via;  // b-vertex used to leave each frame
    while (!stack.empty()) {
      auto& top = stack.back();
      const auto& adj = b_.adj(top.a);
      if (top.edge == adj.size()) {
        dist_[top.a] = inf;
        stack.pop_back();
        if (!via.empty()) via.pop_back();
        continue;
      }
      const int bv = adj[top.edge++];
      const int next = mate_b_[bv];
      if (next == -1) {
        via.push_back(bv);
        for (std::size_t i = 0; i < stack.size(); ++i) {
          mate_a_[stack[i].a] = via[i];
          mate_b_[via[i]] = stack[i].a;
        }
        return true;
      }
      if (dist_[next] == dist_[top.a] + 1) {
        via.push_back(bv);
        stack.push_back({next, 0});
      }
    }
    return false;
  }

  const BipartiteGraph& b_;
  std::vector<int> mate_a_;
  std::vector<int> mate_b_;
  std::vector<int> dist_;
};

inline VertexSet flagged(const std::vector<char>& f, bool want) {
  VertexSet out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if ((f[i] != 0) == want) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace detail

inline Matching max_matching(const BipartiteGraph& b) { return detail::HopcroftKarp(b).matching(); }

/// Konig cover (A \ Z) u (B n Z), Z = alternating reach of unmatched A-vertices.
inline Cover min_cover(const BipartiteGraph& b) {
  detail::HopcroftKarp hk(b);
  auto [za, zb] = hk.alternating_reach();
  return Cover{detail::flagged(za, false), detail::flagged(zb, true)};
}

/// S subset of A with |N(S)| = |S| - (|A| - nu(b)), i.e. of maximum deficiency.
inline VertexSet hall_violator(const BipartiteGraph& b) {
  detail::HopcroftKarp hk(b);
  return detail::flagged(hk.alternating_reach().first, true);
}

inline VertexSet bipartite_neighborhood(const BipartiteGraph& b, const VertexSet& s) {
  std::vector<char> hit(b.b_size(), 0);
  for (int a : s)
    for (int bv : b.adj(a)) hit[bv] = 1;
  return detail::flagged(hit, true);
}

/// max over S subset of A of |S| - |N(S)|, by enumeration (|A| <= 24).
inline int exhaustive_deficiency(const BipartiteGraph& b, VertexSet* worst = nullptr) {
  const int a = b.a_size();
  if (a > 24) fail(ErrorKind::scale, "exhaustive deficiency limited to |A| <= 24");
  std::vector<std::uint64_t> nb(a, 0);
  std::vector<std::vector<std::uint64_t>> nb_words(a);
  const int words = (b.b_size() + 63) / 64;
  for (int i = 0; i < a; ++i) {
    nb_words[i].assign(words, 0);
    for (int bv : b.adj(i)) nb_words[i][bv / 64] |= std::uint64_t{1} << (bv % 64);
  }
  int best = 0;
  std::uint32_t best_mask = 0;
  std::vector<std::uint64_t> acc(words);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << a); ++mask) {
    std::fill(acc.begin(), acc.end(), 0);
    int size = 0;
    for (int i = 0; i < a; ++i)
      if (mask >> i & 1U) {
        ++size;
        for (int w = 0; w < words; ++w) acc[w] |= nb_words[i][w];
      }
    int cnt = 0;
    for (auto w : acc) cnt += __builtin_popcountll(w);
    if (size - cnt > best) {
      best = size - cnt;
      best_mask = mask;
    }
  }
  if (worst) {
    worst->clear();
    for (int i = 0; i < a; ++i)
      if (best_mask >> i & 1U) worst->push_back(i);
  }
  return best;
}

/// Defect Hall: a matching of size >= |A| - D.  The hypothesis is checked
/// exhaustively when |A| <= 14; a failing S is the error witness.
inline Matching defect_hall_matching(const BipartiteGraph& b, int d) {
  if (b.a_size() <= 14) {
    VertexSet worst;
    if (exhaustive_deficiency(b, &worst) > d)
      fail(ErrorKind::precondition, "defect Hall hypothesis fails", worst);
  }
  detail::HopcroftKarp hk(b);
  Matching m = hk.matching();
  if (static_cast<int>(m.size()) < b.a_size() - d)
    fail(ErrorKind::contract, "matching shorter than |A| - D",
         detail::flagged(hk.alternating_reach().first, true));
  return m;
}

/// The doubled bipartite graph: both classes are V(j), a -> b iff ab is an edge.
inline BipartiteGraph doubled_bipartite(const Digraph& j) {
  return BipartiteGraph(j.order(), j.order(), j.edges());
}

/// Either a 1-factor or a set S with |N^+(S)| < |S|.
struct FactorCertificate {
  std::variant<OneFactor, VertexSet> value;

  bool has_factor() const { return std::holds_alternative<OneFactor>(value); }
  const OneFactor& factor() const { return std::get<OneFactor>(value); }
  const VertexSet& violator() const { return std::get<VertexSet>(value); }
};

inline FactorCertificate find_one_factor(const Digraph& j) {
  const auto gamma = doubled_bipartite(j);
  detail::HopcroftKarp hk(gamma);
  const auto& mate = hk.mate_a();
  if (std::all_of(mate.begin(), mate.end(), [](int x) { return x != -1; }))
    return FactorCertificate{OneFactor(mate)};
  return FactorCertificate{detail::flagged(hk.alternating_reach().first, true)};
}

namespace detail {

/// Max-flow on the split digraph: v_in = 2v, v_out = 2v+1.  Every vertex other
/// than the terminals has an internal arc of capacity 1; edge arcs are uncapacitated
/// (except a direct xy edge, which is one path) so minimum cuts consist of vertices.
class SplitFlow {
 public:
  SplitFlow(const Digraph& g, int x, int y) : n_(g.order()), x_(x), y_(y) {
    head_.assign(2 * n_, -1);
    for (int v = 0; v < n_; ++v) {
      const int cap = (v == x || v == y) ? n_ : 1;
      add_arc(2 * v, 2 * v + 1, cap);
    }
    // arcs into x or out of y never carry useful flow and would allow circulations
    for (int u = 0; u < n_; ++u)
      for (int v : g.out(u))
        if (u != y && v != x) add_arc(2 * u + 1, 2 * v, (u == x && v == y) ? 1 : n_);
  }

  /// Augments until `limit` units flow or no path remains; returns the flow value.
  int run(int limit) {
    const int s = 2 * x_ + 1, t = 2 * y_;
    while (flow_ < limit) {
      std::vector<int> parent_arc(2 * n_, -1);
      std::vector<char> seen(2 * n_, 0);
      std::queue<int> q;
      q.push(s);
      seen[s] = 1;
      while (!q.empty() && !seen[t]) {
        const int v = q.front();
        q.pop();
        for (int a = head_[v]; a != -1; a = next_[a]) {
          const int w = to_[a];
          if (cap_[a] > 0 && !seen[w]) {
            seen[w] = 1;
            parent_arc[w] = a;
            q.push(w);
          }
        }
      }
      if (!seen[t]) break;
      for (int v = t; v != s; v = to_[parent_arc[v] ^ 1]) {
        cap_[parent_arc[v]] -= 1;
        cap_[parent_arc[v] ^ 1] += 1;
      }
      ++flow_;
    }
    return flow_;
  }

  /// Vertices whose internal arc crosses the residual cut (a minimum separator).
  VertexSet cut_vertices() const {
    const int s = 2 * x_ + 1;
    std::vector<char> seen(2 * n_, 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int a = head_[v]; a != -1; a = next_[a])
        if (cap_[a] > 0 && !seen[to_[a]]) {
          seen[to_[a]] = 1;
          stack.push_back(to_[a]);
        }
    }
    VertexSet cut;
    for (int v = 0; v < n_; ++v)
      if (v != x_ && v != y_ && seen[2 * v] && !seen[2 * v + 1]) cut.push_back(v);
    return cut;
  }

  /// Decomposes the flow into vertex paths x .. y.
  std::vector<std::vector<int>> paths() {
    std::vector<std::vector<int>> out;
    // flow on an original arc u_out -> v_in equals the residual on its reverse
    std::vector<std::vector<int>> succ(n_);
    for (int u = 0; u < n_; ++u)
      for (int a = head_[2 * u + 1]; a != -1; a = next_[a])
        if ((a & 1) == 0 && to_[a] % 2 == 0 && cap_[a ^ 1] > 0 && to_[a] / 2 != u)
          succ[u].push_back(to_[a] / 2);
    for (auto& s : succ) std::sort(s.begin(), s.end(), std::greater<>());
    for (int p = 0; p < flow_; ++p) {
      std::vector<int> path{x_};
      int v = x_;
      while (v != y_) {
        const int w = succ[v].back();
        succ[v].pop_back();
        path.push_back(w);
        v = w;
      }
      out.push_back(std::move(path));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
    return out;
  }

 private:
  void add_arc(int u, int v, int cap) {
    to_.push_back(v), cap_.push_back(cap), next_.push_back(head_[u]), head_[u] = static_cast<int>(to_.size()) - 1;
    to_.push_back(u), cap_.push_back(0), next_.push_back(head_[v]), head_[v] = static_cast<int>(to_.size()) - 1;
  }

  int n_, x_, y_;
  int flow_ = 0;
  std::vector<int> head_, to_, cap_, next_;
};

}  // namespace detail

/// Up to `count` internally disjoint x -> y paths (fewer when fewer exist).
/// A direct edge xy counts as one path.
inline std::vector<std::vector<int>> internally_disjoint_paths(const Digraph& g, int x, int y,
                                                                int count) {
  if (x == y) fail(ErrorKind::parameter, "internally_disjoint_paths needs x != y");
  check_vertices(g, std::vector<int>{x, y});
  detail::SplitFlow flow(g, x, y);
  flow.run(count);
  return flow.paths();
}

/// kappa(x, y) for a non-adjacent ordered pair, capped at `limit`.
inline int local_connectivity(const Digraph& g, int x, int y, int limit) {
  detail::SplitFlow flow(g, x, y);
  return flow.run(limit);
}

struct SeparatorWitness {
  int x = -1, y = -1;  // separated ordered pair
  VertexSet separator;
};

namespace detail {

/// Scans ordered non-adjacent pairs (v_i, w), (w, v_i) for i = 0, 1, ... up to
/// the current bound; a separator of size < b leaves some v_i with i < b intact,
/// so this finds the minimum.  Returns the first pair attaining the minimum below `limit`.
inline std::optional<SeparatorWitness> min_separator_below(const Digraph& g, int limit) {
  const int n = g.order();
  std::optional<SeparatorWitness> best;
  int bound = limit;
  for (int i = 0; i < n && i <= bound; ++i) {
    for (int w = 0; w < n; ++w) {
      if (w == i) continue;
      for (int dir = 0; dir < 2; ++dir) {
        const int x = dir == 0 ? i : w;
        const int y = dir == 0 ? w : i;
        if (g.has_edge(x, y)) continue;
        SplitFlow flow(g, x, y);
        const int value = flow.run(bound);
        if (value < bound) {
          bound = value;
          best = SeparatorWitness{x, y, flow.cut_vertices()};
        }
      }
    }
  }
  return best;
}

}  // namespace detail

/// max k with g strongly k-connected; n-1 for a complete digraph, 0 if not strongly connected.
inline int strong_connectivity(const Digraph& g) {
  const int n = g.order();
  if (n <= 1) return 0;
  if (!is_strongly_connected(g)) return 0;
  auto sep = detail::min_separator_below(g, n - 1);
  return sep ? static_cast<int>(sep->separator.size()) : n - 1;
}

/// A separator of size < k if one exists.
inline std::optional<SeparatorWitness> find_separator_witness(const Digraph& g, int k) {
  if (k <= 0) return std::nullopt;
  if (!is_strongly_connected(g)) {
    // empty separator; report a pair that is not mutually reachable
    auto fwd = reachable_from(g, 0, Direction::out);
    auto bwd = reachable_from(g, 0, Direction::in);
    for (int v = 0; v < g.order(); ++v) {
      if (!fwd[v]) return SeparatorWitness{0, v, {}};
      if (!bwd[v]) return SeparatorWitness{v, 0, {}};
    }
  }
  return detail::min_separator_below(g, k);
}

inline std::optional<VertexSet> find_separator(const Digraph& g, int k) {
  auto w = find_separator_witness(g, k);
  if (!w) return std::nullopt;
  return w->separator;
}

/// Strongly k-connected: more than k vertices and no separator of size < k.
inline bool is_strongly_k_connected(const Digraph& g, int k) {
  if (g.order() <= k) return false;
  return !find_separator_witness(g, k).has_value();
}

}  // namespace hamlab

#endif  // HAMLAB_MATCHING_HPP
