#ifndef HAMLAB_SHIFTED_WALKS_HPP
#define HAMLAB_SHIFTED_WALKS_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hamlab/digraph.hpp"
#include "hamlab/matching.hpp"
#include "hamlab/rational.hpp"

namespace hamlab {

/// H has a -> b iff r has pred(a) -> b: a walk entering a's cycle at a, going
/// round to pred(a) and leaving for b. Loops (the F-edges themselves) are dropped.
inline Digraph build_H(const Digraph& r, const OneFactor& f) {
  const int k = r.order();
  if (f.order() != k) fail(ErrorKind::parameter, "factor and reduced digraph differ in order");
  std::vector<Edge> edges;
  for (int a = 0; a < k; ++a)
    for (int b : r.out(f.predecessor(a)))
      if (b != a) edges.emplace_back(a, b);
  return Digraph(k, edges);
}

/// Number of loops build_H discarded at each vertex (0 or 1).
inline std::vector<int> dropped_loops(const Digraph& r, const OneFactor& f) {
  std::vector<int> out(static_cast<std::size_t>(r.order()), 0);
  for (int a = 0; a < r.order(); ++a) out[a] = r.has_edge(f.predecessor(a), a) ? 1 : 0;
  return out;
}

/// X_1 C_1 X_1^- X_2 ... X_t C_t X_t^- X_{t+1}; `entrances` holds X_1..X_{t+1}.
/// An empty walk (t = 0) has a single entrance a = b.
struct ShiftedWalk {
  std::vector<int> entrances;

  int t() const { return entrances.empty() ? 0 : static_cast<int>(entrances.size()) - 1; }
  int from() const { return entrances.front(); }
  int to() const { return entrances.back(); }

  /// Full cluster sequence, final vertex included.
  std::vector<int> expand(const OneFactor& f) const {
    std::vector<int> seq;
    for (int i = 0; i < t(); ++i) {
      const int x = entrances[i];
      for (int y = x;; y = f.successor(y)) {
        seq.push_back(y);
        if (f.successor(y) == x) break;
      }
    }
    seq.push_back(to());
    return seq;
  }

  /// Throws malformed_input when a connecting edge X_i^- X_{i+1} is missing from r.
  void validate(const Digraph& r, const OneFactor& f) const {
    if (entrances.empty()) fail(ErrorKind::malformed_input, "walk without endpoints");
    for (int x : entrances)
      if (x < 0 || x >= r.order()) fail(ErrorKind::malformed_input, "walk cluster out of range", {x});
    for (int i = 0; i < t(); ++i) {
      const int exit = f.predecessor(entrances[i]);
      if (!r.has_edge(exit, entrances[i + 1]))
        fail(ErrorKind::malformed_input, "connecting edge missing from host", {exit, entrances[i + 1]});
    }
  }
};

/// True iff each F-cycle met by w minus its last vertex is visited evenly.
inline bool cycle_balanced(const ShiftedWalk& w, const OneFactor& f) {
  auto seq = w.expand(f);
  seq.pop_back();
  std::vector<int> count(static_cast<std::size_t>(f.order()), 0);
  for (int x : seq) ++count[x];
  for (const auto& c : f.cycles())
    for (int x : c)
      if (count[x] != count[c.front()]) return false;
  return true;
}

struct WalkUsage {
  std::vector<int> uses, internal_uses, entrance_uses, exit_uses, entered, exited;

  explicit WalkUsage(int k = 0)
      : uses(k, 0), internal_uses(k, 0), entrance_uses(k, 0), exit_uses(k, 0), entered(k, 0), exited(k, 0) {}

  long long total_uses() const {
    long long s = 0;
    for (int u : uses) s += u;
    return s;
  }

  WalkUsage& operator+=(const WalkUsage& o) {
    for (std::size_t i = 0; i < uses.size(); ++i) {
      uses[i] += o.uses[i];
      internal_uses[i] += o.internal_uses[i];
      entrance_uses[i] += o.entrance_uses[i];
      exit_uses[i] += o.exit_uses[i];
      entered[i] += o.entered[i];
      exited[i] += o.exited[i];
    }
    return *this;
  }
};

/// Uses are {X_1^-, X_2, X_2^-, ..., X_t, X_t^-, X_{t+1}}; internal ones drop
/// the first and the last. entered/exited skip connecting edges that are F-edges.
inline WalkUsage account(const ShiftedWalk& w, const OneFactor& f) {
  WalkUsage u(f.order());
  const int t = w.t();
  for (int i = 0; i < t; ++i) {
    const int exit = f.predecessor(w.entrances[i]);
    const int entrance = w.entrances[i + 1];
    ++u.exit_uses[exit];
    ++u.uses[exit];
    ++u.entrance_uses[entrance];
    ++u.uses[entrance];
    if (i > 0) ++u.internal_uses[exit];
    if (i + 1 < t) ++u.internal_uses[entrance];
    if (f.successor(exit) != entrance) {
      ++u.exited[exit];
      ++u.entered[entrance];
    }
  }
  return u;
}

inline WalkUsage account(const std::vector<ShiftedWalk>& walks, const OneFactor& f) {
  WalkUsage u(f.order());
  for (const auto& w : walks) u += account(w, f);
  return u;
}

/// Clusters internally used by w (entrances X_2..X_t and their predecessors).
inline VertexSet internal_clusters(const ShiftedWalk& w, const OneFactor& f) {
  VertexSet s;
  for (int i = 1; i < w.t(); ++i) {
    s.push_back(w.entrances[i]);
    s.push_back(f.predecessor(w.entrances[i]));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

/// Shortest walk by cycle count whose internal uses avoid `forbidden`, searched in a prebuilt H.
/// BFS: an intermediate entrance x is allowed iff neither x nor pred(x) is forbidden.
inline ShiftedWalk find_shifted_walk_in(const Digraph& h, const OneFactor& f, int a, int b,
                                        const VertexSet& forbidden = {}) {
  const int k = h.order();
  if (a < 0 || a >= k || b < 0 || b >= k) fail(ErrorKind::parameter, "walk endpoint out of range");
  std::vector<char> banned(static_cast<std::size_t>(k), 0);
  for (int x : forbidden) {
    if (x < 0 || x >= k) fail(ErrorKind::parameter, "forbidden cluster out of range", {x});
    banned[x] = 1;
  }
  if (banned[a] || banned[b]) fail(ErrorKind::parameter, "forbidden set contains an endpoint");
  if (a == b) return ShiftedWalk{{a}};
  std::vector<int> parent(static_cast<std::size_t>(k), -1);
  parent[a] = a;
  std::deque<int> queue{a};
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int y : h.out(x)) {
      if (parent[y] != -1) continue;
      if (y != b && (banned[y] || banned[f.predecessor(y)])) continue;
      parent[y] = x;
      if (y == b) {
        std::vector<int> seq{b};
        for (int v = b; v != a; v = parent[v]) seq.push_back(parent[v]);
        std::reverse(seq.begin(), seq.end());
        return ShiftedWalk{seq};
      }
      queue.push_back(y);
    }
  }
  fail(ErrorKind::unreachable, "no shifted walk between the clusters", {a, b});
}

inline ShiftedWalk find_shifted_walk(const Digraph& r, const OneFactor& f, int a, int b,
                                     const VertexSet& forbidden = {}) {
  auto w = find_shifted_walk_in(build_H(r, f), f, a, b, forbidden);
  w.validate(r, f);
  return w;
}

/// Cuts out the segment between two occurrences of the same X_i. Repeated
/// entrances and repeated exits both reduce to this, since pred is a bijection.
inline ShiftedWalk shorten_walk(const ShiftedWalk& w) {
  std::vector<int> out;
  for (int x : w.entrances) {
    auto it = std::find(out.begin(), out.end(), x);
    if (it != out.end()) out.erase(it + 1, out.end());
    else out.push_back(x);
  }
  return ShiftedWalk{out};
}

/// At least ceil(c^2 k / 16) walks a -> b of at most 2/c cycles with pairwise
/// disjoint internal uses, taken from ceil(ck) internally disjoint H-paths.
inline std::vector<ShiftedWalk> disjoint_shifted_walks(const Digraph& r, const OneFactor& f, int a, int b,
                                                       const Rational& c) {
  const int k = r.order();
  if (c <= 0 || c > 1) fail(ErrorKind::parameter, "c must lie in (0, 1]");
  if (a == b) fail(ErrorKind::parameter, "disjoint walks need distinct endpoints");
  const Digraph h = build_H(r, f);
  const int paths_wanted = static_cast<int>(ceil_of(c * Rational(k)));
  if (auto sep = find_separator_witness(h, paths_wanted))
    fail(ErrorKind::precondition, "H is not strongly ceil(ck)-connected", sep->separator);
  if (h.order() <= paths_wanted) fail(ErrorKind::precondition, "H has at most ceil(ck) vertices");
  auto paths = internally_disjoint_paths(h, a, b, paths_wanted);
  std::stable_sort(paths.begin(), paths.end(), [](const auto& p, const auto& q) { return p.size() < q.size(); });
  std::vector<ShiftedWalk> chosen;
  std::vector<char> used(static_cast<std::size_t>(k), 0);
  for (const auto& p : paths) {
    ShiftedWalk w{p};
    if (Rational(w.t()) * c > 2) continue;
    const auto internal = internal_clusters(w, f);
    if (std::any_of(internal.begin(), internal.end(), [&](int x) { return used[x]; })) continue;
    for (int x : internal) used[x] = 1;
    chosen.push_back(std::move(w));
  }
  const auto need = ceil_of(c * c * Rational(k) / Rational(16));
  if (static_cast<std::int64_t>(chosen.size()) < need)
    fail(ErrorKind::contract, "fewer disjoint shifted walks than ceil(c^2 k/16)", {static_cast<int>(chosen.size())});
  return chosen;
}

struct ComponentDecomposition {
  VertexSet S, C, D, C_small, D_small, C_prime, D_prime, S_prime;
  VertexSet L, R, M_V, T, M_H, B;
  VertexSet M_V_LR, M_V_RL, M_H_LR, M_H_RL;
  VertexSet undecided;       // M_V clusters meeting neither side of the dichotomy
  bool dichotomy_ok = true;  // every M_V cluster landed in exactly one refinement
  Rational eta, eta_prime, beta;
};

namespace detail {

inline int count_in(const Digraph& h, int v, Direction dir, const std::vector<char>& in_set) {
  int c = 0;
  for (int u : h.neighbors(v, dir)) c += in_set[u];
  return c;
}

inline std::vector<char> mask_of(const VertexSet& s, int k) {
  std::vector<char> m(static_cast<std::size_t>(k), 0);
  for (int v : s) m[v] = 1;
  return m;
}

inline VertexSet members(const std::vector<char>& flags) { return flagged(flags, true); }

}  // namespace detail

inline ComponentDecomposition decompose_components(const Digraph& h, const OneFactor& f, const Rational& eta,
                                                   const Rational& eta_prime, const Rational& beta) {
  const int k = h.order();
  if (f.order() != k) fail(ErrorKind::parameter, "factor and H differ in order");
  if (eta <= 0 || eta_prime <= 0 || beta <= 0) fail(ErrorKind::parameter, "eta, eta', beta must be positive");
  const int target = static_cast<int>(ceil_of(eta * Rational(k)));
  auto wit = find_separator_witness(h, target);
  if (!wit)
    fail(ErrorKind::wrong_pipeline, "H is strongly ceil(eta k)-connected; use the highly connected pipeline");
  ComponentDecomposition dec;
  dec.eta = eta;
  dec.eta_prime = eta_prime;
  dec.beta = beta;
  dec.S = wit->separator;
  std::sort(dec.S.begin(), dec.S.end());
  const auto in_s = detail::mask_of(dec.S, k);
  const auto in_c = reachable_from(h, wit->x, Direction::out, &in_s);
  std::vector<char> in_d(static_cast<std::size_t>(k), 0);
  for (int v = 0; v < k; ++v) in_d[v] = !in_s[v] && !in_c[v];
  dec.C = detail::members(in_c);
  dec.D = detail::members(in_d);

  const Rational small = beta * Rational(k) / Rational(10);
  std::vector<char> c_small(k, 0), d_small(k, 0);
  for (int v : dec.C)
    if (Rational(detail::count_in(h, v, Direction::in, in_c)) <= small) c_small[v] = 1;
  for (int v : dec.D)
    if (Rational(detail::count_in(h, v, Direction::out, in_d)) <= small) d_small[v] = 1;
  dec.C_small = detail::members(c_small);
  dec.D_small = detail::members(d_small);
  std::vector<char> c_prime(k, 0), d_prime(k, 0), s_prime(k, 0);
  for (int v = 0; v < k; ++v) {
    c_prime[v] = in_c[v] && !c_small[v];
    d_prime[v] = in_d[v] && !d_small[v];
    s_prime[v] = in_s[v] || c_small[v] || d_small[v];
  }
  dec.C_prime = detail::members(c_prime);
  dec.D_prime = detail::members(d_prime);
  dec.S_prime = detail::members(s_prime);

  const Rational thr = eta_prime * Rational(k);
  auto both_ways = [&](int v, const std::vector<char>& side) {
    return Rational(detail::count_in(h, v, Direction::out, side)) >= thr &&
           Rational(detail::count_in(h, v, Direction::in, side)) >= thr;
  };
  std::vector<char> in_l = c_prime, in_r = d_prime, in_m(k, 0);
  for (int v : dec.S_prime) {
    if (both_ways(v, c_prime)) in_l[v] = 1;
    else if (both_ways(v, d_prime)) in_r[v] = 1;
    else in_m[v] = 1;
  }
  dec.L = detail::members(in_l);
  dec.R = detail::members(in_r);
  dec.M_V = detail::members(in_m);
  for (int x = 0; x < k; ++x) {
    const int s = f.successor(x);
    if (in_l[s]) dec.T.push_back(x);
    else if (in_m[s]) dec.M_H.push_back(x);
    else dec.B.push_back(x);
  }

  auto below = [&](int v, Direction dir, const std::vector<char>& side) {
    return Rational(detail::count_in(h, v, dir, side)) < thr;
  };
  for (int v : dec.M_V) {
    const bool lr = below(v, Direction::out, c_prime) && below(v, Direction::in, d_prime);
    const bool rl = below(v, Direction::out, d_prime) && below(v, Direction::in, c_prime);
    if (lr) dec.M_V_LR.push_back(v);
    else if (rl) dec.M_V_RL.push_back(v);
    else dec.undecided.push_back(v);
    if (lr == rl) dec.dichotomy_ok = false;
  }
  for (int v : dec.M_V_LR) dec.M_H_LR.push_back(f.predecessor(v));
  for (int v : dec.M_V_RL) dec.M_H_RL.push_back(f.predecessor(v));
  std::sort(dec.M_H_LR.begin(), dec.M_H_LR.end());
  std::sort(dec.M_H_RL.begin(), dec.M_H_RL.end());
  return dec;
}

struct BoundCheck {
  std::string name;
  Rational margin;  // slack; negative means violated
  bool strict = false;  // strict bounds need margin > 0
  bool holds() const { return strict ? margin > 0 : margin >= 0; }
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.holds(); });
  }
  const BoundCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Report-only audit of the decomposition's size, connectivity and expansion bounds.
inline BoundReport verify_decomposition_bounds(const ComponentDecomposition& dec, const Digraph& h,
                                               const OneFactor& f, std::uint64_t seed = 0,
                                               int expansion_samples = 200) {
  const int k = h.order();
  const Rational kk(k);
  BoundReport rep;
  auto add = [&](std::string name, Rational margin, bool strict = false) {
    rep.checks.push_back(BoundCheck{std::move(name), margin, strict});
  };
  auto abs_r = [](Rational x) { return x < 0 ? -x : x; };
  const Rational half = kk / Rational(2), eta_k = dec.eta * kk, ep_k = dec.eta_prime * kk;
  add("C_size", Rational(2) * eta_k - abs_r(Rational(static_cast<long>(dec.C.size())) - half));
  add("D_size", Rational(2) * eta_k - abs_r(Rational(static_cast<long>(dec.D.size())) - half));
  add("C_small", Rational(8) * eta_k - Rational(static_cast<long>(dec.C_small.size())));
  add("D_small", Rational(8) * eta_k - Rational(static_cast<long>(dec.D_small.size())));
  auto conn = [&](const VertexSet& s) { return Rational(strong_connectivity(induced_subdigraph(h, s))); };
  add("C_prime_connectivity", conn(dec.C_prime) - ep_k);
  add("D_prime_connectivity", conn(dec.D_prime) - ep_k);
  add("L_connectivity", conn(dec.L) - ep_k / Rational(2));
  add("R_connectivity", conn(dec.R) - ep_k / Rational(2));
  add("M_H_equals_M_V", -abs_r(Rational(static_cast<long>(dec.M_H.size())) - Rational(static_cast<long>(dec.M_V.size()))));
  add("M_V_dichotomy", dec.dichotomy_ok ? Rational(0) : Rational(-1));

  // LR: few out-edges to L and few in-edges from R; RL is the mirror image.
  const auto in_l = detail::mask_of(dec.L, k), in_r = detail::mask_of(dec.R, k);
  Rational worst = Rational(2) * ep_k;  // vacuous when both refinements are empty
  for (int v : dec.M_V_LR) {
    const int m = std::max(detail::count_in(h, v, Direction::out, in_l), detail::count_in(h, v, Direction::in, in_r));
    worst = std::min(worst, Rational(2) * ep_k - Rational(m));
  }
  for (int v : dec.M_V_RL) {
    const int m = std::max(detail::count_in(h, v, Direction::out, in_r), detail::count_in(h, v, Direction::in, in_l));
    worst = std::min(worst, Rational(2) * ep_k - Rational(m));
  }
  add("M_V_neighbourhoods", worst, true);

  // |N^{+/-}(X)| >= |X| + beta k / 4 for sampled |X| <= (1 - beta) k / 2
  const int max_size = static_cast<int>(floor_of((Rational(1) - dec.beta) * kk / Rational(2)));
  Rational exp_margin(k);
  if (max_size >= 1) {
    std::mt19937_64 rng(seed);
    std::vector<int> all(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) all[i] = i;
    std::uniform_int_distribution<int> size_dist(1, max_size);
    for (int s = 0; s < expansion_samples; ++s) {
      std::shuffle(all.begin(), all.end(), rng);
      VertexSet x(all.begin(), all.begin() + size_dist(rng));
      for (auto dir : {Direction::out, Direction::in}) {
        const auto n = neighborhood(h, x, dir);
        exp_margin = std::min(exp_margin, Rational(static_cast<long>(n.size())) -
                                              Rational(static_cast<long>(x.size())) - dec.beta * kk / Rational(4));
      }
    }
  }
  add("expansion", exp_margin);
  (void)f;
  return rep;
}

}  // namespace hamlab

#endif  // HAMLAB_SHIFTED_WALKS_HPP
