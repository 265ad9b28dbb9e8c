#ifndef HAMLAB_ASSEMBLY_HPP
#define HAMLAB_ASSEMBLY_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hamlab/digraph.hpp"
#include "hamlab/matching.hpp"
#include "hamlab/partition.hpp"
#include "hamlab/rational.hpp"
#include "hamlab/regular_pairs.hpp"
#include "hamlab/shifted_walks.hpp"

namespace hamlab {

struct AssemblyOptions {
  Rational d{1, 80};              // density parameter of the F-pairs
  std::optional<Rational> theta;  // ideal size fraction, default 16 d
  Rational use_fraction{3, 10};   // desk-scale cap on walk uses per cluster, as a fraction of m
  Rational reduced_eps{3, 4};     // reduced-digraph certification when r is not supplied
  Rational reduced_d{1, 4};
  int ideal_retries = 2000;
  std::chrono::milliseconds merge_deadline{2000};
};

// ---------------------------------------------------------------- ideals

struct IdealReservation {
  std::vector<Ideal> pair_ideal;    // per cluster X: the ideal (X_1, X_2^+) of (X, X^+)
  std::vector<VertexSet> reserved;  // per cluster X: X* = X_1 u X_2
  std::vector<char> is_reserved;    // per host vertex
};

inline IdealReservation reserve_ideals(const Digraph& g, const ClusterPartition& part, const OneFactor& f,
                                       const Rational& theta, const Rational& d, std::uint64_t seed,
                                       int retries = 2000) {
  const int k = part.k();
  if (f.order() != k) fail(ErrorKind::parameter, "factor order differs from the number of clusters");
  IdealReservation res;
  res.reserved.assign(k, {});
  res.is_reserved.assign(g.order(), 0);
  for (int x = 0; x < k; ++x) {
    const Pair p(g, part.clusters[x], part.clusters[f.successor(x)]);
    if (p.bipartite().size() == 0) fail(ErrorKind::precondition, "F-pair without edges", {x, f.successor(x)});
    res.pair_ideal.push_back(select_ideal(p, theta, d, seed + 104729u * static_cast<std::uint64_t>(x), retries));
  }
  for (int x = 0; x < k; ++x) {
    auto& s = res.reserved[x];
    s = res.pair_ideal[x].a_star;
    const auto& from_pred = res.pair_ideal[f.predecessor(x)].b_star;
    s.insert(s.end(), from_pred.begin(), from_pred.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int v : s) res.is_reserved[v] = 1;
  }
  return res;
}

// ---------------------------------------------------------------- exceptional vertices

struct ExceptionalLink {
  int x = -1;
  int in_vertex = -1, in_cluster = -1;    // x^- in X_i
  int out_vertex = -1, out_cluster = -1;  // x^+ in Y_i
};

struct ExceptionalAssignment {
  std::vector<ExceptionalLink> links;  // in V0 order
  int cap = 0;                         // ceil(m/60)
};

/// Sequential greedy over V0: candidates avoid used vertices, reserved vertices
/// and clusters already appearing `cap` times as some X_j or Y_j. Among the rest
/// the least loaded cluster wins, ties broken at random.
inline ExceptionalAssignment assign_exceptional(const Digraph& g, const ClusterPartition& part, const OneFactor& f,
                                                const IdealReservation& res, std::uint64_t seed) {
  const int n = g.order();
  const auto cl = part.cluster_of(n);
  ExceptionalAssignment out;
  out.cap = static_cast<int>(ceil_of(Rational(part.m(), 60)));
  std::vector<int> appearances(part.k(), 0), load(part.k(), 0);  // load: roles X, X+, Y, Y- (spreads the walk)
  std::vector<char> used(n, 0);
  std::mt19937_64 rng(seed);
  for (int x : part.v0) {
    ExceptionalLink link;
    link.x = x;
    for (auto dir : {Direction::in, Direction::out}) {
      VertexSet cand;
      int blocked_used = 0, blocked_reserved = 0, blocked_cap = 0, in_v0 = 0;
      for (int v : g.neighbors(x, dir)) {
        if (cl[v] < 0) ++in_v0;
        else if (used[v]) ++blocked_used;
        else if (res.is_reserved[v]) ++blocked_reserved;
        else if (appearances[cl[v]] >= out.cap) ++blocked_cap;
        else cand.push_back(v);
      }
      if (cand.empty())
        fail(ErrorKind::precondition,
             std::string("no available ") + (dir == Direction::in ? "in" : "out") + "-neighbour for exceptional vertex " +
                 std::to_string(x) + " (v0 " + std::to_string(in_v0) + ", used " + std::to_string(blocked_used) +
                 ", reserved " + std::to_string(blocked_reserved) + ", capped " + std::to_string(blocked_cap) + ")",
             {x});
      std::shuffle(cand.begin(), cand.end(), rng);
      const int v = *std::min_element(cand.begin(), cand.end(), [&](int a, int b) { return load[cl[a]] < load[cl[b]]; });
      used[v] = 1;
      ++appearances[cl[v]];
      ++load[cl[v]];
      ++load[dir == Direction::in ? f.successor(cl[v]) : f.predecessor(cl[v])];
      if (dir == Direction::in) link.in_vertex = v, link.in_cluster = cl[v];
      else link.out_vertex = v, link.out_cluster = cl[v];
    }
    out.links.push_back(link);
  }
  return out;
}

// ---------------------------------------------------------------- the closed walk W

struct WalkStep {
  int id = -1;
  bool exceptional = false;  // id is a host vertex of V0 rather than a cluster
  bool operator==(const WalkStep&) const = default;
};

struct ClusterWalk {
  std::vector<WalkStep> steps;            // closed: steps.back() is followed by steps.front()
  std::vector<ShiftedWalk> connectors;    // W(Y_i, X_{i+1}^+), i < r
  ShiftedWalk covering;                   // W(Y_r, X_1^+), or the closed covering walk when V0 is empty
  std::vector<int> visits, entered, exited;  // per cluster, over the closed walk; V0 edges count
  std::map<std::pair<int, int>, int> demand;  // non-F cluster edges A -> B with multiplicity

  int uses(int c) const { return entered[c] + exited[c]; }
  int max_use() const {
    int best = 0;
    for (std::size_t c = 0; c < visits.size(); ++c) best = std::max(best, uses(static_cast<int>(c)));
    return best;
  }
};

namespace detail {

inline void tally_walk(ClusterWalk& w, const OneFactor& f) {
  const int k = f.order();
  w.visits.assign(k, 0);
  w.entered.assign(k, 0);
  w.exited.assign(k, 0);
  w.demand.clear();
  const std::size_t len = w.steps.size();
  for (std::size_t i = 0; i < len; ++i) {
    const auto& s = w.steps[i];
    const auto& t = w.steps[(i + 1) % len];
    if (!s.exceptional) ++w.visits[s.id];
    if (s.exceptional && t.exceptional) fail(ErrorKind::contract, "two exceptional vertices adjacent on W");
    if (s.exceptional) ++w.entered[t.id];
    else if (t.exceptional) ++w.exited[s.id];
    else if (f.successor(s.id) != t.id) {
      ++w.exited[s.id];
      ++w.entered[t.id];
      ++w.demand[{s.id, t.id}];
    }
  }
}

inline void append_expanded(std::vector<WalkStep>& steps, const std::vector<int>& seq) {
  for (int c : seq) steps.push_back(WalkStep{c, false});
}

}  // namespace detail

struct WalkAudit {
  bool balanced = true;       // every cluster of an F-cycle visited equally often
  bool all_visited = true;    // every cluster visited at least once
  int max_use = 0;            // compared against the caps below
  bool v0_once = true;        // each exceptional vertex visited exactly once
  bool desk_cap_ok = true;    // max_use <= floor(use_fraction m)
  bool strict_cap_ok = true;   // max_use <= m/10
  bool ok() const { return balanced && all_visited && v0_once && desk_cap_ok; }
};

inline WalkAudit audit_walk(const ClusterWalk& w, const OneFactor& f, const ClusterPartition& part,
                            const Rational& use_fraction) {
  WalkAudit a;
  for (const auto& c : f.cycles())
    for (int x : c) {
      if (w.visits[x] != w.visits[c.front()]) a.balanced = false;
      if (w.visits[x] == 0) a.all_visited = false;
    }
  std::map<int, int> seen;
  for (const auto& s : w.steps)
    if (s.exceptional) ++seen[s.id];
  for (int x : part.v0)
    if (seen[x] != 1) a.v0_once = false;
  if (seen.size() != part.v0.size()) a.v0_once = false;
  a.max_use = w.max_use();
  a.desk_cap_ok = Rational(a.max_use) <= use_fraction * Rational(part.m());
  a.strict_cap_ok = Rational(a.max_use) * Rational(10) <= Rational(part.m());
  return a;
}

/// W = x_1 W(Y_1,X_2) x_2 ... x_r W(Y_r,X_1) x_1, where W(Y_i,X_{i+1}) is a shifted
/// walk to X_{i+1}^+ followed by the F-path back round to X_{i+1}.
inline ClusterWalk build_walk(const Digraph& r, const OneFactor& f, const ClusterPartition& part,
                              const ExceptionalAssignment& assign, const Rational& eta,
                              const Rational& use_fraction = Rational(3, 10), std::uint64_t seed = 0,
                              int cover_attempts = 200) {
  const int k = r.order();
  const int m = part.m();
  if (f.order() != k) fail(ErrorKind::parameter, "factor order differs from the reduced digraph");
  const Digraph h = build_H(r, f);
  const int conn = static_cast<int>(ceil_of(eta * Rational(k)));
  if (auto sep = find_separator_witness(h, conn))
    fail(ErrorKind::wrong_pipeline, "H is not strongly ceil(eta k)-connected", sep->separator);
  const Rational max_cycles = Rational(2) / eta;
  const int internal_limit = static_cast<int>(ceil_of(Rational(m, 40)));
  const int use_cap = static_cast<int>(floor_of(use_fraction * Rational(m)));

  ClusterWalk w;
  std::vector<int> internal(k, 0), uses(k, 0);
  auto charge = [&](const ShiftedWalk& s) {
    const auto u = account(s, f);
    for (int c = 0; c < k; ++c) {
      internal[c] += u.internal_uses[c];
      uses[c] += u.uses[c];
    }
  };
  auto forbidden_except = [&](const std::vector<int>& counts, int limit, int a, int b) {
    VertexSet s;
    for (int c = 0; c < k; ++c)
      if (c != a && c != b && counts[c] >= limit) s.push_back(c);
    return s;
  };
  auto check_length = [&](const ShiftedWalk& s) {
    if (Rational(s.t()) > max_cycles)
      fail(ErrorKind::contract, "shifted walk traverses more than 2/eta cycles", s.entrances);
  };

  const auto& links = assign.links;
  const int rr = static_cast<int>(links.size());
  for (const auto& l : links) {
    ++uses[l.in_cluster];
    ++uses[l.out_cluster];
  }
  for (int i = 0; i + 1 < rr; ++i) {
    const int a = links[i].out_cluster, b = f.successor(links[i + 1].in_cluster);
    auto forbidden = forbidden_except(internal, internal_limit, a, b);
    const auto heavy = forbidden_except(uses, use_cap, a, b);
    VertexSet both;
    std::set_union(forbidden.begin(), forbidden.end(), heavy.begin(), heavy.end(), std::back_inserter(both));
    ShiftedWalk s;
    try {
      s = find_shifted_walk_in(h, f, a, b, both);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::unreachable) throw;
      s = find_shifted_walk_in(h, f, a, b, forbidden);
    }
    s = shorten_walk(s);
    check_length(s);
    charge(s);
    w.connectors.push_back(s);
  }

  // covering walk: visit unused clusters until every cluster is used once. The greedy is
  // rerun with random tie-breaking and the attempt with the lightest heaviest cluster is kept.
  const int start = rr > 0 ? links[rr - 1].out_cluster : 0;
  const int target = rr > 0 ? f.successor(links[0].in_cluster) : 0;
  struct Attempt {
    ShiftedWalk walk;
    std::vector<int> uses;
    int worst = 0;
  };
  auto cover_attempt = [&](std::mt19937_64* rng) -> std::optional<Attempt> {
    std::vector<int> use = uses, covered(k, 0), noise(k, 0);
    if (rng)
      for (auto& x : noise) x = static_cast<int>((*rng)() % 1024);
    covered[target] = 1;  // the closing step enters it
    covered[start] = 1;   // U_1 counts, as in the final chaining argument
    ShiftedWalk cover{{start}};
    auto extend = [&](int goal) {
      const int cur = cover.to();
      ShiftedWalk sw;
      try {
        sw = find_shifted_walk_in(h, f, cur, goal, forbidden_except(use, use_cap, cur, goal));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::unreachable) throw;
        sw = find_shifted_walk_in(h, f, cur, goal);  // the cap audit still applies
      }
      sw = shorten_walk(sw);
      check_length(sw);
      const auto u = account(sw, f);
      for (int c = 0; c < k; ++c) {
        covered[c] += u.uses[c];
        use[c] += u.uses[c];
      }
      cover.entrances.insert(cover.entrances.end(), sw.entrances.begin() + 1, sw.entrances.end());
    };
    for (int guard = 0; guard < 3 * k; ++guard) {
      const int cur = cover.to();
      // the closing step leaves through pred(cur), so that one may stay open
      int open = 0;
      for (int c = 0; c < k; ++c) open += !covered[c] && !(cur != target && c == f.predecessor(cur));
      if (open == 0) break;
      // goal c costs an entrance at c and, on the next step, an exit at pred(c): keep both under
      // the cap, avoid c = pred(cur) (no H-edge), prefer an unused pred(c), then light clusters
      int goal = -1;
      std::tuple<int, int, int, int, int> best;
      for (int c = 0; c < k; ++c) {
        if (covered[c] || c == cur) continue;
        const int p = f.predecessor(c);
        const std::tuple<int, int, int, int, int> key{use[c] >= use_cap || use[p] >= use_cap,
                                                      c == f.predecessor(cur), covered[p] ? 1 : 0,
                                                      use[c] + use[p], noise[c] * k + c};
        if (goal < 0 || key < best) goal = c, best = key;
      }
      if (goal < 0 && !covered[cur]) goal = f.successor(cur);  // the step after leaves through cur
      if (goal < 0) break;
      extend(goal);
    }
    if (cover.to() != target || cover.t() == 0) extend(target);
    if (std::find(covered.begin(), covered.end(), 0) != covered.end()) return std::nullopt;
    return Attempt{cover, use, *std::max_element(use.begin(), use.end())};
  };
  std::optional<Attempt> chosen = cover_attempt(nullptr);
  std::mt19937_64 cover_rng(seed);
  for (int i = 0; i < cover_attempts && (!chosen || chosen->worst > use_cap); ++i) {
    auto next = cover_attempt(&cover_rng);
    if (next && (!chosen || next->worst < chosen->worst)) chosen = std::move(next);
  }
  if (!chosen) fail(ErrorKind::contract, "covering walk failed to use every cluster");
  uses = chosen->uses;
  w.covering = chosen->walk;

  auto f_path = [&](int from, int to) {  // clusters strictly after `from` up to `to`, along F
    std::vector<int> seq;
    for (int c = from; c != to;) {
      c = f.successor(c);
      seq.push_back(c);
    }
    return seq;
  };
  if (rr == 0) {
    auto seq = w.covering.expand(f);
    seq.pop_back();  // closed: the final cluster equals the first
    detail::append_expanded(w.steps, seq);
  } else {
    for (int i = 0; i < rr; ++i) {
      w.steps.push_back(WalkStep{links[i].x, true});
      const ShiftedWalk& s = i + 1 < rr ? w.connectors[i] : w.covering;
      const int x_next = links[(i + 1) % rr].in_cluster;
      detail::append_expanded(w.steps, s.expand(f));
      detail::append_expanded(w.steps, f_path(s.to(), x_next));
    }
  }
  detail::tally_walk(w, f);
  const auto audit = audit_walk(w, f, part, use_fraction);
  if (!audit.balanced) fail(ErrorKind::contract, "walk violates F-cycle balance");
  if (!audit.all_visited) fail(ErrorKind::contract, "walk misses a cluster");
  if (!audit.v0_once) fail(ErrorKind::contract, "walk does not visit V0 exactly once each");
  if (!audit.desk_cap_ok)
    fail(ErrorKind::contract, "walk uses a cluster " + std::to_string(audit.max_use) + " times, above the cap");
  return w;
}

// ---------------------------------------------------------------- concrete edges and the 1-factor

namespace detail {

inline VertexSet minus(VertexSet a, const VertexSet& sorted_b) {
  std::sort(a.begin(), a.end());
  VertexSet out;
  std::set_difference(a.begin(), a.end(), sorted_b.begin(), sorted_b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

struct EntryExitLedger {
  std::vector<VertexSet> entry, exit;  // per cluster
};

struct FactorAssembly {
  std::vector<Edge> fixed_edges;
  EntryExitLedger ledger;
  std::vector<int> successor;  // over V(G); -1 where not yet decided
};

/// Realizes every non-F walk edge A -> B by a distinct G-edge, pair by pair,
/// avoiding reserved vertices, the x^{+/-} and all previously chosen endpoints.
inline FactorAssembly fix_edges(const Digraph& g, const ClusterPartition& part, const ClusterWalk& walk,
                                const IdealReservation& res, const ExceptionalAssignment& assign) {
  const int n = g.order(), k = part.k();
  FactorAssembly fa;
  fa.successor.assign(n, -1);
  fa.ledger.entry.assign(k, {});
  fa.ledger.exit.assign(k, {});
  std::vector<char> taken(n, 0);
  const auto cl = part.cluster_of(n);
  auto fix = [&](int u, int v) {
    fa.fixed_edges.emplace_back(u, v);
    fa.successor[u] = v;
    if (cl[u] >= 0) fa.ledger.exit[cl[u]].push_back(u);
    if (cl[v] >= 0) fa.ledger.entry[cl[v]].push_back(v);
  };
  for (const auto& l : assign.links) {
    taken[l.in_vertex] = taken[l.out_vertex] = 1;
    fix(l.in_vertex, l.x);
    fix(l.x, l.out_vertex);
  }
  auto realize = [&](int a, int b, int want) {
    VertexSet av, bv;
    for (int v : part.clusters[a])
      if (!taken[v] && !res.is_reserved[v]) av.push_back(v);
    for (int v : part.clusters[b])
      if (!taken[v] && !res.is_reserved[v]) bv.push_back(v);
    const auto bg = BipartiteGraph::from_pair(g, av, bv);
    const auto mt = max_matching(bg);
    if (static_cast<int>(mt.size()) < want)
      fail(ErrorKind::contract,
           "pair (" + std::to_string(a) + "," + std::to_string(b) + ") matches only " + std::to_string(mt.size()) +
               " of " + std::to_string(want) + " demanded edges",
           {a, b});
    for (int i = 0; i < want; ++i) {
      const int u = av[mt.pairs[i].first], v = bv[mt.pairs[i].second];
      taken[u] = taken[v] = 1;
      fix(u, v);
    }
  };
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j)
      for (const auto& [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        auto it = walk.demand.find({a, b});
        if (it != walk.demand.end()) realize(a, b, it->second);
      }
  for (auto& s : fa.ledger.entry) std::sort(s.begin(), s.end());
  for (auto& s : fa.ledger.exit) std::sort(s.begin(), s.end());
  return fa;
}

/// Ledger invariants: Entry and Exit disjoint, |U_Exit| = |U+_Entry|, both avoid U*.
inline std::optional<std::string> ledger_violation(const FactorAssembly& fa, const OneFactor& f,
                                                   const IdealReservation* res = nullptr) {
  const int k = f.order();
  for (int u = 0; u < k; ++u) {
    VertexSet both;
    std::set_intersection(fa.ledger.entry[u].begin(), fa.ledger.entry[u].end(), fa.ledger.exit[u].begin(),
                          fa.ledger.exit[u].end(), std::back_inserter(both));
    if (!both.empty()) return "Entry and Exit meet in cluster " + std::to_string(u);
    if (fa.ledger.exit[u].size() != fa.ledger.entry[f.successor(u)].size())
      return "|U_Exit| != |U+_Entry| at cluster " + std::to_string(u);
    if (res)
      for (const auto* s : {&fa.ledger.entry[u], &fa.ledger.exit[u]})
        for (int v : *s)
          if (res->is_reserved[v]) return "ledger touches a reserved vertex in cluster " + std::to_string(u);
  }
  return std::nullopt;
}

/// Perfect matchings (U \ U_Exit, U+ \ U+_Entry) complete the fixed edges to a 1-factor of g.
inline FactorAssembly complete_factor(const Digraph& g, const ClusterPartition& part, const OneFactor& f,
                                      FactorAssembly fa) {
  if (auto bad = ledger_violation(fa, f)) fail(ErrorKind::contract, "ledger invariant: " + *bad);
  const int k = part.k();
  for (int u = 0; u < k; ++u) {
    const int up = f.successor(u);
    const auto av = detail::minus(part.clusters[u], fa.ledger.exit[u]);
    const auto bv = detail::minus(part.clusters[up], fa.ledger.entry[up]);
    const auto bg = BipartiteGraph::from_pair(g, av, bv);
    detail::HopcroftKarp hk(bg);
    const auto mt = hk.matching();
    if (mt.size() != av.size()) {
      VertexSet witness;
      for (int v : hall_violator(bg)) witness.push_back(av[v]);
      fail(ErrorKind::contract, "no perfect matching between cluster " + std::to_string(u) + " and its successor",
           witness);
    }
    for (const auto& [a, b] : mt.pairs) fa.successor[av[a]] = bv[b];
  }
  for (int v = 0; v < g.order(); ++v)
    if (fa.successor[v] < 0) fail(ErrorKind::contract, "vertex left without a successor", {v});
  const OneFactor c(fa.successor);
  if (!c.is_factor_of(g)) fail(ErrorKind::contract, "assembled 1-factor uses a non-edge");
  return fa;
}

// ---------------------------------------------------------------- merging

struct MergeReport {
  int cycles_before = 0, cycles_after = 0;
  bool coarsens = true;       // every old cycle lies inside one new cycle
  bool single_cycle = true;   // all of G_U on one cycle afterwards
  int j_order = 0;
};

namespace detail {

inline std::vector<int> cycle_ids(const std::vector<int>& succ) {
  std::vector<int> id(succ.size(), -1);
  int next = 0;
  for (std::size_t v = 0; v < succ.size(); ++v) {
    if (id[v] != -1) continue;
    for (int x = static_cast<int>(v); id[x] == -1; x = succ[x]) id[x] = next;
    ++next;
  }
  return id;
}

inline int count_ids(const std::vector<int>& id) {
  return id.empty() ? 0 : *std::max_element(id.begin(), id.end()) + 1;
}

}  // namespace detail

/// Replaces the matching a_side -> b_side inside `succ` by one along a Hamilton
/// cycle of J, where N+_J(u) = N+_{G_U}(f(u)) and f(u) is the first a_side vertex
/// after u on its cycle. Requires succ to map a_side onto b_side.
inline MergeReport merge_matching(const Digraph& g, std::vector<int>& succ, const VertexSet& a_side,
                                  const VertexSet& b_side, std::uint64_t seed,
                                  std::chrono::milliseconds deadline = std::chrono::milliseconds(2000)) {
  const int n = static_cast<int>(succ.size());
  if (a_side.size() != b_side.size()) fail(ErrorKind::precondition, "G_U sides differ in size");
  std::vector<int> in_a(n, 0), b_index(n, -1);
  for (int v : a_side) in_a[v] = 1;
  for (std::size_t i = 0; i < b_side.size(); ++i) b_index[b_side[i]] = static_cast<int>(i);
  for (int v : a_side)
    if (b_index[succ[v]] < 0) fail(ErrorKind::precondition, "current factor does not match a_side onto b_side", {v});
  const auto before = detail::cycle_ids(succ);
  MergeReport rep;
  rep.cycles_before = detail::count_ids(before);
  const int s = static_cast<int>(b_side.size());
  rep.j_order = s;
  std::vector<int> first(s);
  for (int i = 0; i < s; ++i) {
    int x = b_side[i];
    while (!in_a[x]) x = succ[x];
    first[i] = x;
  }
  if (s >= 2) {
    std::vector<Edge> je;
    for (int i = 0; i < s; ++i)
      for (int v : g.out(first[i]))
        if (b_index[v] >= 0 && b_index[v] != i) je.emplace_back(i, b_index[v]);
    const Digraph j(s, je);
    const auto cyc = hamilton_in_super_regular(j, deadline, seed);
    for (int i = 0; i < s; ++i) succ[first[cyc.order[i]]] = b_side[cyc.order[(i + 1) % s]];
  }
  const auto after = detail::cycle_ids(succ);
  rep.cycles_after = detail::count_ids(after);
  std::vector<int> image(rep.cycles_before, -1);
  for (int v = 0; v < n; ++v) {
    if (image[before[v]] == -1) image[before[v]] = after[v];
    else if (image[before[v]] != after[v]) rep.coarsens = false;
  }
  for (int v : b_side)
    if (after[v] != after[b_side.front()]) rep.single_cycle = false;
  for (int v : a_side)
    if (after[v] != after[b_side.front()]) rep.single_cycle = false;
  return rep;
}

/// Merge at cluster U: G_U = (U^- \ U^-_Exit, U \ U_Entry).
inline MergeReport merge_at_cluster(const Digraph& g, const ClusterPartition& part, const OneFactor& f,
                                    FactorAssembly& fa, int u, std::uint64_t seed,
                                    std::chrono::milliseconds deadline = std::chrono::milliseconds(2000)) {
  const int um = f.predecessor(u);
  const auto av = detail::minus(part.clusters[um], fa.ledger.exit[um]);
  const auto bv = detail::minus(part.clusters[u], fa.ledger.entry[u]);
  auto rep = merge_matching(g, fa.successor, av, bv, seed, deadline);
  if (!rep.coarsens) fail(ErrorKind::contract, "merge split a cycle", {u});
  if (!rep.single_cycle) fail(ErrorKind::contract, "merge left G_U on several cycles", {u});
  return rep;
}

// ---------------------------------------------------------------- the pipeline

struct AssemblyReport {
  int walk_length = 0;
  int max_use = 0;
  bool strict_cap_ok = true;   // max use <= m/10
  int fixed_edges = 0;
  int cycles_before_merge = 0;
  int merges = 0;
  bool chaining_ok = true;    // all vertices of each F-cycle's clusters on one cycle after its merges
};

struct AssemblyResult {
  HamiltonCertificate certificate;
  AssemblyReport report;
};

namespace detail {

template <class F>
auto staged(const char* stage, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what(), e.witness());
  }
}

}  // namespace detail

inline AssemblyResult assemble_hamilton(const Digraph& g, const ClusterPartition& part, const Digraph& r,
                                        const OneFactor& f, const Rational& eta, std::uint64_t seed,
                                        const AssemblyOptions& opt = {}) {
  part.validate(g.order());
  const int k = part.k();
  if (r.order() != k || f.order() != k) fail(ErrorKind::parameter, "reduced digraph, factor and partition disagree on k");
  if (!f.is_factor_of(r)) fail(ErrorKind::precondition, "F is not a 1-factor of the reduced digraph");
  for (const auto& c : f.cycles())
    if (c.size() < 4) fail(ErrorKind::precondition, "F has a cycle shorter than 4", c);
  const Rational theta = opt.theta.value_or(Rational(16) * opt.d);
  std::mt19937_64 seeds(seed);

  // the connectivity test comes first so that low-connectivity inputs report wrong-pipeline
  const int conn = static_cast<int>(ceil_of(eta * Rational(k)));
  if (auto sep = find_separator_witness(build_H(r, f), conn))
    fail(ErrorKind::wrong_pipeline, "H is not strongly ceil(eta k)-connected", sep->separator);

  const auto res = detail::staged("reserve_ideals",
                                  [&] { return reserve_ideals(g, part, f, theta, opt.d, seeds(), opt.ideal_retries); });
  const auto assign = detail::staged("assign_exceptional", [&] { return assign_exceptional(g, part, f, res, seeds()); });
  const auto walk = detail::staged("build_walk", [&] { return build_walk(r, f, part, assign, eta, opt.use_fraction, seeds()); });
  auto fa = detail::staged("fix_edges", [&] { return fix_edges(g, part, walk, res, assign); });
  fa = detail::staged("complete_factor", [&] { return complete_factor(g, part, f, std::move(fa)); });

  AssemblyReport rep;
  rep.walk_length = static_cast<int>(walk.steps.size());
  rep.max_use = walk.max_use();
  rep.strict_cap_ok = Rational(rep.max_use) * Rational(10) <= Rational(part.m());
  rep.fixed_edges = static_cast<int>(fa.fixed_edges.size());
  rep.cycles_before_merge = detail::count_ids(detail::cycle_ids(fa.successor));

  detail::staged("merge", [&] {
    for (const auto& cyc : f.cycles()) {
      for (int u : cyc) {
        merge_at_cluster(g, part, f, fa, u, seeds(), opt.merge_deadline);
        ++rep.merges;
      }
      const auto id = detail::cycle_ids(fa.successor);
      const int ref = id[part.clusters[cyc.front()].front()];
      bool together = true;
      for (int u : cyc)
        for (int v : part.clusters[u]) together = together && id[v] == ref;
      const Rational quarter = Rational(part.m(), 4);
      bool small_sets = true;
      for (int u : cyc)
        small_sets = small_sets && Rational(static_cast<long>(fa.ledger.entry[u].size())) <= quarter &&
                     Rational(static_cast<long>(fa.ledger.exit[u].size())) <= quarter;
      if (!together) {
        rep.chaining_ok = false;
        if (small_sets) fail(ErrorKind::contract, "C_U != C_U+ after merging an F-cycle", cyc);
      }
    }
    return 0;
  });

  const OneFactor final_factor(fa.successor);
  if (final_factor.cycles().size() != 1)
    fail(ErrorKind::contract, "assembly bug: final 1-factor has " + std::to_string(final_factor.cycles().size()) +
                                  " cycles");
  AssemblyResult out;
  out.report = rep;
  out.certificate.order = final_factor.cycles().front();
  if (!verify_hamilton_cycle(g, out.certificate)) fail(ErrorKind::contract, "assembled cycle fails verification");
  return out;
}

/// Derives r'' from g by pair certification, then runs the pipeline.
inline AssemblyResult assemble_hamilton(const Digraph& g, const ClusterPartition& part, const OneFactor& f,
                                        const Rational& eta, std::uint64_t seed, const AssemblyOptions& opt = {}) {
  const auto red = build_reduced(g, part, opt.reduced_eps, opt.reduced_d, seed);
  return assemble_hamilton(g, part, red.base, f, eta, seed, opt);
}

}  // namespace hamlab

#endif  // HAMLAB_ASSEMBLY_HPP
