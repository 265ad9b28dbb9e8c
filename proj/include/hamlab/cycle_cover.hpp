#ifndef HAMLAB_CYCLE_COVER_HPP
#define HAMLAB_CYCLE_COVER_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hamlab/digraph.hpp"
#include "hamlab/matching.hpp"
#include "hamlab/partition.hpp"
#include "hamlab/rational.hpp"
#include "hamlab/regular_pairs.hpp"

namespace hamlab {

struct ClauseMargin {
  std::string clause;
  Rational margin;  // negative means the clause fails
  int index = 0;    // degree-sequence index attaining the margin (0 for delta clauses)
  bool holds() const { return margin >= 0; }
};

struct InheritedDegreeReport {
  std::vector<ClauseMargin> clauses;  // (i)..(vi) in order
  bool holds() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.holds(); });
  }
};

/// Evaluates clauses (i)-(vi) of the inherited-degree conditions on an instance.
/// beta is the host's degree parameter (clauses (iii)-(vi) need it).
inline InheritedDegreeReport verify_inherited_degrees(const Digraph& g, const ClusterPartition& part,
                                                      const ReducedDigraph& r, const Rational& d,
                                                      const Rational& beta) {
  part.validate(g.order());
  if (r.k() != part.k()) fail(ErrorKind::malformed_input, "reduced digraph does not match the partition");
  const int k = r.k(), m = part.m();
  const auto sg = degree_sequences(g);
  const auto sr = degree_sequences(r.base);
  const Rational kk(k), slack = Rational(2) * d * kk;
  InheritedDegreeReport rep;

  for (Direction dir : {Direction::out, Direction::in}) {
    ClauseMargin c{dir == Direction::out ? "i" : "ii", Rational(k), 0};
    for (int i = 1; i <= k; ++i) {
      const Rational mg = Rational(sr.at(dir, i)) - (Rational(sg.at(dir, i * m), m) - slack);
      if (mg < c.margin) c = {c.clause, mg, i};
    }
    rep.clauses.push_back(c);
  }
  const Rational half_beta_k = beta * kk / Rational(2);
  rep.clauses.push_back({"iii", Rational(r.base.min_out_degree()) - half_beta_k, 0});
  rep.clauses.push_back({"iv", Rational(r.base.min_in_degree()) - half_beta_k, 0});

  const Rational cap = (Rational(1, 2) - Rational(2) * d) * kk;
  for (Direction dir : {Direction::out, Direction::in}) {
    const Direction other = dir == Direction::out ? Direction::in : Direction::out;
    ClauseMargin c{dir == Direction::out ? "v" : "vi", Rational(k), 0};
    for (int i = 1; i <= k; ++i) {
      const Rational first = Rational(sr.at(dir, i)) - std::min(Rational(i) + half_beta_k, cap);
      const auto j = ceil_of((Rational(1) - beta / Rational(2)) * kk - Rational(i));
      Rational best = first;
      if (j < 1 || j > k) {
        best = std::max(best, Rational(0));  // vacuous alternative
      } else {
        best = std::max(best, Rational(sr.at(other, static_cast<int>(j))) - (kk - Rational(i) - slack));
      }
      if (best < c.margin) c = {c.clause, best, i};
    }
    rep.clauses.push_back(c);
  }
  return rep;
}

struct ExpansionViolation {
  VertexSet set;
  Direction dir = Direction::out;  // which neighbourhood is too small
};

/// Looks for S with |S| <= (1/2 - 2d)k or |S| > (1/2 + 2d)k and |N+(S)| < |S| or
/// |N-(S)| < |S|.  Exhaustive for k <= 22, otherwise `samples` random subsets.
inline std::optional<ExpansionViolation> check_outexpansion(const Digraph& r, const Rational& d,
                                                            std::optional<std::uint64_t> sample_seed = std::nullopt,
                                                            int samples = 20000) {
  const int k = r.order();
  const Rational lo = (Rational(1, 2) - Rational(2) * d) * Rational(k);
  const Rational hi = (Rational(1, 2) + Rational(2) * d) * Rational(k);
  auto in_range = [&](int s) { return s > 0 && (Rational(s) <= lo || Rational(s) > hi); };
  if (!sample_seed && k > 22) fail(ErrorKind::scale, "exhaustive outexpansion limited to k <= 22");
  if (!sample_seed) {
    std::vector<std::uint32_t> out(k, 0), in(k, 0);
    for (const auto& [u, v] : r.edges()) out[u] |= 1u << v, in[v] |= 1u << u;
    for (std::uint32_t s = 1; s < (1u << k); ++s) {
      const int size = __builtin_popcount(s);
      if (!in_range(size)) continue;
      std::uint32_t no = 0, ni = 0;
      for (std::uint32_t t = s; t; t &= t - 1) {
        const int v = __builtin_ctz(t);
        no |= out[v];
        ni |= in[v];
      }
      const bool bad_out = __builtin_popcount(no) < size, bad_in = __builtin_popcount(ni) < size;
      if (bad_out || bad_in) {
        VertexSet set;
        for (int v = 0; v < k; ++v)
          if (s >> v & 1U) set.push_back(v);
        return ExpansionViolation{set, bad_out ? Direction::out : Direction::in};
      }
    }
    return std::nullopt;
  }
  std::mt19937_64 rng(*sample_seed);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::uniform_int_distribution<int> size_dist(1, std::max(1, k));
  for (int t = 0; t < samples; ++t) {
    const int size = size_dist(rng);
    if (!in_range(size)) continue;
    std::shuffle(perm.begin(), perm.end(), rng);
    VertexSet s(perm.begin(), perm.begin() + size);
    std::sort(s.begin(), s.end());
    for (Direction dir : {Direction::out, Direction::in})
      if (static_cast<int>(neighborhood(r, s, dir).size()) < size) return ExpansionViolation{s, dir};
  }
  return std::nullopt;
}

/// Number of vertices with out-degree (resp. in-degree) at least (1/2 - 2d)k.
inline std::pair<int, int> large_degree_census(const Digraph& r, const Rational& d) {
  const Rational t = (Rational(1, 2) - Rational(2) * d) * Rational(r.order());
  int out = 0, in = 0;
  for (int v = 0; v < r.order(); ++v) {
    out += Rational(r.out_degree(v)) >= t;
    in += Rational(r.in_degree(v)) >= t;
  }
  return {out, in};
}

struct PathCyclePartition {
  std::vector<std::vector<int>> cycles;
  std::vector<std::vector<int>> paths;
  VertexSet waste;
};

/// Cycles plus at most ceil(4dk) paths whose initial vertices have in-degree and
/// final vertices out-degree at least (1/2 - 2d)k: 1-factor of r augmented by
/// ceil(4dk) new mutually adjacent vertices, new vertices then deleted.
inline PathCyclePartition partition_cycles_paths(const Digraph& r, const Rational& d) {
  const int k = r.order();
  PathCyclePartition out;
  auto direct = find_one_factor(r);
  if (direct.has_factor()) {
    out.cycles = direct.factor().cycles();
    return out;
  }
  const int t = static_cast<int>(ceil_of(Rational(4) * d * Rational(k)));
  const Rational thr = (Rational(1, 2) - Rational(2) * d) * Rational(k);
  std::vector<Edge> e = r.edges();
  for (int a = k; a < k + t; ++a)
    for (int b = k; b < k + t; ++b)
      if (a != b) e.emplace_back(a, b);
  for (int v = 0; v < k; ++v) {
    if (Rational(r.out_degree(v)) >= thr)
      for (int a = k; a < k + t; ++a) e.emplace_back(v, a);
    if (Rational(r.in_degree(v)) >= thr)
      for (int a = k; a < k + t; ++a) e.emplace_back(a, v);
  }
  auto cert = find_one_factor(Digraph(k + t, e));
  if (!cert.has_factor())
    fail(ErrorKind::contract, "augmented reduced digraph has no 1-factor", cert.violator());
  for (const auto& c : cert.factor().cycles()) {
    auto first_new = std::find_if(c.begin(), c.end(), [&](int v) { return v >= k; });
    if (first_new == c.end()) {
      out.cycles.push_back(c);
      continue;
    }
    // rotate so the cycle starts at a new vertex; old-vertex runs become paths
    std::vector<int> rot(first_new, c.end());
    rot.insert(rot.end(), c.begin(), first_new);
    std::vector<int> run;
    for (int v : rot) {
      if (v >= k) {
        if (!run.empty()) out.paths.push_back(run);
        run.clear();
      } else {
        run.push_back(v);
      }
    }
    if (!run.empty()) out.paths.push_back(run);
  }
  return out;
}

struct CoverStep {
  int iteration = 0;
  std::string action;  // "1", "2", "3i", "3ii", "4i", "4ii", "4iii", "4iv", "dump"
  Rational s;
  Rational alpha;
  int active_id = -1;
  int partner_id = -1;      // path P_r (or cycle index for "2", W vertex for "1")
  int new_path_id = -1;     // id of the resulting active path, if any
  VertexSet waste_added;
  Rational charge_bound;    // alpha |P_r| for the path whose vertices were wasted
  bool endpoint_invariant = true;
};

struct CoverResult {
  std::vector<std::vector<int>> cycles;
  VertexSet waste;
  std::vector<CoverStep> trace;
  PathCyclePartition initial;
};

struct CoverOptions {
  bool random_active = false;  // longest path otherwise
  std::uint64_t seed = 0;
};

namespace detail {

struct ActivePath {
  int id;
  std::vector<int> v;
};

}  // namespace detail

/// Active-path algorithm turning a cycles-and-paths partition into disjoint
/// cycles plus a waste set of size at most 7 sqrt(d) k.
inline CoverResult cover_by_cycles(const Digraph& r, const Rational& d, const PathCyclePartition& start,
                                   const CoverOptions& opt = {}) {
  const int k = r.order();
  std::vector<std::vector<char>> adj(k, std::vector<char>(k, 0));
  for (const auto& [a, b] : r.edges()) adj[a][b] = 1;
  const Rational thr = (Rational(1, 2) - Rational(2) * d) * Rational(k);
  auto endpoint_ok = [&](const std::vector<int>& p) {
    return Rational(r.in_degree(p.front())) >= thr && Rational(r.out_degree(p.back())) >= thr;
  };

  CoverResult res;
  res.initial = start;
  res.cycles = start.cycles;
  VertexSet waste = start.waste;
  std::vector<detail::ActivePath> paths;
  int next_id = 0;
  for (const auto& p : start.paths) paths.push_back({next_id++, p});
  std::mt19937_64 rng(opt.seed);

  auto pick_active = [&]() -> int {
    if (paths.empty()) return -1;
    if (opt.random_active) return static_cast<int>(std::uniform_int_distribution<std::size_t>(0, paths.size() - 1)(rng));
    int best = 0;
    for (int i = 1; i < static_cast<int>(paths.size()); ++i)
      if (paths[i].v.size() > paths[best].v.size()) best = i;
    return best;
  };
  auto add_waste = [&](CoverStep& st, auto first, auto last) {
    for (auto it = first; it != last; ++it) st.waste_added.push_back(*it);
    waste.insert(waste.end(), first, last);
  };
  auto index_of = [&](int id) {
    for (int i = 0; i < static_cast<int>(paths.size()); ++i)
      if (paths[i].id == id) return i;
    return -1;
  };

  int active_id = paths.empty() ? -1 : paths[pick_active()].id;
  for (int iter = 0; !paths.empty(); ++iter) {
    CoverStep st;
    st.iteration = iter;
    std::int64_t total = 0;
    for (const auto& p : paths) total += static_cast<std::int64_t>(p.v.size());
    st.s = Rational(total);
    std::sort(waste.begin(), waste.end());
    st.active_id = active_id;
    st.endpoint_invariant = std::all_of(paths.begin(), paths.end(), [&](const auto& p) { return endpoint_ok(p.v); });
    if (le_coef_sqrt(st.s, Rational(5) * Rational(k), d)) {
      st.action = "dump";
      for (const auto& p : paths) add_waste(st, p.v.begin(), p.v.end());
      paths.clear();
      res.trace.push_back(st);
      break;
    }
    st.alpha = Rational(5) * d * Rational(k) / st.s;
    const int ai = index_of(active_id);
    const std::vector<int> P = paths[ai].v;
    const int u = P.front(), v = P.back();
    auto ell = [&](const std::vector<int>& p) { return st.alpha * Rational(static_cast<std::int64_t>(p.size())); };
    auto finish_merge = [&](int partner_index, std::vector<int> merged) {
      // remove P and P_r, insert the merged path at P_r's position, make it active
      const int pid = paths[partner_index].id;
      paths[partner_index] = {next_id++, std::move(merged)};
      st.new_path_id = paths[partner_index].id;
      paths.erase(paths.begin() + index_of(active_id));
      active_id = st.new_path_id;
      st.partner_id = pid;
    };
    auto close_active = [&]() {
      paths.erase(paths.begin() + index_of(active_id));
      active_id = paths.empty() ? -1 : paths[pick_active()].id;
    };
    bool done = false;

    // (1) w in W with w -> u and v -> w
    for (std::size_t wi = 0; wi < waste.size() && !done; ++wi) {
      const int w = waste[wi];
      if (adj[w][u] && adj[v][w]) {
        std::vector<int> c{w};
        c.insert(c.end(), P.begin(), P.end());
        res.cycles.push_back(c);
        waste.erase(waste.begin() + static_cast<long>(wi));
        st.action = "1";
        st.partner_id = w;
        close_active();
        done = true;
      }
    }
    // (2) cycle with w_i -> u and v -> w_{i+1}
    for (std::size_t ci = 0; ci < res.cycles.size() && !done; ++ci) {
      auto& c = res.cycles[ci];
      const std::size_t t = c.size();
      for (std::size_t i = 0; i < t; ++i) {
        if (!adj[c[i]][u] || !adj[v][c[(i + 1) % t]]) continue;
        std::vector<int> nc(c.begin(), c.begin() + static_cast<long>(i) + 1);
        nc.insert(nc.end(), P.begin(), P.end());
        nc.insert(nc.end(), c.begin() + static_cast<long>(i) + 1, c.end());
        c = std::move(nc);
        st.action = "2";
        st.partner_id = static_cast<int>(ci);
        close_active();
        done = true;
        break;
      }
    }
    // (3) path P_r with i < j, j - i <= ell_r + 1, w_i -> u, v -> w_j
    for (int ri = 0; ri < static_cast<int>(paths.size()) && !done; ++ri) {
      const std::vector<int> w = paths[ri].v;  // 0-based: w[i-1] is w_i
      const int t = static_cast<int>(w.size());
      const Rational lr = ell(w);
      for (int i = 1; i <= t && !done; ++i) {
        if (!adj[w[i - 1]][u]) continue;
        for (int j = i + 1; j <= t && Rational(j - i) <= lr + Rational(1); ++j) {
          if (!adj[v][w[j - 1]]) continue;
          st.charge_bound = lr;
          if (paths[ri].id != active_id) {
            std::vector<int> np(w.begin(), w.begin() + i);
            np.insert(np.end(), P.begin(), P.end());
            np.insert(np.end(), w.begin() + j - 1, w.end());
            add_waste(st, w.begin() + i, w.begin() + j - 1);
            st.action = "3i";
            finish_merge(ri, std::move(np));
          } else {
            // w_1 = u, w_t = v: C_u = u..w_i, C_v = v w_j..w_{t-1}
            std::vector<int> cu(w.begin(), w.begin() + i);
            std::vector<int> cv{v};
            cv.insert(cv.end(), w.begin() + j - 1, w.end() - 1);
            add_waste(st, w.begin() + i, w.begin() + j - 1);
            res.cycles.push_back(cu);
            res.cycles.push_back(cv);
            st.action = "3ii";
            st.partner_id = paths[ri].id;
            close_active();
          }
          done = true;
          break;
        }
      }
    }
    // (4) path P_r with i^u_r <= ell_r or i^v_r <= ell_r
    for (int ri = 0; ri < static_cast<int>(paths.size()) && !done; ++ri) {
      const std::vector<int> w = paths[ri].v;
      const int t = static_cast<int>(w.size());
      const Rational lr = ell(w);
      std::optional<int> iu, iv;
      for (int i = 0; i < t; ++i)
        if (adj[w[t - 1 - i]][u]) {
          iu = i;
          break;
        }
      for (int i = 0; i < t; ++i)
        if (adj[v][w[i]]) {
          iv = i;
          break;
        }
      const bool self = paths[ri].id == active_id;
      st.charge_bound = lr;
      if (iu && Rational(*iu) <= lr) {
        const int cut = t - *iu;  // keep w_1..w_cut
        add_waste(st, w.begin() + cut, w.end());
        if (!self) {
          std::vector<int> np(w.begin(), w.begin() + cut);
          np.insert(np.end(), P.begin(), P.end());
          st.action = "4i";
          finish_merge(ri, std::move(np));
        } else {
          res.cycles.emplace_back(w.begin(), w.begin() + cut);
          st.action = "4iii";
          st.partner_id = paths[ri].id;
          close_active();
        }
        done = true;
      } else if (iv && Rational(*iv) <= lr) {
        add_waste(st, w.begin(), w.begin() + *iv);
        if (!self) {
          std::vector<int> np = P;
          np.insert(np.end(), w.begin() + *iv, w.end());
          st.action = "4ii";
          finish_merge(ri, std::move(np));
        } else {
          std::vector<int> c{v};
          c.insert(c.end(), w.begin() + *iv, w.end() - 1);
          res.cycles.push_back(c);
          st.action = "4iv";
          st.partner_id = paths[ri].id;
          close_active();
        }
        done = true;
      }
    }
    if (!done) fail(ErrorKind::contract, "impossible-state: none of the cover conditions applies", P);
    std::sort(st.waste_added.begin(), st.waste_added.end());
    res.trace.push_back(st);
  }
  std::sort(waste.begin(), waste.end());
  res.waste = waste;
  return res;
}

inline CoverResult cover_by_cycles(const Digraph& r, const Rational& d, const CoverOptions& opt = {}) {
  return cover_by_cycles(r, d, partition_cycles_paths(r, d), opt);
}

/// Structural audit of a cover: disjoint cycles of r, cycles + waste partition V(r).
inline bool validate_cover(const Digraph& r, const CoverResult& c) {
  std::vector<int> seen(r.order(), 0);
  for (const auto& cyc : c.cycles) {
    if (cyc.size() < 2) return false;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      if (!r.has_edge(cyc[i], cyc[(i + 1) % cyc.size()])) return false;
      ++seen[cyc[i]];
    }
  }
  for (int w : c.waste) ++seen[w];
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

/// Charging audit from the trace: every merge/close step wastes at most ell of
/// the path it cut, and the non-dump waste totals at most 2 sqrt(d) S_0 where
/// S_0 is the number of vertices on the initial paths.
inline bool charge_audit(const CoverResult& c, const Rational& d) {
  std::int64_t s0 = 0, non_dump = 0;
  for (const auto& p : c.initial.paths) s0 += static_cast<std::int64_t>(p.size());
  for (const auto& st : c.trace) {
    if (st.action == "dump") continue;
    if (Rational(static_cast<std::int64_t>(st.waste_added.size())) > st.charge_bound) return false;
    non_dump += static_cast<std::int64_t>(st.waste_added.size());
  }
  return le_coef_sqrt(Rational(non_dump), Rational(2) * Rational(s0), d);
}

}  // namespace hamlab

#endif  // HAMLAB_CYCLE_COVER_HPP
