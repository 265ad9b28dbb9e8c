#ifndef HAMLAB_REGULAR_PAIRS_HPP
#define HAMLAB_REGULAR_PAIRS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hamlab/digraph.hpp"
#include "hamlab/hamilton.hpp"
#include "hamlab/matching.hpp"
#include "hamlab/partition.hpp"
#include "hamlab/rational.hpp"

namespace hamlab {

/// Ordered pair (A, B) of disjoint vertex sets of a host digraph; edges run A -> B.
struct Pair {
  const Digraph* host = nullptr;
  std::vector<int> a;
  std::vector<int> b;

  Pair() = default;
  Pair(const Digraph& g, std::vector<int> a_, std::vector<int> b_)
      : host(&g), a(std::move(a_)), b(std::move(b_)) {
    check_vertices(g, a);
    check_vertices(g, b);
    std::vector<char> in_a(g.order(), 0);
    for (int v : a) in_a[v] = 1;
    for (int v : b)
      if (in_a[v]) fail(ErrorKind::malformed_input, "pair sides intersect at " + std::to_string(v));
  }

  BipartiteGraph bipartite() const { return BipartiteGraph::from_pair(*host, a, b); }
};

inline Rational density(const BipartiteGraph& bg) {
  if (bg.a_size() == 0 || bg.b_size() == 0) fail(ErrorKind::parameter, "density of a pair with an empty side");
  return Rational(static_cast<std::int64_t>(bg.size()),
                  static_cast<std::int64_t>(bg.a_size()) * bg.b_size());
}

inline Rational density(const Pair& p) { return density(p.bipartite()); }

enum class CertifyMode { exhaustive, sampled };

inline const char* to_string(CertifyMode m) { return m == CertifyMode::exhaustive ? "exhaustive" : "sampled"; }

struct RegularityVerdict {
  CertifyMode mode = CertifyMode::exhaustive;
  bool regular = true;
  Rational worst_deviation;
  std::optional<std::pair<VertexSet, VertexSet>> witness;  // (X, Y) as host vertex ids
  std::optional<int> degree_witness;                        // super-regularity floor failure
};

namespace detail {

/// Bit-parallel view of a bipartite graph: in_mask[b] = A-neighbours of b.
struct PairBits {
  int na = 0, nb = 0, words = 0;
  std::vector<std::uint64_t> in_mask;  // nb * words
  std::uint64_t edges = 0;

  explicit PairBits(const BipartiteGraph& g) : na(g.a_size()), nb(g.b_size()), words((na + 63) / 64) {
    in_mask.assign(static_cast<std::size_t>(nb) * words, 0);
    for (int a = 0; a < na; ++a)
      for (int b : g.adj(a)) in_mask[static_cast<std::size_t>(b) * words + a / 64] |= std::uint64_t{1} << (a % 64);
    edges = g.size();
  }

  void counts(const std::vector<std::uint64_t>& x, std::vector<int>& out) const {
    out.resize(nb);
    for (int b = 0; b < nb; ++b) {
      int c = 0;
      const auto* row = &in_mask[static_cast<std::size_t>(b) * words];
      for (int w = 0; w < words; ++w) c += __builtin_popcountll(row[w] & x[w]);
      out[b] = c;
    }
  }
};

struct Extreme {
  Rational deviation;
  int y_size = 0;
  bool top = true;  // witness uses the top-y_size counts (else bottom)
};

/// Given per-B counts c_b = e(X, b), the extreme deviation over |Y| >= min_y.
/// For fixed |Y| = s the maximum (minimum) of e(X,Y) is the sum of the s largest
/// (smallest) counts, so this is exact.
inline Extreme best_y(std::vector<int> c, int x_size, int min_y, const Rational& d) {
  std::sort(c.begin(), c.end(), std::greater<>());
  const int nb = static_cast<int>(c.size());
  std::vector<std::int64_t> pre(nb + 1, 0);
  for (int i = 0; i < nb; ++i) pre[i + 1] = pre[i] + c[i];
  Extreme best{Rational(-1), 0, true};
  for (int s = min_y; s <= nb; ++s) {
    const Rational denom = Rational(static_cast<std::int64_t>(x_size) * s);
    const Rational hi = Rational(pre[s]) / denom - d;
    const Rational lo = d - Rational(pre[nb] - pre[nb - s]) / denom;
    if (hi > best.deviation) best = {hi, s, true};
    if (lo > best.deviation) best = {lo, s, false};
  }
  return best;
}

inline VertexSet y_witness(const std::vector<int>& c, const Extreme& e) {
  std::vector<int> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return e.top ? c[i] > c[j] : c[i] < c[j]; });
  idx.resize(e.y_size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline int min_subset(const Rational& eps, int size) {
  return std::max<int>(1, static_cast<int>(ceil_of(eps * Rational(size))));
}

inline BipartiteGraph transpose(const BipartiteGraph& g) {
  std::vector<Edge> e;
  for (const auto& [a, b] : g.edges()) e.emplace_back(b, a);
  return BipartiteGraph(g.b_size(), g.a_size(), std::move(e));
}

inline std::vector<std::uint64_t> to_mask(const VertexSet& s, int words) {
  std::vector<std::uint64_t> m(words, 0);
  for (int v : s) m[v / 64] |= std::uint64_t{1} << (v % 64);
  return m;
}

}  // namespace detail

/// epsilon-regularity of a bipartite graph.  Exhaustive mode enumerates every X
/// and solves the Y side exactly; sampled mode draws `samples` random subsets of
/// one side (alternating sides) and again optimises the other side exactly.
/// Sampled verdicts are one-sided: `regular = false` always carries a witness.
inline RegularityVerdict certify_regular(const BipartiteGraph& g, const Rational& eps, CertifyMode mode,
                                         std::uint64_t seed = 0, int samples = 10000) {
  if (eps <= 0) fail(ErrorKind::parameter, "epsilon must be positive");
  const int na = g.a_size(), nb = g.b_size();
  if (mode == CertifyMode::exhaustive && (na > 12 || nb > 12))
    fail(ErrorKind::scale, "exhaustive certification limited to sides of size <= 12");
  const Rational d = density(g);
  RegularityVerdict v;
  v.mode = mode;
  v.worst_deviation = Rational(0);
  const int min_x = detail::min_subset(eps, na), min_y = detail::min_subset(eps, nb);
  std::vector<int> c;

  auto consider = [&](const detail::PairBits& bits, const VertexSet& x, int my, bool flipped) {
    bits.counts(detail::to_mask(x, bits.words), c);
    auto e = detail::best_y(c, static_cast<int>(x.size()), my, d);
    if (e.deviation > v.worst_deviation || (!v.witness && e.deviation >= eps)) {
      v.worst_deviation = std::max(v.worst_deviation, e.deviation);
      auto y = detail::y_witness(c, e);
      v.witness = flipped ? std::make_pair(y, x) : std::make_pair(x, y);
    }
  };

  const detail::PairBits bits(g);
  if (mode == CertifyMode::exhaustive) {
    VertexSet x;
    for (std::uint32_t mask = 1; mask < (1u << na); ++mask) {
      if (__builtin_popcount(mask) < min_x) continue;
      x.clear();
      for (int i = 0; i < na; ++i)
        if (mask >> i & 1U) x.push_back(i);
      consider(bits, x, min_y, false);
    }
  } else {
    const detail::PairBits tbits(detail::transpose(g));
    std::mt19937_64 rng(seed);
    std::vector<int> pool;
    for (int t = 0; t < samples; ++t) {
      const bool flip = t % 2 == 1;
      const int side = flip ? nb : na;
      const int lo = flip ? min_y : min_x;
      std::uniform_int_distribution<int> size_dist(lo, side);
      pool.resize(side);
      std::iota(pool.begin(), pool.end(), 0);
      const int s = size_dist(rng);
      for (int i = 0; i < s; ++i) {
        std::uniform_int_distribution<int> pick(i, side - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
      VertexSet x(pool.begin(), pool.begin() + s);
      std::sort(x.begin(), x.end());
      consider(flip ? tbits : bits, x, flip ? min_x : min_y, flip);
    }
  }
  v.regular = v.worst_deviation < eps;
  if (v.regular) v.witness.reset();
  return v;
}

/// Maps a verdict's local (X, Y) indices back to host vertices.
inline RegularityVerdict to_host(RegularityVerdict v, const Pair& p) {
  if (v.witness) {
    for (auto& x : v.witness->first) x = p.a[x];
    for (auto& y : v.witness->second) y = p.b[y];
  }
  if (v.degree_witness) {
    const int w = *v.degree_witness;
    v.degree_witness = w < static_cast<int>(p.a.size()) ? p.a[w] : p.b[w - p.a.size()];
  }
  return v;
}

inline CertifyMode default_mode(const Pair& p) {
  return (p.a.size() <= 12 && p.b.size() <= 12) ? CertifyMode::exhaustive : CertifyMode::sampled;
}

inline RegularityVerdict certify_regular(const Pair& p, const Rational& eps, CertifyMode mode,
                                         std::uint64_t seed = 0, int samples = 10000) {
  return to_host(certify_regular(p.bipartite(), eps, mode, seed, samples), p);
}

/// Degree floor of super-regularity: every a has >= d|B| neighbours and every b >= d|A|.
/// Returns the local index of the first failing vertex (B indices offset by |A|).
inline std::optional<int> degree_floor_violation(const BipartiteGraph& g, const Rational& d) {
  std::vector<int> deg_b(g.b_size(), 0);
  for (int a = 0; a < g.a_size(); ++a) {
    if (Rational(static_cast<std::int64_t>(g.adj(a).size())) < d * Rational(g.b_size())) return a;
    for (int b : g.adj(a)) ++deg_b[b];
  }
  for (int b = 0; b < g.b_size(); ++b)
    if (Rational(deg_b[b]) < d * Rational(g.a_size())) return g.a_size() + b;
  return std::nullopt;
}

inline RegularityVerdict certify_super_regular(const BipartiteGraph& g, const Rational& eps, const Rational& d,
                                               CertifyMode mode, std::uint64_t seed = 0, int samples = 10000) {
  if (auto bad = degree_floor_violation(g, d)) {
    RegularityVerdict v;
    v.mode = mode;
    v.regular = false;
    v.degree_witness = *bad;
    return v;
  }
  return certify_regular(g, eps, mode, seed, samples);
}

inline RegularityVerdict certify_super_regular(const Pair& p, const Rational& eps, const Rational& d,
                                               CertifyMode mode, std::uint64_t seed = 0, int samples = 10000) {
  return to_host(certify_super_regular(p.bipartite(), eps, d, mode, seed, samples), p);
}

/// Matching in a pair the caller asserts (eps, 2 eps)-regular: size >= (1 - eps) n,
/// perfect when super-regularity is also asserted.  A shortfall is a contract
/// error carrying the Konig-Hall violator (as host vertices of A).
inline Matching regular_pair_matching(const Pair& p, const Rational& eps, bool super_regular = false) {
  if (p.a.size() != p.b.size()) fail(ErrorKind::parameter, "regular_pair_matching needs |A| = |B|");
  const auto g = p.bipartite();
  detail::HopcroftKarp hk(g);
  Matching m = hk.matching();
  const auto n = static_cast<std::int64_t>(p.a.size());
  const Rational need = super_regular ? Rational(n) : (Rational(1) - eps) * Rational(n);
  if (Rational(static_cast<std::int64_t>(m.size())) < need) {
    VertexSet s = detail::flagged(hk.alternating_reach().first, true);
    for (auto& x : s) x = p.a[x];
    fail(ErrorKind::contract, "regular pair has no matching of the promised size", s);
  }
  for (auto& [x, y] : m.pairs) x = p.a[x], y = p.b[y];
  return m;
}

/// Reduced digraph on the clusters of a partition.
struct ReducedDigraph {
  Digraph base;
  std::vector<std::vector<Rational>> densities;  // densities[i][j] of (V_i, V_j)
  Rational epsilon;
  Rational d;
  std::vector<std::vector<char>> certified;  // verdict of the regularity check, per ordered pair

  int k() const { return base.order(); }
};

inline std::vector<std::vector<Rational>> cluster_densities(const Digraph& g, const ClusterPartition& part) {
  const int k = part.k();
  const auto cl = part.cluster_of(g.order());
  std::vector<std::vector<std::int64_t>> e(k, std::vector<std::int64_t>(k, 0));
  for (int u = 0; u < g.order(); ++u) {
    if (cl[u] < 0) continue;
    for (int v : g.out(u))
      if (cl[v] >= 0) ++e[cl[u]][cl[v]];
  }
  std::vector<std::vector<Rational>> d(k, std::vector<Rational>(k));
  const std::int64_t mm = static_cast<std::int64_t>(part.m()) * part.m();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) d[i][j] = mm == 0 ? Rational(0) : Rational(e[i][j], mm);
  return d;
}

/// Edge i -> j iff density >= d and the pair is certified eps-regular
/// (exhaustive when m <= 12, sampled otherwise).
inline ReducedDigraph build_reduced(const Digraph& g, const ClusterPartition& part, const Rational& eps,
                                    const Rational& d, std::uint64_t seed = 0, int samples = 10000) {
  part.validate(g.order());
  ReducedDigraph r;
  r.epsilon = eps;
  r.d = d;
  r.densities = cluster_densities(g, part);
  const int k = part.k();
  r.certified.assign(k, std::vector<char>(k, 0));
  std::vector<Edge> edges;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j || r.densities[i][j] < d) continue;
      Pair p(g, part.clusters[i], part.clusters[j]);
      const auto verdict = certify_regular(p.bipartite(), eps, default_mode(p), seed + 7919u * (i * k + j), samples);
      r.certified[i][j] = verdict.regular;
      if (verdict.regular) edges.emplace_back(i, j);
    }
  r.base = Digraph(k, edges);
  return r;
}

struct SuperRegularMove {
  ClusterPartition partition;
  std::vector<VertexSet> moved;       // per cluster, host ids
  std::vector<VertexSet> low_degree;  // A(V) per cluster
};

/// Moves exactly ceil(Delta eps m) vertices of each cluster (containing A(V)) into V0.
/// A(V): vertices with fewer than (d - eps) m neighbours in some h-neighbour cluster.
/// Delta(h) is the maximum total degree (in + out) of h.
inline SuperRegularMove make_super_regular(const Digraph& g, const ClusterPartition& part, const Digraph& h,
                                           int delta, const Rational& eps, const Rational& d) {
  part.validate(g.order());
  const int k = part.k(), m = part.m();
  if (h.order() != k) fail(ErrorKind::parameter, "h must live on the clusters");
  int actual = 0;
  for (int v = 0; v < k; ++v) actual = std::max(actual, h.out_degree(v) + h.in_degree(v));
  if (actual > delta) fail(ErrorKind::precondition, "h has maximum degree above the declared Delta");
  if (Rational(delta) * eps > Rational(1, 2)) fail(ErrorKind::parameter, "need eps * Delta <= 1/2");
  const auto quota = static_cast<int>(ceil_of(Rational(delta) * eps * Rational(m)));
  const auto cl = part.cluster_of(g.order());
  const Rational floor_needed = (d - eps) * Rational(m);

  SuperRegularMove out;
  out.partition.v0 = part.v0;
  for (int c = 0; c < k; ++c) {
    // margin = min over h-neighbour clusters of (neighbours - floor); negative means in A(V)
    std::vector<std::pair<Rational, int>> score;
    VertexSet low;
    for (int x : part.clusters[c]) {
      std::vector<int> out_cnt(k, 0), in_cnt(k, 0);
      for (int y : g.out(x))
        if (cl[y] >= 0) ++out_cnt[cl[y]];
      for (int y : g.in(x))
        if (cl[y] >= 0) ++in_cnt[cl[y]];
      Rational margin(m);
      for (int w : h.out(c)) margin = std::min(margin, Rational(out_cnt[w]) - floor_needed);
      for (int w : h.in(c)) margin = std::min(margin, Rational(in_cnt[w]) - floor_needed);
      if (margin < 0) low.push_back(x);
      score.emplace_back(margin, x);
    }
    if (static_cast<int>(low.size()) > quota)
      fail(ErrorKind::contract, "cluster " + std::to_string(c) + " has more low-degree vertices than Delta eps m", low);
    std::sort(score.begin(), score.end());
    VertexSet moved, kept;
    for (int i = 0; i < static_cast<int>(score.size()); ++i)
      (i < quota ? moved : kept).push_back(score[i].second);
    std::sort(moved.begin(), moved.end());
    std::sort(kept.begin(), kept.end());
    out.partition.v0.insert(out.partition.v0.end(), moved.begin(), moved.end());
    out.partition.clusters.push_back(kept);
    out.moved.push_back(moved);
    out.low_degree.push_back(low);
  }
  std::sort(out.partition.v0.begin(), out.partition.v0.end());
  return out;
}

/// Exact hypergeometric draw: |T n S| for |N| = n, |S| = m, T a uniform k-subset.
inline int sample_hypergeometric(int n, int m, int k, std::mt19937_64& rng) {
  if (n < 0 || m < 0 || k < 0 || m > n || k > n) fail(ErrorKind::parameter, "need 0 <= m, k <= n");
  int successes = m, hits = 0;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> u(0, n - i - 1);
    if (u(rng) < successes) {
      ++hits;
      --successes;
    }
  }
  return hits;
}

inline int sample_hypergeometric(int n, int m, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_hypergeometric(n, m, k, rng);
}

struct ChernoffAudit {
  double empirical_tail = 0;
  double bound = 0;
  long long tail_count = 0;
  long long trials = 0;
  bool pass = false;
};

/// Empirical P(|X - EX| >= a EX) for hypergeometric (n, m, k) against 2 exp(-a^2 EX / 3).
inline ChernoffAudit chernoff_audit(int n, int m, int k, const Rational& a, long long trials, std::uint64_t seed) {
  if (a <= 0 || a >= Rational(3, 2)) fail(ErrorKind::parameter, "need 0 < a < 3/2");
  if (trials <= 0) fail(ErrorKind::parameter, "need trials > 0");
  std::mt19937_64 rng(seed);
  const Rational ex(static_cast<std::int64_t>(k) * m, n);
  const Rational thresh = a * ex;
  ChernoffAudit r;
  r.trials = trials;
  for (long long t = 0; t < trials; ++t) {
    const Rational dev = Rational(sample_hypergeometric(n, m, k, rng)) - ex;
    if ((dev < 0 ? -dev : dev) >= thresh) ++r.tail_count;
  }
  r.empirical_tail = static_cast<double>(r.tail_count) / static_cast<double>(trials);
  const double exd = to_double(ex), ad = to_double(a);
  r.bound = 2.0 * std::exp(-ad * ad * exd / 3.0);
  r.pass = r.empirical_tail <= r.bound;
  return r;
}

/// Excision: given X subset of A (|X| <= |A|/3), find Y subset of B
/// with |Y| = |X| such that (A \ X, B \ Y) keeps degree floors d/2 on both sides.
/// B1 = vertices of B with fewer than d|A \ X| / 2 neighbours in A \ X; the rest of
/// Y is drawn uniformly from B \ B1, redrawn up to `retries` times.
inline VertexSet excise_preserving(const Pair& p, const VertexSet& x, const Rational& d, std::uint64_t seed,
                                   int retries = 100) {
  const int na = static_cast<int>(p.a.size()), nb = static_cast<int>(p.b.size());
  if (3 * static_cast<int>(x.size()) > na) fail(ErrorKind::precondition, "excise_preserving needs |X| <= |A|/3");
  std::vector<char> in_x(p.host->order(), 0), in_a(p.host->order(), 0);
  for (int v : p.a) in_a[v] = 1;
  for (int v : x) {
    if (!in_a[v]) fail(ErrorKind::parameter, "X must be a subset of A");
    in_x[v] = 1;
  }
  const int rest_a = na - static_cast<int>(x.size());
  const Rational half_d = d / Rational(2);
  std::vector<int> b_deg(nb, 0);
  VertexSet b1, others;
  for (int j = 0; j < nb; ++j) {
    for (int u : p.host->in(p.b[j]))
      if (in_a[u] && !in_x[u]) ++b_deg[j];
    (Rational(b_deg[j]) < half_d * Rational(rest_a) ? b1 : others).push_back(p.b[j]);
  }
  if (b1.size() > x.size())
    fail(ErrorKind::contract, "more low-degree B vertices than |X|; pair is not super-regular", b1);
  std::mt19937_64 rng(seed);
  const int need = static_cast<int>(x.size() - b1.size());
  const int rest_b = nb - static_cast<int>(x.size());
  for (int attempt = 0; attempt < retries; ++attempt) {
    VertexSet pool = others;
    std::shuffle(pool.begin(), pool.end(), rng);
    VertexSet y = b1;
    y.insert(y.end(), pool.begin(), pool.begin() + need);
    std::sort(y.begin(), y.end());
    std::vector<char> in_y(p.host->order(), 0);
    for (int v : y) in_y[v] = 1;
    bool ok = true;
    for (int a : p.a) {
      if (in_x[a]) continue;
      int deg = 0;
      for (int w : p.host->out(a))
        if (!in_y[w] && std::binary_search(p.b.begin(), p.b.end(), w)) ++deg;
      if (Rational(deg) < half_d * Rational(rest_b)) {
        ok = false;
        break;
      }
    }
    if (ok) return y;
  }
  fail(ErrorKind::generation, "excise_preserving: retries exhausted");
}

struct Ideal {
  VertexSet a_star;
  VertexSet b_star;
};

/// Random (A*, B*) of size ceil(theta n), n = max(|A|, |B|), redrawn until every
/// a in A has >= theta d n / 4 neighbours in B* and every b in B has as many in A*.
inline Ideal select_ideal(const Pair& p, const Rational& theta, const Rational& d, std::uint64_t seed,
                          int retries = 100) {
  const int n = static_cast<int>(std::max(p.a.size(), p.b.size()));
  const int size = static_cast<int>(ceil_of(theta * Rational(n)));
  if (size > static_cast<int>(std::min(p.a.size(), p.b.size())))
    fail(ErrorKind::parameter, "ideal larger than a side of the pair");
  const Rational floor_needed = theta * d * Rational(n) / Rational(4);
  std::mt19937_64 rng(seed);
  std::vector<char> mark(p.host->order(), 0);
  for (int attempt = 0; attempt < retries; ++attempt) {
    VertexSet as = p.a, bs = p.b;
    std::shuffle(as.begin(), as.end(), rng);
    std::shuffle(bs.begin(), bs.end(), rng);
    as.resize(size);
    bs.resize(size);
    std::sort(as.begin(), as.end());
    std::sort(bs.begin(), bs.end());
    auto floor_ok = [&](const VertexSet& side, const VertexSet& star, Direction dir) {
      std::fill(mark.begin(), mark.end(), 0);
      for (int v : star) mark[v] = 1;
      for (int v : side) {
        int deg = 0;
        for (int w : p.host->neighbors(v, dir)) deg += mark[w];
        if (Rational(deg) < floor_needed) return false;
      }
      return true;
    };
    if (floor_ok(p.a, bs, Direction::out) && floor_ok(p.b, as, Direction::in)) return Ideal{as, bs};
  }
  fail(ErrorKind::generation, "select_ideal: retries exhausted");
}

/// Samples `count` random (A', B') containing the ideal and certifies each
/// (eps_star, d_star)-super-regular in the given mode.  True iff all pass.
inline bool audit_ideal(const Pair& p, const Ideal& ideal, const Rational& eps_star, const Rational& d_star,
                        int count, std::uint64_t seed, CertifyMode mode = CertifyMode::sampled, int samples = 2000) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < count; ++t) {
    VertexSet a2 = ideal.a_star, b2 = ideal.b_star;
    for (int v : p.a)
      if (!std::binary_search(ideal.a_star.begin(), ideal.a_star.end(), v) && coin(rng)) a2.push_back(v);
    for (int v : p.b)
      if (!std::binary_search(ideal.b_star.begin(), ideal.b_star.end(), v) && coin(rng)) b2.push_back(v);
    std::sort(a2.begin(), a2.end());
    std::sort(b2.begin(), b2.end());
    Pair sub(*p.host, a2, b2);
    const auto m = (a2.size() <= 12 && b2.size() <= 12) ? mode : CertifyMode::sampled;
    if (!certify_super_regular(sub, eps_star, d_star, m, rng(), samples).regular) return false;
  }
  return true;
}

/// Hamilton cycle in a dense digraph.  Exact Held-Karp for n <= 18 (a negative
/// answer is a no_solution error).  Above that: random 1-factor from a shuffled
/// perfect matching of the doubled graph, then cycle merging by 2-exchanges
/// (u, v on different cycles with u -> v+ and v -> u+ edges), restarting until
/// the deadline; failure is search_failure, never a claim of nonexistence.
inline HamiltonCertificate hamilton_in_super_regular(const Digraph& g, std::chrono::milliseconds deadline,
                                                     std::uint64_t seed) {
  const int n = g.order();
  if (n <= 18) {
    auto c = held_karp_hamilton(g);
    if (!c) fail(ErrorKind::no_solution, "digraph is not Hamiltonian (exact search)");
    return *c;
  }
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  while (std::chrono::steady_clock::now() - start < deadline) {
    std::vector<int> perm(n), inv(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) inv[perm[i]] = i;
    std::vector<Edge> relabeled;
    for (const auto& [u, v] : g.edges()) relabeled.emplace_back(inv[u], inv[v]);
    auto cert = find_one_factor(Digraph(n, relabeled));
    if (!cert.has_factor())
      fail(ErrorKind::no_solution, "digraph has no 1-factor, hence no Hamilton cycle",
           [&] {
             VertexSet s;
             for (int x : cert.violator()) s.push_back(perm[x]);
             std::sort(s.begin(), s.end());
             return s;
           }());
    std::vector<int> succ(n);
    for (int i = 0; i < n; ++i) succ[perm[i]] = perm[cert.factor().successor(i)];
    for (;;) {
      OneFactor f(succ);
      if (f.cycles().size() == 1) break;
      bool merged = false;
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (int u : order) {
        for (int v : g.out(u)) {
          // u -> succ(w) where v = succ(w) ; need w -> succ(u)
          const int w = f.predecessor(v);
          if (f.cycle_of(w) == f.cycle_of(u)) continue;
          if (!g.has_edge(w, succ[u])) continue;
          const int su = succ[u];
          succ[u] = v;
          succ[w] = su;
          merged = true;
          break;
        }
        if (merged) break;
      }
      if (!merged) break;
    }
    OneFactor f(succ);
    if (f.cycles().size() == 1) {
      HamiltonCertificate c{f.cycles().front()};
      if (!verify_hamilton_cycle(g, c)) fail(ErrorKind::contract, "heuristic produced an invalid cycle");
      return c;
    }
  }
  fail(ErrorKind::search_failure, "Hamilton heuristic deadline exceeded");
}

/// Per-vertex typicality with respect to G'' (pairs of density <= d' and
/// intra-cluster edges deleted).
struct TypicalityAudit {
  std::vector<char> typical;        // indexed by host vertex; V0 entries are 1
  std::vector<int> bad_clusters;    // number of out/in window failures (max of both)
  std::vector<std::int64_t> loss;   // max(d+_G - d+_G'', d-_G - d-_G'')
  bool all_typical = true;
};

inline TypicalityAudit typicality_audit(const Digraph& g, const ClusterPartition& part, const Rational& eps,
                                        const Rational& dprime) {
  const int n = g.order(), k = part.k(), m = part.m();
  const auto cl = part.cluster_of(n);
  const auto dens = cluster_densities(g, part);
  auto kept = [&](int u, int v) {
    if (cl[u] < 0 || cl[v] < 0) return true;
    if (cl[u] == cl[v]) return false;
    return dens[cl[u]][cl[v]] > dprime;
  };
  TypicalityAudit t;
  t.typical.assign(n, 1);
  t.bad_clusters.assign(n, 0);
  t.loss.assign(n, 0);
  const Rational loss_cap = Rational(4) * dprime * Rational(n);
  const Rational cluster_cap = [&] {
    // sqrt(eps) k compared exactly: count <= sqrt(eps) k  <=>  count^2 <= eps k^2
    return eps * Rational(static_cast<std::int64_t>(k) * k);
  }();
  for (int x = 0; x < n; ++x) {
    if (cl[x] < 0) continue;
    std::int64_t out_keep = 0, in_keep = 0;
    std::vector<int> out_cnt(k, 0), in_cnt(k, 0);
    for (int y : g.out(x))
      if (kept(x, y)) {
        ++out_keep;
        if (cl[y] >= 0) ++out_cnt[cl[y]];
      }
    for (int y : g.in(x))
      if (kept(y, x)) {
        ++in_keep;
        if (cl[y] >= 0) ++in_cnt[cl[y]];
      }
    t.loss[x] = std::max<std::int64_t>(g.out_degree(x) - out_keep, g.in_degree(x) - in_keep);
    int bad_out = 0, bad_in = 0;
    for (int y = 0; y < k; ++y) {
      if (y == cl[x]) continue;
      const Rational dxy = dens[cl[x]][y] > dprime ? dens[cl[x]][y] : Rational(0);
      const Rational dyx = dens[y][cl[x]] > dprime ? dens[y][cl[x]] : Rational(0);
      const Rational lo_o = dxy * Rational(m) / Rational(2), hi_o = dxy * Rational(3 * m, 2);
      const Rational lo_i = dyx * Rational(m) / Rational(2), hi_i = dyx * Rational(3 * m, 2);
      if (Rational(out_cnt[y]) < lo_o || Rational(out_cnt[y]) > hi_o) ++bad_out;
      if (Rational(in_cnt[y]) < lo_i || Rational(in_cnt[y]) > hi_i) ++bad_in;
    }
    t.bad_clusters[x] = std::max(bad_out, bad_in);
    const bool ok = Rational(t.loss[x]) <= loss_cap &&
                    Rational(static_cast<std::int64_t>(bad_out) * bad_out) <= cluster_cap &&
                    Rational(static_cast<std::int64_t>(bad_in) * bad_in) <= cluster_cap;
    t.typical[x] = ok;
    t.all_typical = t.all_typical && ok;
  }
  return t;
}

struct PruneResult {
  ClusterPartition partition;
  std::vector<VertexSet> moved;  // per cluster
  int quota = 0;                 // ceil(16 sqrt(eps) m)
  bool post_audit_ok = false;    // typicality re-audited on the new partition
  VertexSet atypical_after;
};

/// Moves exactly ceil(16 sqrt(eps) m) vertices per cluster into V0, atypical ones
/// first (most window failures, then largest degree loss, then lowest id).
inline PruneResult prune_atypical(const Digraph& g, const ClusterPartition& part, const Rational& eps,
                                  const Rational& dprime) {
  part.validate(g.order());
  const int m = part.m();
  PruneResult out;
  out.quota = static_cast<int>(ceil_coef_sqrt(Rational(16) * Rational(m), eps));
  if (out.quota > m) fail(ErrorKind::parameter, "16 sqrt(eps) m exceeds the cluster size");
  const auto audit = typicality_audit(g, part, eps, dprime);
  out.partition.v0 = part.v0;
  for (int c = 0; c < part.k(); ++c) {
    VertexSet vs = part.clusters[c];
    int atypical = 0;
    for (int x : vs) atypical += !audit.typical[x];
    if (atypical > out.quota)
      fail(ErrorKind::contract, "cluster " + std::to_string(c) + " has more atypical vertices than the quota");
    std::stable_sort(vs.begin(), vs.end(), [&](int a, int b) {
      if (audit.typical[a] != audit.typical[b]) return audit.typical[a] < audit.typical[b];
      if (audit.bad_clusters[a] != audit.bad_clusters[b]) return audit.bad_clusters[a] > audit.bad_clusters[b];
      if (audit.loss[a] != audit.loss[b]) return audit.loss[a] > audit.loss[b];
      return a < b;
    });
    VertexSet moved(vs.begin(), vs.begin() + out.quota), kept(vs.begin() + out.quota, vs.end());
    std::sort(moved.begin(), moved.end());
    std::sort(kept.begin(), kept.end());
    out.partition.v0.insert(out.partition.v0.end(), moved.begin(), moved.end());
    out.partition.clusters.push_back(kept);
    out.moved.push_back(moved);
  }
  std::sort(out.partition.v0.begin(), out.partition.v0.end());
  const auto after = typicality_audit(g, out.partition, eps, dprime);
  out.post_audit_ok = after.all_typical;
  for (int x = 0; x < g.order(); ++x)
    if (!after.typical[x]) out.atypical_after.push_back(x);
  return out;
}

}  // namespace hamlab

#endif  // HAMLAB_REGULAR_PAIRS_HPP
