#ifndef HAMLAB_BLOWUP_HPP
#define HAMLAB_BLOWUP_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "hamlab/digraph.hpp"
#include "hamlab/partition.hpp"
#include "hamlab/regular_pairs.hpp"

namespace hamlab {

struct BlowupOptions {
  Rational audit_eps{3, 4};  // desk-scale: small sub-pairs make lower values unattainable at m <= 12
  std::optional<Rational> audit_d;  // defaults to pair_density / 2
  double v0_density = 1.0;          // edge probability between V0 and cluster vertices (both directions)
  int retries = 200;
  int audit_samples = 2000;         // sampled-mode draws when m > 12
};

struct Blowup {
  Digraph g;
  ClusterPartition partition;
  OneFactor f;  // f0 on the clusters
};

/// Cluster i occupies vertices [i m, (i+1) m); V0 is the tail [k m, k m + v0_count).
/// Every r0 edge becomes a Bernoulli(pair_density) bipartite pair; pairs on
/// f0-edges are redrawn until they certify super-regular at (audit_eps, audit_d).
inline Blowup gen_blowup(const Digraph& r0, const OneFactor& f0, int m, const Rational& pair_density, int v0_count,
                         std::uint64_t seed, const BlowupOptions& opt = {}) {
  const int k = r0.order();
  if (static_cast<int>(f0.successors().size()) != k) fail(ErrorKind::parameter, "f0 must be a 1-factor on r0's vertices");
  if (!f0.is_factor_of(r0)) fail(ErrorKind::parameter, "f0 is not a 1-factor of r0");
  for (const auto& c : f0.cycles())
    if (c.size() < 4) fail(ErrorKind::parameter, "f0 has a cycle of length < 4", c);
  if (m <= 0 || m % 2 != 0) fail(ErrorKind::parameter, "cluster size must be positive and even");
  if (pair_density <= 0 || pair_density > 1) fail(ErrorKind::parameter, "pair density must lie in (0, 1]");
  if (v0_count < 0) fail(ErrorKind::parameter, "negative V0 size");
  const Rational audit_d = opt.audit_d.value_or(pair_density / Rational(2));
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(to_double(pair_density));
  std::vector<Edge> edges;
  for (const auto& [i, j] : r0.edges()) {
    const bool on_f = f0.successor(i) == j;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= opt.retries) fail(ErrorKind::generation, "blow-up pair audit retries exhausted", {i, j});
      std::vector<Edge> pe;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          if (coin(rng)) pe.emplace_back(a, b);
      if (on_f) {
        BipartiteGraph bg(m, m, pe);
        if (bg.size() == 0) continue;
        const auto mode = m <= 12 ? CertifyMode::exhaustive : CertifyMode::sampled;
        if (!certify_super_regular(bg, opt.audit_eps, audit_d, mode, rng(), opt.audit_samples).regular) continue;
      }
      for (const auto& [a, b] : pe) edges.emplace_back(i * m + a, j * m + b);
      break;
    }
  }
  const int n = k * m + v0_count;
  std::bernoulli_distribution v0coin(opt.v0_density);
  for (int x = k * m; x < n; ++x)
    for (int v = 0; v < k * m; ++v) {
      if (v0coin(rng)) edges.emplace_back(x, v);
      if (v0coin(rng)) edges.emplace_back(v, x);
    }
  ClusterPartition part;
  for (int i = 0; i < k; ++i) {
    part.clusters.emplace_back();
    for (int a = 0; a < m; ++a) part.clusters.back().push_back(i * m + a);
  }
  for (int x = k * m; x < n; ++x) part.v0.push_back(x);
  return Blowup{Digraph(n, edges), part, f0};
}

}  // namespace hamlab

#endif  // HAMLAB_BLOWUP_HPP
