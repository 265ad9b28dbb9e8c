#ifndef HAMLAB_HAMILTON_HPP
#define HAMLAB_HAMILTON_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "hamlab/digraph.hpp"
#include "hamlab/matching.hpp"

namespace hamlab {

/// Held-Karp over vertex subsets containing vertex 0.  reach[mask] holds the set of
/// possible last vertices of a 0-rooted path spanning mask.  n <= 20.
inline std::optional<HamiltonCertificate> held_karp_hamilton(const Digraph& g, int max_n = 20) {
  const int n = g.order();
  if (n > max_n) fail(ErrorKind::scale, "exact Hamilton search limited to n <= " + std::to_string(max_n));
  if (n < 2) return std::nullopt;
  std::vector<std::uint32_t> out_mask(n, 0);
  for (int u = 0; u < n; ++u)
    for (int v : g.out(u)) out_mask[u] |= 1u << v;
  // index by mask >> 1 since bit 0 is always set
  const std::uint32_t full = (1u << n) - 1;
  std::vector<std::uint32_t> reach(std::size_t{1} << (n - 1), 0);
  reach[0] = 1u;  // mask {0}, ending at 0
  for (std::uint32_t half = 0; half < reach.size(); ++half) {
    const std::uint32_t ends = reach[half];
    if (!ends) continue;
    const std::uint32_t mask = (half << 1) | 1u;
    for (std::uint32_t e = ends; e; e &= e - 1) {
      const int v = __builtin_ctz(e);
      std::uint32_t next = out_mask[v] & ~mask;
      for (; next; next &= next - 1) {
        const int w = __builtin_ctz(next);
        reach[(mask | (1u << w)) >> 1] |= 1u << w;
      }
    }
  }
  std::uint32_t candidates = 0;
  for (int v : g.in(0)) candidates |= 1u << v;
  candidates &= reach[full >> 1];
  if (!candidates) return std::nullopt;
  // walk back from the smallest valid end vertex
  std::vector<int> order;
  std::uint32_t mask = full;
  int v = __builtin_ctz(candidates);
  while (v != 0) {
    order.push_back(v);
    const std::uint32_t prev_mask = mask & ~(1u << v);
    std::uint32_t preds = reach[prev_mask >> 1];
    std::uint32_t in_v = 0;
    for (int u : g.in(v)) in_v |= 1u << u;
    preds &= in_v;
    mask = prev_mask;
    v = __builtin_ctz(preds);
  }
  order.push_back(0);
  std::reverse(order.begin(), order.end());
  return HamiltonCertificate{order};
}

/// Maximum number of vertices covered by vertex-disjoint cycles (n <= 16):
/// the largest S for which the doubled bipartite graph of g[S] has a perfect matching.
inline int max_cycle_cover_coverage(const Digraph& g) {
  const int n = g.order();
  if (n > 16) fail(ErrorKind::scale, "cycle-cover coverage oracle limited to n <= 16");
  int best = 0;
  std::vector<int> s;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size <= best) continue;
    s.clear();
    for (int v = 0; v < n; ++v)
      if (mask >> v & 1U) s.push_back(v);
    auto sub = induced_subdigraph(g, s);
    if (find_one_factor(sub).has_factor()) best = size;
  }
  return best;
}

}  // namespace hamlab

#endif  // HAMLAB_HAMILTON_HPP
