#ifndef HAMLAB_PARTITION_HPP
#define HAMLAB_PARTITION_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "hamlab/digraph.hpp"

namespace hamlab {

/// Exceptional set V0 plus equal-size clusters V_1..V_k.
struct ClusterPartition {
  std::vector<int> v0;
  std::vector<std::vector<int>> clusters;

  int k() const { return static_cast<int>(clusters.size()); }
  int m() const { return clusters.empty() ? 0 : static_cast<int>(clusters.front().size()); }

  /// cluster index per vertex, -1 for V0
  std::vector<int> cluster_of(int n) const {
    std::vector<int> c(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < k(); ++i)
      for (int v : clusters[i]) c[v] = i;
    return c;
  }

  /// Throws malformed_input unless v0 and the clusters partition [0, n) with equal sizes.
  void validate(int n) const {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    auto mark = [&](int v) {
      if (v < 0 || v >= n) fail(ErrorKind::malformed_input, "partition vertex out of range");
      if (seen[v]) fail(ErrorKind::malformed_input, "vertex " + std::to_string(v) + " in two parts");
      seen[v] = 1;
    };
    for (int v : v0) mark(v);
    for (const auto& c : clusters) {
      if (static_cast<int>(c.size()) != m())
        fail(ErrorKind::malformed_input, "clusters have unequal sizes");
      for (int v : c) mark(v);
    }
    for (int v = 0; v < n; ++v)
      if (!seen[v]) fail(ErrorKind::malformed_input, "vertex " + std::to_string(v) + " not in partition");
  }
};

}  // namespace hamlab

#endif  // HAMLAB_PARTITION_HPP
