#ifndef POOLING_BLOSSOM_HPP_
#define POOLING_BLOSSOM_HPP_

#include <cstdint>
#include <vector>

namespace pooling {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  std::int64_t w = 0;
};

/// Maximum-weight matching in a general graph (Edmonds' blossom algorithm,
/// primal-dual, O(n^3)). Integer weights keep every dual update exact.
/// Returns mate[v], or -1 for unmatched vertices. Weights must satisfy
/// |w| <= 2^60.
std::vector<int> max_weight_matching(int n, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality = false);

}  // namespace pooling

#endif
