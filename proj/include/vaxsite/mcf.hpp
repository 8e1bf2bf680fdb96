#pragma once

// Successive-shortest-path min-cost flow with node potentials.
// Arc costs may be negative as long as the initial residual network has no
// negative cycle (true for the bipartite transportation networks used here);
// potentials are initialized with Bellman-Ford and then maintained by
// Dijkstra on reduced costs. Flows are integral.

#include <limits>
#include <vector>

#include "vaxsite/common.hpp"

namespace vaxsite::flow {

class MinCostFlow {
 public:
  static constexpr Count kUnbounded = std::numeric_limits<Count>::max() / 4;

  explicit MinCostFlow(std::size_t nodes);

  // Returns the arc id.
  std::size_t add_arc(std::size_t from, std::size_t to, Count capacity, double cost);

  struct Result {
    Count flow = 0;
    double cost = 0.0;
  };

  // Pushes up to `limit` units from source to sink at minimum cost.
  Result solve(std::size_t source, std::size_t sink, Count limit = kUnbounded);

  Count flow(std::size_t arc) const { return arcs_[arc].flow; }
  std::size_t augmentations() const noexcept { return augmentations_; }

 private:
  struct Arc {
    std::size_t to;
    Count capacity;
    Count flow;
    double cost;
  };

  std::size_t nodes_;
  std::vector<Arc> arcs_;  // arc 2k forward, 2k+1 its reverse
  std::vector<std::vector<std::size_t>> out_;
  std::size_t augmentations_ = 0;
};

}  // namespace vaxsite::flow
