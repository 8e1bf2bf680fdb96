#include "vaxsite/mcf.hpp"

#include <algorithm>
#include <queue>

namespace vaxsite::flow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;
}  // namespace

MinCostFlow::MinCostFlow(std::size_t nodes) : nodes_(nodes), out_(nodes) {}

std::size_t MinCostFlow::add_arc(std::size_t from, std::size_t to, Count capacity,
                                 double cost) {
  if (from >= nodes_ || to >= nodes_) {
    throw Error(ErrorCode::kInvalidArgument, "arc endpoint out of range");
  }
  const auto id = arcs_.size();
  arcs_.push_back({to, capacity, 0, cost});
  arcs_.push_back({from, 0, 0, -cost});
  out_[from].push_back(id);
  out_[to].push_back(id + 1);
  return id;
}

MinCostFlow::Result MinCostFlow::solve(std::size_t source, std::size_t sink, Count limit) {
  Result result;
  // Bellman-Ford over arcs with residual capacity.
  std::vector<double> potential(nodes_, kInf);
  potential[source] = 0.0;
  for (std::size_t pass = 0; pass < nodes_; ++pass) {
    bool changed = false;
    for (std::size_t v = 0; v < nodes_; ++v) {
      if (potential[v] == kInf) continue;
      for (auto id : out_[v]) {
        const auto& a = arcs_[id];
        if (a.capacity - a.flow > 0 && potential[v] + a.cost < potential[a.to] - kEps) {
          potential[a.to] = potential[v] + a.cost;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  for (auto& p : potential) {
    if (p == kInf) p = 0.0;
  }

  std::vector<double> dist(nodes_);
  std::vector<std::size_t> via(nodes_);
  using Item = std::pair<double, std::size_t>;
  while (result.flow < limit) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[v]) continue;
      for (auto id : out_[v]) {
        const auto& a = arcs_[id];
        if (a.capacity - a.flow <= 0) continue;
        const double reduced = std::max(0.0, a.cost + potential[v] - potential[a.to]);
        if (dist[v] + reduced < dist[a.to] - kEps) {
          dist[a.to] = dist[v] + reduced;
          via[a.to] = id;
          heap.emplace(dist[a.to], a.to);
        }
      }
    }
    if (dist[sink] == kInf) break;
    for (std::size_t v = 0; v < nodes_; ++v) {
      if (dist[v] < kInf) potential[v] += dist[v];
    }
    Count push = limit - result.flow;
    for (auto v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
      const auto& a = arcs_[via[v]];
      push = std::min(push, a.capacity - a.flow);
    }
    for (auto v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
      arcs_[via[v]].flow += push;
      arcs_[via[v] ^ 1].flow -= push;
      result.cost += static_cast<double>(push) * arcs_[via[v]].cost;
    }
    result.flow += push;
    ++augmentations_;
  }
  return result;
}

}  // namespace vaxsite::flow
