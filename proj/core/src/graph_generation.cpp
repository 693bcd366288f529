#include <algorithm>
#include <numeric>
#include <vector>

#include "frsd/digraph.hpp"
#include "frsd/error.hpp"
#include "frsd/rng.hpp"

namespace frsd {

namespace {

constexpr int kMaxSkeletonAttempts = 100000;

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(items[i - 1], items[j]);
  }
}

NodeId pick_member(const std::vector<NodeId>& group, Rng& rng) {
  if (group.size() == 1) return group.front();
  return group[rng.below(group.size())];
}

// Cycle-contraction skeleton: strongly connected, n - 1 + (#rounds) edges.
std::vector<Edge> skeleton(std::size_t n, Rng& rng) {
  std::vector<std::vector<NodeId>> groups(n);
  for (NodeId i = 0; i < n; ++i) groups[i] = {i};
  std::vector<Edge> edges;
  while (groups.size() > 1) {
    std::vector<std::size_t> perm(groups.size());
    std::iota(perm.begin(), perm.end(), 0);
    shuffle(perm, rng);
    std::vector<std::size_t> moved;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (perm[i] != i) moved.push_back(i);
    }
    if (moved.empty()) continue;  // identity draw, nothing to contract

    std::vector<std::size_t> order;
    order.reserve(moved.size());
    for (std::size_t i : moved) order.push_back(perm[i]);
    for (std::size_t t = 0; t < order.size(); ++t) {
      const auto& tail = groups[order[t]];
      const auto& head = groups[order[(t + 1) % order.size()]];
      const NodeId from = pick_member(tail, rng);
      const NodeId to = pick_member(head, rng);
      edges.push_back({from, to});
    }

    std::vector<char> in_cycle(groups.size(), 0);
    for (std::size_t g : order) in_cycle[g] = 1;
    std::vector<std::vector<NodeId>> next;
    std::vector<NodeId> super_node;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (in_cycle[g]) {
        super_node.insert(super_node.end(), groups[g].begin(), groups[g].end());
      } else {
        next.push_back(std::move(groups[g]));
      }
    }
    std::sort(super_node.begin(), super_node.end());
    next.push_back(std::move(super_node));
    groups = std::move(next);
  }
  return edges;
}

}  // namespace

DiGraph generate_strongly_connected(std::size_t n, double phi,
                                    std::uint64_t seed) {
  if (n == 0) throw GraphError("graph must have at least one node");
  if (!(phi > 0.0 && phi <= 1.0)) {
    throw InfeasibleDensity("connectivity ratio must lie in (0, 1]");
  }
  if (n == 1) return DiGraph(1, {});
  const std::size_t budget = edge_budget(n, phi);
  if (budget < n) {
    throw InfeasibleDensity("ceil(phi*n*(n-1)) = " + std::to_string(budget) +
                            " edges cannot make " + std::to_string(n) +
                            " nodes strongly connected");
  }

  Rng rng(seed);
  std::vector<Edge> edges;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxSkeletonAttempts) {
      throw InfeasibleDensity("no cycle skeleton fits in the edge budget");
    }
    edges = skeleton(n, rng);
    if (edges.size() <= budget) break;
  }

  std::vector<char> present(n * n, 0);
  for (const Edge& e : edges) present[e.from * n + e.to] = 1;
  std::vector<Edge> absent;
  absent.reserve(n * (n - 1) - edges.size());
  for (NodeId j = 0; j < n; ++j) {
    for (NodeId i = 0; i < n; ++i) {
      if (i != j && !present[j * n + i]) absent.push_back({j, i});
    }
  }
  // Partial Fisher-Yates: the first `extra` slots are a uniform sample
  // without replacement.
  const std::size_t extra = budget - edges.size();
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t pick = k + rng.below(absent.size() - k);
    std::swap(absent[k], absent[pick]);
    edges.push_back(absent[k]);
  }
  return DiGraph(n, std::move(edges));
}

}  // namespace frsd
