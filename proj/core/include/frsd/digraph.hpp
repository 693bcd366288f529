#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace frsd {

using NodeId = std::size_t;

/// Directed edge `from -> to`: node `from` can send to node `to`.
struct Edge {
  NodeId from;
  NodeId to;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable directed communication topology on nodes 0..n-1.
///
/// Self-loops are never stored; the closed in-neighborhood of a node (its
/// in-neighbors plus itself) is what the mixing weights are built over.
class DiGraph {
 public:
  /// Throws GraphError on self-loops, duplicates, out-of-range endpoints, or
  /// n == 0.
  DiGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Edges sorted by (from, to).
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// Sorted in-neighbors of `i`, excluding `i`.
  std::span<const NodeId> in_neighbors(NodeId i) const { return in_[i]; }
  /// Sorted out-neighbors of `i`, excluding `i`.
  std::span<const NodeId> out_neighbors(NodeId i) const { return out_[i]; }

  bool has_edge(NodeId from, NodeId to) const;

  friend bool operator==(const DiGraph& a, const DiGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> out_;
};

/// True iff every node reaches every other node (forward and reverse search
/// from node 0, O(n + m)).
bool is_strongly_connected(const DiGraph& g);

/// True iff every edge has its reverse.
bool is_symmetric(const DiGraph& g);

/// Number of edges of a random graph with connectivity ratio `phi`:
/// ceil(phi * n * (n - 1)).
std::size_t edge_budget(std::size_t n, double phi);

/// Strongly connected random digraph with exactly edge_budget(n, phi) edges.
///
/// Repeatedly draws a permutation of the current node set, closes the moved
/// nodes into a directed cycle and contracts that cycle into a super-node
/// (edges touching a super-node land on a uniformly chosen member) until one
/// super-node remains; then adds uniformly chosen absent pairs. If the cycle
/// skeleton alone overshoots the budget the construction is redrawn from the
/// same stream.
///
/// Throws InfeasibleDensity when the budget is below n (n >= 2) or phi is not
/// in (0, 1].
DiGraph generate_strongly_connected(std::size_t n, double phi,
                                    std::uint64_t seed);

/// 0 -> 1 -> ... -> n-1 -> 0.
DiGraph directed_cycle(std::size_t n);

/// Directed cycle plus chords j -> (j + stride) mod n for every even j.
DiGraph cycle_with_chords(std::size_t n, std::size_t stride);

/// Complete digraph (every ordered pair of distinct nodes).
DiGraph complete_digraph(std::size_t n);

/// Plain-text graph format: first line `n m`, then m lines `j i` (1-based,
/// edge j -> i).
DiGraph read_graph(std::istream& in);
DiGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const DiGraph& g);
void write_graph_file(const std::string& path, const DiGraph& g);

}  // namespace frsd
