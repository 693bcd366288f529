#include "frsd/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "frsd/error.hpp"

namespace frsd {

DiGraph::DiGraph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), in_(n), out_(n) {
  if (n_ == 0) throw GraphError("graph must have at least one node");
  for (const Edge& e : edges_) {
    if (e.from >= n_ || e.to >= n_) {
      throw GraphError("edge endpoint out of range");
    }
    if (e.from == e.to) throw GraphError("self-loops are implicit, not stored");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw GraphError("duplicate edge");
  }
  for (const Edge& e : edges_) {
    out_[e.from].push_back(e.to);
    in_[e.to].push_back(e.from);
  }
  for (auto& list : in_) std::sort(list.begin(), list.end());
}

bool DiGraph::has_edge(NodeId from, NodeId to) const {
  const auto& outs = out_.at(from);
  return std::binary_search(outs.begin(), outs.end(), to);
}

namespace {

std::size_t reach_count(const DiGraph& g, bool forward) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    const auto next = forward ? g.out_neighbors(u) : g.in_neighbors(u);
    for (NodeId w : next) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count;
}

}  // namespace

bool is_strongly_connected(const DiGraph& g) {
  const std::size_t n = g.node_count();
  return reach_count(g, true) == n && reach_count(g, false) == n;
}

bool is_symmetric(const DiGraph& g) {
  for (const Edge& e : g.edges()) {
    if (!g.has_edge(e.to, e.from)) return false;
  }
  return true;
}

std::size_t edge_budget(std::size_t n, double phi) {
  const double exact = phi * static_cast<double>(n) * static_cast<double>(n - 1);
  // Absorb representation error so e.g. 0.1 * 600 stays 60.
  return static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
}

DiGraph directed_cycle(std::size_t n) {
  std::vector<Edge> edges;
  if (n >= 2) {
    for (NodeId j = 0; j < n; ++j) edges.push_back({j, (j + 1) % n});
  }
  return DiGraph(n, std::move(edges));
}

DiGraph cycle_with_chords(std::size_t n, std::size_t stride) {
  std::vector<Edge> edges;
  if (n >= 2) {
    for (NodeId j = 0; j < n; ++j) edges.push_back({j, (j + 1) % n});
    for (NodeId j = 0; j < n; j += 2) {
      const NodeId to = (j + stride) % n;
      const Edge chord{j, to};
      if (to != j && std::find(edges.begin(), edges.end(), chord) == edges.end()) {
        edges.push_back(chord);
      }
    }
  }
  return DiGraph(n, std::move(edges));
}

DiGraph complete_digraph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId j = 0; j < n; ++j) {
    for (NodeId i = 0; i < n; ++i) {
      if (i != j) edges.push_back({j, i});
    }
  }
  return DiGraph(n, std::move(edges));
}

DiGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line(line)) throw ParseError(1, "missing `n m` header");
  std::size_t n = 0;
  std::size_t m = 0;
  {
    std::istringstream header(line);
    if (!(header >> n >> m)) throw ParseError(line_no, "expected `n m`");
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!next_line(line)) {
      throw ParseError(line_no + 1, "expected " + std::to_string(m) + " edges");
    }
    std::istringstream row(line);
    std::size_t j = 0;
    std::size_t i = 0;
    if (!(row >> j >> i) || j == 0 || i == 0 || j > n || i > n) {
      throw ParseError(line_no, "expected 1-based `j i` with j, i <= n");
    }
    edges.push_back({j - 1, i - 1});
  }
  if (next_line(line)) throw ParseError(line_no, "trailing content after edges");
  try {
    return DiGraph(n, std::move(edges));
  } catch (const GraphError& e) {
    throw ParseError(line_no, e.what());
  }
}

DiGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const DiGraph& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << e.from + 1 << ' ' << e.to + 1 << '\n';
}

void write_graph_file(const std::string& path, const DiGraph& g) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write graph file " + path);
  write_graph(out, g);
}

}  // namespace frsd
