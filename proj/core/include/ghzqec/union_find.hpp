#pragma once

#include <cstdint>
#include <vector>

namespace ghzqec {

struct GraphEdge {
  int u = 0;
  int v = 0;
  int weight = 1;   // integer length, >= 1
  int qubit = -1;   // data qubit flipped by this edge; -1 for measurement edges
};

class DecodingGraph {
 public:
  DecodingGraph() = default;
  explicit DecodingGraph(int n_nodes) : adj_(n_nodes) {}

  int add_edge(int u, int v, int weight, int qubit);
  int n_nodes() const { return static_cast<int>(adj_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const GraphEdge& edge(int e) const { return edges_[e]; }
  GraphEdge& edge(int e) { return edges_[e]; }
  const std::vector<int>& incident(int v) const { return adj_[v]; }

 private:
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<int>> adj_;
};

// Weighted union-find decoder: clusters grow along edges in integer steps
// (jumping straight to the next edge completion), then each even cluster is
// peeled on a spanning forest of its grown edges. Returns edge ids of the
// correction. `weights` overrides the graph weights when non-empty.
class UnionFindDecoder {
 public:
  explicit UnionFindDecoder(const DecodingGraph& g) : g_(&g) {}
  std::vector<int> decode(const std::vector<uint8_t>& defects, const std::vector<int>& weights = {});

 private:
  int find(int x);
  void unite(int a, int b);
  void touch(int v);

  const DecodingGraph* g_;
  std::vector<int> parent_, size_, parity_, growth_, touched_;
  std::vector<long long> stamp_;
  std::vector<std::vector<int>> boundary_;
  int epoch_ = 0;
  long long tick_ = 0;
};

}  // namespace ghzqec
