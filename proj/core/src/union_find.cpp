#include "ghzqec/union_find.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ghzqec {

int DecodingGraph::add_edge(int u, int v, int weight, int qubit) {
  if (u < 0 || v < 0 || u >= n_nodes() || v >= n_nodes() || u == v) throw std::invalid_argument("bad decoding edge");
  if (weight < 1) throw std::invalid_argument("edge weight must be >= 1");
  edges_.push_back({u, v, weight, qubit});
  int id = static_cast<int>(edges_.size()) - 1;
  adj_[u].push_back(id);
  adj_[v].push_back(id);
  return id;
}

int UnionFindDecoder::find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void UnionFindDecoder::touch(int v) {
  if (touched_[v] == epoch_) return;
  touched_[v] = epoch_;
  parent_[v] = v;
  size_[v] = 1;
  parity_[v] = 0;
  boundary_[v] = g_->incident(v);
}

void UnionFindDecoder::unite(int a, int b) {
  touch(a);
  touch(b);
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  parity_[a] ^= parity_[b];
  auto& ba = boundary_[a];
  auto& bb = boundary_[b];
  ba.insert(ba.end(), bb.begin(), bb.end());
  bb.clear();
  bb.shrink_to_fit();
}

std::vector<int> UnionFindDecoder::decode(const std::vector<uint8_t>& defects, const std::vector<int>& weights) {
  const int n = g_->n_nodes(), m = g_->n_edges();
  if (static_cast<int>(defects.size()) != n) throw std::invalid_argument("defect vector size mismatch");
  if (!weights.empty() && static_cast<int>(weights.size()) != m) throw std::invalid_argument("weight vector size mismatch");
  // doubled so a unit edge still grows in two half steps
  auto weight = [&](int e) { return 2 * (weights.empty() ? g_->edge(e).weight : weights[e]); };

  if (static_cast<int>(parent_.size()) != n) {
    parent_.assign(n, 0);
    size_.assign(n, 1);
    parity_.assign(n, 0);
    touched_.assign(n, -1);
    boundary_.assign(n, {});
    epoch_ = 0;
  }
  if (static_cast<int>(growth_.size()) != m) {
    growth_.assign(m, 0);
    stamp_.assign(m, -1);
  }
  ++epoch_;
  std::fill(growth_.begin(), growth_.end(), 0);

  std::vector<int> defect_nodes;
  for (int v = 0; v < n; ++v) {
    if (defects[v]) {
      touch(v);
      defect_nodes.push_back(v);
    }
  }
  for (int v : defect_nodes) parity_[v] = 1;
  auto parity_of = [&](int root) { return touched_[root] == epoch_ ? parity_[root] : 0; };

  std::vector<int> odd, active;
  while (true) {
    odd.clear();
    for (int v : defect_nodes) {
      int r = find(v);
      if (parity_[r]) odd.push_back(r);
    }
    std::sort(odd.begin(), odd.end());
    odd.erase(std::unique(odd.begin(), odd.end()), odd.end());
    if (odd.empty()) break;

    ++tick_;
    active.clear();
    long long delta = std::numeric_limits<long long>::max();
    for (int r : odd) {
      auto& b = boundary_[r];
      // drop fully grown edges; they are internal now
      b.erase(std::remove_if(b.begin(), b.end(), [&](int e) { return growth_[e] >= weight(e); }), b.end());
      for (int e : b) {
        if (stamp_[e] == tick_) continue;
        stamp_[e] = tick_;
        const auto& ed = g_->edge(e);
        int ru = touched_[ed.u] == epoch_ ? find(ed.u) : ed.u;
        int rv = touched_[ed.v] == epoch_ ? find(ed.v) : ed.v;
        int rate = ru == rv ? 2 : parity_of(ru) + parity_of(rv);
        if (rate == 0) continue;
        active.push_back(e * 2 + (rate - 1));
        long long rem = weight(e) - growth_[e];
        delta = std::min(delta, (rem + rate - 1) / rate);
      }
    }
    if (active.empty()) throw std::runtime_error("union-find: odd cluster cannot grow (odd defect parity in a component)");
    std::vector<int> grown;
    for (int code : active) {
      int e = code / 2, rate = code % 2 + 1;
      growth_[e] = static_cast<int>(std::min<long long>(weight(e), growth_[e] + delta * rate));
      if (growth_[e] >= weight(e)) grown.push_back(e);
    }
    for (int e : grown) {
      unite(g_->edge(e).u, g_->edge(e).v);
    }
  }

  // peel a spanning forest of the grown edges
  std::vector<int> order, parent_edge(n, -1);
  std::vector<uint8_t> seen(n, 0), d(n, 0);
  for (int v : defect_nodes) d[v] = 1;
  for (int s = 0; s < n; ++s) {
    if (touched_[s] != epoch_ || seen[s]) continue;
    seen[s] = 1;
    size_t head = order.size();
    order.push_back(s);
    while (head < order.size()) {
      int v = order[head++];
      for (int e : g_->incident(v)) {
        if (growth_[e] < weight(e)) continue;
        const auto& ed = g_->edge(e);
        int w = ed.u == v ? ed.v : ed.u;
        if (seen[w]) continue;
        seen[w] = 1;
        parent_edge[w] = e;
        order.push_back(w);
      }
    }
  }
  std::vector<int> correction;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (!d[v]) continue;
    int e = parent_edge[v];
    if (e < 0) throw std::runtime_error("union-find: unmatched defect at tree root");
    correction.push_back(e);
    d[v] = 0;
    const auto& ed = g_->edge(e);
    int p = ed.u == v ? ed.v : ed.u;
    d[p] ^= 1;
  }
  return correction;
}

}  // namespace ghzqec
