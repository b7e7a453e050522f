#pragma once

// Integral max flow (Dinic) and the player-to-strategy assignment built on
// it: source -> player (capacity 1), player -> strategy (capacity 1, one
// edge per admissible pair), strategy -> sink (capacity theta[strategy]).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "anon/error.hpp"

namespace anon {

class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : adj_(static_cast<std::size_t>(nodes)) {}

  /// Returns an id usable with flow_on().
  int add_edge(int from, int to, long capacity) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, capacity});
    adj_[from].push_back(id);
    edges_.push_back({from, 0});
    adj_[to].push_back(id + 1);
    capacity_.push_back(capacity);
    capacity_.push_back(0);
    return id;
  }

  long run(int source, int sink) {
    long total = 0;
    while (bfs(source, sink)) {
      iter_.assign(adj_.size(), 0);
      while (long pushed = dfs(source, sink, std::numeric_limits<long>::max())) total += pushed;
    }
    return total;
  }

  long flow_on(int edge) const { return capacity_[edge] - edges_[edge].residual; }

 private:
  struct Edge {
    int to;
    long residual;
  };

  bool bfs(int source, int sink) {
    level_.assign(adj_.size(), -1);
    std::queue<int> q;
    level_[source] = 0;
    q.push(source);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int id : adj_[v]) {
        const Edge& e = edges_[id];
        if (e.residual > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  long dfs(int v, int sink, long limit) {
    if (v == sink) return limit;
    for (std::size_t& i = iter_[v]; i < adj_[v].size(); ++i) {
      const int id = adj_[v][i];
      Edge& e = edges_[id];
      if (e.residual <= 0 || level_[e.to] != level_[v] + 1) continue;
      if (long pushed = dfs(e.to, sink, std::min(limit, e.residual))) {
        e.residual -= pushed;
        edges_[id ^ 1].residual += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
  std::vector<long> capacity_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

/// Admissible strategies per player, as indices into the strategy set.
using BipartiteEdges = std::vector<std::vector<int>>;

struct FlowAssignment {
  long flow = 0;
  /// Strategy index per player, -1 when the player is unmatched.
  std::vector<int> strategy_of;
};

/// Maximum assignment respecting the quotas theta (theta[s] players on
/// strategy s) and the admissible edges.
inline FlowAssignment max_flow_assignment(const BipartiteEdges& edges, const std::vector<int>& theta) {
  const int n = static_cast<int>(edges.size());
  const int strategies = static_cast<int>(theta.size());
  const int source = n + strategies, sink = source + 1;
  MaxFlow net(sink + 1);
  std::vector<std::vector<std::pair<int, int>>> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    net.add_edge(source, i, 1);
    for (int s : edges[i]) {
      if (s < 0 || s >= strategies) throw Error("max_flow_assignment: edge to unknown strategy");
      ids[i].push_back({s, net.add_edge(i, n + s, 1)});
    }
  }
  for (int s = 0; s < strategies; ++s)
    if (theta[s] > 0) net.add_edge(n + s, sink, theta[s]);

  FlowAssignment out;
  out.flow = net.run(source, sink);
  out.strategy_of.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i)
    for (auto [s, id] : ids[i])
      if (net.flow_on(id) > 0) out.strategy_of[i] = s;
  return out;
}

/// An assignment placing exactly theta[s] players on every s along
/// admissible edges, or nothing when the max flow falls short of n.
inline std::optional<std::vector<int>> max_flow_assign(const BipartiteEdges& edges, const std::vector<int>& theta,
                                                       int n) {
  if (static_cast<int>(edges.size()) != n) throw Error("max_flow_assign: edge list does not cover n players");
  long quota = 0;
  for (int t : theta) quota += t;
  if (quota != n) return std::nullopt;
  auto a = max_flow_assignment(edges, theta);
  if (a.flow != n) return std::nullopt;
  return a.strategy_of;
}

}  // namespace anon
