#include "redsense/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "redsense/errors.hpp"

namespace redsense::transport {

namespace {

struct Edge {
  std::size_t to;
  std::size_t rev;  // index of the reverse edge in graph[to]
  double capacity;
  double cost;
};

class ResidualGraph {
 public:
  explicit ResidualGraph(std::size_t nodes) : graph_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, double capacity, double cost) {
    graph_[from].push_back({to, graph_[to].size(), capacity, cost});
    graph_[to].push_back({from, graph_[from].size() - 1, 0.0, -cost});
    return graph_[from].size() - 1;
  }

  const Edge& edge(std::size_t from, std::size_t index) const { return graph_[from][index]; }

  // Sends up to `limit` units along cheapest paths; returns the amount sent.
  double min_cost_flow(std::size_t source, std::size_t sink, double limit, double eps) {
    const std::size_t n = graph_.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    double sent = 0.0;
    std::vector<double> dist(n);
    std::vector<std::size_t> prev_node(n);
    std::vector<std::size_t> prev_edge(n);
    while (limit - sent > eps) {
      std::fill(dist.begin(), dist.end(), inf);
      dist[source] = 0.0;
      for (std::size_t round = 0; round + 1 < n; ++round) {
        bool changed = false;
        for (std::size_t u = 0; u < n; ++u) {
          if (dist[u] == inf) continue;
          for (std::size_t e = 0; e < graph_[u].size(); ++e) {
            const Edge& edge = graph_[u][e];
            if (edge.capacity <= eps) continue;
            const double candidate = dist[u] + edge.cost;
            if (candidate < dist[edge.to] - 1e-15) {
              dist[edge.to] = candidate;
              prev_node[edge.to] = u;
              prev_edge[edge.to] = e;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (dist[sink] == inf) break;
      double push = limit - sent;
      for (std::size_t v = sink; v != source; v = prev_node[v]) {
        push = std::min(push, graph_[prev_node[v]][prev_edge[v]].capacity);
      }
      for (std::size_t v = sink; v != source; v = prev_node[v]) {
        Edge& edge = graph_[prev_node[v]][prev_edge[v]];
        edge.capacity -= push;
        graph_[v][edge.rev].capacity += push;
      }
      sent += push;
    }
    return sent;
  }

 private:
  std::vector<std::vector<Edge>> graph_;
};

}  // namespace

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost) {
  const std::size_t rows = supply.size();
  const std::size_t cols = demand.size();
  if (cost.size() != rows * cols) throw PreconditionError("cost matrix size does not match the marginals");
  double total_supply = 0.0;
  double total_demand = 0.0;
  for (double s : supply) {
    if (!(s >= 0.0)) throw PreconditionError("supplies must be non-negative");
    total_supply += s;
  }
  for (double d : demand) {
    if (!(d >= 0.0)) throw PreconditionError("demands must be non-negative");
    total_demand += d;
  }
  const double scale = std::max({1.0, total_supply, total_demand});
  if (std::abs(total_supply - total_demand) > 1e-9 * scale) {
    throw PreconditionError("transport marginals are unbalanced");
  }

  // Nodes: 0 = source, 1..rows = supplies, rows+1..rows+cols = demands, last = sink.
  const std::size_t source = 0;
  const std::size_t sink = rows + cols + 1;
  ResidualGraph graph(rows + cols + 2);
  for (std::size_t i = 0; i < rows; ++i) graph.add_edge(source, 1 + i, supply[i], 0.0);
  std::vector<std::size_t> lane(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      lane[i * cols + j] = graph.add_edge(1 + i, 1 + rows + j, std::numeric_limits<double>::infinity(), cost[i * cols + j]);
    }
  }
  for (std::size_t j = 0; j < cols; ++j) graph.add_edge(1 + rows + j, sink, demand[j], 0.0);

  const double eps = 1e-14 * scale;
  graph.min_cost_flow(source, sink, std::min(total_supply, total_demand), eps);

  TransportPlan plan;
  plan.flow.assign(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const Edge& e = graph.edge(1 + i, lane[i * cols + j]);
      // Lanes have infinite capacity, so the shipped amount is read from the
      // reverse edge.
      const double flow = graph.edge(1 + rows + j, e.rev).capacity;
      plan.flow[i * cols + j] = flow;
      plan.cost += flow * cost[i * cols + j];
    }
  }
  return plan;
}

}  // namespace redsense::transport
