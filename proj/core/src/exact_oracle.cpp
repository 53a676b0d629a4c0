#include "emdflow/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "emdflow/errors.hpp"

namespace emdflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Successive shortest augmenting paths with potentials, paired-arc residual
// representation. Costs are reals; optimality is certified at the end by a
// reduced-cost scan.
class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : head_(n, -1), node_count_(n) {}

  int add_arc(int u, int v, double cap, double cost) {
    arcs_.push_back({v, head_[u], cap, cost, 0.0});
    head_[u] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, head_[v], 0.0, -cost, 0.0});
    head_[v] = static_cast<int>(arcs_.size()) - 1;
    return static_cast<int>(arcs_.size()) - 2;
  }

  double arc_flow(int id) const { return arcs_[id].flow; }

  // Sends as much of `amount` as fits from s to t; returns the amount sent.
  double run(int s, int t, double amount) {
    double sent = 0.0;
    potential_.assign(node_count_, 0.0);
    while (sent < amount) {
      if (!dijkstra(s, t)) break;
      double push = amount - sent;
      for (int v = t; v != s; v = arcs_[pre_arc_[v] ^ 1].to)
        push = std::min(push, arcs_[pre_arc_[v]].cap - arcs_[pre_arc_[v]].flow);
      for (int v = t; v != s; v = arcs_[pre_arc_[v] ^ 1].to) {
        arcs_[pre_arc_[v]].flow += push;
        arcs_[pre_arc_[v] ^ 1].flow -= push;
      }
      for (int v = 0; v < node_count_; ++v)
        potential_[v] += std::min(dist_[v], dist_[t]);
      sent += push;
    }
    return sent;
  }

  double total_cost() const {
    double c = 0.0;
    for (size_t i = 0; i < arcs_.size(); i += 2)
      c += arcs_[i].flow * arcs_[i].cost;
    return c;
  }

  // All residual arcs must have nonnegative reduced cost at the end.
  bool optimal(double tol) const {
    for (int u = 0; u < node_count_; ++u)
      for (int id = head_[u]; id >= 0; id = arcs_[id].next)
        if (arcs_[id].cap - arcs_[id].flow > tol &&
            arcs_[id].cost + potential_[u] - potential_[arcs_[id].to] < -tol)
          return false;
    return true;
  }

 private:
  struct Arc {
    int to;
    int next;
    double cap;
    double cost;
    double flow;
  };

  bool dijkstra(int s, int t) {
    dist_.assign(node_count_, kInf);
    pre_arc_.assign(node_count_, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist_[s] = 0.0;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > dist_[u]) continue;
      for (int id = head_[u]; id >= 0; id = arcs_[id].next) {
        const Arc& a = arcs_[id];
        if (a.cap - a.flow <= 1e-15) continue;
        double nd = du + a.cost + potential_[u] - potential_[a.to];
        if (nd < dist_[a.to] - 1e-15) {
          dist_[a.to] = nd;
          pre_arc_[a.to] = id;
          pq.emplace(nd, a.to);
        }
      }
    }
    return dist_[t] < kInf;
  }

  std::vector<int> head_;
  std::vector<Arc> arcs_;
  std::vector<double> potential_, dist_;
  std::vector<int> pre_arc_;
  int node_count_;
};

}  // namespace

OracleResult exact_emd(const Instance& inst) {
  if (inst.size() > 512)
    throw SizeGuardError("exact_emd: instance too large (n > 512)");
  if (inst.total_supply() > 1000000)
    throw SizeGuardError("exact_emd: total supply too large (U > 1e6)");

  OracleResult result;
  if (inst.empty() || inst.total_supply() == 0) return result;

  const auto& pos = inst.positives();
  const auto& neg = inst.negatives();
  const int np = static_cast<int>(pos.size());
  const int nn = static_cast<int>(neg.size());
  // Nodes: sources, sinks, super source S, super sink T.
  const int S = np + nn, T = S + 1;
  MinCostFlow mcf(np + nn + 2);
  std::vector<std::vector<int>> pair_arc(np, std::vector<int>(nn));
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nn; ++j)
      pair_arc[i][j] =
          mcf.add_arc(i, np + j, kInf, inst.distance(pos[i], neg[j]));
  for (int i = 0; i < np; ++i)
    mcf.add_arc(S, i, static_cast<double>(inst.supply(pos[i])), 0.0);
  for (int j = 0; j < nn; ++j)
    mcf.add_arc(np + j, T, static_cast<double>(-inst.supply(neg[j])), 0.0);

  const double want = static_cast<double>(inst.total_supply());
  double sent = mcf.run(S, T, want);
  if (std::abs(sent - want) > 1e-9 * std::max(1.0, want))
    throw ValidationError("exact_emd: could not route all supply");
  double scale = std::max(1.0, inst.delta());
  if (!mcf.optimal(1e-9 * scale))
    throw ValidationError("exact_emd: optimality certificate failed");

  result.cost = mcf.total_cost();
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nn; ++j) {
      double f = mcf.arc_flow(pair_arc[i][j]);
      if (f > 0.0) result.map.entries.push_back({i, j, f});
    }
  return result;
}

double exact_mincost_on_graph(const Graph& g, const SupplyVector& bt) {
  const int V = g.vertex_count();
  if (V > 5000)
    throw SizeGuardError("exact_mincost_on_graph: graph too large (|V| > 5000)");
  double total = 0.0, norm = 0.0;
  for (double x : bt) {
    total += x;
    norm += std::abs(x);
  }
  if (std::abs(total) > 1e-9 * std::max(1.0, norm))
    throw ValidationError("exact_mincost_on_graph: supplies not zero-sum");
  if (norm == 0.0) return 0.0;

  const int S = V, T = V + 1;
  MinCostFlow mcf(V + 2);
  for (int e = 0; e < g.edge_count(); ++e) {
    // Uncapacitated and undirected in cost: one unbounded arc per direction.
    mcf.add_arc(g.edge_u(e), g.edge_v(e), kInf, g.edge_cost(e));
    mcf.add_arc(g.edge_v(e), g.edge_u(e), kInf, g.edge_cost(e));
  }
  double want = 0.0;
  for (int v = 0; v < V; ++v) {
    if (bt[v] > 0.0) {
      mcf.add_arc(S, v, bt[v], 0.0);
      want += bt[v];
    } else if (bt[v] < 0.0) {
      mcf.add_arc(v, T, -bt[v], 0.0);
    }
  }
  double sent = mcf.run(S, T, want);
  if (std::abs(sent - want) > 1e-9 * std::max(1.0, want))
    throw ValidationError("exact_mincost_on_graph: could not route all supply");
  return mcf.total_cost();
}

}  // namespace emdflow
