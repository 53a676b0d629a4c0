#ifndef EMDFLOW_MAP_ROUNDING_HPP
#define EMDFLOW_MAP_ROUNDING_HPP

#include <unordered_map>
#include <vector>

#include "emdflow/flow_system.hpp"

namespace emdflow {

/// Flow between arbitrary vertex pairs, antisymmetric, with entries at or
/// below `tau` treated as zero. Rounding moves support off the graph edges,
/// so adjacency is a hash map per vertex.
class SparseFlow {
 public:
  SparseFlow(const Graph& g, double tau)
      : g_(&g), tau_(tau), out_(g.vertex_count()) {}

  static SparseFlow from_flow_vector(const Graph& g, const FlowVector& f,
                                     double tau);

  double tau() const { return tau_; }
  const Graph& graph() const { return *g_; }

  double get(int u, int v) const;
  /// Adds x to the u -> v amount (and -x to v -> u), erasing near-zero
  /// entries.
  void add(int u, int v, double x);

  const std::unordered_map<int, double>& outgoing(int u) const {
    return out_[u];
  }
  int degree(int u) const { return static_cast<int>(out_[u].size()); }

  double divergence(int u) const;
  double cost() const;
  long support_size() const;

 private:
  const Graph* g_;
  double tau_;
  std::vector<std::unordered_map<int, double>> out_;  // f[u][v], both sides
};

bool check_nfp(const SparseFlow& f, int u);

struct CancelStats {
  long iterations = 0;
  long degree_before = 0;
};

/// Reroutes through-traffic at u directly between its neighbors until all
/// remaining flow at u points one way. Each step moves the smaller of one
/// incoming and one outgoing amount; cursor order is ascending vertex id on
/// both sides.
CancelStats cancel_vertex(SparseFlow& f, int u);

struct ExtractStats {
  std::vector<long> level_work;  // summed degrees at call time, per level
};

/// Rounds a feasible flow into a transportation map: runs the cancellation
/// on every net point, deepest level first, then greedily repairs any
/// residual per-point dust. Never increases cost.
TransportMap extract_map(SparseFlow& f, const Quadtree& q,
                         const Instance& inst, double tau,
                         ExtractStats* stats = nullptr);

/// Convenience: full rounding straight from the solver's edge flows.
TransportMap extract_map(const Graph& g, const FlowVector& f,
                         const Quadtree& q, const Instance& inst, double tau,
                         ExtractStats* stats = nullptr);

}  // namespace emdflow

#endif
