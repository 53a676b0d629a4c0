#ifndef EMDFLOW_EXACT_ORACLE_HPP
#define EMDFLOW_EXACT_ORACLE_HPP

#include "emdflow/flow_system.hpp"
#include "emdflow/instance.hpp"

namespace emdflow {

struct OracleResult {
  double cost = 0.0;
  TransportMap map;
};

/// Exact optimum of the transportation LP on the complete bipartite pair
/// graph, by successive shortest augmenting paths with node potentials.
/// Guard rails: at most 512 points and total supply 1e6.
OracleResult exact_emd(const Instance& inst);

/// Exact min-cost flow value on the sparse graph for an arbitrary zero-sum
/// supply vector (supplies allowed on net points). Guard: at most 5000
/// vertices.
double exact_mincost_on_graph(const Graph& g, const SupplyVector& bt);

}  // namespace emdflow

#endif
