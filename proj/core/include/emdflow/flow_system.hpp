#ifndef EMDFLOW_FLOW_SYSTEM_HPP
#define EMDFLOW_FLOW_SYSTEM_HPP

#include <vector>

#include "emdflow/graph.hpp"
#include "emdflow/instance.hpp"

namespace emdflow {

// Edge-indexed, signed relative to the stored orientation.
using FlowVector = std::vector<double>;
// Vertex-indexed.
using SupplyVector = std::vector<double>;

/// b: the instance supply on point vertices, zero on net points.
SupplyVector supply_vector(const Instance& inst, const Graph& g);

/// Divergence of f at every vertex (net outflow). One pass over edges; the
/// incidence matrix is never materialized.
void apply_incidence(const Graph& g, const FlowVector& f, SupplyVector& out);
SupplyVector apply_incidence(const Graph& g, const FlowVector& f);

/// Transpose: per oriented edge (u, v), y_u - y_v.
void apply_incidence_transpose(const Graph& g, const SupplyVector& y,
                               FlowVector& out);
FlowVector apply_incidence_transpose(const Graph& g, const SupplyVector& y);

/// Cost norm: sum of edge cost times |flow|.
double flow_cost(const Graph& g, const FlowVector& f);

double l1_norm(const std::vector<double>& v);

}  // namespace emdflow

#endif
