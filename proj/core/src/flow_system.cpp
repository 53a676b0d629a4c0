#include "emdflow/flow_system.hpp"

#include <cmath>

namespace emdflow {

SupplyVector supply_vector(const Instance& inst, const Graph& g) {
  SupplyVector b(g.vertex_count(), 0.0);
  for (int p = 0; p < inst.size(); ++p)
    b[p] = static_cast<double>(inst.supply(p));
  return b;
}

void apply_incidence(const Graph& g, const FlowVector& f, SupplyVector& out) {
  out.assign(g.vertex_count(), 0.0);
  const int m = g.edge_count();
  for (int e = 0; e < m; ++e) {
    out[g.edge_u(e)] += f[e];
    out[g.edge_v(e)] -= f[e];
  }
}

SupplyVector apply_incidence(const Graph& g, const FlowVector& f) {
  SupplyVector out;
  apply_incidence(g, f, out);
  return out;
}

void apply_incidence_transpose(const Graph& g, const SupplyVector& y,
                               FlowVector& out) {
  const int m = g.edge_count();
  out.resize(m);
  for (int e = 0; e < m; ++e) out[e] = y[g.edge_u(e)] - y[g.edge_v(e)];
}

FlowVector apply_incidence_transpose(const Graph& g, const SupplyVector& y) {
  FlowVector out;
  apply_incidence_transpose(g, y, out);
  return out;
}

double flow_cost(const Graph& g, const FlowVector& f) {
  double c = 0.0;
  const int m = g.edge_count();
  for (int e = 0; e < m; ++e) c += g.edge_cost(e) * std::abs(f[e]);
  return c;
}

double l1_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace emdflow
