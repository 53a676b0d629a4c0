#include "emdflow/preconditioner.hpp"

#include <algorithm>
#include <cmath>

#include "emdflow/errors.hpp"

namespace emdflow {

namespace {

struct Membership {
  int row;
  int vertex;
};

}  // namespace

void Sketch::apply(const SupplyVector& bt, std::vector<double>& out) const {
  const int r = rows();
  out.assign(r, 0.0);
  for (int row = 0; row < r; ++row) {
    double s = 0.0;
    for (int i = offset_[row]; i < offset_[row + 1]; ++i) s += bt[member_[i]];
    out[row] = coeff_[row] * s;
  }
}

std::vector<double> Sketch::apply(const SupplyVector& bt) const {
  std::vector<double> out;
  apply(bt, out);
  return out;
}

void Sketch::apply_transpose(const std::vector<double>& z,
                             SupplyVector& out) const {
  const int r = rows();
  out.assign(r, 0.0);
  for (int row = 0; row < r; ++row) {
    const double cz = coeff_[row] * z[row];
    if (cz == 0.0) continue;
    for (int i = offset_[row]; i < offset_[row + 1]; ++i)
      out[member_[i]] += cz;
  }
}

std::vector<double> Sketch::apply_transpose(const std::vector<double>& z) const {
  SupplyVector out;
  apply_transpose(z, out);
  return out;
}

double Sketch::sketch_norm(const SupplyVector& bt) const {
  const int r = rows();
  double norm = 0.0;
  for (int row = 0; row < r; ++row) {
    double s = 0.0;
    for (int i = offset_[row]; i < offset_[row + 1]; ++i) s += bt[member_[i]];
    norm += std::abs(coeff_[row] * s);
  }
  return norm;
}

Sketch build_sketch(const Quadtree& q, const Graph& g) {
  const int d = q.dim();
  const int n = g.point_count();
  const int L = q.max_level();
  const int inv = q.subcells_per_axis();
  const int V = g.vertex_count();

  Sketch s;
  s.gamma_ = 4.0 * std::sqrt(static_cast<double>(d)) * (L + 1) / q.eps0();
  s.coeff_.assign(V, 0.0);

  // Row coefficients: distance to the deepest net point for point rows,
  // eps0 * side(l) / (4 (L+1)) for a net row at level l.
  for (int p = 0; p < n; ++p)
    s.coeff_[p] = g.edge_cost(g.point_link_edge(p));
  for (int l = 0; l <= L; ++l) {
    const double c = q.eps0() * q.cell_side(l) / (4.0 * (L + 1));
    for (int v = g.net_level_begin(l); v < g.net_level_end(l); ++v)
      s.coeff_[v] = c;
  }

  std::vector<Membership> ms;
  ms.reserve(static_cast<size_t>(V) * (L + 2));

  // Point memberships: own row plus the subcell row at every level of the
  // stored cell path.
  for (int p = 0; p < n; ++p) {
    ms.push_back({p, p});
    for (int l = 0; l <= L; ++l) {
      const int ci = q.cell_index_of_point(p, l);
      const double pitch = q.subcell_side(l);
      int64_t lin = 0, mult = 1;
      for (int a = 0; a < d; ++a) {
        double off = g.position(p)[a] - q.cell_min(l, ci, a);
        auto sub = static_cast<int64_t>(std::floor(off / pitch));
        sub = std::clamp<int64_t>(sub, 0, inv - 1);
        lin += mult * sub;
        mult *= inv;
      }
      ms.push_back({g.net_vertex(l, ci, lin), p});
    }
  }

  // Net-point memberships: the own row plus every ancestor row. A vertex
  // joins rows only at its own level and above, mirroring the router, which
  // can move a net point's mass only through its own level's sweep. The
  // ancestor subcell index halves exactly in integers.
  std::vector<int32_t> sub(d);
  for (int l = 0; l <= L; ++l) {
    for (int ci = 0; ci < q.cell_count(l); ++ci) {
      const auto npc = q.net_points_per_cell();
      for (int64_t lin = 0; lin < npc; ++lin) {
        const int vid = g.net_vertex(l, ci, lin);
        {
          int64_t rest = lin;
          for (int a = 0; a < d; ++a) {
            sub[a] = static_cast<int32_t>(rest % inv);
            rest /= inv;
          }
        }
        ms.push_back({vid, vid});  // own row
        std::vector<int32_t> cur(sub.begin(), sub.end());
        int cell = ci;
        for (int lev = l; lev >= 1; --lev) {
          const auto& c = q.cell(lev, cell);
          const auto& pc = q.cell(lev - 1, c.parent);
          int64_t plin = 0, mult = 1;
          for (int a = 0; a < d; ++a) {
            int bit = static_cast<int>(c.coords[a] - 2 * pc.coords[a]);
            cur[a] = static_cast<int32_t>((bit * inv + cur[a]) >> 1);
            plin += mult * cur[a];
            mult *= inv;
          }
          cell = c.parent;
          ms.push_back({g.net_vertex(lev - 1, cell, plin), vid});
        }
      }
    }
  }

  std::sort(ms.begin(), ms.end(), [](const Membership& a, const Membership& b) {
    return a.row != b.row ? a.row < b.row : a.vertex < b.vertex;
  });

  s.offset_.assign(V + 1, 0);
  for (const Membership& m : ms) s.offset_[m.row + 1]++;
  for (int v = 0; v < V; ++v) s.offset_[v + 1] += s.offset_[v];
  s.member_.resize(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) s.member_[i] = ms[i].vertex;

  s.voffset_.assign(V + 1, 0);
  for (const Membership& m : ms) s.voffset_[m.vertex + 1]++;
  for (int v = 0; v < V; ++v) s.voffset_[v + 1] += s.voffset_[v];
  s.vrow_.resize(ms.size());
  {
    std::vector<int> cursor(s.voffset_.begin(), s.voffset_.end() - 1);
    for (const Membership& m : ms) s.vrow_[cursor[m.vertex]++] = m.row;
  }
  return s;
}

FlowVector route_flow(const Sketch& s, const Quadtree& q, const Graph& g,
                      const SupplyVector& bt,
                      std::vector<RouteTraceEntry>* trace) {
  const int n = g.point_count();
  const int L = q.max_level();
  const double total_norm = l1_norm(bt);
  {
    double total = 0.0;
    for (double x : bt) total += x;
    if (std::abs(total) > 1e-9 * std::max(1.0, total_norm))
      throw ValidationError("route_flow: supplies do not sum to zero");
  }
  const double ztol = 1e-13 * total_norm;

  FlowVector f(g.edge_count(), 0.0);
  std::vector<double> surplus(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) surplus[v] = -bt[v];

  // Deepest level: point supplies ride their single link edge. The stored
  // orientation is point -> net (points have the lower ids).
  for (int p = 0; p < n; ++p) {
    if (bt[p] == 0.0) continue;
    f[g.point_link_edge(p)] += bt[p];
    surplus[p] += bt[p];
    surplus[g.point_link_target(p)] -= bt[p];
  }

  auto transfer = [&](int from, int to, double x) {
    // x units from the negative-surplus vertex to the positive-surplus one.
    int e = g.find_edge(from, to);
    if (e < 0) throw ValidationError("route_flow: missing edge");
    f[e] += g.edge_u(e) == from ? x : -x;
    surplus[from] += x;
    surplus[to] -= x;
  };

  std::vector<std::pair<int, int>> group;  // (parent vertex, vertex)
  std::vector<int> pos, neg;
  for (int level = L; level >= 1; --level) {
    group.clear();
    for (int v = g.net_level_begin(level); v < g.net_level_end(level); ++v)
      if (std::abs(surplus[v]) > ztol) group.emplace_back(g.parent_net(v), v);
    std::sort(group.begin(), group.end());
    size_t i = 0;
    while (i < group.size()) {
      size_t j = i;
      const int parent = group[i].first;
      pos.clear();
      neg.clear();
      while (j < group.size() && group[j].first == parent) {
        int v = group[j].second;
        if (surplus[v] > ztol)
          pos.push_back(v);
        else if (surplus[v] < -ztol)
          neg.push_back(v);
        ++j;
      }
      // Pairwise cancellation inside the subcell, both cursors in vertex-id
      // order, then push what is left to the subcell center.
      size_t a = 0, b = 0;
      while (a < pos.size() && b < neg.size()) {
        double x = std::min(surplus[pos[a]], -surplus[neg[b]]);
        transfer(neg[b], pos[a], x);
        if (surplus[pos[a]] <= ztol) ++a;
        if (-surplus[neg[b]] <= ztol) ++b;
      }
      for (size_t k = i; k < j; ++k) {
        int v = group[k].second;
        double leftover = surplus[v];
        if (std::abs(leftover) <= ztol) continue;
        int e = g.parent_edge(v);
        // Flow parent -> v equal to the leftover surplus zeroes v.
        f[e] += leftover;
        surplus[parent] += leftover;
        surplus[v] -= leftover;
      }
      if (trace) trace->push_back({level, parent, surplus[parent]});
      i = j;
    }
  }

  // Top cell: cancel pairwise until every surplus vanishes.
  pos.clear();
  neg.clear();
  for (int v = g.net_level_begin(0); v < g.net_level_end(0); ++v) {
    if (surplus[v] > ztol)
      pos.push_back(v);
    else if (surplus[v] < -ztol)
      neg.push_back(v);
  }
  {
    size_t a = 0, b = 0;
    while (a < pos.size() && b < neg.size()) {
      double x = std::min(surplus[pos[a]], -surplus[neg[b]]);
      transfer(neg[b], pos[a], x);
      if (surplus[pos[a]] <= ztol) ++a;
      if (-surplus[neg[b]] <= ztol) ++b;
    }
  }

  const double resid_tol = 1e-9 * std::max(1.0, total_norm);
  for (int v = 0; v < g.vertex_count(); ++v)
    if (std::abs(surplus[v]) > resid_tol)
      throw ValidationError("route_flow: nonzero residual surplus");

#ifndef EMDFLOW_NO_CHECKS
  if (flow_cost(g, f) > s.gamma() * s.sketch_norm(bt) * (1.0 + 1e-9) + 1e-12)
    throw ValidationError("route_flow: cost exceeded the sketch bound");
#endif
  return f;
}

}  // namespace emdflow
