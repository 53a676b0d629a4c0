#include "emdflow/graph.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace emdflow {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Per-axis subcell index of a position inside a known cell.
void subcell_in_cell(const Quadtree& q, std::span<const double> pos, int level,
                     int cell_index, int32_t* out) {
  const double pitch = q.subcell_side(level);
  for (int a = 0; a < q.dim(); ++a) {
    double off = pos[a] - q.cell_min(level, cell_index, a);
    auto s = static_cast<int64_t>(std::floor(off / pitch));
    s = std::clamp<int64_t>(s, 0, q.subcells_per_axis() - 1);
    out[a] = static_cast<int32_t>(s);
  }
}

}  // namespace

double Graph::distance(int u, int v) const {
  return std::sqrt(sq_dist(position(u), position(v)));
}

int Graph::find_edge(int u, int v) const {
  if (u == v) return -1;
  // Search from the endpoint with the smaller bucket.
  int du = adj_offset_[u + 1] - adj_offset_[u];
  int dv = adj_offset_[v + 1] - adj_offset_[v];
  int base = du <= dv ? u : v;
  int other = du <= dv ? v : u;
  auto first = adj_vertex_.begin() + adj_offset_[base];
  auto last = adj_vertex_.begin() + adj_offset_[base + 1];
  auto it = std::lower_bound(first, last, other);
  if (it == last || *it != other) return -1;
  return adj_edge_[it - adj_vertex_.begin()];
}

std::span<const int> Graph::neighbors_begin(int v) const {
  return {adj_vertex_.data() + adj_offset_[v],
          static_cast<size_t>(adj_offset_[v + 1] - adj_offset_[v])};
}

std::span<const int> Graph::incident_edges(int v) const {
  return {adj_edge_.data() + adj_offset_[v],
          static_cast<size_t>(adj_offset_[v + 1] - adj_offset_[v])};
}

Graph build_graph(const Quadtree& q, const Instance& inst) {
  Graph g;
  const int d = q.dim();
  const int n = inst.size();
  const int L = q.max_level();
  const int64_t npc = q.net_points_per_cell();
  const int inv = q.subcells_per_axis();

  g.dim_ = d;
  g.n_ = n;
  g.npc_ = npc;

  g.level_base_.resize(L + 2);
  g.level_base_[0] = 0;
  for (int l = 0; l <= L; ++l) {
    g.level_cells_.push_back(q.cell_count(l));
    int64_t count = q.cell_count(l) * npc;
    g.level_base_[l + 1] = g.level_base_[l] + static_cast<int>(count);
  }
  const int net_total = g.level_base_[L + 1];
  g.vcount_ = n + net_total;

  // Positions: points first, then net points in (level, cell, subcell) order.
  g.pos_.resize(static_cast<size_t>(g.vcount_) * d);
  for (int p = 0; p < n; ++p)
    std::copy_n(inst.point(p).data(), d, g.pos_.begin() + static_cast<size_t>(p) * d);
  g.net_level_.resize(net_total);
  for (int l = 0; l <= L; ++l) {
    const double pitch = q.subcell_side(l);
    for (int ci = 0; ci < q.cell_count(l); ++ci) {
      for (int64_t lin = 0; lin < npc; ++lin) {
        int64_t rest = lin;
        int vid = g.net_vertex(l, ci, lin);
        double* out = g.pos_.data() + static_cast<size_t>(vid) * d;
        for (int a = 0; a < d; ++a) {
          int32_t s = static_cast<int32_t>(rest % inv);
          rest /= inv;
          out[a] = q.cell_min(l, ci, a) + (s + 0.5) * pitch;
        }
        g.net_level_[vid - n] = static_cast<int16_t>(l);
      }
    }
  }

  auto add_edge = [&](int u, int v, Graph::EdgeKind kind) {
    assert(u != v);
    if (u > v) std::swap(u, v);
    g.eu_.push_back(u);
    g.ev_.push_back(v);
    g.cost_.push_back(g.distance(u, v));
    g.kind_.push_back(kind);
    g.kind_counts_[kind]++;
    return static_cast<int>(g.cost_.size()) - 1;
  };

  // Kind 1: each point to the net point of its deepest-level subcell.
  g.e1_target_.resize(n);
  g.e1_edge_.resize(n);
  {
    std::vector<int32_t> sub(d);
    for (int p = 0; p < n; ++p) {
      int ci = q.cell_index_of_point(p, L);
      subcell_in_cell(q, inst.point(p), L, ci, sub.data());
      int64_t lin = 0;
      for (int a = d - 1; a >= 0; --a) lin = lin * inv + sub[a];
      int target = g.net_vertex(L, ci, lin);
      g.e1_target_[p] = target;
      g.e1_edge_[p] = add_edge(p, target, Graph::kPointLink);
    }
  }

  // Kind 2: within each retained cell, the full pairwise set over its
  // net points. Materialized eagerly; this is the dominant edge count.
  for (int l = 0; l <= L; ++l) {
    for (int ci = 0; ci < q.cell_count(l); ++ci) {
      int base = g.net_vertex(l, ci, 0);
      for (int i = 0; i < npc; ++i)
        for (int j = i + 1; j < npc; ++j)
          add_edge(base + i, base + j, Graph::kSibling);
    }
  }

  // Kind 3: each net point at level >= 1 to its parent net point. The
  // parent subcell index comes from integer arithmetic, so parent links are
  // exact regardless of float dust.
  g.parent_.assign(net_total, -1);
  g.parent_edge_.assign(net_total, -1);
  for (int l = 1; l <= L; ++l) {
    for (int ci = 0; ci < q.cell_count(l); ++ci) {
      const auto& cell = q.cell(l, ci);
      const auto& pcell = q.cell(l - 1, cell.parent);
      for (int64_t lin = 0; lin < npc; ++lin) {
        int64_t rest = lin, plin = 0, mult = 1;
        for (int a = 0; a < d; ++a) {
          int32_t s = static_cast<int32_t>(rest % inv);
          rest /= inv;
          int bit = static_cast<int>(cell.coords[a] - 2 * pcell.coords[a]);
          int32_t sp = static_cast<int32_t>((bit * inv + s) >> 1);
          plin += mult * sp;
          mult *= inv;
        }
        int child = g.net_vertex(l, ci, lin);
        int parent = g.net_vertex(l - 1, cell.parent, plin);
        g.parent_[child - n] = parent;
        g.parent_edge_[child - n] = add_edge(parent, child, Graph::kParentChild);
      }
    }
  }

  // Adjacency, sorted by neighbor within each bucket.
  const int m = g.edge_count();
  g.adj_offset_.assign(g.vcount_ + 1, 0);
  for (int e = 0; e < m; ++e) {
    g.adj_offset_[g.eu_[e] + 1]++;
    g.adj_offset_[g.ev_[e] + 1]++;
  }
  for (int v = 0; v < g.vcount_; ++v) g.adj_offset_[v + 1] += g.adj_offset_[v];
  g.adj_vertex_.resize(2 * static_cast<size_t>(m));
  g.adj_edge_.resize(2 * static_cast<size_t>(m));
  {
    std::vector<int> cursor(g.adj_offset_.begin(), g.adj_offset_.end() - 1);
    for (int e = 0; e < m; ++e) {
      g.adj_vertex_[cursor[g.eu_[e]]] = g.ev_[e];
      g.adj_edge_[cursor[g.eu_[e]]++] = e;
      g.adj_vertex_[cursor[g.ev_[e]]] = g.eu_[e];
      g.adj_edge_[cursor[g.ev_[e]]++] = e;
    }
    std::vector<std::pair<int, int>> tmp;
    for (int v = 0; v < g.vcount_; ++v) {
      tmp.clear();
      for (int i = g.adj_offset_[v]; i < g.adj_offset_[v + 1]; ++i)
        tmp.emplace_back(g.adj_vertex_[i], g.adj_edge_[i]);
      std::sort(tmp.begin(), tmp.end());
      for (int i = g.adj_offset_[v]; i < g.adj_offset_[v + 1]; ++i) {
        g.adj_vertex_[i] = tmp[i - g.adj_offset_[v]].first;
        g.adj_edge_[i] = tmp[i - g.adj_offset_[v]].second;
      }
    }
  }
  return g;
}

std::string Graph::stats_text() const {
  std::ostringstream os;
  os << "vertices " << vcount_ << " (points " << n_ << ", net "
     << vcount_ - n_ << ")\n";
  os << "edges " << edge_count() << " (point-link " << kind_counts_[1]
     << ", sibling " << kind_counts_[2] << ", parent-child "
     << kind_counts_[3] << ")\n";
  for (size_t l = 0; l < level_cells_.size(); ++l)
    os << "level " << l << ": cells " << level_cells_[l] << ", net points "
       << (level_base_[l + 1] - level_base_[l]) << "\n";
  return os.str();
}

int sep_level(const Quadtree& q, int p1, int p2) {
  const int L = q.max_level();
  for (int l = L; l >= 0; --l)
    if (q.cell_index_of_point(p1, l) == q.cell_index_of_point(p2, l)) return l;
  return 0;  // level 0 always shares the single top cell
}

std::vector<int> canonical_path(const Graph& g, const Quadtree& q, int p1,
                                int p2) {
  const int L = q.max_level();
  const int ls = sep_level(q, p1, p2);
  std::vector<int> edges;
  edges.reserve(2 * (L - ls) + 3);

  // climb from each endpoint to its ancestor net point at the separation
  // level; the parent links are exactly the stored kind-3 edges.
  int up = g.point_link_target(p1);
  edges.push_back(g.point_link_edge(p1));
  for (int l = L; l > ls; --l) {
    edges.push_back(g.parent_edge(up));
    up = g.parent_net(up);
  }
  int vq = g.point_link_target(p2);
  std::vector<int> down;
  down.push_back(g.point_link_edge(p2));
  for (int l = L; l > ls; --l) {
    down.push_back(g.parent_edge(vq));
    vq = g.parent_net(vq);
  }
  int cross = g.find_edge(up, vq);
  assert(cross >= 0 && "sibling crossing edge must exist");
  edges.push_back(cross);
  edges.insert(edges.end(), down.rbegin(), down.rend());
  return edges;
}

double path_cost(const Graph& g, std::span<const int> edges) {
  double c = 0.0;
  for (int e : edges) c += g.edge_cost(e);
  return c;
}

}  // namespace emdflow
