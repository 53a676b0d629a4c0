#ifndef EMDFLOW_GRAPH_HPP
#define EMDFLOW_GRAPH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "emdflow/quadtree.hpp"

namespace emdflow {

/// The flow network over V = P + all net points. Edge set:
///   kind 1: each point to its nearest deepest-level net point,
///   kind 2: net points of the same cell, pairwise,
///   kind 3: each net point to its parent net point one level up.
/// Costs are Euclidean. Each edge is stored once, oriented from the lower
/// vertex id to the higher; flows carry signs relative to that orientation.
class Graph {
 public:
  enum EdgeKind : uint8_t { kPointLink = 1, kSibling = 2, kParentChild = 3 };

  int dim() const { return dim_; }
  int vertex_count() const { return vcount_; }
  int point_count() const { return n_; }
  int edge_count() const { return static_cast<int>(cost_.size()); }

  bool is_point(int v) const { return v < n_; }
  /// Level of a net vertex; -1 for instance points.
  int level_of(int v) const { return is_point(v) ? -1 : net_level_[v - n_]; }

  std::span<const double> position(int v) const {
    return {pos_.data() + static_cast<size_t>(v) * dim_,
            static_cast<size_t>(dim_)};
  }

  int net_vertex(int level, int cell_index, int64_t subcell_linear) const {
    return n_ + level_base_[level] +
           static_cast<int>(cell_index * npc_ + subcell_linear);
  }
  int net_level_begin(int level) const { return n_ + level_base_[level]; }
  int net_level_end(int level) const {
    return n_ + level_base_[level + 1];
  }

  int edge_u(int e) const { return eu_[e]; }
  int edge_v(int e) const { return ev_[e]; }
  double edge_cost(int e) const { return cost_[e]; }
  EdgeKind edge_kind(int e) const { return kind_[e]; }

  /// Edge id joining u and v, or -1.
  int find_edge(int u, int v) const;

  std::span<const int> neighbors_begin(int v) const;
  std::span<const int> incident_edges(int v) const;

  /// Nearest deepest-level net point of instance point p and its edge.
  int point_link_target(int p) const { return e1_target_[p]; }
  int point_link_edge(int p) const { return e1_edge_[p]; }

  /// Parent net vertex (one level up) and the connecting edge; -1 for
  /// level-0 net vertices and for points.
  int parent_net(int v) const { return is_point(v) ? -1 : parent_[v - n_]; }
  int parent_edge(int v) const {
    return is_point(v) ? -1 : parent_edge_[v - n_];
  }

  int edge_count_of_kind(EdgeKind k) const { return kind_counts_[k]; }

  std::string stats_text() const;

  double distance(int u, int v) const;

 private:
  friend Graph build_graph(const Quadtree& q, const Instance& inst);

  int dim_ = 0;
  int n_ = 0;
  int vcount_ = 0;
  int64_t npc_ = 0;
  std::vector<int> level_base_;      // per level, offset of its net vertices
  std::vector<double> pos_;          // vcount * dim
  std::vector<int16_t> net_level_;   // per net vertex
  std::vector<int> eu_, ev_;
  std::vector<double> cost_;
  std::vector<EdgeKind> kind_;
  std::vector<int> e1_target_, e1_edge_;
  std::vector<int> parent_, parent_edge_;  // per net vertex
  std::vector<int> adj_offset_;
  std::vector<int> adj_vertex_, adj_edge_;  // sorted by neighbor per bucket
  int kind_counts_[4] = {0, 0, 0, 0};
  std::vector<int> level_cells_;  // retained cells per level (for stats)
};

Graph build_graph(const Quadtree& q, const Instance& inst);

/// Largest level at which two distinct instance points share a cell.
int sep_level(const Quadtree& q, int p1, int p2);

/// Edge ids of the up-across-down path between two instance points:
/// point -> deepest net point -> parents up to the separation level ->
/// one sibling crossing -> back down -> point.
std::vector<int> canonical_path(const Graph& g, const Quadtree& q, int p1,
                                int p2);

double path_cost(const Graph& g, std::span<const int> edges);

}  // namespace emdflow

#endif
