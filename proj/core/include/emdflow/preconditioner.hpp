#ifndef EMDFLOW_PRECONDITIONER_HPP
#define EMDFLOW_PRECONDITIONER_HPP

#include <vector>

#include "emdflow/flow_system.hpp"

namespace emdflow {

/// The sketch matrix with one row per vertex. A point row holds the
/// distance from the point to its deepest-level net point. The row of a
/// net point u at level l sums, with coefficient eps0 * side(l) / (4(L+1)),
/// the vertices whose position falls in u's subcell (restricted to vertices
/// inside retained level-l cells). The l1 norm of the sketched supply
/// vector under-estimates the min-cost-flow value and over-estimates it by
/// at most the factor gamma().
class Sketch {
 public:
  int rows() const { return static_cast<int>(coeff_.size()); }
  double coefficient(int row) const { return coeff_[row]; }
  std::span<const int> members(int row) const {
    return {member_.data() + offset_[row],
            static_cast<size_t>(offset_[row + 1] - offset_[row])};
  }
  /// Rows containing a vertex, paired with their coefficients.
  std::span<const int> rows_of(int vertex) const {
    return {vrow_.data() + voffset_[vertex],
            static_cast<size_t>(voffset_[vertex + 1] - voffset_[vertex])};
  }
  size_t nonzeros() const { return member_.size(); }

  /// gamma = 4 sqrt(d) (L+1) / eps0, the sandwich factor.
  double gamma() const { return gamma_; }

  void apply(const SupplyVector& bt, std::vector<double>& out) const;
  std::vector<double> apply(const SupplyVector& bt) const;
  void apply_transpose(const std::vector<double>& z, SupplyVector& out) const;
  std::vector<double> apply_transpose(const std::vector<double>& z) const;

  /// l1 norm of the sketched vector.
  double sketch_norm(const SupplyVector& bt) const;

 private:
  friend Sketch build_sketch(const Quadtree& q, const Graph& g);
  std::vector<double> coeff_;
  std::vector<int> offset_;
  std::vector<int> member_;
  std::vector<int> voffset_;
  std::vector<int> vrow_;
  double gamma_ = 0.0;
};

Sketch build_sketch(const Quadtree& q, const Graph& g);

/// Per-subcell surplus snapshots for tests: after a subcell with center
/// `center` is processed, its surplus equals minus the sum of the supplies
/// injected below it.
struct RouteTraceEntry {
  int level = 0;   // level of the swept net points (children)
  int center = 0;  // parent net vertex
  double surplus = 0.0;
};

/// The bottom-up greedy router: a feasible flow for any zero-sum supply
/// vector with cost at most gamma * sketch_norm(bt). Point supplies enter
/// through their point-link edges; net-point supplies enter at their own
/// level. Each sweep cancels opposite surpluses inside a subcell pairwise,
/// then pushes the leftovers to the subcell center one level up.
FlowVector route_flow(const Sketch& s, const Quadtree& q, const Graph& g,
                      const SupplyVector& bt,
                      std::vector<RouteTraceEntry>* trace = nullptr);

}  // namespace emdflow

#endif
