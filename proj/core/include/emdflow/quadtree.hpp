#ifndef EMDFLOW_QUADTREE_HPP
#define EMDFLOW_QUADTREE_HPP

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "emdflow/instance.hpp"

namespace emdflow {

/// Random shift of the top cell. `x` is the sampled point; `origin` is
/// x - delta per axis, the min corner of the level-0 cell, which has side
/// 2 * delta and contains all instance points.
struct GridShift {
  std::vector<double> x;
  std::vector<double> origin;
};

struct CellId {
  int level = 0;
  std::vector<int64_t> coords;  // floor((p - origin) / side(level)) per axis
  bool operator==(const CellId&) const = default;
};

/// A net point is the center of one subcell of a retained cell. `subcell`
/// holds the per-axis index in {0, ..., 1/eps0 - 1}.
struct NetPointId {
  int level = 0;
  int cell_index = 0;  // index into the per-level retained-cell list
  std::vector<int32_t> subcell;
  bool operator==(const NetPointId&) const = default;
};

/// The randomly shifted hierarchical grid. Levels run 0..L; the level-0
/// cell is the single shifted box of side 2*delta; each next level halves
/// the side and keeps only cells containing instance points; level L is the
/// first level at which every retained cell holds exactly one point.
///
/// Net-point positions are derived from ids on demand; nothing per net
/// point is stored.
class Quadtree {
 public:
  struct Cell {
    std::vector<int64_t> coords;
    int parent = -1;               // index into the previous level
    std::vector<int> children;     // indices into the next level
    std::vector<int> points;       // instance point indices inside
  };

  /// Largest eps0 = 1/(2k) with eps0 <= eps / (3 d (L + 1)). This makes the
  /// expected stretch factor 1 + 3 d eps0 L at most 1 + eps.
  static double choose_eps0(double eps, int levels, int dim);

  /// Deterministic for a fixed seed. eps0 must be the reciprocal of an even
  /// integer. The instance must be nonempty.
  static Quadtree build(const Instance& inst, double eps0, uint64_t seed);

  /// Same construction with an explicit shift (x per axis in [0, delta]).
  static Quadtree build_with_shift(const Instance& inst, double eps0,
                                   std::vector<double> x);

  int dim() const { return dim_; }
  int max_level() const { return static_cast<int>(levels_.size()) - 1; }
  double eps0() const { return eps0_; }
  int subcells_per_axis() const { return inv_eps0_; }  // 1/eps0, even
  int64_t net_points_per_cell() const { return npc_; }
  double delta() const { return delta_; }
  const GridShift& shift() const { return shift_; }

  /// Side of a level-l cell: 2^(1-l) * delta.
  double cell_side(int level) const;
  /// Side of a level-l subcell: eps0 * cell_side(level).
  double subcell_side(int level) const { return eps0_ * cell_side(level); }

  int cell_count(int level) const {
    return static_cast<int>(levels_[level].cells.size());
  }
  const Cell& cell(int level, int index) const {
    return levels_[level].cells[index];
  }
  /// Index of the retained cell with these coords, or -1.
  int find_cell(int level, std::span<const int64_t> coords) const;

  /// Retained cell containing instance point `p` at `level` (stored path).
  int cell_index_of_point(int p, int level) const {
    return point_paths_[level][p];
  }

  /// Grid cell containing an arbitrary position; half-open boxes [a, b).
  /// Throws if the position is outside the level-0 cell.
  CellId cell_of(std::span<const double> pos, int level) const;

  /// Nearest level-`level` net point to `pos`: the center of the subcell
  /// containing it. Requires `pos` to lie in some retained cell at that
  /// level; returns false if it does not.
  bool net_point_of(std::span<const double> pos, int level,
                    NetPointId& out) const;

  /// Center position of a net point.
  std::vector<double> net_point_position(const NetPointId& id) const;
  void net_point_position(const NetPointId& id, double* out) const;

  double cell_min(int level, int cell_index, int axis) const;
  /// Position of grid line k of the level-`level` grid along one axis.
  double grid_line(int level, int64_t k, int axis) const;

  /// Sum over levels of retained-cell counts.
  int total_cells() const;

 private:
  struct Level {
    std::vector<Cell> cells;
    std::unordered_multimap<uint64_t, int> lookup;  // coord hash -> cell index
  };
  static uint64_t hash_coords(std::span<const int64_t> coords);

  int dim_ = 0;
  double eps0_ = 0.5;
  int inv_eps0_ = 2;
  int64_t npc_ = 0;
  double delta_ = 1.0;
  GridShift shift_;
  std::vector<Level> levels_;
  // point_paths_[level][point] = retained-cell index at that level
  std::vector<std::vector<int>> point_paths_;
};

}  // namespace emdflow

#endif
