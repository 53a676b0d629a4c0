#ifndef EMDFLOW_INSTANCE_HPP
#define EMDFLOW_INSTANCE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "emdflow/errors.hpp"

namespace emdflow {

/// A transportation instance: distinct points in R^d with integer supplies
/// summing to zero, translated so the bounding box has min corner at the
/// origin. `delta()` is the largest side of the bounding box.
class Instance {
 public:
  Instance() = default;

  /// Build from raw data: merges coordinate-identical points by summing
  /// their supplies, drops points whose merged supply is zero, validates
  /// the zero-sum constraint, and normalizes coordinates to [0, delta].
  static Instance from_points(int dim, std::vector<double> coords,
                              std::vector<long long> supplies);

  /// Parse the text format: '#' comment lines, a line with the dimension,
  /// then one line per point with d coordinates and a signed integer supply.
  static Instance load(std::istream& in);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(supplies_.size()); }
  bool empty() const { return supplies_.empty(); }

  std::span<const double> point(int i) const {
    return {coords_.data() + static_cast<size_t>(i) * dim_,
            static_cast<size_t>(dim_)};
  }
  const std::vector<double>& coords() const { return coords_; }
  long long supply(int i) const { return supplies_[i]; }
  const std::vector<long long>& supplies() const { return supplies_; }

  double delta() const { return delta_; }
  /// U: total positive supply.
  long long total_supply() const { return total_supply_; }

  /// Indices of points with positive / negative supply, in input order
  /// after merging. Transportation map entries index into these lists.
  const std::vector<int>& positives() const { return positives_; }
  const std::vector<int>& negatives() const { return negatives_; }

  /// Numeric floor for map amounts: 1e-9 * max(1, U).
  double tau() const;

  double distance(int i, int j) const;

 private:
  int dim_ = 0;
  std::vector<double> coords_;  // size() * dim_, row-major
  std::vector<long long> supplies_;
  double delta_ = 0.0;
  long long total_supply_ = 0;
  std::vector<int> positives_;
  std::vector<int> negatives_;
};

/// One map entry: `source` indexes Instance::positives(), `sink` indexes
/// Instance::negatives(), `amount` is nonnegative mass moved between them.
struct MapEntry {
  int source = 0;
  int sink = 0;
  double amount = 0.0;
};

struct TransportMap {
  std::vector<MapEntry> entries;
};

/// Total cost: sum of amount * Euclidean distance over entries.
double map_cost(const Instance& inst, const TransportMap& map);

struct FeasibilityViolation {
  int point = 0;        // index into the instance
  double imbalance = 0; // signed routed-minus-required mass
  bool negative_amount = false;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<FeasibilityViolation> violations;
};

/// Checks that every source ships exactly its supply and every sink receives
/// exactly its demand, within tol * max(1, U) per point, with all amounts
/// nonnegative.
FeasibilityReport map_feasible(const Instance& inst, const TransportMap& map,
                               double tol);

/// Emission format: one line "i j amount" per entry, skipping amounts
/// below Instance::tau().
void write_map(std::ostream& out, const Instance& inst, const TransportMap& map);

TransportMap read_map(std::istream& in);

}  // namespace emdflow

#endif
