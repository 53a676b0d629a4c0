#include "emdflow/quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace emdflow {

namespace {

constexpr int kHardLevelCap = 62;  // int64 cell coords stay in range

bool inv_is_even_integer(double eps0, int& inv_out) {
  if (!(eps0 > 0.0) || eps0 > 0.5) return false;
  double inv = 1.0 / eps0;
  double rounded = std::round(inv);
  if (std::abs(inv - rounded) > 1e-9 * inv) return false;
  long long k = static_cast<long long>(rounded);
  if (k % 2 != 0 || k > (1 << 28)) return false;
  inv_out = static_cast<int>(k);
  return true;
}

}  // namespace

double Quadtree::choose_eps0(double eps, int levels, int dim) {
  if (!(eps > 0.0) || eps > 1.0)
    throw ValidationError("eps must be in (0, 1]");
  if (levels < 0 || dim < 1)
    throw ValidationError("bad choose_eps0 arguments");
  // Largest 1/(2k) <= eps / (3 d (L+1)); the 1e-9 guard absorbs float dust
  // when the ratio lands on an exact integer.
  double bound = eps / (3.0 * dim * (levels + 1));
  long long k = static_cast<long long>(std::ceil(1.0 / (2.0 * bound) - 1e-9));
  k = std::max<long long>(k, 1);
  return 1.0 / (2.0 * static_cast<double>(k));
}

uint64_t Quadtree::hash_coords(std::span<const int64_t> coords) {
  uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (int64_t c : coords) {
    uint64_t x = static_cast<uint64_t>(c) + 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    h ^= (x ^ (x >> 31)) + (h << 6) + (h >> 2);
  }
  return h;
}

Quadtree Quadtree::build(const Instance& inst, double eps0, uint64_t seed) {
  const int d = inst.dim();
  const double delta = inst.delta() > 0.0 ? inst.delta() : 1.0;
  std::mt19937_64 rng(seed);
  std::vector<double> x(d);
  for (int a = 0; a < d; ++a) {
    // x in (0, delta]: keeps every coordinate of [0, delta]^d strictly
    // inside the half-open level-0 box.
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x[a] = delta * (1.0 - u);
  }
  return build_with_shift(inst, eps0, std::move(x));
}

Quadtree Quadtree::build_with_shift(const Instance& inst, double eps0,
                                    std::vector<double> x) {
  if (inst.empty()) throw ValidationError("cannot build quadtree: no points");
  Quadtree q;
  q.dim_ = inst.dim();
  if (!inv_is_even_integer(eps0, q.inv_eps0_))
    throw ValidationError("eps0 must be the reciprocal of an even integer");
  q.eps0_ = 1.0 / q.inv_eps0_;
  q.delta_ = inst.delta() > 0.0 ? inst.delta() : 1.0;
  if (static_cast<int>(x.size()) != q.dim_)
    throw ValidationError("shift dimension mismatch");

  const int d = q.dim_;
  const int n = inst.size();
  q.npc_ = 1;
  for (int a = 0; a < d; ++a) {
    q.npc_ *= q.inv_eps0_;
    if (q.npc_ > (int64_t{1} << 28))
      throw ValidationError("eps0 too small: net points per cell overflow");
  }

  q.shift_.x = x;
  q.shift_.origin.resize(d);
  for (int a = 0; a < d; ++a) q.shift_.origin[a] = x[a] - q.delta_;

  // Level 0: the single shifted cell holding every point.
  {
    Level lvl;
    Cell c0;
    c0.coords.assign(d, 0);
    c0.points.resize(n);
    for (int i = 0; i < n; ++i) c0.points[i] = i;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        double rel = inst.point(i)[a] - q.shift_.origin[a];
        if (!(rel >= 0.0) || !(rel < 2.0 * q.delta_))
          throw ValidationError("point outside the shifted top cell");
      }
    lvl.lookup.emplace(hash_coords(c0.coords), 0);
    lvl.cells.push_back(std::move(c0));
    q.levels_.push_back(std::move(lvl));
    q.point_paths_.push_back(std::vector<int>(n, 0));
  }

  const int cap =
      std::min(kHardLevelCap,
               static_cast<int>(std::ceil(std::log2(
                   2.0 * std::sqrt(static_cast<double>(d)) * q.delta_))) +
                   64);

  auto all_singletons = [&](const Level& lvl) {
    for (const Cell& c : lvl.cells)
      if (c.points.size() > 1) return false;
    return true;
  };

  while (!all_singletons(q.levels_.back())) {
    const int level = static_cast<int>(q.levels_.size());
    if (level > cap)
      throw ValidationError(
          "quadtree exceeded its level cap; points too close or coincident");
    Level next;
    std::vector<int> path(n, -1);
    Level& prev = q.levels_.back();
    for (size_t ci = 0; ci < prev.cells.size(); ++ci) {
      Cell& parent = prev.cells[ci];
      // Bucket points by child octant, visiting octants in linear order so
      // construction order is deterministic.
      const int octants = 1 << d;
      std::vector<std::vector<int>> bucket(octants);
      for (int p : parent.points) {
        int code = 0;
        for (int a = 0; a < d; ++a) {
          double mid = q.grid_line(level, 2 * parent.coords[a] + 1, a);
          if (inst.point(p)[a] >= mid) code |= (1 << a);
        }
        bucket[code].push_back(p);
      }
      for (int code = 0; code < octants; ++code) {
        if (bucket[code].empty()) continue;
        Cell child;
        child.coords.resize(d);
        for (int a = 0; a < d; ++a)
          child.coords[a] = 2 * parent.coords[a] + ((code >> a) & 1);
        child.parent = static_cast<int>(ci);
        int idx = static_cast<int>(next.cells.size());
        for (int p : bucket[code]) path[p] = idx;
        child.points = std::move(bucket[code]);
        next.lookup.emplace(hash_coords(child.coords), idx);
        parent.children.push_back(idx);
        next.cells.push_back(std::move(child));
      }
    }
    q.levels_.push_back(std::move(next));
    q.point_paths_.push_back(std::move(path));
  }
  return q;
}

double Quadtree::cell_side(int level) const {
  return std::ldexp(delta_, 1 - level);
}

double Quadtree::grid_line(int level, int64_t k, int axis) const {
  return shift_.origin[axis] + static_cast<double>(k) * cell_side(level);
}

int Quadtree::find_cell(int level, std::span<const int64_t> coords) const {
  if (level < 0 || level > max_level()) return -1;
  auto [lo, hi] = levels_[level].lookup.equal_range(hash_coords(coords));
  for (auto it = lo; it != hi; ++it) {
    const Cell& c = levels_[level].cells[it->second];
    if (std::equal(c.coords.begin(), c.coords.end(), coords.begin(),
                   coords.end()))
      return it->second;
  }
  return -1;
}

double Quadtree::cell_min(int level, int cell_index, int axis) const {
  return grid_line(level, levels_[level].cells[cell_index].coords[axis], axis);
}

CellId Quadtree::cell_of(std::span<const double> pos, int level) const {
  if (level < 0 || level > max_level())
    throw ValidationError("cell_of: level out of range");
  CellId id;
  id.level = level;
  id.coords.resize(dim_);
  for (int a = 0; a < dim_; ++a) {
    double rel = pos[a] - shift_.origin[a];
    if (!(rel >= 0.0) || !(rel < 2.0 * delta_))
      throw ValidationError("cell_of: position outside the top cell");
    // Midpoint descent: the same grid-line arithmetic the builder uses, so
    // point classification agrees with the stored paths at every depth.
    int64_t c = 0;
    for (int l = 1; l <= level; ++l) {
      double mid = grid_line(l, 2 * c + 1, a);
      c *= 2;
      if (pos[a] >= mid) c += 1;
    }
    id.coords[a] = c;
  }
  return id;
}

bool Quadtree::net_point_of(std::span<const double> pos, int level,
                            NetPointId& out) const {
  CellId cid = cell_of(pos, level);
  int idx = find_cell(level, cid.coords);
  if (idx < 0) return false;
  out.level = level;
  out.cell_index = idx;
  out.subcell.resize(dim_);
  const double pitch = subcell_side(level);
  for (int a = 0; a < dim_; ++a) {
    double off = pos[a] - cell_min(level, idx, a);
    auto s = static_cast<int64_t>(std::floor(off / pitch));
    s = std::clamp<int64_t>(s, 0, inv_eps0_ - 1);
    out.subcell[a] = static_cast<int32_t>(s);
  }
  return true;
}

std::vector<double> Quadtree::net_point_position(const NetPointId& id) const {
  std::vector<double> pos(dim_);
  net_point_position(id, pos.data());
  return pos;
}

void Quadtree::net_point_position(const NetPointId& id, double* out) const {
  const double pitch = subcell_side(id.level);
  for (int a = 0; a < dim_; ++a)
    out[a] = cell_min(id.level, id.cell_index, a) +
             (static_cast<double>(id.subcell[a]) + 0.5) * pitch;
}

int Quadtree::total_cells() const {
  int total = 0;
  for (const Level& l : levels_) total += static_cast<int>(l.cells.size());
  return total;
}

}  // namespace emdflow
