#include "emdflow/instance.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace emdflow {

Instance Instance::from_points(int dim, std::vector<double> coords,
                               std::vector<long long> supplies) {
  if (dim < 1) throw ValidationError("dimension must be at least 1");
  const size_t n = supplies.size();
  if (coords.size() != n * static_cast<size_t>(dim))
    throw ValidationError("coordinate array does not match dimension");
  for (double c : coords)
    if (!std::isfinite(c)) throw ValidationError("non-finite coordinate");

  // Merge duplicates by exact coordinate equality, keeping first-occurrence
  // order, then drop points whose merged supply is zero.
  std::map<std::vector<double>, size_t> seen;
  std::vector<std::vector<double>> merged_pts;
  std::vector<long long> merged_supply;
  std::vector<size_t> order;
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> key(coords.begin() + i * dim,
                            coords.begin() + (i + 1) * dim);
    auto [it, inserted] = seen.emplace(std::move(key), merged_pts.size());
    if (inserted) {
      merged_pts.emplace_back(coords.begin() + i * dim,
                              coords.begin() + (i + 1) * dim);
      merged_supply.push_back(supplies[i]);
    } else {
      merged_supply[it->second] += supplies[i];
    }
  }

  long long total = 0;
  for (long long s : merged_supply) total += s;
  if (total != 0)
    throw SupplyImbalanceError("supplies sum to " + std::to_string(total) +
                               ", expected 0");

  Instance inst;
  inst.dim_ = dim;
  for (size_t i = 0; i < merged_pts.size(); ++i) {
    if (merged_supply[i] == 0) continue;
    inst.coords_.insert(inst.coords_.end(), merged_pts[i].begin(),
                        merged_pts[i].end());
    inst.supplies_.push_back(merged_supply[i]);
  }

  const int m = inst.size();
  if (m > 0) {
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < dim; ++a) {
        lo[a] = std::min(lo[a], inst.coords_[i * dim + a]);
        hi[a] = std::max(hi[a], inst.coords_[i * dim + a]);
      }
    double delta = 0.0;
    for (int a = 0; a < dim; ++a) delta = std::max(delta, hi[a] - lo[a]);
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < dim; ++a) inst.coords_[i * dim + a] -= lo[a];
    inst.delta_ = delta;
  }

  for (int i = 0; i < m; ++i) {
    if (inst.supplies_[i] > 0) {
      inst.total_supply_ += inst.supplies_[i];
      inst.positives_.push_back(i);
    } else {
      inst.negatives_.push_back(i);
    }
  }
  return inst;
}

Instance Instance::load(std::istream& in) {
  std::string line;
  int dim = -1;
  std::vector<double> coords;
  std::vector<long long> supplies;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (dim < 0) {
      if (!(ls >> dim) || dim < 1)
        throw ParseError("line " + std::to_string(lineno) +
                         ": expected positive dimension");
      std::string rest;
      if (ls >> rest)
        throw ParseError("line " + std::to_string(lineno) +
                         ": trailing tokens after dimension");
      continue;
    }
    for (int a = 0; a < dim; ++a) {
      double c;
      if (!(ls >> c))
        throw ParseError("line " + std::to_string(lineno) +
                         ": expected " + std::to_string(dim) + " coordinates");
      coords.push_back(c);
    }
    long long s;
    if (!(ls >> s))
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected integer supply");
    std::string rest;
    if (ls >> rest)
      throw ParseError("line " + std::to_string(lineno) + ": trailing tokens");
    supplies.push_back(s);
  }
  if (dim < 0) throw ParseError("missing dimension line");
  return from_points(dim, std::move(coords), std::move(supplies));
}

double Instance::tau() const {
  return 1e-9 * static_cast<double>(std::max<long long>(1, total_supply_));
}

double Instance::distance(int i, int j) const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) {
    double d = coords_[i * dim_ + a] - coords_[j * dim_ + a];
    s += d * d;
  }
  return std::sqrt(s);
}

double map_cost(const Instance& inst, const TransportMap& map) {
  double cost = 0.0;
  for (const MapEntry& e : map.entries) {
    if (e.source < 0 || e.source >= static_cast<int>(inst.positives().size()) ||
        e.sink < 0 || e.sink >= static_cast<int>(inst.negatives().size()))
      throw ValidationError("map entry index out of range");
    cost += e.amount *
            inst.distance(inst.positives()[e.source], inst.negatives()[e.sink]);
  }
  return cost;
}

FeasibilityReport map_feasible(const Instance& inst, const TransportMap& map,
                               double tol) {
  FeasibilityReport report;
  const double bound =
      tol * static_cast<double>(std::max<long long>(1, inst.total_supply()));
  std::vector<double> out(inst.positives().size(), 0.0);
  std::vector<double> in(inst.negatives().size(), 0.0);
  for (const MapEntry& e : map.entries) {
    if (e.source < 0 || e.source >= static_cast<int>(out.size()) || e.sink < 0 ||
        e.sink >= static_cast<int>(in.size()))
      throw ValidationError("map entry index out of range");
    if (e.amount < 0) {
      report.feasible = false;
      report.violations.push_back(
          {inst.positives()[e.source], e.amount, true});
    }
    out[e.source] += e.amount;
    in[e.sink] += e.amount;
  }
  for (size_t i = 0; i < out.size(); ++i) {
    double want = static_cast<double>(inst.supply(inst.positives()[i]));
    if (std::abs(out[i] - want) > bound) {
      report.feasible = false;
      report.violations.push_back({inst.positives()[i], out[i] - want, false});
    }
  }
  for (size_t j = 0; j < in.size(); ++j) {
    double want = static_cast<double>(-inst.supply(inst.negatives()[j]));
    if (std::abs(in[j] - want) > bound) {
      report.feasible = false;
      report.violations.push_back({inst.negatives()[j], in[j] - want, false});
    }
  }
  return report;
}

void write_map(std::ostream& out, const Instance& inst,
               const TransportMap& map) {
  const double tau = inst.tau();
  char buf[64];
  for (const MapEntry& e : map.entries) {
    if (e.amount < tau) continue;
    std::snprintf(buf, sizeof buf, "%d %d %.12g\n", e.source, e.sink, e.amount);
    out << buf;
  }
}

TransportMap read_map(std::istream& in) {
  TransportMap map;
  std::string line;
  while (std::getline(in, line)) {
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    MapEntry e;
    if (!(ls >> e.source >> e.sink >> e.amount))
      throw ParseError("malformed map line: " + line);
    map.entries.push_back(e);
  }
  return map;
}

}  // namespace emdflow
