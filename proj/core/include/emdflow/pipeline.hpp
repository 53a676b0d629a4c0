#ifndef EMDFLOW_PIPELINE_HPP
#define EMDFLOW_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "emdflow/exact_oracle.hpp"
#include "emdflow/map_rounding.hpp"
#include "emdflow/mwu_solver.hpp"

namespace emdflow {

enum class RunMode { kFullMap, kEstimateOnly };

struct RunConfig {
  double epsilon = 0.25;
  uint64_t seed = 1;
  int trials = 1;
  RunMode mode = RunMode::kFullMap;
  bool oracle = false;
  bool stats = false;
  int verbosity = 0;
  /// Expert override for the subcell resolution; 0 derives it from epsilon
  /// and the tree depth.
  double eps0_override = 0.0;
  /// Resource guard: coarsest allowed net-point count per cell; 0 picks the
  /// per-dimension default. The derived eps0 never drops below the guard.
  int max_net_per_cell = 0;
  SolverBudget budget;
};

struct RunResult {
  double cost = 0.0;
  TransportMap map;          // empty in estimate-only mode
  std::vector<double> trial_costs;
  int best_trial = 0;
  double eps0_used = 0.0;
  int levels = 0;            // tree depth L of the best trial
  double exact_cost = -1.0;  // set when the oracle runs
  double ratio = -1.0;
  std::string stats_text;
  std::vector<std::string> notes;
  SolveReport report;        // best trial's solver report
};

/// Largest eps0 of the form 1/(2k) whose per-cell net-point count
/// (2k)^dim stays at or below cap.
double guard_eps0(int dim, int cap);
int default_net_cap(int dim);

/// Runs `trials` independent pipelines (seeds seed, seed+1, ...) and keeps
/// the cheapest result. Deterministic for fixed config and instance.
RunResult run_pipeline(const Instance& inst, const RunConfig& config);

}  // namespace emdflow

#endif
