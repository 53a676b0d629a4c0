#include "emdflow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emdflow {

int default_net_cap(int dim) { return dim == 1 ? 64 : 16; }

double guard_eps0(int dim, int cap) {
  // Largest even integer 2k with (2k)^dim <= cap.
  int best = 2;
  for (int m = 2; ; m += 2) {
    double count = std::pow(static_cast<double>(m), dim);
    if (count > static_cast<double>(cap)) break;
    best = m;
  }
  return 1.0 / best;
}

namespace {

struct TrialOutcome {
  double cost = 0.0;
  TransportMap map;
  SolveReport report;
  double eps0 = 0.0;
  int levels = 0;
  std::string stats;
};

TrialOutcome run_trial(const Instance& inst, const RunConfig& config,
                       uint64_t seed, std::vector<std::string>& notes) {
  TrialOutcome out;
  // The tree's cell structure does not depend on eps0, so a coarse probe
  // determines the depth that the eps0 rule needs.
  Quadtree probe = Quadtree::build(inst, 0.5, seed);
  const int levels = probe.max_level();
  double eps0;
  if (config.eps0_override > 0.0) {
    eps0 = config.eps0_override;
  } else {
    eps0 = Quadtree::choose_eps0(config.epsilon, levels, inst.dim());
    const int cap = config.max_net_per_cell > 0 ? config.max_net_per_cell
                                                : default_net_cap(inst.dim());
    const double floor = guard_eps0(inst.dim(), cap);
    if (eps0 < floor) {
      std::ostringstream os;
      os << "resource guard: subcell resolution clamped from " << eps0
         << " to " << floor
         << "; the approximation guarantee needs --net-cap "
         << std::llround(std::pow(1.0 / eps0, inst.dim())) << " or more";
      notes.push_back(os.str());
      eps0 = floor;
    }
  }
  Quadtree q = eps0 == 0.5 ? std::move(probe)
                           : Quadtree::build(inst, eps0, seed);
  Graph g = build_graph(q, inst);
  Sketch sk = build_sketch(q, g);
  out.report = solve_flow(inst, q, g, sk, config.epsilon, config.budget);
  out.eps0 = eps0;
  out.levels = levels;
  if (config.stats) out.stats = g.stats_text();
  if (config.mode == RunMode::kFullMap) {
    out.map = extract_map(g, out.report.flow, q, inst, inst.tau());
    out.cost = map_cost(inst, out.map);
  } else {
    out.cost = out.report.cost;
  }
  return out;
}

}  // namespace

RunResult run_pipeline(const Instance& inst, const RunConfig& config) {
  if (!(config.epsilon > 0.0) || config.epsilon > 1.0)
    throw ValidationError("epsilon must be in (0, 1]");
  if (config.trials < 1) throw ValidationError("trials must be >= 1");

  RunResult result;
  if (inst.empty() || inst.total_supply() == 0) {
    result.trial_costs.assign(config.trials, 0.0);
    if (config.oracle) {
      result.exact_cost = 0.0;
      result.ratio = 1.0;
    }
    return result;
  }

  bool have_best = false;
  TrialOutcome best;
  for (int trial = 0; trial < config.trials; ++trial) {
    TrialOutcome cur =
        run_trial(inst, config, config.seed + static_cast<uint64_t>(trial),
                  result.notes);
    result.trial_costs.push_back(cur.cost);
    if (!have_best || cur.cost < best.cost) {
      best = std::move(cur);
      result.best_trial = trial;
      have_best = true;
    }
  }
  result.cost = best.cost;
  result.map = std::move(best.map);
  result.report = std::move(best.report);
  result.eps0_used = best.eps0;
  result.levels = best.levels;
  result.stats_text = std::move(best.stats);

  if (config.oracle) {
    OracleResult oracle = exact_emd(inst);
    result.exact_cost = oracle.cost;
    result.ratio = oracle.cost > 0.0 ? result.cost / oracle.cost : 1.0;
  }
  return result;
}

}  // namespace emdflow
