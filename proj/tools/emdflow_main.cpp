// emdflow: (1+eps)-approximate Earth Mover's Distance and transportation
// maps for weighted point sets, via a randomly shifted grid hierarchy, a
// sparse flow network, a sketch-preconditioned multiplicative-weights
// solver, and a cancellation-based rounding of the flow to a map.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "emdflow/pipeline.hpp"

namespace {

void print_value(const char* label, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  if (label)
    std::printf("%s %s\n", label, buf);
  else
    std::printf("%s\n", buf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Approximate Earth Mover's Distance for weighted point sets.\n"
      "Reads an instance (dimension line, then one point per line:\n"
      "coordinates followed by an integer supply) and prints the cost of an\n"
      "approximately optimal transportation map."};

  emdflow::RunConfig config;
  std::string input_path;
  std::string map_path;
  bool estimate_only = false;
  long long seed = 1;
  int net_cap = 0;

  app.add_option("input", input_path,
                 "Instance file (reads standard input when omitted)");
  app.add_option("--epsilon", config.epsilon, "Approximation parameter in (0, 1]")
      ->capture_default_str();
  app.add_option("--seed", seed, "Base random seed")->capture_default_str();
  app.add_option("--trials", config.trials,
                 "Independent runs; the cheapest result wins")
      ->capture_default_str();
  app.add_flag("--estimate-only", estimate_only,
               "Report the flow cost without rounding to a map");
  app.add_option("--map", map_path, "Write the transportation map to this file");
  app.add_flag("--oracle", config.oracle,
               "Also run the exact solver (small instances) and print the ratio");
  app.add_flag("--stats", config.stats, "Dump graph statistics to stderr");
  app.add_flag("-v,--verbose", config.verbosity, "Verbose diagnostics");
  app.add_option("--eps0", config.eps0_override,
                 "Expert override for the subcell resolution (reciprocal of an "
                 "even integer)");
  app.add_option("--net-cap", net_cap,
                 "Resource guard: max net points per cell (default 16, or 64 "
                 "in one dimension)");
  app.add_option("--mwu-rounds", config.budget.max_rounds_per_call,
                 "Round cap per feasibility call")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  config.seed = static_cast<uint64_t>(seed);
  config.max_net_per_cell = net_cap;
  config.mode = estimate_only ? emdflow::RunMode::kEstimateOnly
                              : emdflow::RunMode::kFullMap;

  try {
    emdflow::Instance inst;
    if (input_path.empty()) {
      inst = emdflow::Instance::load(std::cin);
    } else {
      std::ifstream in(input_path);
      if (!in) {
        std::cerr << "error: cannot open " << input_path << "\n";
        return 1;
      }
      inst = emdflow::Instance::load(in);
    }

    emdflow::RunResult result = emdflow::run_pipeline(inst, config);

    for (const std::string& note : result.notes) std::cerr << note << "\n";
    if (config.verbosity > 0) {
      std::cerr << "levels " << result.levels << ", eps0 " << result.eps0_used
                << ", stages " << result.report.stages << ", mwu rounds "
                << result.report.mwu_rounds << "\n";
      for (size_t i = 0; i < result.trial_costs.size(); ++i)
        std::cerr << "trial " << i << " cost " << result.trial_costs[i]
                  << "\n";
    }
    if (config.stats) std::cerr << result.stats_text;

    print_value(nullptr, result.cost);
    if (config.oracle) {
      print_value("exact", result.exact_cost);
      print_value("ratio", result.ratio);
    }
    if (!map_path.empty() && !estimate_only) {
      std::ofstream out(map_path);
      if (!out) {
        std::cerr << "error: cannot write " << map_path << "\n";
        return 1;
      }
      emdflow::write_map(out, inst, result.map);
    }
    return 0;
  } catch (const emdflow::SupplyImbalanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const emdflow::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const emdflow::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
