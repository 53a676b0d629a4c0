#ifndef EMDFLOW_MWU_SOLVER_HPP
#define EMDFLOW_MWU_SOLVER_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "emdflow/preconditioner.hpp"

namespace emdflow {

/// The normalized constraint operator M: edge vector g |-> sketch(A (g/c)) / s,
/// where s scales the largest column to unit l1 norm. Solving M g = target/t
/// over the l1 ball of radius 1 is the per-call feasibility problem.
class PreconditionedSystem {
 public:
  PreconditionedSystem(const Graph& g, const Sketch& s);

  int rows() const { return graph_->vertex_count(); }
  int cols() const { return graph_->edge_count(); }
  double scale() const { return scale_; }
  double kappa_bound() const { return sketch_->gamma(); }
  const Graph& graph() const { return *graph_; }
  const Sketch& sketch() const { return *sketch_; }

  /// out = M g. Scratch-free for callers; reuses internal buffers, so a
  /// system instance serves one solve at a time.
  void apply(const std::vector<double>& g, std::vector<double>& out) const;
  /// out = M^T y.
  void apply_transpose(const std::vector<double>& y,
                       std::vector<double>& out) const;

  /// b_hat = sketch(bt) / s, the row-space target for supplies bt.
  std::vector<double> target_from(const SupplyVector& bt) const;

  /// Scale a normalized edge solution back to a flow: f = C^{-1} g.
  FlowVector flow_from(const std::vector<double>& g) const;

 private:
  const Graph* graph_;
  const Sketch* sketch_;
  double scale_ = 0.0;
  std::vector<double> inv_cost_;        // 1 / cost(e)
  std::vector<double> inv_cost_scale_;  // 1 / (cost(e) * s)
  mutable std::vector<double> vertex_scratch_;
  mutable std::vector<double> edge_scratch_;
};

PreconditionedSystem normalize(const Graph& g, const Sketch& s);

enum class FeasibilityStatus { kSolution, kCertificate, kBudgetExhausted };

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::kBudgetExhausted;
  std::vector<double> g;            // scaled by t on success
  std::vector<double> certificate;  // averaged sign vector on infeasibility
  long rounds = 0;
  double residual = 0.0;  // last l1 residual in normalized units
};

/// Multiplicative-weights feasibility: find g with |g|_1 <= t and
/// |M g - target|_1 <= eps_abs * t (normalized: solves M g' = target/t over
/// the unit l1 ball to additive accuracy eps_abs).
///
/// Weights live on 2m signed experts, start uniform, and update by
/// exp(-eta * cumulative gradient) with eta = eps_abs/2; the shared max is
/// subtracted before exponentiation. The subgradient each round is the
/// coordinate sign vector of the residual (sign(0) = +1). The running
/// average of those signs doubles as an infeasibility certificate: if
/// avg_y . (target/t) < -max_col |M^T avg_y| no feasible g exists, and the
/// call returns early with the certificate.
namespace detail {

/// exp(x) for x <= 0, accurate to about 1e-7 relative: range reduction to
/// [-ln2/2, ln2/2] plus a degree-6 polynomial, with the power of two pasted
/// into the exponent bits. The weight updates call this millions of times
/// and do not need the last few bits.
inline double exp_neg(double x) {
  if (x < -700.0) return 0.0;
  // round(x / ln 2) via the magic-constant trick: after adding 3 * 2^51 the
  // low 32 bits hold the rounded integer in two's complement.
  const double kd = x * 1.4426950408889634 + 6755399441055744.0;
  const auto k =
      static_cast<int32_t>(static_cast<uint32_t>(std::bit_cast<uint64_t>(kd)));
  const double r = x - static_cast<double>(k) * 0.693147180559945286;
  const double p =
      1.0 + r * (1.0 + r * (0.5 + r * (1.0 / 6 + r * (1.0 / 24 +
                  r * (1.0 / 120 + r * (1.0 / 720))))));
  // Paste 2^k into the exponent bits; the -700 cutoff keeps it normal.
  const auto bits = std::bit_cast<uint64_t>(p);
  return std::bit_cast<double>(bits + (static_cast<uint64_t>(static_cast<int64_t>(k)) << 52));
}

}  // namespace detail

template <class System>
FeasibilityResult mwu_feasibility(const System& sys,
                                  const std::vector<double>& target, double t,
                                  double eps_abs, long max_rounds) {
  const int m = sys.cols();
  const int r = sys.rows();
  FeasibilityResult result;
  if (t <= 0.0 || m == 0) return result;

  std::vector<double> h(r);
  for (int i = 0; i < r; ++i) h[i] = target[i] / t;
  std::vector<double> gacc(m, 0.0), g(m), row(r), grad(m), ysum(r, 0.0);
  std::vector<double> y(r);
  double ysum_dot_h = 0.0;
  const double eta = eps_abs / 2.0;
  double running_max = 0.0;  // max |gacc|, maintained across rounds
  double best_res = std::numeric_limits<double>::infinity();
  long last_improve = 0;
  const long patience = std::max<long>(500, max_rounds / 8);

  for (long round = 0; round < max_rounds; ++round) {
    const double shift = eta * running_max;
    double z = 0.0;
    for (int e = 0; e < m; ++e) {
      const double xe = eta * gacc[e];
      const double wp = detail::exp_neg(-xe - shift);
      const double wm = detail::exp_neg(xe - shift);
      g[e] = wp - wm;
      z += wp + wm;
    }
    for (int e = 0; e < m; ++e) g[e] /= z;

    sys.apply(g, row);
    double res = 0.0;
    for (int i = 0; i < r; ++i) {
      row[i] -= h[i];
      res += std::abs(row[i]);
    }
    result.rounds = round + 1;
    result.residual = res;
    if (res <= eps_abs) {
      result.status = FeasibilityStatus::kSolution;
      result.g.resize(m);
      for (int e = 0; e < m; ++e) result.g[e] = t * g[e];
      return result;
    }
    // Plateau exit: the residual of a feasible system keeps shrinking; a
    // stuck one is either infeasible without a clean certificate or out of
    // reach at this budget. Either way the caller escalates.
    if (res < best_res * (1.0 - 1e-3)) {
      best_res = res;
      last_improve = round;
    } else if (round - last_improve > patience) {
      return result;
    }

    for (int i = 0; i < r; ++i) {
      y[i] = row[i] >= 0.0 ? 1.0 : -1.0;
      ysum[i] += y[i];
      ysum_dot_h += y[i] * h[i];
    }
    sys.apply_transpose(y, grad);
    double gmax = 0.0;
    for (int e = 0; e < m; ++e) {
      gacc[e] += grad[e];
      gmax = std::max(gmax, std::abs(gacc[e]));
    }
    running_max = gmax;
    // Infeasibility certificate from the running average; checking every
    // round lets hopeless guesses exit long before the regret budget.
    const double rounds_d = static_cast<double>(round + 1);
    const double lhs = ysum_dot_h / rounds_d;
    const double rhs = -gmax / rounds_d;
    if (lhs < rhs - 1e-12 * (std::abs(lhs) + std::abs(rhs))) {
      result.status = FeasibilityStatus::kCertificate;
      result.certificate.resize(r);
      for (int i = 0; i < r; ++i) result.certificate[i] = ysum[i] / rounds_d;
      return result;
    }
  }
  return result;
}

struct SolverBudget {
  // Hard cap on rounds per feasibility call; the regret formula
  // ceil(8 * eps^-2 * ln(2m)) applies below the cap.
  long max_rounds_per_call = 40000;
};

struct ValueSearchResult {
  double t = 0.0;
  std::vector<double> g;  // edge vector in cost units
  long rounds = 0;
  int calls = 0;
  std::optional<std::vector<double>> certificate;
};

/// Guess-and-check over t = |sketch(bt)|_1 * (1+value_acc)^k for
/// k = 0..ceil(log_{1+value_acc} gamma): the sandwich pins the optimum to
/// that range. Each guess runs the feasibility call with residual target
/// resid_rel * |b_hat|_1 / t; certificates and exhausted budgets both
/// escalate to the next guess.
ValueSearchResult value_search(const PreconditionedSystem& sys,
                               const std::vector<double>& target,
                               double value_acc, double resid_rel,
                               const SolverBudget& budget);

struct SolveReport {
  FlowVector flow;
  double cost = 0.0;
  long mwu_rounds = 0;
  int stages = 0;
  double residual_sketch_norm = 0.0;  // before the final exact repair
  std::optional<std::vector<double>> certificate;
  std::vector<double> stage_norms;  // sketch norm of each stage residual
};

/// Full solve: an accuracy-eps stage, residual re-solves at accuracy 1/2
/// until the sketched residual drops below (eps/gamma^2) of the original,
/// then one exact greedy-router repair. The result satisfies the supply
/// constraints to machine-level accuracy.
SolveReport solve_flow(const Instance& inst, const Quadtree& q, const Graph& g,
                       const Sketch& s, double eps,
                       const SolverBudget& budget = {});

}  // namespace emdflow

#endif
