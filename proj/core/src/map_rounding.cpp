#include "emdflow/map_rounding.hpp"

#include <algorithm>
#include <cmath>

#include "emdflow/errors.hpp"

namespace emdflow {

SparseFlow SparseFlow::from_flow_vector(const Graph& g, const FlowVector& f,
                                        double tau) {
  SparseFlow sf(g, tau);
  for (int e = 0; e < g.edge_count(); ++e)
    if (std::abs(f[e]) > tau) sf.add(g.edge_u(e), g.edge_v(e), f[e]);
  return sf;
}

double SparseFlow::get(int u, int v) const {
  auto it = out_[u].find(v);
  return it == out_[u].end() ? 0.0 : it->second;
}

void SparseFlow::add(int u, int v, double x) {
  if (u == v || x == 0.0) return;
  double nu = (out_[u][v] += x);
  if (std::abs(nu) <= tau_) {
    out_[u].erase(v);
    out_[v].erase(u);
  } else {
    out_[v][u] = -nu;
  }
}

double SparseFlow::divergence(int u) const {
  double s = 0.0;
  for (auto& [v, x] : out_[u]) s += x;
  return s;
}

double SparseFlow::cost() const {
  double c = 0.0;
  for (int u = 0; u < static_cast<int>(out_.size()); ++u)
    for (auto& [v, x] : out_[u])
      if (u < v) c += std::abs(x) * g_->distance(u, v);
  return c;
}

long SparseFlow::support_size() const {
  long s = 0;
  for (const auto& m : out_) s += static_cast<long>(m.size());
  return s / 2;
}

bool check_nfp(const SparseFlow& f, int u) {
  bool has_pos = false, has_neg = false;
  for (auto& [v, x] : f.outgoing(u)) {
    if (x > f.tau()) has_pos = true;
    if (x < -f.tau()) has_neg = true;
  }
  return !(has_pos && has_neg);
}

CancelStats cancel_vertex(SparseFlow& f, int u) {
  CancelStats stats;
  stats.degree_before = f.degree(u);
  std::vector<int> ins, outs;
  ins.reserve(f.degree(u));
  outs.reserve(f.degree(u));
  for (auto& [v, x] : f.outgoing(u)) {
    if (x < -f.tau())
      ins.push_back(v);  // flow arrives from v
    else if (x > f.tau())
      outs.push_back(v);
  }
  std::sort(ins.begin(), ins.end());
  std::sort(outs.begin(), outs.end());
  size_t i = 0, j = 0;
  while (i < ins.size() && j < outs.size()) {
    const int v = ins[i], w = outs[j];
    const double in_amt = -f.get(u, v);
    const double out_amt = f.get(u, w);
    const double x = std::min(in_amt, out_amt);
    f.add(u, v, x);
    f.add(u, w, -x);
    f.add(v, w, x);
    ++stats.iterations;
    if (in_amt - x <= f.tau()) ++i;
    if (out_amt - x <= f.tau()) ++j;
  }
  return stats;
}

TransportMap extract_map(SparseFlow& f, const Quadtree& q,
                         const Instance& inst, double tau,
                         ExtractStats* stats) {
  const Graph& g = f.graph();
  const int L = q.max_level();
  if (stats) stats->level_work.assign(L + 1, 0);
  for (int level = L; level >= 0; --level) {
    for (int v = g.net_level_begin(level); v < g.net_level_end(level); ++v) {
      CancelStats cs = cancel_vertex(f, v);
      if (stats) stats->level_work[level] += cs.degree_before;
    }
  }

  const int n = inst.size();
  const double guard =
      1e-6 * static_cast<double>(std::max<long long>(1, inst.total_supply()));

  // After the sweep the flow should sit on point pairs only; anything left
  // at a net point is numeric dust from the tau thresholding.
  for (int v = n; v < g.vertex_count(); ++v)
    for (auto& [w, x] : f.outgoing(v))
      if (std::abs(x) > guard)
        throw ValidationError("extract_map: flow left on a net point");

  std::vector<int> pos_index(n, -1), neg_index(n, -1);
  for (size_t i = 0; i < inst.positives().size(); ++i)
    pos_index[inst.positives()[i]] = static_cast<int>(i);
  for (size_t j = 0; j < inst.negatives().size(); ++j)
    neg_index[inst.negatives()[j]] = static_cast<int>(j);

  TransportMap map;
  std::vector<double> routed_out(inst.positives().size(), 0.0);
  std::vector<double> routed_in(inst.negatives().size(), 0.0);
  for (int pi = 0; pi < static_cast<int>(inst.positives().size()); ++pi) {
    int p = inst.positives()[pi];
    std::vector<std::pair<int, double>> entries(f.outgoing(p).begin(),
                                                f.outgoing(p).end());
    std::sort(entries.begin(), entries.end());
    for (auto& [v, x] : entries) {
      if (x <= tau) continue;  // dust and (tiny) wrong-sign entries
      if (v >= n || neg_index[v] < 0) {
        if (x > guard)
          throw ValidationError("extract_map: positive point ships to a non-sink");
        continue;
      }
      map.entries.push_back({pi, neg_index[v], x});
      routed_out[pi] += x;
      routed_in[neg_index[v]] += x;
    }
  }

  // Greedy repair of per-point dust: match unmet supply against unmet
  // demand in index order.
  std::vector<std::pair<int, double>> needs_out, needs_in;
  for (size_t i = 0; i < routed_out.size(); ++i) {
    double need =
        static_cast<double>(inst.supply(inst.positives()[i])) - routed_out[i];
    if (need > guard)
      throw ValidationError("extract_map: unmet supply exceeds tolerance");
    if (need > 0.0) needs_out.emplace_back(static_cast<int>(i), need);
  }
  for (size_t j = 0; j < routed_in.size(); ++j) {
    double need =
        static_cast<double>(-inst.supply(inst.negatives()[j])) - routed_in[j];
    if (need > guard)
      throw ValidationError("extract_map: unmet demand exceeds tolerance");
    if (need > 0.0) needs_in.emplace_back(static_cast<int>(j), need);
  }
  size_t a = 0, b = 0;
  while (a < needs_out.size() && b < needs_in.size()) {
    double x = std::min(needs_out[a].second, needs_in[b].second);
    if (x > 0.0)
      map.entries.push_back({needs_out[a].first, needs_in[b].first, x});
    needs_out[a].second -= x;
    needs_in[b].second -= x;
    if (needs_out[a].second <= 0.0) ++a;
    if (needs_in[b].second <= 0.0) ++b;
  }
  return map;
}

TransportMap extract_map(const Graph& g, const FlowVector& f,
                         const Quadtree& q, const Instance& inst, double tau,
                         ExtractStats* stats) {
  SparseFlow sf = SparseFlow::from_flow_vector(g, f, tau);
  return extract_map(sf, q, inst, tau, stats);
}

}  // namespace emdflow
