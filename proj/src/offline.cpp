#include "pooling/offline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "pooling/blossom.hpp"
#include "pooling/simplex.hpp"

namespace pooling {

EdgeSet feasible_edges(const Instance& inst) {
  EdgeSet out;
  out.n = inst.size();
  const int n = inst.size();
  const auto top = inst.topology();
  for (JobIndex j = 0; j < n; ++j) {
    for (JobIndex k = j + 1; k < n; ++k) {
      if (!inst.can_pool(j, k)) {
        // Both windows are monotone in k, so later jobs are out of reach too.
        break;
      }
      out.edges.push_back({j, k, reward(top, inst.type(j), inst.type(k))});
    }
  }
  return out;
}

namespace {

MatchingSolution from_mate(const EdgeSet& es, const std::vector<int>& mate) {
  MatchingSolution out;
  for (int v = 0; v < static_cast<int>(mate.size()); ++v) {
    if (mate[v] > v) out.pairs.emplace_back(v, mate[v]);
  }
  // Value from the original weights; the heaviest of any parallel edges.
  std::vector<double> pair_w(mate.size(), -std::numeric_limits<double>::infinity());
  for (const auto& e : es.edges) {
    if (mate[e.j] == e.k) pair_w[e.j] = std::max(pair_w[e.j], e.w);
  }
  for (const auto& [a, b] : out.pairs) out.value += pair_w[a];
  return out;
}

MatchingSolution brute_force(const EdgeSet& es) {
  const int n = es.n;
  if (n > kBruteForceLimit) {
    throw std::invalid_argument("brute-force matching is limited to n <= " +
                                std::to_string(kBruteForceLimit));
  }
  std::vector<double> w(static_cast<std::size_t>(n) * n, -1.0);
  std::vector<bool> has(static_cast<std::size_t>(n) * n, false);
  for (const auto& e : es.edges) {
    // Parallel edges keep the heavier weight.
    const auto idx = static_cast<std::size_t>(e.j) * n + e.k;
    if (!has[idx] || e.w > w[idx]) w[idx] = e.w;
    has[idx] = true;
  }
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> best(full, 0.0);
  std::vector<int> choice(full, -1);
  for (std::size_t mask = 1; mask < full; ++mask) {
    const int i = std::countr_zero(mask);
    const std::size_t rest = mask & (mask - 1);
    best[mask] = best[rest];
    choice[mask] = -1;
    for (int k = i + 1; k < n; ++k) {
      if (!(rest >> k & 1U)) continue;
      const auto idx = static_cast<std::size_t>(i) * n + k;
      if (!has[idx] || w[idx] <= 0.0) continue;
      const double cand = w[idx] + best[rest & ~(std::size_t{1} << k)];
      if (cand > best[mask]) {
        best[mask] = cand;
        choice[mask] = k;
      }
    }
  }
  std::vector<int> mate(n, -1);
  std::size_t mask = full - 1;
  while (mask != 0) {
    const int i = std::countr_zero(mask);
    const int k = choice[mask];
    mask &= mask - 1;
    if (k >= 0) {
      mate[i] = k;
      mate[k] = i;
      mask &= ~(std::size_t{1} << k);
    }
  }
  return from_mate(es, mate);
}

MatchingSolution blossom_exact(const EdgeSet& es) {
  double maxw = 0.0;
  for (const auto& e : es.edges) maxw = std::max(maxw, e.w);
  if (es.n < 2 || maxw <= 0.0) return {};
  // Scale so the heaviest edge maps to about 2^50; doubled so that every
  // dual update of the blossom algorithm stays integral.
  const double scale = std::ldexp(1.0, 50) / maxw;
  std::vector<WeightedEdge> wedges;
  wedges.reserve(es.edges.size());
  for (const auto& e : es.edges) {
    if (e.w <= 0.0) continue;
    const auto w = static_cast<std::int64_t>(std::llround(e.w * scale));
    if (w > 0) wedges.push_back({e.j, e.k, 2 * w});
  }
  return from_mate(es, max_weight_matching(es.n, wedges));
}

}  // namespace

MatchingSolution opt_matching(const EdgeSet& edges, MatchMode mode) {
  for (const auto& e : edges.edges) {
    if (e.j < 0 || e.k >= edges.n || e.j >= e.k) {
      throw std::invalid_argument("edges must satisfy 0 <= j < k < n");
    }
    if (!std::isfinite(e.w)) throw std::invalid_argument("edge weights must be finite");
  }
  return mode == MatchMode::BruteForce ? brute_force(edges) : blossom_exact(edges);
}

MatchingSolution opt_matching(const Instance& inst, MatchMode mode) {
  return opt_matching(feasible_edges(inst), mode);
}

double opt_value_sorted_pairs(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double total = 0.0;
  for (std::size_t i = 1; i < sorted.size(); i += 2) total += sorted[i];
  return total;
}

MatchingSolution hindsight_opt(const Instance& inst) {
  if (!is_offline_min_common_origin(inst)) return opt_matching(inst);
  const auto values = inst.values();
  std::vector<JobIndex> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<JobIndex>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](JobIndex a, JobIndex b) { return values[a] > values[b]; });
  MatchingSolution out;
  for (std::size_t i = 1; i < order.size(); i += 2) {
    // Zero-reward pairs add nothing; leave them out as the blossom path does.
    if (values[order[i]] <= 0.0) break;
    out.pairs.emplace_back(std::min(order[i - 1], order[i]), std::max(order[i - 1], order[i]));
    out.value += values[order[i]];
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

LPSolution lp_relaxation(const EdgeSet& edges) {
  PackingLp lp;
  lp.rows = edges.n;
  lp.b = Eigen::VectorXd::Ones(edges.n);
  std::vector<int> kept;
  for (int e = 0; e < static_cast<int>(edges.edges.size()); ++e) {
    const auto& edge = edges.edges[e];
    if (edge.j < 0 || edge.k >= edges.n || edge.j >= edge.k) {
      throw std::invalid_argument("edges must satisfy 0 <= j < k < n");
    }
    // A non-positive edge is never needed at an optimum and its dual
    // constraint holds for any lambda >= 0.
    if (edge.w > 0.0) kept.push_back(e);
  }
  lp.c.resize(static_cast<Eigen::Index>(kept.size()));
  lp.columns.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto& edge = edges.edges[kept[i]];
    lp.c[static_cast<Eigen::Index>(i)] = edge.w;
    lp.columns.push_back({{edge.j, 1.0}, {edge.k, 1.0}});
  }

  LPSolution out;
  out.primal_x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(edges.edges.size()));
  SimplexResult res;
  try {
    res = solve_packing_lp(lp);
  } catch (const SimplexIterationLimit& limit) {
    // Repair the last duals into a feasible point to report an upper bound.
    Eigen::VectorXd y = limit.partial().y.cwiseMax(0.0);
    for (const auto& e : edges.edges) {
      const double gap = e.w - y[e.j] - y[e.k];
      if (gap > 0.0) y[e.j] += gap;
    }
    throw NumericFailure("LP relaxation hit the iteration limit", limit.partial().objective,
                         y.sum());
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.primal_x[kept[i]] = res.x[static_cast<Eigen::Index>(i)];
  }
  out.dual_lambda = res.y;
  out.objective = res.objective;
  out.dual_objective = res.y.sum();
  out.iterations = res.iterations;
  return out;
}

IntegralityReport integrality_report(const Instance& inst) {
  const auto es = feasible_edges(inst);
  IntegralityReport out;
  out.ip = opt_matching(es).value;
  out.lp = lp_relaxation(es).objective;
  out.ratio = out.lp > 0.0 ? out.ip / out.lp : 1.0;
  return out;
}

bool is_offline_min_common_origin(const Instance& inst) {
  return inst.topology() == Topology::MinCommonOrigin && inst.is_offline();
}

namespace {

void check_job(const Instance& inst, JobIndex j) {
  if (j < 0 || j >= inst.size()) throw std::invalid_argument("job index out of range");
}

bool use_closed_form(const Instance& inst, MarginalMethod method) {
  return method == MarginalMethod::Auto && is_offline_min_common_origin(inst);
}

}  // namespace

double marginal_loss(const Instance& inst, JobIndex j, MarginalMethod method) {
  check_job(inst, j);
  if (use_closed_form(inst, method)) return marginals_sorted(inst.values())[j].ml;
  if (inst.size() == 1) return 0.0;
  return opt_matching(inst).value - opt_matching(inst.without(j)).value;
}

double marginal_gain(const Instance& inst, JobIndex j, MarginalMethod method) {
  check_job(inst, j);
  if (use_closed_form(inst, method)) return marginals_sorted(inst.values())[j].mg;
  auto grown = inst.with_copy(j);
  // Keep an offline instance offline after it grows by one job.
  if (inst.is_offline()) grown = grown.with_criticality(offline_window(grown.size()));
  return opt_matching(grown).value - opt_matching(inst).value;
}

std::vector<MarginalReport> marginals_sorted(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  // Position k (1-based) contributes the gap theta_k - theta_{k+1} to ML of
  // every job at or before it when k is even, and to MG when k is odd.
  std::vector<double> even_tail(n + 2, 0.0);
  std::vector<double> odd_tail(n + 2, 0.0);
  for (int k = n; k >= 1; --k) {
    const double gap = values[order[k - 1]] - (k < n ? values[order[k]] : 0.0);
    even_tail[k] = even_tail[k + 1] + (k % 2 == 0 ? gap : 0.0);
    odd_tail[k] = odd_tail[k + 1] + (k % 2 == 1 ? gap : 0.0);
  }
  std::vector<MarginalReport> out(n);
  for (int pos = 1; pos <= n; ++pos) {
    const int job = order[pos - 1];
    out[job] = {job, even_tail[pos], odd_tail[pos]};
  }
  return out;
}

std::vector<MarginalReport> marginals_generic(const Instance& inst) {
  std::vector<MarginalReport> out;
  out.reserve(inst.size());
  for (JobIndex j = 0; j < inst.size(); ++j) {
    out.push_back({j, marginal_loss(inst, j, MarginalMethod::Definitional),
                   marginal_gain(inst, j, MarginalMethod::Definitional)});
  }
  return out;
}

}  // namespace pooling
