#ifndef POOLING_OFFLINE_HPP_
#define POOLING_OFFLINE_HPP_

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pooling/instance.hpp"

namespace pooling {

struct Edge {
  JobIndex j = 0;
  JobIndex k = 0;  // j < k
  double w = 0.0;
};

/// Pairs of jobs that are ever available together, weighted by reward.
struct EdgeSet {
  int n = 0;
  std::vector<Edge> edges;
};

using JobPair = std::pair<JobIndex, JobIndex>;

struct MatchingSolution {
  std::vector<JobPair> pairs;  // each with first < second, sorted
  double value = 0.0;
};

struct LPSolution {
  Eigen::VectorXd primal_x;     // one entry per edge of the EdgeSet
  Eigen::VectorXd dual_lambda;  // one entry per job
  double objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
};

/// The LP solver ran out of iterations. Carries the primal value reached
/// and a dual-feasible upper bound obtained by repairing the last duals.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, double primal, double bound)
      : std::runtime_error(what), primal_(primal), bound_(bound) {}
  double primal() const { return primal_; }
  double bound() const { return bound_; }

 private:
  double primal_;
  double bound_;
};

enum class MatchMode { Exact, BruteForce };

/// Largest n accepted by MatchMode::BruteForce.
inline constexpr int kBruteForceLimit = 16;

EdgeSet feasible_edges(const Instance& inst);

/// Maximum-weight matching over the edge set. Exact mode runs the blossom
/// algorithm on weights scaled to 50-bit integers; only positive edges can
/// improve a matching, so the rest are dropped.
MatchingSolution opt_matching(const EdgeSet& edges, MatchMode mode = MatchMode::Exact);

/// Hindsight optimum of an instance.
MatchingSolution opt_matching(const Instance& inst, MatchMode mode = MatchMode::Exact);

/// Closed form for the offline min-common-origin optimum: sort descending
/// and pair neighbours, so the value is the sum of every second type.
double opt_value_sorted_pairs(std::span<const double> values);

/// Hindsight optimum, by the closed form when the instance is offline
/// min-common-origin and by the blossom algorithm otherwise.
MatchingSolution hindsight_opt(const Instance& inst);

/// Fractional matching LP (degree constraints only) and its duals.
LPSolution lp_relaxation(const EdgeSet& edges);

struct IntegralityReport {
  double ip = 0.0;
  double lp = 0.0;
  double ratio = 1.0;
};

IntegralityReport integrality_report(const Instance& inst);

enum class MarginalMethod {
  Auto,          // closed form when the instance allows it
  Definitional,  // two optimum computations
};

/// OPT(theta) - OPT(theta without j).
double marginal_loss(const Instance& inst, JobIndex j,
                     MarginalMethod method = MarginalMethod::Auto);
/// OPT(theta with a second copy of j) - OPT(theta).
double marginal_gain(const Instance& inst, JobIndex j,
                     MarginalMethod method = MarginalMethod::Auto);

struct MarginalReport {
  JobIndex job = 0;
  double ml = 0.0;
  double mg = 0.0;
};

/// ML and MG of every job in an offline min-common-origin instance, from
/// the interval-sum closed form. O(n log n).
std::vector<MarginalReport> marginals_sorted(std::span<const double> values);

/// Same quantities through definitional optimum computations; any topology.
std::vector<MarginalReport> marginals_generic(const Instance& inst);

/// Whether the closed forms above apply.
bool is_offline_min_common_origin(const Instance& inst);

}  // namespace pooling

#endif
