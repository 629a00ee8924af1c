#ifndef POOLING_VERIFY_HPP_
#define POOLING_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pooling/engine.hpp"
#include "pooling/io.hpp"

namespace pooling {

inline constexpr double kCheckTolerance = 1e-9;

struct BoundCheck {
  std::string name;
  std::string instance;  // short description of what was checked
  double observed = 0.0;
  double bound = 0.0;
  bool upper = true;  // observed <= bound, otherwise observed >= bound
  bool holds = false;
  bool report_only = false;  // printed but never fails a run
};

BoundCheck make_check(std::string name, std::string instance, double observed, double bound,
                      bool upper = true, bool report_only = false);

Json to_json(const BoundCheck& check);

/// True when every check that is not report-only holds.
bool all_hold(const std::vector<BoundCheck>& checks);

// ---- structure of potential-greedy matches -----------------------------------

struct IntervalFamily {
  std::vector<JobIndex> jobs;  // the critical job of each matched pair
  std::vector<std::pair<double, double>> intervals;
  std::vector<int> depth;  // number of intervals containing this one, itself included
  bool laminar = true;
  bool depth_bound_holds = true;
  int violations = 0;
};

/// Intervals spanned by the pairs of an offline potential-greedy run on
/// the min-common-origin topology. Checks that any two are disjoint or
/// nested, and that each interval is at most 2^(1 - depth) long.
IntervalFamily check_laminar(const Instance& inst, const MatchingOutcome& outcome);

/// Runs potential-greedy offline and checks the regret bound
/// 1 + log2(n/2+1)/2, the matched-distance bound log2(n/2+1) and, as a
/// report-only line, the tighter 1/2 + log2(n/2+1)/2.
std::vector<BoundCheck> check_offline_pb_bound(const Instance& inst);

/// Online counterpart: regret <= 1/2 + (n/(d+1)+1)(1+log2(d+2))/2 and, in
/// every batch, matched distance <= 1 + log2(d+2).
std::vector<BoundCheck> check_online_pb_bound(const Instance& inst);

/// Simulates every worst-case construction with its policy and exact OPT.
std::vector<BoundCheck> check_lower_bound_constructions();

/// max_j |p(theta_j) - (ML_j + MG_j)/2| against 1e-12.
BoundCheck check_ml_mg_identity(const Instance& inst);

struct ConcentrationReport {
  double theta1 = 0.0;
  int n = 0;
  int samples = 0;
  double mean_ml = 0.0;
  double se_ml = 0.0;
  double var_ml = 0.0;
  double mean_mg = 0.0;
  double se_mg = 0.0;
  double bias_bound = 0.0;  // (1 - (1-theta1)^n) / n
  std::vector<BoundCheck> checks;
};

/// Monte-Carlo estimate of ML and MG of a job of type theta1 among n - 1
/// uniform jobs.
ConcentrationReport check_marginal_concentration(double theta1, int n, int samples,
                                                 std::uint64_t seed);

/// Every critical decision of a greedy ("gre") or potential-greedy ("pb")
/// run on min-common-origin matches the characterization of that policy.
/// The outcome must carry a trace.
BoundCheck check_remarks(const Instance& inst, const MatchingOutcome& outcome,
                         const std::string& policy);

/// Named check sets run by the command line tool.
std::vector<std::string> check_names();
std::vector<BoundCheck> run_check(const std::string& name, std::uint64_t seed);

}  // namespace pooling

#endif
