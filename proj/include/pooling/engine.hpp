#ifndef POOLING_ENGINE_HPP_
#define POOLING_ENGINE_HPP_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pooling/instance.hpp"
#include "pooling/offline.hpp"

namespace pooling {

struct MatchWith {
  JobIndex k = 0;
};
struct DispatchAlone {};
struct BatchDispatch {
  std::vector<JobPair> pairs;
  std::vector<JobIndex> solos;
};

using PolicyDecision = std::variant<MatchWith, DispatchAlone, BatchDispatch>;

/// Event order at equal times: arrivals, then decision epochs, then
/// criticalities.
enum class EventKind { Arrival, Epoch, Critical };

std::string_view to_string(EventKind kind);

enum class TieBreak { LowestIndex, HighestIndex };

struct SimOptions {
  /// Unset means: allowed for one-dimensional topologies, not for Pool2D.
  std::optional<bool> negative_match_allowed;
  TieBreak tiebreak = TieBreak::LowestIndex;
  bool record_trace = false;
};

/// What a policy sees when asked for a decision.
struct DecisionContext {
  const Instance& inst;
  EventKind event;
  JobIndex critical;                    // -1 at epochs
  std::span<const JobIndex> available;  // ascending, includes `critical`
  double clock;                         // step t (count window) or seconds
  std::optional<double> next_epoch;     // periodic policies only
  bool negative_match_allowed;
  TieBreak tiebreak;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual PolicyDecision decide(const DecisionContext& ctx) const = 0;
  /// Decision period in seconds for epoch-driven policies.
  virtual std::optional<double> period() const { return std::nullopt; }
};

/// A decision that references unavailable jobs or leaves a critical job
/// behind.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PairRecord {
  JobIndex a = 0;
  JobIndex b = 0;  // a < b
  double reward = 0.0;
  JobIndex critical = -1;  // the job whose criticality triggered the match, or -1
};

struct TraceEvent {
  EventKind kind = EventKind::Arrival;
  double clock = 0.0;
  JobIndex job = -1;
  std::vector<JobIndex> available;  // before the decision; empty for arrivals
  std::optional<PolicyDecision> decision;
};

struct MatchingOutcome {
  std::vector<PairRecord> pairs;
  std::vector<JobIndex> solos;
  double total_reward = 0.0;
  std::vector<TraceEvent> trace;

  /// partner[j] or -1.
  std::vector<JobIndex> partners(int n) const;
};

bool negative_allowed_default(Topology top);

/// Runs the policy over the instance. Count windows run steps
/// t = 1..n+d+1 (arrival of job t, then criticality of job t-d); time
/// windows process arrival, epoch and criticality events in time order.
MatchingOutcome simulate(const Instance& inst, const Policy& policy, const SimOptions& opts = {});

}  // namespace pooling

#endif
