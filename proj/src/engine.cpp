#include "pooling/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pooling {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Arrival:
      return "arrival";
    case EventKind::Epoch:
      return "epoch";
    case EventKind::Critical:
      return "critical";
  }
  return "unknown";
}

bool negative_allowed_default(Topology top) { return !is_planar(top); }

std::vector<JobIndex> MatchingOutcome::partners(int n) const {
  std::vector<JobIndex> out(n, -1);
  for (const auto& p : pairs) {
    out[p.a] = p.b;
    out[p.b] = p.a;
  }
  return out;
}

namespace {

enum class JobState : char { Pending, Available, Done };

class Simulation {
 public:
  Simulation(const Instance& inst, const Policy& policy, const SimOptions& opts)
      : inst_(inst),
        policy_(policy),
        opts_(opts),
        negative_ok_(opts.negative_match_allowed.value_or(negative_allowed_default(inst.topology()))),
        state_(inst.size(), JobState::Pending) {}

  MatchingOutcome run() {
    if (inst_.uses_count_window()) {
      run_count_window();
    } else {
      run_time_window();
    }
    return std::move(out_);
  }

 private:
  void run_count_window() {
    if (policy_.period()) {
      throw std::invalid_argument(policy_.name() + " needs a time-window instance");
    }
    const int n = inst_.size();
    const int d = inst_.effective_window();
    for (int t = 1; t <= n + d + 1; ++t) {
      if (t <= n) arrive(t - 1, t);
      const int j = t - d;
      if (j >= 1 && j <= n && state_[j - 1] == JobState::Available) {
        decide(EventKind::Critical, j - 1, t, std::nullopt);
      }
    }
  }

  void run_time_window() {
    const int n = inst_.size();
    const double window = inst_.time_window();
    const auto period = policy_.period();
    if (period && !(*period > 0.0)) throw std::invalid_argument("period must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    const double origin = inst_.time(0);
    long long epoch = 0;
    int ia = 0;
    int ic = 0;
    while (ic < n) {
      const double ta = ia < n ? inst_.time(ia) : inf;
      const double tc = inst_.time(ic) + window;
      double te = period ? origin + static_cast<double>(epoch) * *period : inf;
      if (period && available_.empty() && te < std::min(ta, tc)) {
        // Nothing to decide; skip idle epochs.
        const double target = std::min(ta, tc);
        epoch = std::max(epoch + 1, static_cast<long long>(std::floor((target - origin) / *period)));
        continue;
      }
      if (ta <= te && ta <= tc) {
        arrive(ia, ta);
        ++ia;
      } else if (te <= tc) {
        const double next = origin + static_cast<double>(epoch + 1) * *period;
        if (!available_.empty()) decide(EventKind::Epoch, -1, te, next);
        ++epoch;
      } else {
        if (state_[ic] == JobState::Available) {
          std::optional<double> next;
          if (period) next = te;
          decide(EventKind::Critical, ic, tc, next);
        }
        ++ic;
      }
    }
  }

  void arrive(JobIndex j, double clock) {
    state_[j] = JobState::Available;
    available_.push_back(j);  // arrivals come in index order
    if (opts_.record_trace) out_.trace.push_back({EventKind::Arrival, clock, j, {}, std::nullopt});
  }

  void remove(JobIndex j) {
    const auto it = std::lower_bound(available_.begin(), available_.end(), j);
    available_.erase(it);
    state_[j] = JobState::Done;
  }

  void require_available(JobIndex j) const {
    if (j < 0 || j >= inst_.size() || state_[j] != JobState::Available) {
      throw ContractViolation(policy_.name() + " referenced job " + std::to_string(j + 1) +
                              ", which is not available");
    }
  }

  void record_pair(JobIndex a, JobIndex b, JobIndex critical) {
    if (a > b) std::swap(a, b);
    const double r = reward(inst_.topology(), inst_.type(a), inst_.type(b));
    if (!negative_ok_ && r < 0.0) {
      throw ContractViolation(policy_.name() + " matched jobs " + std::to_string(a + 1) + " and " +
                              std::to_string(b + 1) + " at a negative reward");
    }
    out_.pairs.push_back({a, b, r, critical == a || critical == b ? critical : -1});
    out_.total_reward += r;
    remove(a);
    remove(b);
  }

  void decide(EventKind kind, JobIndex critical, double clock, std::optional<double> next_epoch) {
    DecisionContext ctx{inst_, kind, critical, available_, clock, next_epoch, negative_ok_,
                        opts_.tiebreak};
    PolicyDecision decision = policy_.decide(ctx);
    if (opts_.record_trace) {
      out_.trace.push_back({kind, clock, critical, available_, decision});
    }
    std::visit([&](const auto& d) { apply(d, kind, critical); }, decision);
    if (critical >= 0 && state_[critical] == JobState::Available) {
      throw ContractViolation(policy_.name() + " left critical job " + std::to_string(critical + 1) +
                              " undispatched");
    }
  }

  void apply(const MatchWith& d, EventKind kind, JobIndex critical) {
    if (kind != EventKind::Critical) throw ContractViolation("MatchWith outside a criticality");
    require_available(d.k);
    if (d.k == critical) throw ContractViolation("a job cannot match itself");
    record_pair(critical, d.k, critical);
  }

  void apply(const DispatchAlone&, EventKind kind, JobIndex critical) {
    if (kind != EventKind::Critical) throw ContractViolation("DispatchAlone outside a criticality");
    out_.solos.push_back(critical);
    remove(critical);
  }

  void apply(const BatchDispatch& d, EventKind, JobIndex critical) {
    std::vector<JobIndex> seen;
    for (const auto& [a, b] : d.pairs) {
      seen.push_back(a);
      seen.push_back(b);
    }
    seen.insert(seen.end(), d.solos.begin(), d.solos.end());
    for (JobIndex j : seen) require_available(j);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw ContractViolation(policy_.name() + " dispatched a job twice in one batch");
    }
    for (const auto& [a, b] : d.pairs) record_pair(a, b, critical);
    for (JobIndex j : d.solos) {
      out_.solos.push_back(j);
      remove(j);
    }
  }

  const Instance& inst_;
  const Policy& policy_;
  SimOptions opts_;
  bool negative_ok_;
  std::vector<JobState> state_;
  std::vector<JobIndex> available_;
  MatchingOutcome out_;
};

}  // namespace

MatchingOutcome simulate(const Instance& inst, const Policy& policy, const SimOptions& opts) {
  Simulation sim(inst, policy, opts);
  return sim.run();
}

}  // namespace pooling
