#ifndef POOLING_INSTANCE_HPP_
#define POOLING_INSTANCE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pooling/topology.hpp"

namespace pooling {

/// Zero-based position in the arrival order. Arrival ids are index + 1.
using JobIndex = int;

/// A job stays available for d further arrivals. d >= n is the offline
/// setting.
struct CountWindow {
  int d = 1;
};

/// A job stays available for a fixed number of seconds after it arrives.
struct TimeWindow {
  double seconds = 1.0;
};

using Criticality = std::variant<CountWindow, TimeWindow>;

struct Arrival {
  int id = 0;
  JobType type;
  std::optional<double> timestamp;
};

/// True when a job arriving at `later` is still in the system when a job
/// arriving at `earlier` becomes critical. Shared by the edge builder and
/// the simulator so both agree on boundary cases.
inline bool within_window(double earlier, double later, double window) {
  return later <= earlier + window;
}

/// Immutable arrival sequence with its criticality model and reward
/// topology.
class Instance {
 public:
  Instance(std::vector<Arrival> arrivals, Criticality criticality, Topology topology,
           std::uint64_t seed = 0);

  /// Builds a one-dimensional instance with ids 1..n.
  static Instance from_values(std::span<const double> values, Topology topology,
                              std::optional<Criticality> criticality = std::nullopt,
                              std::uint64_t seed = 0);

  int size() const { return static_cast<int>(arrivals_.size()); }
  const std::vector<Arrival>& arrivals() const { return arrivals_; }
  const JobType& type(JobIndex j) const { return arrivals_[j].type; }
  /// Value of a one-dimensional job.
  double value(JobIndex j) const { return std::get<OneD>(arrivals_[j].type).value; }
  double time(JobIndex j) const { return *arrivals_[j].timestamp; }
  std::vector<double> values() const;

  const Criticality& criticality() const { return criticality_; }
  Topology topology() const { return topology_; }
  std::uint64_t seed() const { return seed_; }

  bool uses_count_window() const { return std::holds_alternative<CountWindow>(criticality_); }
  bool has_timestamps() const;
  /// Count window clipped to n; only valid under CountWindow.
  int effective_window() const;
  /// Every pair of jobs can pool (d >= n - 1).
  bool is_offline() const { return uses_count_window() && effective_window() >= size() - 1; }
  double time_window() const { return std::get<TimeWindow>(criticality_).seconds; }

  /// Whether jobs j and k are ever in the system at the same time.
  bool can_pool(JobIndex j, JobIndex k) const;

  Instance with_criticality(Criticality criticality) const;
  Instance with_topology(Topology topology) const;
  /// The instance with job j removed; later jobs move up one position.
  Instance without(JobIndex j) const;
  /// The instance with an extra copy of job j inserted right after it.
  Instance with_copy(JobIndex j) const;

 private:
  std::vector<Arrival> arrivals_;
  Criticality criticality_;
  Topology topology_;
  std::uint64_t seed_;
};

/// Count window d = n, the offline setting.
CountWindow offline_window(int n);

/// Consecutive index sets of size d + 1; the last one may be shorter.
struct BatchPartition {
  std::vector<std::vector<JobIndex>> batches;
};

BatchPartition batches(const Instance& inst);

// ---- random generators -------------------------------------------------
// All generators are pure functions of their arguments. When no
// criticality is given the instance is offline.

Instance gen_uniform_1d(int n, std::uint64_t seed,
                        std::optional<Criticality> criticality = std::nullopt);
Instance gen_beta_1d(int n, double alpha, double beta, std::uint64_t seed,
                     std::optional<Criticality> criticality = std::nullopt);
Instance gen_2d_common_origin(int n, std::uint64_t seed,
                              std::optional<Criticality> criticality = std::nullopt);
Instance gen_2d_heterogeneous(int n, std::uint64_t seed,
                              std::optional<Criticality> criticality = std::nullopt);

/// Attaches Poisson arrival times (rate per second, first arrival at 0)
/// and switches the instance to a time window.
Instance with_poisson_timestamps(const Instance& inst, double rate, double window,
                                 std::uint64_t seed);

// ---- worst-case constructions ------------------------------------------

/// Greedy's offline trap: n/2 small destinations, strictly decreasing and
/// evenly spaced from 0.9 eps down to 0.5 eps, followed by n/2 jobs at 1.
Instance adversarial_gre_offline(int n, double eps);

/// Potential-greedy's offline instance of size 2^(k+3) - 4, built by
/// prepending 2^k scaled copies of (1/2, 0, 1, 0) to the level k-1 instance.
Instance adversarial_pb_offline(int k);

/// Greedy's online trap: every batch of d + 1 jobs repeats the offline trap
/// with its small values evenly spaced inside (eps / 2^(t+1), eps / 2^t).
Instance adversarial_gre_online(int n, int d, double eps);

/// Potential-greedy's online instance for d + 1 = 2^(k+3) - 4: odd batches
/// hold the offline instance scaled by 1/3, even batches the same shifted
/// by 2/3.
Instance adversarial_pb_online(int n, int d);

/// Instance defeating any index rule under the separation reward, given the
/// rule's crossover type theta_c. theta_c = 0 selects the variant with
/// leading eps jobs.
Instance adversarial_any_index_offline(int n, double theta_c, double eps = 0.1);

/// Two-batch repeating pattern defeating greedy and potential-greedy under
/// the separation reward.
Instance adversarial_separation_online(int n, int d, double eps);

// ---- order files ---------------------------------------------------------

enum class PlanarProjection {
  Auto,             // pick by header: *_lng/*_lat columns are projected
  Identity,         // coordinates are already planar
  Equirectangular,  // lng/lat degrees to local meters about the centroid
};

struct RejectedRow {
  int line = 0;
  std::string reason;
};

struct IngestResult {
  Instance instance;
  std::vector<RejectedRow> rejected;
};

class IngestError : public std::runtime_error {
 public:
  IngestError(const std::string& what, std::vector<RejectedRow> rows = {})
      : std::runtime_error(what), rows_(std::move(rows)) {}
  const std::vector<RejectedRow>& rows() const { return rows_; }

 private:
  std::vector<RejectedRow> rows_;
};

/// Reads an order CSV into a Pool2D instance with a time window. Bad rows
/// are skipped and listed in the result; with `strict` any bad row is an
/// error.
IngestResult ingest_orders_csv(const std::string& path, double window_seconds,
                               PlanarProjection projection = PlanarProjection::Auto,
                               bool strict = false);

/// Parses epoch seconds or an ISO-8601 timestamp.
std::optional<double> parse_timestamp(std::string_view text);

}  // namespace pooling

#endif
