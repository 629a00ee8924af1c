#ifndef POOLING_METRICS_HPP_
#define POOLING_METRICS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pooling/engine.hpp"
#include "pooling/io.hpp"

namespace pooling {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunMetrics {
  double total_reward = 0.0;
  double opt_value = 0.0;
  double regret = 0.0;
  double ratio = 1.0;
  double match_rate = 0.0;
  std::optional<double> saving_fraction;  // pooling topologies only
  double wall_time = 0.0;                 // seconds in the decision loop
};

/// Sum of solo trip distances, or nothing when the topology has none.
std::optional<double> total_solo_distance(const Instance& inst);

/// Pooled reward as a share of the total solo distance.
std::optional<double> saving_fraction(const Instance& inst, double pooled_reward);

RunMetrics run_metrics(const Instance& inst, const MatchingOutcome& outcome, double opt_value,
                       double wall_time = 0.0);

Json to_json(const RunMetrics& m, bool with_time);

// ---- sweeps ------------------------------------------------------------------

struct PolicySpec {
  std::string name = "pb";         // pb gre hd ad bat rbat prbat
  double gamma = 0.0;              // batching price adjustment
  std::string price = "potential";  // adjustment source: potential hd ad
  double period = 30.0;            // prbat epoch length in seconds

  /// Column label used in reports, e.g. "bat" or "bat[gamma=0.5,price=hd]".
  std::string label() const;
};

PolicySpec parse_policy_spec(const std::string& text);

struct SweepConfig {
  std::string generator = "uniform1d";  // uniform1d beta1d 2d-common 2d-hetero
  int n = 1000;
  std::vector<int> densities;   // count windows d
  std::vector<double> windows;  // time windows W in seconds (Poisson arrivals)
  double rate = 1.0;            // arrivals per second for time windows
  int seeds = 100;
  std::uint64_t base_seed = 1;
  std::vector<PolicySpec> policies;
  double beta_alpha = 0.5;
  double beta_beta = 2.0;
  int ad_history = 10;
  int ad_cells = 100;
  int ad_level = 4;
  int jobs = 1;
  bool timing = false;
};

Json to_json(const SweepConfig& cfg);
/// Values in `doc` override the defaults in `base`.
SweepConfig sweep_config_from_json(const Json& doc, SweepConfig base = {});

struct SweepCell {
  std::string policy;
  double density_or_window = 0.0;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  int n_seeds = 0;
};

struct SweepReport {
  SweepConfig config;
  std::vector<SweepCell> cells;
  std::vector<std::string> diagnostics;

  /// Mean of a metric for one cell; throws when the cell is missing.
  double mean(const std::string& policy, double density, const std::string& metric) const;
};

/// Instance s of a sweep cell, with its window attached.
Instance sweep_instance(const SweepConfig& cfg, double density_or_window, int s);

SweepReport sweep(const SweepConfig& cfg);

void write_sweep_csv(std::ostream& os, const SweepReport& report);
Json to_json(const SweepReport& report);

}  // namespace pooling

#endif
