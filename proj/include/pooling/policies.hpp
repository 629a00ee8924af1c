#ifndef POOLING_POLICIES_HPP_
#define POOLING_POLICIES_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pooling/engine.hpp"

namespace pooling {

// ---- type-space discretization ------------------------------------------

/// [0,1] split into `cells` equal intervals; the last one is closed.
struct OneDUniform {
  int cells = 100;
};

/// Square grid with 2^level cells per side over the history's bounding
/// square; a Pool2D type falls in the (origin cell, destination cell) pair.
struct TwoDGrid {
  int level = 4;
};

using CellScheme = std::variant<OneDUniform, TwoDGrid>;

/// Bounding square of the 2D grid.
struct GridFrame {
  double x0 = 0.0;
  double y0 = 0.0;
  double side = 1.0;
};

struct CellStat {
  double mean = 0.0;
  int count = 0;
};

/// Per-cell average hindsight duals, with coarser levels to fall back on.
class PriceTable {
 public:
  /// levels[0] is the finest resolution; each later level is coarser.
  PriceTable(CellScheme scheme, GridFrame frame, std::vector<std::map<std::uint64_t, CellStat>> levels,
             double global_mean);

  /// Mean dual of the finest cell holding data for this type.
  double lookup(const JobType& type) const;

  const CellScheme& scheme() const { return scheme_; }
  const GridFrame& frame() const { return frame_; }
  const std::vector<std::map<std::uint64_t, CellStat>>& levels() const { return levels_; }
  double global_mean() const { return global_mean_; }

  /// Number of levels this scheme has (finest first).
  static int level_count(const CellScheme& scheme);
  /// Cells per axis (1D: intervals; 2D: grid side) at a level index.
  static int resolution(const CellScheme& scheme, int level_index);
  static std::uint64_t cell_id(const CellScheme& scheme, const GridFrame& frame, int level_index,
                               const JobType& type);

 private:
  CellScheme scheme_;
  GridFrame frame_;
  std::vector<std::map<std::uint64_t, CellStat>> levels_;
  double global_mean_;
};

/// Solves the LP relaxation of every history instance and averages the
/// duals per cell.
PriceTable build_price_table(std::span<const Instance> history, const CellScheme& scheme);

// ---- index policies --------------------------------------------------------

struct ZeroPrice {};
struct PotentialPrice {};
struct PerJobPrice {
  std::vector<double> lambda;
};
struct PerCellPrice {
  std::shared_ptr<const PriceTable> table;
};

using Price = std::variant<ZeroPrice, PotentialPrice, PerJobPrice, PerCellPrice>;

double price_of(const Price& price, const Instance& inst, JobIndex k);

/// Absolute gap below which two index values are treated as equal.
inline constexpr double kIndexTieTolerance = 1e-12;

/// Matches a critical job j to argmax_k q(j, k) = r(j, k) - price(k).
class IndexPolicy : public Policy {
 public:
  IndexPolicy(std::string name, Topology topology, Price price);

  std::string name() const override { return name_; }
  PolicyDecision decide(const DecisionContext& ctx) const override;

  double index(const Instance& inst, JobIndex j, JobIndex k) const;
  const Price& price() const { return price_; }
  Topology topology() const { return topology_; }

 private:
  std::string name_;
  Topology topology_;
  Price price_;
};

IndexPolicy make_pb(Topology top);
IndexPolicy make_gre(Topology top);
/// Prices from the LP relaxation of the same instance (hindsight duals).
IndexPolicy make_hd(const Instance& inst);
IndexPolicy make_hd(Topology top, std::vector<double> lambda);
IndexPolicy make_ad(Topology top, std::shared_ptr<const PriceTable> table);

// ---- batching policies -----------------------------------------------------

enum class BatchMode {
  Full,      // dispatch the whole matching at each criticality
  Rolling,   // dispatch only the critical job and its partner
  Periodic,  // solve at fixed epochs, dispatch what expires before the next
};

struct PriceAdjustment {
  Price source;
  double gamma = 0.0;
};

class BatchPolicy : public Policy {
 public:
  BatchPolicy(BatchMode mode, Topology topology, std::optional<PriceAdjustment> adjustment = {},
              double period_seconds = 0.0);

  std::string name() const override;
  PolicyDecision decide(const DecisionContext& ctx) const override;
  std::optional<double> period() const override;

  BatchMode mode() const { return mode_; }

  /// r - gamma * price(a) [a not urgent] - gamma * price(b) [b not urgent].
  double adjusted_weight(const Instance& inst, JobIndex a, JobIndex b, bool a_urgent,
                         bool b_urgent) const;

 private:
  BatchMode mode_;
  Topology topology_;
  std::optional<PriceAdjustment> adjustment_;
  double period_;
};

BatchPolicy make_batch(BatchMode mode, Topology top, std::optional<PriceAdjustment> adjustment = {},
                       double period_seconds = 0.0);

// ---- gamma tuning ------------------------------------------------------------

struct GammaScore {
  double gamma = 0.0;
  double mean_reward = 0.0;
};

struct GammaTuning {
  double gamma = 0.0;
  std::vector<GammaScore> scores;  // grid order
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(const Instance& inst, double gamma)>;

std::vector<double> default_gamma_grid();

/// gamma in the grid with the highest mean total reward over the training
/// instances; the smallest gamma wins ties.
GammaTuning tune_gamma(std::span<const Instance> train, const PolicyFactory& factory,
                       std::span<const double> grid, const SimOptions& opts = {});

}  // namespace pooling

#endif
