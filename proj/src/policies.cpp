#include "pooling/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pooling {

// ---- price table ------------------------------------------------------------

PriceTable::PriceTable(CellScheme scheme, GridFrame frame,
                       std::vector<std::map<std::uint64_t, CellStat>> levels, double global_mean)
    : scheme_(scheme), frame_(frame), levels_(std::move(levels)), global_mean_(global_mean) {
  if (static_cast<int>(levels_.size()) != level_count(scheme_)) {
    throw std::invalid_argument("price table level count does not match its scheme");
  }
}

int PriceTable::level_count(const CellScheme& scheme) {
  if (const auto* g = std::get_if<TwoDGrid>(&scheme)) return g->level + 1;
  int cells = std::get<OneDUniform>(scheme).cells;
  int count = 1;
  while (cells > 1) {
    cells = (cells + 1) / 2;
    ++count;
  }
  return count;
}

int PriceTable::resolution(const CellScheme& scheme, int level_index) {
  if (const auto* g = std::get_if<TwoDGrid>(&scheme)) return 1 << (g->level - level_index);
  int cells = std::get<OneDUniform>(scheme).cells;
  for (int i = 0; i < level_index; ++i) cells = (cells + 1) / 2;
  return cells;
}

namespace {

std::uint64_t axis_cell(double v, double base, double side, int s) {
  const double u = std::floor((v - base) / side * s);
  return static_cast<std::uint64_t>(std::clamp(u, 0.0, static_cast<double>(s - 1)));
}

void validate_scheme(const CellScheme& scheme) {
  if (const auto* g = std::get_if<TwoDGrid>(&scheme)) {
    if (g->level < 0 || g->level > 15) throw std::invalid_argument("grid level must lie in [0, 15]");
  } else if (std::get<OneDUniform>(scheme).cells < 1) {
    throw std::invalid_argument("cell count must be positive");
  }
}

}  // namespace

std::uint64_t PriceTable::cell_id(const CellScheme& scheme, const GridFrame& frame, int level_index,
                                  const JobType& type) {
  const int s = resolution(scheme, level_index);
  if (std::holds_alternative<TwoDGrid>(scheme)) {
    const auto* t = std::get_if<TwoD>(&type);
    if (t == nullptr) throw std::invalid_argument("a 2D grid prices two-dimensional types only");
    const auto su = static_cast<std::uint64_t>(s);
    const auto ox = axis_cell(t->origin.x(), frame.x0, frame.side, s);
    const auto oy = axis_cell(t->origin.y(), frame.y0, frame.side, s);
    const auto dx = axis_cell(t->dest.x(), frame.x0, frame.side, s);
    const auto dy = axis_cell(t->dest.y(), frame.y0, frame.side, s);
    return ((ox * su + oy) * su + dx) * su + dy;
  }
  const auto* t = std::get_if<OneD>(&type);
  if (t == nullptr) throw std::invalid_argument("a 1D scheme prices one-dimensional types only");
  return axis_cell(t->value, 0.0, 1.0, s);
}

double PriceTable::lookup(const JobType& type) const {
  for (int i = 0; i < static_cast<int>(levels_.size()); ++i) {
    const auto& level = levels_[i];
    const auto it = level.find(cell_id(scheme_, frame_, i, type));
    if (it != level.end()) return it->second.mean;
  }
  return global_mean_;
}

PriceTable build_price_table(std::span<const Instance> history, const CellScheme& scheme) {
  if (history.empty()) throw std::invalid_argument("price table needs a nonempty history");
  validate_scheme(scheme);
  const bool planar = std::holds_alternative<TwoDGrid>(scheme);
  for (const auto& inst : history) {
    if (is_planar(inst.topology()) != planar) {
      throw std::invalid_argument("cell scheme does not match the history's topology");
    }
  }

  GridFrame frame;
  if (planar) {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    double x1 = -x0;
    double y1 = -x0;
    for (const auto& inst : history) {
      for (const auto& a : inst.arrivals()) {
        const auto& t = std::get<TwoD>(a.type);
        for (const Point2& p : {t.origin, t.dest}) {
          x0 = std::min(x0, p.x());
          y0 = std::min(y0, p.y());
          x1 = std::max(x1, p.x());
          y1 = std::max(y1, p.y());
        }
      }
    }
    const double side = std::max(x1 - x0, y1 - y0);
    frame = {x0, y0, side > 0.0 ? side : 1.0};
  }

  struct Acc {
    double sum = 0.0;
    int count = 0;
  };
  const int nlevels = PriceTable::level_count(scheme);
  std::vector<std::map<std::uint64_t, Acc>> acc(nlevels);
  double total = 0.0;
  long long jobs = 0;
  for (const auto& inst : history) {
    const auto lp = lp_relaxation(feasible_edges(inst));
    for (JobIndex j = 0; j < inst.size(); ++j) {
      const double lambda = lp.dual_lambda[j];
      for (int i = 0; i < nlevels; ++i) {
        auto& cell = acc[i][PriceTable::cell_id(scheme, frame, i, inst.type(j))];
        cell.sum += lambda;
        ++cell.count;
      }
      total += lambda;
      ++jobs;
    }
  }
  std::vector<std::map<std::uint64_t, CellStat>> levels(nlevels);
  for (int i = 0; i < nlevels; ++i) {
    for (const auto& [id, a] : acc[i]) levels[i][id] = {a.sum / a.count, a.count};
  }
  return PriceTable(scheme, frame, std::move(levels), total / static_cast<double>(jobs));
}

// ---- index policies ---------------------------------------------------------

double price_of(const Price& price, const Instance& inst, JobIndex k) {
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ZeroPrice>) {
          return 0.0;
        } else if constexpr (std::is_same_v<P, PotentialPrice>) {
          return potential(inst.topology(), inst.type(k));
        } else if constexpr (std::is_same_v<P, PerJobPrice>) {
          if (static_cast<int>(p.lambda.size()) != inst.size()) {
            throw std::invalid_argument("per-job prices do not match the instance size");
          }
          return p.lambda[k];
        } else {
          return p.table->lookup(inst.type(k));
        }
      },
      price);
}

IndexPolicy::IndexPolicy(std::string name, Topology topology, Price price)
    : name_(std::move(name)), topology_(topology), price_(std::move(price)) {
  if (const auto* c = std::get_if<PerCellPrice>(&price_); c != nullptr && !c->table) {
    throw std::invalid_argument("cell prices need a table");
  }
}

double IndexPolicy::index(const Instance& inst, JobIndex j, JobIndex k) const {
  return reward(topology_, inst.type(j), inst.type(k)) - price_of(price_, inst, k);
}

PolicyDecision IndexPolicy::decide(const DecisionContext& ctx) const {
  if (ctx.inst.topology() != topology_) {
    throw std::invalid_argument(name_ + " was built for " + std::string(to_string(topology_)) +
                                ", not " + std::string(to_string(ctx.inst.topology())));
  }
  if (ctx.event != EventKind::Critical) return BatchDispatch{};
  const JobIndex j = ctx.critical;
  JobIndex best = -1;
  double best_q = 0.0;
  for (JobIndex k : ctx.available) {
    if (k == j) continue;
    const double r = reward(topology_, ctx.inst.type(j), ctx.inst.type(k));
    if (!ctx.negative_match_allowed && r < 0.0) continue;
    const double q = r - price_of(price_, ctx.inst, k);
    // Indices closer than kIndexTieTolerance count as tied, so that ties of
    // the exact arithmetic survive rounding (e.g. on scaled instances).
    if (best < 0 || q > best_q + kIndexTieTolerance) {
      best = k;
      best_q = q;
    } else if (q >= best_q - kIndexTieTolerance && ctx.tiebreak == TieBreak::HighestIndex) {
      best = k;
      best_q = std::max(best_q, q);
    }
  }
  if (best < 0) return DispatchAlone{};
  return MatchWith{best};
}

IndexPolicy make_pb(Topology top) { return IndexPolicy("pb", top, PotentialPrice{}); }

IndexPolicy make_gre(Topology top) { return IndexPolicy("gre", top, ZeroPrice{}); }

IndexPolicy make_hd(const Instance& inst) {
  const auto lp = lp_relaxation(feasible_edges(inst));
  std::vector<double> lambda(lp.dual_lambda.data(), lp.dual_lambda.data() + lp.dual_lambda.size());
  return make_hd(inst.topology(), std::move(lambda));
}

IndexPolicy make_hd(Topology top, std::vector<double> lambda) {
  return IndexPolicy("hd", top, PerJobPrice{std::move(lambda)});
}

IndexPolicy make_ad(Topology top, std::shared_ptr<const PriceTable> table) {
  return IndexPolicy("ad", top, PerCellPrice{std::move(table)});
}

// ---- batching policies ----------------------------------------------------------

BatchPolicy::BatchPolicy(BatchMode mode, Topology topology, std::optional<PriceAdjustment> adjustment,
                         double period_seconds)
    : mode_(mode), topology_(topology), adjustment_(std::move(adjustment)), period_(period_seconds) {
  if (adjustment_ && !(adjustment_->gamma >= 0.0 && adjustment_->gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (mode_ == BatchMode::Periodic && !(period_ > 0.0)) {
    throw std::invalid_argument("periodic batching needs a positive period");
  }
}

std::string BatchPolicy::name() const {
  switch (mode_) {
    case BatchMode::Full:
      return "bat";
    case BatchMode::Rolling:
      return "rbat";
    case BatchMode::Periodic:
      return "prbat";
  }
  return "batch";
}

std::optional<double> BatchPolicy::period() const {
  if (mode_ == BatchMode::Periodic) return period_;
  return std::nullopt;
}

double BatchPolicy::adjusted_weight(const Instance& inst, JobIndex a, JobIndex b, bool a_urgent,
                                    bool b_urgent) const {
  double w = reward(topology_, inst.type(a), inst.type(b));
  if (adjustment_ && adjustment_->gamma != 0.0) {
    if (!a_urgent) w -= adjustment_->gamma * price_of(adjustment_->source, inst, a);
    if (!b_urgent) w -= adjustment_->gamma * price_of(adjustment_->source, inst, b);
  }
  return w;
}

PolicyDecision BatchPolicy::decide(const DecisionContext& ctx) const {
  if (ctx.inst.topology() != topology_) {
    throw std::invalid_argument(name() + " was built for " + std::string(to_string(topology_)) +
                                ", not " + std::string(to_string(ctx.inst.topology())));
  }
  // A periodic policy only meets a criticality when the job arrived after
  // the last epoch and expires before the next one.
  if (mode_ == BatchMode::Periodic && ctx.event == EventKind::Critical) return DispatchAlone{};

  const auto& avail = ctx.available;
  const int m = static_cast<int>(avail.size());
  std::vector<bool> urgent(m, false);
  for (int i = 0; i < m; ++i) {
    if (mode_ == BatchMode::Periodic) {
      urgent[i] = ctx.inst.time(avail[i]) + ctx.inst.time_window() < *ctx.next_epoch;
    } else {
      urgent[i] = avail[i] == ctx.critical;
    }
  }

  EdgeSet local;
  local.n = m;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      if (!ctx.negative_match_allowed &&
          reward(topology_, ctx.inst.type(avail[a]), ctx.inst.type(avail[b])) < 0.0) {
        continue;
      }
      local.edges.push_back(
          {a, b, adjusted_weight(ctx.inst, avail[a], avail[b], urgent[a], urgent[b])});
    }
  }
  const auto matching = opt_matching(local);
  std::vector<int> partner(m, -1);
  for (const auto& [a, b] : matching.pairs) {
    partner[a] = b;
    partner[b] = a;
  }

  BatchDispatch out;
  for (int a = 0; a < m; ++a) {
    const int b = partner[a];
    const bool take = mode_ == BatchMode::Full || urgent[a] || (b >= 0 && urgent[b]);
    if (!take) continue;
    if (b < 0) {
      out.solos.push_back(avail[a]);
    } else if (a < b) {
      out.pairs.emplace_back(avail[a], avail[b]);
    }
  }
  return out;
}

BatchPolicy make_batch(BatchMode mode, Topology top, std::optional<PriceAdjustment> adjustment,
                       double period_seconds) {
  return BatchPolicy(mode, top, std::move(adjustment), period_seconds);
}

// ---- gamma tuning ---------------------------------------------------------------

std::vector<double> default_gamma_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

GammaTuning tune_gamma(std::span<const Instance> train, const PolicyFactory& factory,
                       std::span<const double> grid, const SimOptions& opts) {
  if (train.empty()) throw std::invalid_argument("gamma tuning needs training instances");
  if (grid.empty()) throw std::invalid_argument("gamma grid is empty");
  for (double g : grid) {
    if (!(g >= 0.0 && g <= 1.0)) throw std::invalid_argument("gamma grid values must lie in [0, 1]");
  }
  GammaTuning out;
  bool have_best = false;
  double best_score = 0.0;
  for (double g : grid) {
    double total = 0.0;
    for (const auto& inst : train) total += simulate(inst, *factory(inst, g), opts).total_reward;
    const double mean = total / static_cast<double>(train.size());
    out.scores.push_back({g, mean});
    if (!have_best || mean > best_score || (mean == best_score && g < out.gamma)) {
      out.gamma = g;
      best_score = mean;
      have_best = true;
    }
  }
  return out;
}

}  // namespace pooling
