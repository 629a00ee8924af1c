#include "pooling/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pooling/rng.hpp"

namespace pooling {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite_point(const Point2& p) { return std::isfinite(p.x()) && std::isfinite(p.y()); }

std::vector<Arrival> renumber(std::vector<Arrival> arrivals) {
  for (std::size_t i = 0; i < arrivals.size(); ++i) arrivals[i].id = static_cast<int>(i) + 1;
  return arrivals;
}

Instance line_instance(const std::vector<double>& values, Topology top, Criticality crit,
                       std::uint64_t seed = 0) {
  return Instance::from_values(values, top, crit, seed);
}

}  // namespace

Instance::Instance(std::vector<Arrival> arrivals, Criticality criticality, Topology topology,
                   std::uint64_t seed)
    : arrivals_(std::move(arrivals)), criticality_(criticality), topology_(topology), seed_(seed) {
  require(!arrivals_.empty(), "an instance needs at least one job");
  if (const auto* cw = std::get_if<CountWindow>(&criticality_)) {
    require(cw->d >= 1, "count window d must be at least 1");
  } else {
    const double w = std::get<TimeWindow>(criticality_).seconds;
    require(std::isfinite(w) && w > 0.0, "time window must be positive");
  }
  const bool timed = std::holds_alternative<TimeWindow>(criticality_);
  double last_time = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arrivals_.size(); ++i) {
    const auto& a = arrivals_[i];
    require(a.id == static_cast<int>(i) + 1, "arrival ids must be 1..n in order");
    require(compatible(topology_, a.type),
            "job " + std::to_string(a.id) + " does not match topology " +
                std::string(to_string(topology_)));
    if (const auto* v = std::get_if<OneD>(&a.type)) {
      require(std::isfinite(v->value) && v->value >= 0.0 && v->value <= 1.0,
              "one-dimensional types must lie in [0,1]");
    } else {
      const auto& p = std::get<TwoD>(a.type);
      require(finite_point(p.origin) && finite_point(p.dest), "coordinates must be finite");
    }
    if (a.timestamp) {
      require(std::isfinite(*a.timestamp), "timestamps must be finite");
      require(*a.timestamp >= last_time, "timestamps must be non-decreasing");
      last_time = *a.timestamp;
    } else {
      require(!timed, "a time window needs a timestamp on every arrival");
    }
  }
}

Instance Instance::from_values(std::span<const double> values, Topology topology,
                               std::optional<Criticality> criticality, std::uint64_t seed) {
  std::vector<Arrival> arrivals;
  arrivals.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    arrivals.push_back({static_cast<int>(i) + 1, OneD{values[i]}, std::nullopt});
  }
  const int n = static_cast<int>(values.size());
  return Instance(std::move(arrivals), criticality.value_or(offline_window(std::max(n, 1))),
                  topology, seed);
}

std::vector<double> Instance::values() const {
  std::vector<double> out;
  out.reserve(arrivals_.size());
  for (const auto& a : arrivals_) out.push_back(std::get<OneD>(a.type).value);
  return out;
}

bool Instance::has_timestamps() const {
  return std::all_of(arrivals_.begin(), arrivals_.end(),
                     [](const Arrival& a) { return a.timestamp.has_value(); });
}

int Instance::effective_window() const {
  return std::min(std::get<CountWindow>(criticality_).d, size());
}

bool Instance::can_pool(JobIndex j, JobIndex k) const {
  if (j == k) return false;
  if (j > k) std::swap(j, k);
  if (uses_count_window()) return k - j <= effective_window();
  return within_window(time(j), time(k), time_window());
}

Instance Instance::with_criticality(Criticality criticality) const {
  return Instance(arrivals_, criticality, topology_, seed_);
}

Instance Instance::with_topology(Topology topology) const {
  return Instance(arrivals_, criticality_, topology, seed_);
}

Instance Instance::without(JobIndex j) const {
  require(j >= 0 && j < size(), "job index out of range");
  require(size() > 1, "cannot remove the only job");
  auto arrivals = arrivals_;
  arrivals.erase(arrivals.begin() + j);
  return Instance(renumber(std::move(arrivals)), criticality_, topology_, seed_);
}

Instance Instance::with_copy(JobIndex j) const {
  require(j >= 0 && j < size(), "job index out of range");
  auto arrivals = arrivals_;
  arrivals.insert(arrivals.begin() + j + 1, arrivals_[j]);
  return Instance(renumber(std::move(arrivals)), criticality_, topology_, seed_);
}

CountWindow offline_window(int n) { return CountWindow{std::max(n, 1)}; }

BatchPartition batches(const Instance& inst) {
  require(inst.uses_count_window(), "batches are defined for count windows only");
  const int size = inst.effective_window() + 1;
  BatchPartition out;
  for (int start = 0; start < inst.size(); start += size) {
    auto& batch = out.batches.emplace_back();
    for (int j = start; j < std::min(start + size, inst.size()); ++j) batch.push_back(j);
  }
  return out;
}

// ---- random generators -------------------------------------------------

Instance gen_uniform_1d(int n, std::uint64_t seed, std::optional<Criticality> criticality) {
  require(n >= 1, "n must be at least 1");
  Rng rng(seed);
  std::vector<double> values(n);
  for (auto& v : values) v = rng.uniform();
  return line_instance(values, Topology::MinCommonOrigin,
                       criticality.value_or(offline_window(n)), seed);
}

Instance gen_beta_1d(int n, double alpha, double beta, std::uint64_t seed,
                     std::optional<Criticality> criticality) {
  require(n >= 1, "n must be at least 1");
  require(alpha > 0.0 && beta > 0.0, "beta shape parameters must be positive");
  Rng rng(seed);
  std::vector<double> values(n);
  for (auto& v : values) v = std::clamp(rng.beta(alpha, beta), 0.0, 1.0);
  return line_instance(values, Topology::MinCommonOrigin,
                       criticality.value_or(offline_window(n)), seed);
}

Instance gen_2d_common_origin(int n, std::uint64_t seed, std::optional<Criticality> criticality) {
  require(n >= 1, "n must be at least 1");
  Rng rng(seed);
  std::vector<Arrival> arrivals;
  arrivals.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    arrivals.push_back({i + 1, TwoD{Point2::Zero(), Point2(x, y)}, std::nullopt});
  }
  return Instance(std::move(arrivals), criticality.value_or(offline_window(n)), Topology::Pool2D,
                  seed);
}

Instance gen_2d_heterogeneous(int n, std::uint64_t seed, std::optional<Criticality> criticality) {
  require(n >= 1, "n must be at least 1");
  Rng rng(seed);
  std::vector<Arrival> arrivals;
  arrivals.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double ox = rng.uniform();
    const double oy = rng.uniform();
    const double dx = rng.uniform();
    const double dy = rng.uniform();
    arrivals.push_back({i + 1, TwoD{Point2(ox, oy), Point2(dx, dy)}, std::nullopt});
  }
  return Instance(std::move(arrivals), criticality.value_or(offline_window(n)), Topology::Pool2D,
                  seed);
}

Instance with_poisson_timestamps(const Instance& inst, double rate, double window,
                                 std::uint64_t seed) {
  require(rate > 0.0, "arrival rate must be positive");
  Rng rng(seed);
  auto arrivals = inst.arrivals();
  double clock = 0.0;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    if (i > 0) clock += rng.exponential(rate);
    arrivals[i].timestamp = clock;
  }
  return Instance(std::move(arrivals), TimeWindow{window}, inst.topology(), inst.seed());
}

// ---- worst-case constructions ------------------------------------------

namespace {

/// m strictly decreasing values from 0.9 * top down to 0.5 * top.
void append_decreasing(std::vector<double>& out, int m, double top) {
  for (int i = 0; i < m; ++i) {
    const double frac = m == 1 ? 0.0 : static_cast<double>(i) / (m - 1);
    out.push_back(top * (0.9 - 0.4 * frac));
  }
}

/// m strictly decreasing values evenly spaced inside the open band
/// (top / 2, top).
void append_inside_band(std::vector<double>& out, int m, double top) {
  for (int i = 1; i <= m; ++i) out.push_back(top * (1.0 - 0.5 * i / (m + 1.0)));
}

std::vector<double> pb_offline_values(int k) {
  static constexpr double kBase[4] = {0.5, 0.0, 1.0, 0.0};
  if (k == 0) return {kBase, kBase + 4};
  std::vector<double> out;
  const double scale = std::ldexp(1.0, -(k + 1));
  const double shift = std::ldexp(1.0, -k);
  const int copies = 1 << k;
  for (int s = 0; s < copies; ++s) {
    for (double v : kBase) out.push_back(v * scale + s * shift);
  }
  const auto tail = pb_offline_values(k - 1);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace

Instance adversarial_gre_offline(int n, double eps) {
  require(n >= 4 && n % 4 == 0, "n must be a positive multiple of 4");
  require(eps > 0.0 && eps < 1.0 / 3.0, "eps must lie in (0, 1/3)");
  std::vector<double> values;
  append_decreasing(values, n / 2, eps);
  values.insert(values.end(), n / 2, 1.0);
  return line_instance(values, Topology::MinCommonOrigin, offline_window(n));
}

Instance adversarial_pb_offline(int k) {
  require(k >= 0 && k <= 20, "k must lie in [0, 20]");
  const auto values = pb_offline_values(k);
  return line_instance(values, Topology::MinCommonOrigin,
                       offline_window(static_cast<int>(values.size())));
}

Instance adversarial_gre_online(int n, int d, double eps) {
  require(d >= 1 && (d + 1) % 4 == 0, "d + 1 must be divisible by 4");
  require(n >= d + 1 && n % (d + 1) == 0, "n must be a positive multiple of d + 1");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  const int b = n / (d + 1);
  require(b <= 1000, "at most 1000 batches (the small values underflow beyond)");
  std::vector<double> values;
  for (int t = 0; t < b; ++t) {
    append_inside_band(values, (d + 1) / 2, std::ldexp(eps, -t));
    values.insert(values.end(), (d + 1) / 2, 1.0);
  }
  return line_instance(values, Topology::MinCommonOrigin, CountWindow{d});
}

Instance adversarial_pb_online(int n, int d) {
  int k = -1;
  for (int cand = 0; cand <= 20; ++cand) {
    if ((1 << (cand + 3)) - 4 == d + 1) k = cand;
  }
  require(k >= 0, "d + 1 must equal 2^(k+3) - 4 for some k >= 0");
  require(n >= d + 1 && n % (d + 1) == 0, "n must be a positive multiple of d + 1");
  const auto base = pb_offline_values(k);
  std::vector<double> values;
  for (int t = 1; t <= n / (d + 1); ++t) {
    const double shift = (t % 2 == 1) ? 0.0 : 2.0 / 3.0;
    for (double v : base) values.push_back(v / 3.0 + shift);
  }
  for (auto& v : values) v = std::min(v, 1.0);
  return line_instance(values, Topology::MinCommonOrigin, CountWindow{d});
}

Instance adversarial_any_index_offline(int n, double theta_c, double eps) {
  require(n >= 4 && n % 4 == 0, "n must be a positive multiple of 4");
  require(theta_c >= 0.0 && theta_c <= 1.0, "theta_c must lie in [0, 1]");
  std::vector<double> values;
  if (theta_c > 0.0) {
    values.insert(values.end(), n / 4, theta_c);
    values.insert(values.end(), n / 2, 0.0);
    values.insert(values.end(), n / 4, 1.0);
  } else {
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    values.insert(values.end(), n / 4, eps);
    values.insert(values.end(), n / 2, 1.0);
    values.insert(values.end(), n / 4, 0.0);
  }
  return line_instance(values, Topology::Separation, offline_window(n));
}

Instance adversarial_separation_online(int n, int d, double eps) {
  require(d >= 1 && (d + 1) % 4 == 0, "d + 1 must be divisible by 4");
  require(n >= 2 * (d + 1) && n % (2 * (d + 1)) == 0, "n must be a positive multiple of 2(d + 1)");
  require(eps > 0.0 && eps < 0.5, "eps must lie in (0, 1/2)");
  const int q = d + 1;
  std::vector<double> values;
  for (int t = 0; t < n / (2 * q); ++t) {
    for (int j = 1; j <= 2 * q; ++j) {
      // Quarter boundaries compared in integer arithmetic: 4j <= q etc.
      double v = 1.0;
      if (4 * j <= q) {
        v = 0.5;
      } else if (4 * j <= 3 * q) {
        v = eps;
      } else if (j > q && 2 * j <= 3 * q) {
        v = 0.0;
      }
      values.push_back(v);
    }
  }
  return line_instance(values, Topology::Separation, CountWindow{d});
}

}  // namespace pooling
