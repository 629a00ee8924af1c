#include "pooling/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "pooling/policies.hpp"
#include "pooling/rng.hpp"

namespace pooling {

std::optional<double> total_solo_distance(const Instance& inst) {
  double total = 0.0;
  for (const auto& a : inst.arrivals()) {
    const auto d = solo_distance(inst.topology(), a.type);
    if (!d) return std::nullopt;
    total += *d;
  }
  return total;
}

std::optional<double> saving_fraction(const Instance& inst, double pooled_reward) {
  const auto solo = total_solo_distance(inst);
  if (!solo) return std::nullopt;
  if (*solo <= 0.0) return 0.0;
  return pooled_reward / *solo;
}

RunMetrics run_metrics(const Instance& inst, const MatchingOutcome& outcome, double opt_value,
                       double wall_time) {
  RunMetrics m;
  m.total_reward = outcome.total_reward;
  m.opt_value = opt_value;
  m.regret = opt_value - outcome.total_reward;
  m.ratio = opt_value > 0.0 ? outcome.total_reward / opt_value : 1.0;
  m.match_rate = 2.0 * static_cast<double>(outcome.pairs.size()) / inst.size();
  m.saving_fraction = saving_fraction(inst, outcome.total_reward);
  m.wall_time = wall_time;
  return m;
}

Json to_json(const RunMetrics& m, bool with_time) {
  Json out = {{"total_reward", m.total_reward}, {"opt_value", m.opt_value}, {"regret", m.regret},
              {"ratio", m.ratio},               {"match_rate", m.match_rate}};
  out["saving_fraction"] = m.saving_fraction ? Json(*m.saving_fraction) : Json(nullptr);
  if (with_time) out["wall_time"] = m.wall_time;
  return out;
}

// ---- policy specs -------------------------------------------------------------

namespace {

bool is_batch_name(const std::string& name) {
  return name == "bat" || name == "rbat" || name == "prbat";
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string PolicySpec::label() const {
  std::string out = name;
  std::vector<std::string> parts;
  if (is_batch_name(name) && gamma != 0.0) {
    parts.push_back("gamma=" + format_number(gamma));
    parts.push_back("price=" + price);
  }
  if (name == "prbat") parts.push_back("period=" + format_number(period));
  if (!parts.empty()) {
    out += "[";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
    out += "]";
  }
  return out;
}

PolicySpec parse_policy_spec(const std::string& text) {
  // name or name:key=value,key=value
  PolicySpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  static const std::vector<std::string> known = {"pb", "gre", "hd", "ad", "bat", "rbat", "prbat"};
  if (std::find(known.begin(), known.end(), spec.name) == known.end()) {
    throw std::invalid_argument("unknown policy: " + spec.name);
  }
  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string kv;
  while (std::getline(ss, kv, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("policy option needs key=value: " + kv);
    const auto key = kv.substr(0, eq);
    const auto value = kv.substr(eq + 1);
    if (key == "gamma") {
      spec.gamma = std::stod(value);
    } else if (key == "price") {
      spec.price = value;
    } else if (key == "period") {
      spec.period = std::stod(value);
    } else {
      throw std::invalid_argument("unknown policy option: " + key);
    }
  }
  if (spec.price != "potential" && spec.price != "hd" && spec.price != "ad") {
    throw std::invalid_argument("price must be potential, hd or ad");
  }
  if (!(spec.gamma >= 0.0 && spec.gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  return spec;
}

// ---- sweep config ---------------------------------------------------------------

Json to_json(const SweepConfig& cfg) {
  Json policies = Json::array();
  for (const auto& p : cfg.policies) {
    policies.push_back({{"name", p.name}, {"gamma", p.gamma}, {"price", p.price}, {"period", p.period}});
  }
  // `jobs` is left out on purpose: it must not change any output byte.
  return {{"generator", cfg.generator},   {"n", cfg.n},
          {"densities", cfg.densities},   {"windows", cfg.windows},
          {"rate", cfg.rate},             {"seeds", cfg.seeds},
          {"base_seed", cfg.base_seed},   {"policies", std::move(policies)},
          {"beta_alpha", cfg.beta_alpha}, {"beta_beta", cfg.beta_beta},
          {"ad_history", cfg.ad_history}, {"ad_cells", cfg.ad_cells},
          {"ad_level", cfg.ad_level},     {"timing", cfg.timing}};
}

SweepConfig sweep_config_from_json(const Json& doc, SweepConfig base) {
  try {
    if (doc.contains("generator")) base.generator = doc["generator"].get<std::string>();
    if (doc.contains("n")) base.n = doc["n"].get<int>();
    if (doc.contains("densities")) base.densities = doc["densities"].get<std::vector<int>>();
    if (doc.contains("windows")) base.windows = doc["windows"].get<std::vector<double>>();
    if (doc.contains("rate")) base.rate = doc["rate"].get<double>();
    if (doc.contains("seeds")) base.seeds = doc["seeds"].get<int>();
    if (doc.contains("base_seed")) base.base_seed = doc["base_seed"].get<std::uint64_t>();
    if (doc.contains("beta_alpha")) base.beta_alpha = doc["beta_alpha"].get<double>();
    if (doc.contains("beta_beta")) base.beta_beta = doc["beta_beta"].get<double>();
    if (doc.contains("ad_history")) base.ad_history = doc["ad_history"].get<int>();
    if (doc.contains("ad_cells")) base.ad_cells = doc["ad_cells"].get<int>();
    if (doc.contains("ad_level")) base.ad_level = doc["ad_level"].get<int>();
    if (doc.contains("jobs")) base.jobs = doc["jobs"].get<int>();
    if (doc.contains("timing")) base.timing = doc["timing"].get<bool>();
    if (doc.contains("policies")) {
      base.policies.clear();
      for (const auto& p : doc["policies"]) {
        if (p.is_string()) {
          base.policies.push_back(parse_policy_spec(p.get<std::string>()));
          continue;
        }
        PolicySpec spec = parse_policy_spec(p.at("name").get<std::string>());
        spec.gamma = p.value("gamma", spec.gamma);
        spec.price = p.value("price", spec.price);
        spec.period = p.value("period", spec.period);
        base.policies.push_back(spec);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed sweep config: ") + e.what());
  }
  return base;
}

double SweepReport::mean(const std::string& policy, double density, const std::string& metric) const {
  for (const auto& c : cells) {
    if (c.policy == policy && c.density_or_window == density && c.metric == metric) return c.mean;
  }
  throw std::out_of_range("no sweep cell for " + policy + " / " + metric);
}

// ---- sweep ------------------------------------------------------------------------

namespace {

bool time_sweep(const SweepConfig& cfg) { return !cfg.windows.empty(); }

Instance generate(const SweepConfig& cfg, std::uint64_t seed) {
  if (cfg.generator == "uniform1d") return gen_uniform_1d(cfg.n, seed);
  if (cfg.generator == "beta1d") return gen_beta_1d(cfg.n, cfg.beta_alpha, cfg.beta_beta, seed);
  if (cfg.generator == "2d-common") return gen_2d_common_origin(cfg.n, seed);
  if (cfg.generator == "2d-hetero") return gen_2d_heterogeneous(cfg.n, seed);
  throw std::invalid_argument("unknown generator: " + cfg.generator);
}

Instance instance_at(const SweepConfig& cfg, double x, std::uint64_t index) {
  const std::uint64_t seed = stream_seed(cfg.base_seed, index);
  const Instance base = generate(cfg, seed);
  if (time_sweep(cfg)) return with_poisson_timestamps(base, cfg.rate, x, mix64(seed));
  return base.with_criticality(CountWindow{static_cast<int>(x)});
}

// History instances for AD live on their own stream indices.
constexpr std::uint64_t kHistoryStream = std::uint64_t{1} << 40;

bool needs_table(const PolicySpec& p) {
  return p.name == "ad" || (is_batch_name(p.name) && p.gamma != 0.0 && p.price == "ad");
}

CellScheme scheme_for(const SweepConfig& cfg, const Instance& sample) {
  if (is_planar(sample.topology())) return TwoDGrid{cfg.ad_level};
  return OneDUniform{cfg.ad_cells};
}

Price price_source(const std::string& source, const Instance& inst,
                   const std::shared_ptr<const PriceTable>& table) {
  if (source == "hd") {
    const auto lp = lp_relaxation(feasible_edges(inst));
    return PerJobPrice{{lp.dual_lambda.data(), lp.dual_lambda.data() + lp.dual_lambda.size()}};
  }
  if (source == "ad") return PerCellPrice{table};
  return PotentialPrice{};
}

std::unique_ptr<Policy> build_policy(const PolicySpec& spec, const Instance& inst,
                                     const std::shared_ptr<const PriceTable>& table) {
  const auto top = inst.topology();
  if (spec.name == "pb") return std::make_unique<IndexPolicy>(make_pb(top));
  if (spec.name == "gre") return std::make_unique<IndexPolicy>(make_gre(top));
  if (spec.name == "hd") return std::make_unique<IndexPolicy>(make_hd(inst));
  if (spec.name == "ad") return std::make_unique<IndexPolicy>(make_ad(top, table));
  std::optional<PriceAdjustment> adj;
  if (spec.gamma != 0.0) adj = PriceAdjustment{price_source(spec.price, inst, table), spec.gamma};
  if (spec.name == "bat") return std::make_unique<BatchPolicy>(BatchMode::Full, top, adj);
  if (spec.name == "rbat") return std::make_unique<BatchPolicy>(BatchMode::Rolling, top, adj);
  return std::make_unique<BatchPolicy>(BatchMode::Periodic, top, adj, spec.period);
}

struct SeedResult {
  double opt_value = 0.0;
  double opt_match_rate = 0.0;
  std::optional<double> opt_saving;
  std::vector<std::optional<RunMetrics>> runs;
  std::vector<std::string> errors;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;
};

Stat mean_std(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

void validate(const SweepConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("n must be at least 1");
  if (cfg.seeds < 1) throw std::invalid_argument("seeds must be at least 1");
  if (cfg.policies.empty()) throw std::invalid_argument("no policies to sweep");
  if (cfg.densities.empty() == cfg.windows.empty()) {
    throw std::invalid_argument("give either densities or windows, not both");
  }
  for (int d : cfg.densities) {
    if (d < 1) throw std::invalid_argument("densities must be at least 1");
  }
  for (double w : cfg.windows) {
    if (!(w > 0.0)) throw std::invalid_argument("windows must be positive");
  }
  if (time_sweep(cfg) && !(cfg.rate > 0.0)) throw std::invalid_argument("rate must be positive");
  for (const auto& p : cfg.policies) {
    if (p.name == "prbat" && !time_sweep(cfg)) {
      throw std::invalid_argument("prbat needs time windows");
    }
  }
  if (cfg.ad_history < 0) throw std::invalid_argument("ad_history must be non-negative");
  generate(cfg, 0);  // rejects unknown generators early
}

}  // namespace

Instance sweep_instance(const SweepConfig& cfg, double density_or_window, int s) {
  return instance_at(cfg, density_or_window, static_cast<std::uint64_t>(s));
}

SweepReport sweep(const SweepConfig& cfg) {
  validate(cfg);
  std::vector<double> xs;
  for (int d : cfg.densities) xs.push_back(d);
  for (double w : cfg.windows) xs.push_back(w);
  const int ncells = static_cast<int>(xs.size());
  const int npol = static_cast<int>(cfg.policies.size());
  const bool any_table = std::any_of(cfg.policies.begin(), cfg.policies.end(), needs_table);
  if (any_table && cfg.ad_history < 1) throw std::invalid_argument("ad needs ad_history >= 1");

  SweepReport report;
  report.config = cfg;

  std::vector<std::shared_ptr<const PriceTable>> tables(ncells);
  if (any_table) {
    for (int c = 0; c < ncells; ++c) {
      std::vector<Instance> history;
      for (int h = 0; h < cfg.ad_history; ++h) {
        history.push_back(instance_at(cfg, xs[c], kHistoryStream + static_cast<std::uint64_t>(h)));
      }
      tables[c] = std::make_shared<const PriceTable>(
          build_price_table(history, scheme_for(cfg, history.front())));
    }
  }

  std::vector<SeedResult> results(static_cast<std::size_t>(ncells) * cfg.seeds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= results.size()) return;
      const int c = static_cast<int>(task / cfg.seeds);
      const int s = static_cast<int>(task % cfg.seeds);
      auto& out = results[task];
      out.runs.resize(npol);
      out.errors.resize(npol);
      std::optional<Instance> inst;
      try {
        inst = instance_at(cfg, xs[c], static_cast<std::uint64_t>(s));
        const auto opt = hindsight_opt(*inst);
        out.opt_value = opt.value;
        out.opt_match_rate = 2.0 * static_cast<double>(opt.pairs.size()) / inst->size();
        out.opt_saving = saving_fraction(*inst, opt.value);
      } catch (const std::exception& e) {
        for (auto& err : out.errors) err = std::string("instance/opt: ") + e.what();
        continue;
      }
      for (int p = 0; p < npol; ++p) {
        try {
          const auto policy = build_policy(cfg.policies[p], *inst, tables[c]);
          const auto t0 = std::chrono::steady_clock::now();
          const auto outcome = simulate(*inst, *policy);
          const double secs =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          out.runs[p] = run_metrics(*inst, outcome, out.opt_value, secs);
        } catch (const std::exception& e) {
          out.errors[p] = e.what();
        }
      }
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (int c = 0; c < ncells; ++c) {
    auto seed_result = [&](int s) -> const SeedResult& {
      return results[static_cast<std::size_t>(c) * cfg.seeds + s];
    };
    for (int p = 0; p < npol; ++p) {
      const auto label = cfg.policies[p].label();
      std::vector<double> regret, ratio, match, saving, reward, wall;
      bool failed = false;
      for (int s = 0; s < cfg.seeds; ++s) {
        const auto& r = seed_result(s);
        if (!r.errors[p].empty()) {
          report.diagnostics.push_back(label + " at " + format_number(xs[c]) + ", seed " +
                                       std::to_string(s) + ": " + r.errors[p]);
          failed = true;
          break;
        }
        const auto& m = *r.runs[p];
        regret.push_back(m.regret);
        ratio.push_back(m.ratio);
        match.push_back(m.match_rate);
        reward.push_back(m.total_reward);
        wall.push_back(m.wall_time);
        if (m.saving_fraction) saving.push_back(*m.saving_fraction);
      }
      if (failed) continue;
      auto add = [&](const std::string& metric, const std::vector<double>& v) {
        const auto st = mean_std(v);
        report.cells.push_back({label, xs[c], metric, st.mean, st.std, static_cast<int>(v.size())});
      };
      add("regret", regret);
      add("ratio", ratio);
      add("match_rate", match);
      if (!saving.empty()) add("saving_fraction", saving);
      add("total_reward", reward);
      if (cfg.timing) add("wall_time", wall);
    }
    // Hindsight optimum as a pseudo-policy.
    std::vector<double> reward, match, saving;
    bool ok = true;
    for (int s = 0; s < cfg.seeds; ++s) {
      const auto& r = seed_result(s);
      if (r.errors.empty() || r.errors[0].rfind("instance/opt: ", 0) == 0) {
        ok = false;
        break;
      }
      reward.push_back(r.opt_value);
      match.push_back(r.opt_match_rate);
      if (r.opt_saving) saving.push_back(*r.opt_saving);
    }
    if (ok) {
      auto add = [&](const std::string& metric, const std::vector<double>& v) {
        const auto st = mean_std(v);
        report.cells.push_back({"opt", xs[c], metric, st.mean, st.std, static_cast<int>(v.size())});
      };
      add("match_rate", match);
      if (!saving.empty()) add("saving_fraction", saving);
      add("total_reward", reward);
    }
  }
  return report;
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "# pooling_lab " << kToolVersion << '\n';
  os << "# config " << to_json(report.config).dump() << '\n';
  for (const auto& d : report.diagnostics) os << "# failed " << d << '\n';
  os << "policy,density_or_window,metric,mean,std,n_seeds\n";
  for (const auto& c : report.cells) {
    os << c.policy << ',' << format_number(c.density_or_window) << ',' << c.metric << ','
       << format_number(c.mean) << ',' << format_number(c.std) << ',' << c.n_seeds << '\n';
  }
}

Json to_json(const SweepReport& report) {
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"policy", c.policy},
                     {"density_or_window", c.density_or_window},
                     {"metric", c.metric},
                     {"mean", c.mean},
                     {"std", c.std},
                     {"n_seeds", c.n_seeds}});
  }
  return {{"tool", "pooling_lab"},
          {"version", kToolVersion},
          {"config", to_json(report.config)},
          {"diagnostics", report.diagnostics},
          {"cells", std::move(cells)}};
}

}  // namespace pooling
