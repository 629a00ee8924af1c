// pooling_lab: command line front end for the pooling library.
//
// Exit codes: 0 ok, 1 failed checks or internal error, 2 usage, 3 data,
// 4 numeric failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pooling/io.hpp"
#include "pooling/metrics.hpp"
#include "pooling/policies.hpp"
#include "pooling/rng.hpp"
#include "pooling/simplex.hpp"
#include "pooling/verify.hpp"

using namespace pooling;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fills `var` from the config document when the flag was not given.
template <class T>
void from_config(const CLI::Option* opt, const Json& cfg, T& var) {
  const std::string key = opt->get_name(false, true).substr(2);
  if (opt->count() > 0 || !cfg.contains(key)) return;
  try {
    var = cfg[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("config key '" + key + "': " + e.what());
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("POOLING_LAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("POOLING_LAB_SEED must be a non-negative integer");
    }
  }
  return 1;
}

Json header(const std::string& command, Json config) {
  return {{"tool", "pooling_lab"}, {"version", kToolVersion}, {"command", command}, {"config", std::move(config)}};
}

void emit(const std::string& path, const Json& doc) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json_file(path, doc);
  }
}

std::optional<Criticality> window_from(int d, double window) {
  if (d > 0 && window > 0.0) throw UsageError("give --d or --window, not both");
  if (d > 0) return CountWindow{d};
  return std::nullopt;
}

std::shared_ptr<const PriceTable> load_or_build_table(const std::string& table_path,
                                                      const std::vector<std::string>& history,
                                                      const Instance& inst, int cells, int level) {
  if (!table_path.empty()) return std::make_shared<const PriceTable>(price_table_from_json(read_json_file(table_path)));
  if (history.empty()) throw UsageError("ad prices need --table or --history");
  std::vector<Instance> hist;
  for (const auto& h : history) hist.push_back(instance_from_json(read_json_file(h)));
  CellScheme scheme = is_planar(inst.topology()) ? CellScheme{TwoDGrid{level}} : CellScheme{OneDUniform{cells}};
  return std::make_shared<const PriceTable>(build_price_table(hist, scheme));
}

Price price_from(const std::string& source, const Instance& inst, const std::function<std::shared_ptr<const PriceTable>()>& table) {
  if (source == "potential") return PotentialPrice{};
  if (source == "hd") {
    const auto lp = lp_relaxation(feasible_edges(inst));
    return PerJobPrice{{lp.dual_lambda.data(), lp.dual_lambda.data() + lp.dual_lambda.size()}};
  }
  if (source == "ad") return PerCellPrice{table()};
  throw UsageError("--price must be potential, hd or ad");
}

std::unique_ptr<Policy> make_policy(const std::string& name, double gamma, const std::string& price,
                                    double period, const Instance& inst,
                                    const std::function<std::shared_ptr<const PriceTable>()>& table) {
  const auto top = inst.topology();
  if (gamma < 0.0 || gamma > 1.0) throw UsageError("--gamma must lie in [0, 1]");
  if (name == "pb") return std::make_unique<IndexPolicy>(make_pb(top));
  if (name == "gre") return std::make_unique<IndexPolicy>(make_gre(top));
  if (name == "hd") return std::make_unique<IndexPolicy>(make_hd(inst));
  if (name == "ad") return std::make_unique<IndexPolicy>(make_ad(top, table()));
  std::optional<PriceAdjustment> adj;
  if (gamma != 0.0) adj = PriceAdjustment{price_from(price, inst, table), gamma};
  if (name == "bat") return std::make_unique<BatchPolicy>(BatchMode::Full, top, adj);
  if (name == "rbat") return std::make_unique<BatchPolicy>(BatchMode::Rolling, top, adj);
  if (name == "prbat") {
    if (!(period > 0.0)) throw UsageError("--period must be positive");
    return std::make_unique<BatchPolicy>(BatchMode::Periodic, top, adj, period);
  }
  throw UsageError("unknown policy: " + name);
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string config;
  std::string kind = "uniform1d";
  int n = 1000;
  int d = 0;
  double window = 0.0;
  double rate = 1.0;
  std::uint64_t seed = 0;
  double alpha = 0.5;
  double beta = 2.0;
  double eps = 0.1;
  int k = 0;
  double theta_c = 0.5;
  std::string topology;
  std::string out;
};

void setup_gen(CLI::App& app, GenArgs& a, std::function<void()>& run) {
  auto* sub = app.add_subcommand("gen", "Generate an instance file");
  sub->add_option("--config", a.config, "JSON file with defaults for these flags");
  std::vector<CLI::Option*> opts = {
      sub->add_option("--kind", a.kind,
                      "uniform1d | beta1d | 2d-common | 2d-hetero | adversarial-gre-offline | "
                      "adversarial-pb-offline | adversarial-gre-online | adversarial-pb-online | "
                      "adversarial-any-index | adversarial-separation-online"),
      sub->add_option("--n", a.n, "number of jobs"),
      sub->add_option("--d", a.d, "count window (omit for offline)"),
      sub->add_option("--window", a.window, "time window in seconds (Poisson arrivals)"),
      sub->add_option("--rate", a.rate, "arrivals per second with --window"),
      sub->add_option("--seed", a.seed, "seed (default POOLING_LAB_SEED or 1)"),
      sub->add_option("--alpha", a.alpha, "beta1d shape alpha"),
      sub->add_option("--beta", a.beta, "beta1d shape beta"),
      sub->add_option("--eps", a.eps, "epsilon of the worst-case constructions"),
      sub->add_option("--k", a.k, "level of adversarial-pb-offline"),
      sub->add_option("--theta-c", a.theta_c, "crossover type of adversarial-any-index"),
      sub->add_option("--topology", a.topology, "override the reward topology"),
  };
  sub->add_option("-o,--output", a.out, "output path (default stdout)");
  run = [&a, opts, sub] {
    (void)sub;
    Json cfg = a.config.empty() ? Json::object() : read_json_file(a.config);
    from_config(opts[0], cfg, a.kind);
    from_config(opts[1], cfg, a.n);
    from_config(opts[2], cfg, a.d);
    from_config(opts[3], cfg, a.window);
    from_config(opts[4], cfg, a.rate);
    if (opts[5]->count() == 0 && !cfg.contains("seed")) a.seed = default_seed();
    from_config(opts[5], cfg, a.seed);
    from_config(opts[6], cfg, a.alpha);
    from_config(opts[7], cfg, a.beta);
    from_config(opts[8], cfg, a.eps);
    from_config(opts[9], cfg, a.k);
    from_config(opts[10], cfg, a.theta_c);
    from_config(opts[11], cfg, a.topology);

    const auto crit = window_from(a.d, a.window);
    std::optional<Instance> inst;
    const std::string& kind = a.kind;
    if (kind == "uniform1d") {
      inst = gen_uniform_1d(a.n, a.seed, crit);
    } else if (kind == "beta1d") {
      inst = gen_beta_1d(a.n, a.alpha, a.beta, a.seed, crit);
    } else if (kind == "2d-common") {
      inst = gen_2d_common_origin(a.n, a.seed, crit);
    } else if (kind == "2d-hetero") {
      inst = gen_2d_heterogeneous(a.n, a.seed, crit);
    } else if (kind == "adversarial-gre-offline") {
      inst = adversarial_gre_offline(a.n, a.eps);
    } else if (kind == "adversarial-pb-offline") {
      inst = adversarial_pb_offline(a.k);
    } else if (kind == "adversarial-gre-online") {
      inst = adversarial_gre_online(a.n, a.d, a.eps);
    } else if (kind == "adversarial-pb-online") {
      inst = adversarial_pb_online(a.n, a.d);
    } else if (kind == "adversarial-any-index") {
      inst = adversarial_any_index_offline(a.n, a.theta_c, a.eps);
    } else if (kind == "adversarial-separation-online") {
      inst = adversarial_separation_online(a.n, a.d, a.eps);
    } else {
      throw UsageError("unknown --kind " + kind);
    }
    if (a.window > 0.0) {
      if (kind.rfind("adversarial", 0) == 0) throw UsageError("--window applies to random generators only");
      inst = with_poisson_timestamps(*inst, a.rate, a.window, mix64(a.seed));
    }
    if (!a.topology.empty()) inst = inst->with_topology(parse_topology(a.topology));

    Json echo = {{"kind", a.kind}, {"n", a.n},         {"d", a.d},         {"window", a.window},
                 {"rate", a.rate}, {"seed", a.seed},   {"alpha", a.alpha}, {"beta", a.beta},
                 {"eps", a.eps},   {"k", a.k},         {"theta-c", a.theta_c}, {"topology", a.topology}};
    Json doc = header("gen", std::move(echo));
    doc.update(to_json(*inst));
    emit(a.out, doc);
    std::cerr << "generated " << inst->size() << " jobs\n";
  };
  sub->callback([&run] { run(); });
}

// ---- run ---------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::string input;
  std::string policy = "pb";
  double gamma = 0.0;
  std::string price = "potential";
  double period = 30.0;
  std::string table;
  std::vector<std::string> history;
  int cells = 100;
  int level = 4;
  std::string negative = "default";
  std::string tiebreak = "lowest";
  std::string trace;
  bool timing = false;
  std::string out;
};

void setup_run(CLI::App& app, RunArgs& a, std::function<void()>& run) {
  auto* sub = app.add_subcommand("run", "Simulate one policy on an instance");
  sub->add_option("--config", a.config, "JSON file with defaults for these flags");
  std::vector<CLI::Option*> opts = {
      sub->add_option("-i,--input", a.input, "instance file"),
      sub->add_option("--policy", a.policy, "pb | gre | hd | ad | bat | rbat | prbat"),
      sub->add_option("--gamma", a.gamma, "batching price adjustment in [0, 1]"),
      sub->add_option("--price", a.price, "adjustment prices: potential | hd | ad"),
      sub->add_option("--period", a.period, "prbat epoch length in seconds"),
      sub->add_option("--table", a.table, "price table file for ad prices"),
      sub->add_option("--history", a.history, "instance files to build ad prices from"),
      sub->add_option("--cells", a.cells, "1D cells of a price table built from --history"),
      sub->add_option("--level", a.level, "2D grid level of a price table built from --history"),
      sub->add_option("--negative", a.negative, "default | allow | deny negative-reward matches"),
      sub->add_option("--tiebreak", a.tiebreak, "lowest | highest index among equal indices"),
  };
  sub->add_option("--trace", a.trace, "write the decision trace as JSON lines");
  sub->add_flag("--timing", a.timing, "include wall time in the output");
  sub->add_option("-o,--output", a.out, "output path (default stdout)");
  run = [&a, opts] {
    Json cfg = a.config.empty() ? Json::object() : read_json_file(a.config);
    from_config(opts[0], cfg, a.input);
    from_config(opts[1], cfg, a.policy);
    from_config(opts[2], cfg, a.gamma);
    from_config(opts[3], cfg, a.price);
    from_config(opts[4], cfg, a.period);
    from_config(opts[5], cfg, a.table);
    from_config(opts[6], cfg, a.history);
    from_config(opts[7], cfg, a.cells);
    from_config(opts[8], cfg, a.level);
    from_config(opts[9], cfg, a.negative);
    from_config(opts[10], cfg, a.tiebreak);
    if (a.input.empty()) throw UsageError("run needs --input");

    SimOptions sim;
    if (a.negative == "allow") {
      sim.negative_match_allowed = true;
    } else if (a.negative == "deny") {
      sim.negative_match_allowed = false;
    } else if (a.negative != "default") {
      throw UsageError("--negative must be default, allow or deny");
    }
    if (a.tiebreak == "highest") {
      sim.tiebreak = TieBreak::HighestIndex;
    } else if (a.tiebreak != "lowest") {
      throw UsageError("--tiebreak must be lowest or highest");
    }
    sim.record_trace = !a.trace.empty();

    const auto inst = instance_from_json(read_json_file(a.input));
    std::shared_ptr<const PriceTable> cached;
    auto table = [&]() {
      if (!cached) cached = load_or_build_table(a.table, a.history, inst, a.cells, a.level);
      return cached;
    };
    const auto policy = make_policy(a.policy, a.gamma, a.price, a.period, inst, table);
    const auto t0 = std::chrono::steady_clock::now();
    const auto outcome = simulate(inst, *policy, sim);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto opt = hindsight_opt(inst);
    const auto m = run_metrics(inst, outcome, opt.value, secs);

    if (!a.trace.empty()) {
      std::ofstream tr(a.trace);
      if (!tr) throw DataError("cannot write " + a.trace);
      write_trace_jsonl(tr, outcome);
    }
    Json echo = {{"input", a.input},   {"policy", a.policy},     {"gamma", a.gamma},
                 {"price", a.price},   {"period", a.period},     {"table", a.table},
                 {"history", a.history}, {"cells", a.cells},     {"level", a.level},
                 {"negative", a.negative}, {"tiebreak", a.tiebreak}, {"timing", a.timing}};
    Json doc = header("run", std::move(echo));
    doc["policy"] = policy->name();
    doc["metrics"] = to_json(m, a.timing);
    Json pairs = Json::array();
    for (const auto& p : outcome.pairs) pairs.push_back(Json::array({p.a + 1, p.b + 1, p.reward}));
    doc["pairs"] = std::move(pairs);
    Json solos = Json::array();
    for (JobIndex j : outcome.solos) solos.push_back(j + 1);
    doc["solos"] = std::move(solos);
    emit(a.out, doc);
  };
  sub->callback([&run] { run(); });
}

// ---- sweep -------------------------------------------------------------------

struct SweepArgs {
  std::string config;
  std::string generator;
  int n = 0;
  std::vector<int> densities;
  std::vector<double> windows;
  double rate = 0.0;
  int seeds = 0;
  std::uint64_t base_seed = 0;
  std::vector<std::string> policies;
  int ad_history = 0;
  int ad_cells = 0;
  int ad_level = 0;
  int jobs = 1;
  bool timing = false;
  std::string csv;
  std::string json;
};

void setup_sweep(CLI::App& app, SweepArgs& a, std::function<void()>& run) {
  auto* sub = app.add_subcommand("sweep", "Run a policy comparison over densities or windows");
  sub->add_option("--config", a.config, "JSON sweep configuration");
  auto* o_gen = sub->add_option("--generator", a.generator, "uniform1d | beta1d | 2d-common | 2d-hetero");
  auto* o_n = sub->add_option("--n", a.n, "jobs per instance");
  auto* o_d = sub->add_option("--densities", a.densities, "count windows d");
  auto* o_w = sub->add_option("--windows", a.windows, "time windows in seconds");
  auto* o_rate = sub->add_option("--rate", a.rate, "arrivals per second for time windows");
  auto* o_seeds = sub->add_option("--seeds", a.seeds, "instances per cell");
  auto* o_base = sub->add_option("--base-seed", a.base_seed, "base seed (default POOLING_LAB_SEED or 1)");
  auto* o_pol = sub->add_option("--policies", a.policies, "policy specs such as pb or bat:gamma=0.5,price=hd");
  auto* o_hist = sub->add_option("--ad-history", a.ad_history, "history instances for ad prices");
  auto* o_cells = sub->add_option("--ad-cells", a.ad_cells, "1D cells of ad price tables");
  auto* o_level = sub->add_option("--ad-level", a.ad_level, "2D grid level of ad price tables");
  auto* o_jobs = sub->add_option("--jobs", a.jobs, "worker threads");
  sub->add_flag("--timing", a.timing, "also report wall time (not reproducible)");
  sub->add_option("--csv", a.csv, "CSV output path (default stdout)");
  sub->add_option("--json", a.json, "JSON output path");
  run = [=, &a] {
    SweepConfig base;
    base.base_seed = default_seed();
    SweepConfig cfg = a.config.empty() ? base : sweep_config_from_json(read_json_file(a.config), base);
    if (o_gen->count()) cfg.generator = a.generator;
    if (o_n->count()) cfg.n = a.n;
    if (o_d->count()) {
      cfg.densities = a.densities;
      if (!o_w->count()) cfg.windows.clear();
    }
    if (o_w->count()) {
      cfg.windows = a.windows;
      if (!o_d->count()) cfg.densities.clear();
    }
    if (o_rate->count()) cfg.rate = a.rate;
    if (o_seeds->count()) cfg.seeds = a.seeds;
    if (o_base->count()) cfg.base_seed = a.base_seed;
    if (o_pol->count()) {
      cfg.policies.clear();
      for (const auto& p : a.policies) cfg.policies.push_back(parse_policy_spec(p));
    }
    if (o_hist->count()) cfg.ad_history = a.ad_history;
    if (o_cells->count()) cfg.ad_cells = a.ad_cells;
    if (o_level->count()) cfg.ad_level = a.ad_level;
    if (o_jobs->count()) cfg.jobs = a.jobs;
    if (a.timing) cfg.timing = true;
    if (cfg.policies.empty()) cfg.policies = {parse_policy_spec("pb"), parse_policy_spec("gre")};

    std::cerr << "sweep: " << cfg.policies.size() << " policies, "
              << cfg.densities.size() + cfg.windows.size() << " cells, " << cfg.seeds << " seeds\n";
    const auto report = sweep(cfg);
    for (const auto& d : report.diagnostics) std::cerr << "failed: " << d << '\n';
    if (a.csv.empty() || a.csv == "-") {
      write_sweep_csv(std::cout, report);
    } else {
      std::ofstream os(a.csv);
      if (!os) throw DataError("cannot write " + a.csv);
      write_sweep_csv(os, report);
    }
    if (!a.json.empty()) write_json_file(a.json, to_json(report));
  };
  sub->callback([&run] { run(); });
}

// ---- duals -------------------------------------------------------------------

struct DualsArgs {
  std::vector<std::string> inputs;
  bool table = false;
  int cells = 100;
  int level = 4;
  std::string out;
};

void setup_duals(CLI::App& app, DualsArgs& a, std::function<void()>& run) {
  auto* sub = app.add_subcommand("duals", "Hindsight LP duals, or a price table over several instances");
  sub->add_option("-i,--input", a.inputs, "instance file(s)")->required();
  sub->add_flag("--table", a.table, "average the duals per cell into a price table");
  sub->add_option("--cells", a.cells, "1D cells of the price table");
  sub->add_option("--level", a.level, "2D grid level of the price table");
  sub->add_option("-o,--output", a.out, "output path (default stdout)");
  run = [&a] {
    std::vector<Instance> insts;
    for (const auto& p : a.inputs) insts.push_back(instance_from_json(read_json_file(p)));
    Json echo = {{"input", a.inputs}, {"table", a.table}, {"cells", a.cells}, {"level", a.level}};
    Json doc = header("duals", std::move(echo));
    if (a.table) {
      const CellScheme scheme = is_planar(insts.front().topology()) ? CellScheme{TwoDGrid{a.level}}
                                                                    : CellScheme{OneDUniform{a.cells}};
      doc["price_table"] = to_json(build_price_table(insts, scheme));
    } else {
      if (insts.size() != 1) throw UsageError("give one instance, or --table for several");
      const auto es = feasible_edges(insts.front());
      doc["lp"] = to_json(lp_relaxation(es), es);
      doc["opt"] = to_json(hindsight_opt(insts.front()));
    }
    emit(a.out, doc);
  };
  sub->callback([&run] { run(); });
}

// ---- tune-gamma ----------------------------------------------------------------

struct TuneArgs {
  std::string config;
  std::vector<std::string> train;
  std::string generator = "uniform1d";
  int n = 1000;
  int d = 10;
  int seeds = 10;
  std::uint64_t seed = 0;
  std::string policy = "rbat";
  std::string price = "potential";
  double period = 30.0;
  std::string out;
};

void setup_tune(CLI::App& app, TuneArgs& a, std::function<void()>& run) {
  auto* sub = app.add_subcommand("tune-gamma", "Pick the batching price adjustment on training instances");
  sub->add_option("--config", a.config, "JSON file with defaults for these flags");
  std::vector<CLI::Option*> opts = {
      sub->add_option("--train", a.train, "training instance files (else generated)"),
      sub->add_option("--generator", a.generator, "generator for training instances"),
      sub->add_option("--n", a.n, "jobs per generated instance"),
      sub->add_option("--d", a.d, "count window of generated instances"),
      sub->add_option("--seeds", a.seeds, "number of generated instances"),
      sub->add_option("--seed", a.seed, "base seed (default POOLING_LAB_SEED or 1)"),
      sub->add_option("--policy", a.policy, "bat | rbat | prbat"),
      sub->add_option("--price", a.price, "potential | hd"),
      sub->add_option("--period", a.period, "prbat epoch length"),
  };
  sub->add_option("-o,--output", a.out, "output path (default stdout)");
  run = [&a, opts] {
    Json cfg = a.config.empty() ? Json::object() : read_json_file(a.config);
    from_config(opts[0], cfg, a.train);
    from_config(opts[1], cfg, a.generator);
    from_config(opts[2], cfg, a.n);
    from_config(opts[3], cfg, a.d);
    from_config(opts[4], cfg, a.seeds);
    if (opts[5]->count() == 0 && !cfg.contains("seed")) a.seed = default_seed();
    from_config(opts[5], cfg, a.seed);
    from_config(opts[6], cfg, a.policy);
    from_config(opts[7], cfg, a.price);
    from_config(opts[8], cfg, a.period);
    if (a.policy != "bat" && a.policy != "rbat" && a.policy != "prbat") {
      throw UsageError("--policy must be bat, rbat or prbat");
    }
    if (a.price == "ad") throw UsageError("tune-gamma supports potential and hd prices");

    std::vector<Instance> train;
    if (!a.train.empty()) {
      for (const auto& p : a.train) train.push_back(instance_from_json(read_json_file(p)));
    } else {
      SweepConfig sc;
      sc.generator = a.generator;
      sc.n = a.n;
      sc.densities = {a.d};
      sc.base_seed = a.seed;
      for (int s = 0; s < a.seeds; ++s) train.push_back(sweep_instance(sc, a.d, s));
    }
    if (train.empty()) throw UsageError("no training instances");
    const PolicyFactory factory = [&a](const Instance& inst, double g) {
      return make_policy(a.policy, g, a.price, a.period, inst, [] () -> std::shared_ptr<const PriceTable> {
        throw UsageError("ad prices are not available here");
      });
    };
    const auto grid = default_gamma_grid();
    const auto tuned = tune_gamma(train, factory, grid);
    Json echo = {{"train", a.train}, {"generator", a.generator}, {"n", a.n},     {"d", a.d},
                 {"seeds", a.seeds}, {"seed", a.seed},           {"policy", a.policy},
                 {"price", a.price}, {"period", a.period}};
    Json doc = header("tune-gamma", std::move(echo));
    doc["gamma"] = tuned.gamma;
    Json scores = Json::array();
    for (const auto& s : tuned.scores) scores.push_back({{"gamma", s.gamma}, {"mean_reward", s.mean_reward}});
    doc["scores"] = std::move(scores);
    emit(a.out, doc);
  };
  sub->callback([&run] { run(); });
}

// ---- verify ------------------------------------------------------------------

struct VerifyArgs {
  bool all = false;
  std::vector<std::string> checks;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

int verify_status = 0;

void setup_verify(CLI::App& app, VerifyArgs& a, std::function<void()>& run) {
  auto* sub = app.add_subcommand("verify", "Run the bound and identity checks");
  sub->add_flag("--all", a.all, "run every check set");
  sub->add_option("--check", a.checks, "check set name (repeatable)");
  auto* o_seed = sub->add_option("--seed", a.seed, "seed of the random instances");
  sub->add_option("-o,--output", a.out, "output path (default stdout)");
  run = [&a, o_seed] {
    if (o_seed->count() == 0) a.seed = default_seed();
    std::vector<std::string> names = a.all ? check_names() : a.checks;
    if (names.empty()) throw UsageError("give --all or at least one --check; sets: laminar offline-pb online-pb lower-bounds ml-mg concentration remarks");
    Json results = Json::array();
    std::vector<BoundCheck> every;
    for (const auto& name : names) {
      std::cerr << "verify: " << name << '\n';
      const auto checks = run_check(name, a.seed);
      for (const auto& c : checks) {
        results.push_back(to_json(c));
        every.push_back(c);
        if (!c.holds && !c.report_only) {
          std::cerr << "FAIL " << c.name << " [" << c.instance << "] observed " << c.observed << " bound "
                    << c.bound << '\n';
        }
      }
    }
    Json doc = header("verify", {{"checks", names}, {"seed", a.seed}});
    doc["pass"] = all_hold(every);
    doc["results"] = std::move(results);
    emit(a.out, doc);
    verify_status = all_hold(every) ? 0 : kExitChecksFailed;
  };
  sub->callback([&run] { run(); });
}

// ---- ingest ------------------------------------------------------------------

struct IngestArgs {
  std::string csv;
  double window = 0.0;
  std::string projection = "auto";
  bool strict = false;
  std::string out;
};

void setup_ingest(CLI::App& app, IngestArgs& a, std::function<void()>& run) {
  auto* sub = app.add_subcommand("ingest", "Convert an order CSV into an instance file");
  sub->add_option("csv", a.csv, "order file")->required();
  sub->add_option("--window", a.window, "time window in seconds")->required();
  sub->add_option("--projection", a.projection, "auto | identity | equirectangular");
  sub->add_flag("--strict", a.strict, "fail on any rejected row");
  sub->add_option("-o,--output", a.out, "output path (default stdout)");
  run = [&a] {
    if (!(a.window > 0.0)) throw UsageError("--window must be positive");
    PlanarProjection proj = PlanarProjection::Auto;
    if (a.projection == "identity") {
      proj = PlanarProjection::Identity;
    } else if (a.projection == "equirectangular") {
      proj = PlanarProjection::Equirectangular;
    } else if (a.projection != "auto") {
      throw UsageError("--projection must be auto, identity or equirectangular");
    }
    const auto res = ingest_orders_csv(a.csv, a.window, proj, a.strict);
    for (const auto& r : res.rejected) std::cerr << a.csv << ":" << r.line << ": skipped, " << r.reason << '\n';
    Json echo = {{"csv", a.csv}, {"window", a.window}, {"projection", a.projection}, {"strict", a.strict}};
    Json doc = header("ingest", std::move(echo));
    doc["rejected_rows"] = res.rejected.size();
    doc.update(to_json(res.instance));
    emit(a.out, doc);
    std::cerr << "ingested " << res.instance.size() << " orders, rejected " << res.rejected.size() << '\n';
  };
  sub->callback([&run] { run(); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pooling_lab: dynamic delivery pooling experiments"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GenArgs gen;
  RunArgs runa;
  SweepArgs sw;
  DualsArgs du;
  TuneArgs tu;
  VerifyArgs ve;
  IngestArgs in;
  std::function<void()> f_gen, f_run, f_sweep, f_duals, f_tune, f_verify, f_ingest;
  setup_gen(app, gen, f_gen);
  setup_run(app, runa, f_run);
  setup_sweep(app, sw, f_sweep);
  setup_duals(app, du, f_duals);
  setup_tune(app, tu, f_tune);
  setup_verify(app, ve, f_verify);
  setup_ingest(app, in, f_ingest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << " (primal " << e.primal() << ", bound " << e.bound() << ")\n";
    return kExitNumeric;
  } catch (const SimplexIterationLimit& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const IngestError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    for (const auto& r : e.rows()) std::cerr << "  line " << r.line << ": " << r.reason << '\n';
    return kExitData;
  } catch (const ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return verify_status;
}
