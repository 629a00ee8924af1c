// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance 3 11       run the listed ones
//
// Exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "pooling/io.hpp"
#include "pooling/metrics.hpp"
#include "pooling/offline.hpp"
#include "pooling/policies.hpp"
#include "pooling/rng.hpp"
#include "pooling/verify.hpp"

using namespace pooling;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Instance random_1d(Rng& rng, int n, Topology top, std::optional<Criticality> crit) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return Instance::from_values(v, top, crit);
}

/// Random instance over all four topologies with a random count window.
Instance random_mixed(Rng& rng, int n, int which) {
  const int d = 1 + static_cast<int>(rng.uniform() * n);
  const std::uint64_t seed = rng.next_u64();
  switch (which % 4) {
    case 0: return random_1d(rng, n, Topology::MinCommonOrigin, CountWindow{d});
    case 1: return random_1d(rng, n, Topology::Proximity, CountWindow{d});
    case 2: return random_1d(rng, n, Topology::Separation, CountWindow{d});
    default: return gen_2d_heterogeneous(n, seed, CountWindow{d});
  }
}

// ---- 1 -----------------------------------------------------------------------

Verdict oracle_equivalence() {
  Rng rng(101);
  double worst = 0.0;
  int bad = 0;
  const int cases = 600;
  for (int i = 0; i < cases; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform() * 10);
    const auto inst = random_mixed(rng, n, i);
    const auto es = feasible_edges(inst);
    const double blossom = opt_matching(es).value;
    const double brute = oracle::brute_force_matching(es);
    const double gap = std::abs(blossom - brute);
    worst = std::max(worst, gap);
    if (gap > 1e-9) ++bad;
  }
  return {bad == 0, fmt("%g instances, %g mismatches, max |diff| %.2e", cases, bad, worst)};
}

// ---- 2 -----------------------------------------------------------------------

Verdict duality() {
  Rng rng(202);
  const int cases = 200;
  double worst_gap = 0.0;
  double worst_ip_excess = -1e300;
  int potential_violations = 0;
  int bad = 0;
  for (int i = 0; i < cases; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform() * 199);
    const auto inst = random_mixed(rng, n, i);
    const auto es = feasible_edges(inst);
    const auto lp = lp_relaxation(es);
    const double ip = opt_matching(es).value;
    const double gap = std::abs(lp.objective - lp.dual_objective);
    worst_gap = std::max(worst_gap, gap);
    worst_ip_excess = std::max(worst_ip_excess, ip - lp.objective);
    if (gap > 1e-6 || ip > lp.objective + 1e-9) ++bad;
    for (const auto& e : es.edges) {
      const double pj = potential(inst.topology(), inst.type(e.j));
      const double pk = potential(inst.topology(), inst.type(e.k));
      if (pj < 0.0 || pk < 0.0 || pj + pk < e.w - 1e-12) {
        ++potential_violations;
        break;
      }
    }
  }
  return {bad == 0 && potential_violations == 0,
          fmt("%g instances, max |primal-dual| %.2e, max IP-LP %.2e, potential infeasible on %g",
              cases, worst_gap, worst_ip_excess, potential_violations)};
}

// ---- 3 -----------------------------------------------------------------------

Verdict offline_pb_bounds() {
  int failed = 0;
  int laminar_bad = 0;
  double worst_slack = 1e300;
  for (int s = 0; s < 1000; ++s) {
    const int n = s % 2 ? 1000 : 100;
    const auto inst = gen_uniform_1d(n, stream_seed(303, s));
    const auto checks = check_offline_pb_bound(inst);
    if (!all_hold(checks)) ++failed;
    for (const auto& c : checks) {
      if (!c.report_only) worst_slack = std::min(worst_slack, c.bound - c.observed);
    }
    const auto fam = check_laminar(inst, simulate(inst, make_pb(Topology::MinCommonOrigin)));
    if (!fam.laminar || !fam.depth_bound_holds) ++laminar_bad;
  }
  return {failed == 0 && laminar_bad == 0,
          fmt("1000 instances, %g bound failures, %g laminar/depth failures, min slack %.4f", failed,
              laminar_bad, worst_slack)};
}

// ---- 4 -----------------------------------------------------------------------

Verdict online_pb_bounds() {
  int failed = 0;
  double worst_slack = 1e300;
  int count = 0;
  for (int d : {5, 10, 20, 30}) {
    for (int s = 0; s < 100; ++s) {
      const auto inst = gen_uniform_1d(1000, stream_seed(404 + d, s), CountWindow{d});
      const auto checks = check_online_pb_bound(inst);
      ++count;
      if (!all_hold(checks)) ++failed;
      for (const auto& c : checks) worst_slack = std::min(worst_slack, c.bound - c.observed);
    }
  }
  return {failed == 0, fmt("%g instances, %g failures, min slack %.4f", count, failed, worst_slack)};
}

// ---- 5 -----------------------------------------------------------------------

Verdict lower_bounds() {
  const auto checks = check_lower_bound_constructions();
  int failed = 0;
  std::string names;
  for (const auto& c : checks) {
    if (!c.holds && !c.report_only) {
      ++failed;
      names += " " + c.name + "[" + c.instance + "]";
    }
  }
  return {failed == 0, fmt("%g checks, %g failed", static_cast<double>(checks.size()), failed) + names};
}

// ---- 6, 7, 9 share the uniform sweep -------------------------------------------

const std::vector<int> kDensities = {5, 10, 15, 20, 25, 30};

const SweepReport& uniform_sweep() {
  static const SweepReport report = [] {
    SweepConfig cfg;
    cfg.generator = "uniform1d";
    cfg.n = 1000;
    cfg.densities = kDensities;
    cfg.seeds = 100;
    cfg.base_seed = 606;
    for (const char* p : {"pb", "gre", "bat", "rbat"}) cfg.policies.push_back(parse_policy_spec(p));
    return sweep(cfg);
  }();
  return report;
}

Verdict uniform_ratio_and_regret() {
  const auto& r = uniform_sweep();
  bool ok = r.diagnostics.empty();
  std::string detail;
  double min_ratio = 1e300;
  std::vector<double> regret;
  for (int d : kDensities) {
    const double ratio = r.mean("pb", d, "ratio");
    min_ratio = std::min(min_ratio, ratio);
    regret.push_back(r.mean("pb", d, "regret"));
    const double gre = r.mean("gre", d, "regret");
    if (ratio < 0.94 || !(regret.back() < gre)) ok = false;
    detail += fmt(" d=%g:%.4f/%.3f/%.3f", d, ratio, regret.back(), gre);
  }
  int inversions = 0;
  bool small = true;
  for (std::size_t i = 1; i < regret.size(); ++i) {
    if (regret[i] > regret[i - 1]) {
      ++inversions;
      if (regret[i] > regret[i - 1] * 1.05) small = false;
    }
  }
  if (inversions > 1 || !small) ok = false;
  return {ok, fmt("min PB ratio %.4f, regret inversions %g", min_ratio, inversions) +
                  " (pb ratio/pb regret/gre regret)" + detail};
}

Verdict pb_vs_batching() {
  const auto& r = uniform_sweep();
  bool ok = r.diagnostics.empty();
  std::string detail;
  for (int d : kDensities) {
    const double pb = r.mean("pb", d, "ratio");
    const double bat = r.mean("bat", d, "ratio");
    const double rbat = r.mean("rbat", d, "ratio");
    if (pb < bat || pb < rbat - 0.002) ok = false;
    detail += fmt(" d=%g:%.4f/%.4f/%.4f", d, pb, bat, rbat);
  }
  return {ok, "pb/bat/rbat ratio" + detail};
}

Verdict saving_fraction_low_density() {
  SweepConfig cfg;
  cfg.n = 1000;
  cfg.densities = {5};
  cfg.base_seed = 606;
  double sum = 0.0;
  double hi = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto inst = sweep_instance(cfg, 5, s);
    const double f = *saving_fraction(inst, hindsight_opt(inst).value);
    sum += f;
    hi = std::max(hi, f);
  }
  const double mean = sum / seeds;
  return {mean >= 0.46 && hi <= 0.5, fmt("mean OPT saving fraction %.4f, max %.4f", mean, hi)};
}

// ---- 8 -----------------------------------------------------------------------

Verdict hetero_ordering() {
  SweepConfig cfg;
  cfg.generator = "2d-hetero";
  cfg.n = 1000;
  cfg.densities = kDensities;
  cfg.seeds = 50;
  cfg.base_seed = 808;
  for (const char* p : {"rbat", "pb", "gre"}) cfg.policies.push_back(parse_policy_spec(p));
  const auto r = sweep(cfg);
  bool ok = r.diagnostics.empty();
  std::string detail;
  for (int d : kDensities) {
    const double rbat = r.mean("rbat", d, "ratio");
    const double pb = r.mean("pb", d, "ratio");
    const double gre = r.mean("gre", d, "ratio");
    if (rbat < pb - 0.002 || pb < gre - 0.002) ok = false;
    detail += fmt(" d=%g:%.4f/%.4f/%.4f", d, rbat, pb, gre);
  }
  return {ok, "rbat/pb/gre ratio" + detail};
}

// ---- 10 ----------------------------------------------------------------------

Verdict marginal_identity() {
  Rng rng(1010);
  double worst_identity = 0.0;
  double worst_fast = 0.0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto inst = random_1d(rng, 50, Topology::MinCommonOrigin, std::nullopt);
    const auto c = check_ml_mg_identity(inst);
    worst_identity = std::max(worst_identity, c.observed);
    if (!c.holds) ++bad;
    const auto values = inst.values();
    const auto fast = marginals_sorted(values);
    for (const auto& m : fast) {
      const double ml = marginal_loss(inst, m.job, MarginalMethod::Definitional);
      const double mg = marginal_gain(inst, m.job, MarginalMethod::Definitional);
      worst_fast = std::max({worst_fast, std::abs(ml - m.ml), std::abs(mg - m.mg)});
    }
  }
  const bool ok = bad == 0 && worst_fast <= 1e-12;
  return {ok, fmt("100 instances, identity max error %.2e, fast path vs definitional max %.2e", worst_identity,
                  worst_fast)};
}

// ---- 11 ----------------------------------------------------------------------

Verdict concentration() {
  const auto rep = check_marginal_concentration(0.5, 1000, 10000, 1111);
  return {all_hold(rep.checks), fmt("mean ML %.5f (SE %.5f), mean MG %.5f, bias bound %.5f", rep.mean_ml,
                                    rep.se_ml, rep.mean_mg, rep.bias_bound)};
}

// ---- 12 ----------------------------------------------------------------------

bool same_outcome(const MatchingOutcome& a, const MatchingOutcome& b) {
  if (a.pairs.size() != b.pairs.size() || a.solos != b.solos) return false;
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    if (a.pairs[i].a != b.pairs[i].a || a.pairs[i].b != b.pairs[i].b) return false;
  }
  return true;
}

bool same_decisions(const MatchingOutcome& a, const MatchingOutcome& b) {
  if (a.trace.size() != b.trace.size()) return false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    if (to_json(a.trace[i]) != to_json(b.trace[i])) return false;
  }
  return same_outcome(a, b);
}

Verdict policy_equivalences() {
  Rng rng(1212);
  int pb_gre_diff = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform() * 300);
    const int d = 1 + static_cast<int>(rng.uniform() * 40);
    const auto inst = random_1d(rng, n, Topology::Proximity, CountWindow{d});
    const auto pb = simulate(inst, make_pb(Topology::Proximity));
    const auto gre = simulate(inst, make_gre(Topology::Proximity));
    if (!same_outcome(pb, gre)) ++pb_gre_diff;
  }
  int batch_diff = 0;
  SimOptions traced;
  traced.record_trace = true;
  for (int i = 0; i < 50; ++i) {
    const BatchMode mode = i % 3 == 0 ? BatchMode::Full : i % 3 == 1 ? BatchMode::Rolling : BatchMode::Periodic;
    const std::uint64_t seed = stream_seed(1213, i);
    Instance inst = gen_uniform_1d(200, seed, CountWindow{3 + i % 20});
    double period = 0.0;
    if (mode == BatchMode::Periodic) {
      inst = with_poisson_timestamps(inst, 1.0, 60.0, mix64(seed));
      period = 20.0;
    }
    const BatchPolicy plain(mode, inst.topology(), std::nullopt, period);
    const BatchPolicy zero(mode, inst.topology(), PriceAdjustment{PotentialPrice{}, 0.0}, period);
    if (!same_decisions(simulate(inst, plain, traced), simulate(inst, zero, traced))) ++batch_diff;
  }
  return {pb_gre_diff == 0 && batch_diff == 0,
          fmt("PB/GRE differ on %g of 100 proximity instances, gamma=0 batching differs on %g of 50",
              pb_gre_diff, batch_diff)};
}

// ---- 13 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Verdict cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("pooling_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string exe = POOLING_LAB_EXE;
  const std::string d = dir.string() + "/";
  {
    std::ofstream csv(d + "orders.csv");
    csv << "order_id,order_time,origin_lng,origin_lat,dest_lng,dest_lat\n";
    Rng rng(1313);
    for (int i = 0; i < 300; ++i) {
      csv << i << "," << 1714550000 + i * 7 << "," << 116.3 + 0.05 * rng.uniform() << "," << 39.9 + 0.05 * rng.uniform()
          << "," << 116.3 + 0.05 * rng.uniform() << "," << 39.9 + 0.05 * rng.uniform() << "\n";
    }
  }
  // Each command runs twice, writing to <name>.1 and <name>.2.
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen.json", "gen --kind uniform1d --n 300 --d 10 --seed 7 -o OUT"},
      {"gen2d.json", "gen --kind 2d-hetero --n 200 --window 60 --rate 1 --seed 3 -o OUT"},
      {"run.json", "run -i " + d + "gen.json.1 --policy pb -o OUT"},
      {"trace.jsonl", "run -i " + d + "gen.json.1 --policy rbat --gamma 0.5 --price hd --trace OUT -o " + d + "junk.json"},
      {"prbat.json", "run -i " + d + "gen2d.json.1 --policy prbat --period 30 -o OUT"},
      {"sweep.csv", "sweep --n 300 --densities 5 10 --seeds 8 --policies pb gre hd ad bat rbat --jobs 8 --csv OUT"},
      {"sweep.json", "sweep --n 300 --densities 5 10 --seeds 8 --policies pb gre hd ad bat rbat --jobs 8 --csv " + d + "junk.csv --json OUT"},
      {"sweep_t.csv", "sweep --generator 2d-hetero --n 200 --windows 30 60 --seeds 4 --policies pb rbat prbat:period=20 --jobs 8 --csv OUT"},
      {"duals.json", "duals -i " + d + "gen.json.1 -o OUT"},
      {"table.json", "duals -i " + d + "gen.json.1 " + d + "gen.json.2 --table -o OUT"},
      {"tune.json", "tune-gamma --n 200 --d 10 --seeds 3 --seed 5 -o OUT"},
      {"verify.json", "verify --check lower-bounds --check ml-mg --seed 9 -o OUT"},
      {"ingest.json", "ingest " + d + "orders.csv --window 180 -o OUT"},
  };
  int differ = 0;
  int errors = 0;
  std::string names;
  for (const auto& [name, args] : commands) {
    for (int rep = 1; rep <= 2; ++rep) {
      std::string a = args;
      a.replace(a.find("OUT"), 3, d + name + "." + std::to_string(rep));
      const std::string cmd = exe + " " + a + " 2>>" + d + "stderr.log";
      if (std::system(cmd.c_str()) != 0) {
        ++errors;
        names += " error:" + name;
      }
    }
    const std::string one = slurp(d + name + ".1");
    if (one.empty() || one != slurp(d + name + ".2")) {
      ++differ;
      names += " differ:" + name;
    }
  }
  // Thread count must not change a sweep.
  const std::string serial = d + "sweep_serial.csv";
  const std::string cmd = exe + " sweep --n 300 --densities 5 10 --seeds 8 --policies pb gre hd ad bat rbat --jobs 1 --csv " +
                          serial + " 2>>" + d + "stderr.log";
  if (std::system(cmd.c_str()) != 0 || slurp(serial) != slurp(d + "sweep.csv.1")) {
    ++differ;
    names += " differ:jobs1-vs-jobs8";
  }
  const bool ok = differ == 0 && errors == 0;
  if (ok) fs::remove_all(dir);
  return {ok, fmt("%g commands twice each plus a serial sweep, %g differ, %g errors",
                  static_cast<double>(commands.size()), differ, errors) + names};
}

struct Criterion {
  int id;
  const char* what;
  std::function<Verdict()> run;
  double budget_seconds = 0.0;  // 0: no runtime requirement
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "blossom matches brute force on random small instances", oracle_equivalence, 10},
      {2, "LP strong duality, IP <= LP, potentials dual-feasible", duality, 60},
      {3, "offline potential-greedy regret, distance and laminar structure", offline_pb_bounds},
      {4, "online potential-greedy regret and per-batch distance", online_pb_bounds},
      {5, "worst-case constructions reach their regret lower bounds", lower_bounds, 60},
      {6, "uniform 1D sweep: PB ratio >= 0.94, beats GRE, regret trend", uniform_ratio_and_regret},
      {7, "uniform 1D sweep: PB ratio vs BAT and RBAT", pb_vs_batching},
      {8, "2D heterogeneous sweep: RBAT >= PB >= GRE", hetero_ordering},
      {9, "uniform 1D d=5: OPT saving fraction", saving_fraction_low_density},
      {10, "ML/MG identity and closed-form marginals", marginal_identity},
      {11, "Monte-Carlo concentration of ML and MG", concentration, 60},
      {12, "PB = GRE on proximity, gamma=0 batching = plain batching", policy_equivalences},
      {13, "CLI outputs are byte-identical on rerun", cli_determinism},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0.0 && secs > c.budget_seconds) {
      v.pass = false;
      v.detail += fmt(" (over the %g s budget)", c.budget_seconds);
    }
    if (!v.pass) ++failures;
    std::printf("%s  criterion %2d  %s  [%.1f s]  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.what, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
