#include "pooling/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "pooling/policies.hpp"
#include "pooling/rng.hpp"

namespace pooling {

namespace {

std::string describe(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

void require_mco(const Instance& inst, const char* what) {
  if (inst.topology() != Topology::MinCommonOrigin || !inst.uses_count_window()) {
    throw std::invalid_argument(std::string(what) + " needs a min-common-origin count-window instance");
  }
}

double regret_of(const Instance& inst, const Policy& policy, const SimOptions& opts = {}) {
  return hindsight_opt(inst).value - simulate(inst, policy, opts).total_reward;
}

}  // namespace

BoundCheck make_check(std::string name, std::string instance, double observed, double bound,
                      bool upper, bool report_only) {
  BoundCheck c;
  c.name = std::move(name);
  c.instance = std::move(instance);
  c.observed = observed;
  c.bound = bound;
  c.upper = upper;
  c.report_only = report_only;
  c.holds = upper ? observed <= bound + kCheckTolerance : observed >= bound - kCheckTolerance;
  return c;
}

Json to_json(const BoundCheck& check) {
  Json out = {{"check", check.name},
              {"instance", check.instance},
              {"observed", check.observed},
              {"bound", check.bound},
              {"kind", check.upper ? "upper" : "lower"},
              {"pass", check.holds}};
  if (check.report_only) out["report_only"] = true;
  return out;
}

bool all_hold(const std::vector<BoundCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const BoundCheck& c) { return c.holds || c.report_only; });
}

// ---- laminar family ---------------------------------------------------------

IntervalFamily check_laminar(const Instance& inst, const MatchingOutcome& outcome) {
  require_mco(inst, "check_laminar");
  IntervalFamily fam;
  for (const auto& p : outcome.pairs) {
    if (p.critical < 0) continue;
    const double a = inst.value(p.a);
    const double b = inst.value(p.b);
    fam.jobs.push_back(p.critical);
    fam.intervals.emplace_back(std::min(a, b), std::max(a, b));
  }
  const auto& iv = fam.intervals;
  const std::size_t m = iv.size();
  fam.depth.assign(m, 0);
  auto inside = [&](std::size_t i, std::size_t k) {
    return iv[k].first <= iv[i].first && iv[i].second <= iv[k].second;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      if (inside(i, k)) ++fam.depth[i];
      if (k <= i) continue;
      // open intervals: touching endpoints count as disjoint
      const bool disjoint = iv[i].second <= iv[k].first || iv[k].second <= iv[i].first;
      if (!disjoint && !inside(i, k) && !inside(k, i)) {
        fam.laminar = false;
        ++fam.violations;
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double len = iv[i].second - iv[i].first;
    if (len > std::ldexp(1.0, 1 - fam.depth[i]) + kCheckTolerance) {
      fam.depth_bound_holds = false;
      ++fam.violations;
    }
  }
  return fam;
}

// ---- upper bounds ---------------------------------------------------------------

std::vector<BoundCheck> check_offline_pb_bound(const Instance& inst) {
  require_mco(inst, "check_offline_pb_bound");
  const Instance offline = inst.is_offline() ? inst : inst.with_criticality(offline_window(inst.size()));
  const int n = offline.size();
  const auto outcome = simulate(offline, make_pb(Topology::MinCommonOrigin));
  const double regret = hindsight_opt(offline).value - outcome.total_reward;
  double dist = 0.0;
  for (const auto& p : outcome.pairs) dist += std::abs(offline.value(p.a) - offline.value(p.b));
  const double lg = std::log2(n / 2.0 + 1.0);
  const auto label = describe("offline n=%g", n);
  return {make_check("offline-pb-regret", label, regret, 1.0 + lg / 2.0),
          make_check("offline-pb-distance", label, dist, lg),
          make_check("offline-pb-regret-half", label, regret, 0.5 + lg / 2.0, true, true)};
}

std::vector<BoundCheck> check_online_pb_bound(const Instance& inst) {
  require_mco(inst, "check_online_pb_bound");
  if (inst.effective_window() >= inst.size()) return check_offline_pb_bound(inst);
  const int n = inst.size();
  const int d = inst.effective_window();
  const auto outcome = simulate(inst, make_pb(Topology::MinCommonOrigin));
  const double regret = hindsight_opt(inst).value - outcome.total_reward;

  const auto part = batches(inst);
  std::vector<int> batch_of(n);
  for (std::size_t t = 0; t < part.batches.size(); ++t) {
    for (JobIndex j : part.batches[t]) batch_of[j] = static_cast<int>(t);
  }
  std::vector<double> per_batch(part.batches.size(), 0.0);
  for (const auto& p : outcome.pairs) {
    if (p.critical < 0) continue;
    per_batch[batch_of[p.critical]] += std::abs(inst.value(p.a) - inst.value(p.b));
  }
  const double worst = per_batch.empty() ? 0.0 : *std::max_element(per_batch.begin(), per_batch.end());
  const double lg = std::log2(d + 2.0);
  const auto label = describe("online n=%g d=%g", n, d);
  return {make_check("online-pb-regret", label, regret,
                     0.5 + (n / (d + 1.0) + 1.0) * (1.0 + lg) / 2.0),
          make_check("online-pb-batch-distance", label, worst, 1.0 + lg)};
}

// ---- worst-case constructions ---------------------------------------------------------

std::vector<BoundCheck> check_lower_bound_constructions() {
  std::vector<BoundCheck> out;
  const auto gre_mco = make_gre(Topology::MinCommonOrigin);
  const auto pb_mco = make_pb(Topology::MinCommonOrigin);
  const auto gre_prox = make_gre(Topology::Proximity);
  const auto pb_prox = make_pb(Topology::Proximity);
  const auto gre_sep = make_gre(Topology::Separation);
  const auto pb_sep = make_pb(Topology::Separation);

  for (const auto& [n, eps] : std::vector<std::pair<int, double>>{{4, 0.1}, {32, 0.05}, {64, 0.1}}) {
    const auto inst = adversarial_gre_offline(n, eps);
    out.push_back(make_check("greedy-offline-lower", describe("n=%g eps=%g", n, eps),
                             regret_of(inst, gre_mco), (1.0 - 2.0 * eps) * n / 4.0, false));
  }

  for (int k = 0; k <= 5; ++k) {
    const auto inst = adversarial_pb_offline(k);
    const int n = inst.size();
    const double r = regret_of(inst, pb_mco);
    const auto label = describe("k=%g n=%g", k, n);
    out.push_back(make_check("pb-offline-lower", label, r, (std::log2(n + 4.0) - 3.0) / 4.0, false));
    out.push_back(make_check("pb-offline-upper", label, r, 1.0 + std::log2(n / 2.0 + 1.0) / 2.0));

    // Same values under the proximity reward, where both greedy rules coincide.
    const auto prox = inst.with_topology(Topology::Proximity);
    const double lower = (std::log2(n + 4.0) - 3.0) / 2.0;
    out.push_back(make_check("proximity-offline-lower-gre", label, regret_of(prox, gre_prox), lower, false));
    out.push_back(make_check("proximity-offline-lower-pb", label, regret_of(prox, pb_prox), lower, false));
  }

  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{8, 3}, {64, 7}, {160, 15}}) {
    const double eps = 0.1;
    const auto inst = adversarial_gre_online(n, d, eps);
    out.push_back(make_check("greedy-online-lower", describe("n=%g d=%g eps=%g", n, d, eps),
                             regret_of(inst, gre_mco), (1.0 - 2.0 * eps) * n / 4.0, false));
  }

  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{32, 3}, {96, 11}, {224, 27}, {240, 59}}) {
    const auto inst = adversarial_pb_online(n, d);
    const auto label = describe("n=%g d=%g", n, d);
    const double scale = n / (3.0 * (d + 1.0)) * (std::log2(d + 5.0) - 3.0);
    out.push_back(make_check("pb-online-lower", label, regret_of(inst, pb_mco), scale / 4.0, false));
    const auto prox = inst.with_topology(Topology::Proximity);
    const double r_prox = regret_of(prox, pb_prox);
    out.push_back(make_check("proximity-online-lower-gre", label, regret_of(prox, gre_prox), scale / 2.0, false));
    out.push_back(make_check("proximity-online-lower-pb", label, r_prox, scale / 2.0, false));
    out.push_back(make_check("proximity-online-upper", label, r_prox,
                             0.5 + (n / (d + 1.0) + 1.0) * (1.0 + std::log2(d + 2.0))));
  }

  // Any index rule: both greedy rules cross over at theta_c = 1/2 under
  // separation. The construction assumes ties go against the policy.
  SimOptions against;
  against.tiebreak = TieBreak::HighestIndex;
  for (int n : {8, 64}) {
    const double tc = 0.5;
    const auto inst = adversarial_any_index_offline(n, tc);
    const auto label = describe("n=%g theta_c=%g", n, tc);
    out.push_back(make_check("any-index-lower-gre", label, regret_of(inst, gre_sep, against), n * tc / 2.0, false));
    out.push_back(make_check("any-index-lower-pb", label, regret_of(inst, pb_sep, against), n * tc / 2.0, false));
    out.push_back(make_check("any-index-opt", label, hindsight_opt(inst).value, (1.0 + tc) * n / 4.0, false));
  }

  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{8, 3}, {64, 7}, {160, 7}}) {
    const double eps = 0.1;
    const auto inst = adversarial_separation_online(n, d, eps);
    const auto label = describe("n=%g d=%g eps=%g", n, d, eps);
    const double lower = (1.0 - 2.0 * eps) * n / 8.0;
    const auto gre = simulate(inst, gre_sep);
    const double opt = hindsight_opt(inst).value;
    out.push_back(make_check("separation-online-lower-gre", label, opt - gre.total_reward, lower, false));
    out.push_back(make_check("separation-online-lower-pb", label, regret_of(inst, pb_sep), lower, false));
    // The exact greedy total of the construction, printed for comparison.
    out.push_back(make_check("separation-online-gre-total", label, gre.total_reward, 5.0 * n / 16.0, true, true));
  }

  // Random proximity instances against the proximity upper bound.
  for (int s = 0; s < 20; ++s) {
    const int n = 200;
    const int d = 5 + 5 * (s % 4);
    const auto inst = gen_uniform_1d(n, stream_seed(99, s), CountWindow{d}).with_topology(Topology::Proximity);
    out.push_back(make_check("proximity-online-upper", describe("uniform n=%g d=%g seed=%g", n, d, s),
                             regret_of(inst, pb_prox),
                             0.5 + (n / (d + 1.0) + 1.0) * (1.0 + std::log2(d + 2.0))));
  }
  return out;
}

// ---- marginal identities ------------------------------------------------------------

BoundCheck check_ml_mg_identity(const Instance& inst) {
  if (!is_offline_min_common_origin(inst)) {
    throw std::invalid_argument("check_ml_mg_identity needs an offline min-common-origin instance");
  }
  const auto rep = marginals_sorted(inst.values());
  double worst = 0.0;
  for (const auto& r : rep) {
    const double p = potential(Topology::MinCommonOrigin, inst.type(r.job));
    worst = std::max(worst, std::abs(p - (r.ml + r.mg) / 2.0));
  }
  BoundCheck c = make_check("ml-mg-identity", describe("n=%g", inst.size()), worst, 1e-12);
  c.holds = worst <= 1e-12;
  return c;
}

ConcentrationReport check_marginal_concentration(double theta1, int n, int samples, std::uint64_t seed) {
  if (n < 2 || samples < 2) throw std::invalid_argument("need n >= 2 and at least two samples");
  if (!(theta1 >= 0.0 && theta1 <= 1.0)) throw std::invalid_argument("theta1 must lie in [0, 1]");
  ConcentrationReport rep;
  rep.theta1 = theta1;
  rep.n = n;
  rep.samples = samples;
  rep.bias_bound = (1.0 - std::pow(1.0 - theta1, n)) / n;

  Rng rng(seed);
  std::vector<double> values(n);
  double sum_ml = 0.0, sum_ml2 = 0.0, sum_mg = 0.0, sum_mg2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    values[0] = theta1;
    for (int j = 1; j < n; ++j) values[j] = rng.uniform();
    const auto marg = marginals_sorted(values);
    const auto it = std::find_if(marg.begin(), marg.end(), [](const MarginalReport& r) { return r.job == 0; });
    sum_ml += it->ml;
    sum_ml2 += it->ml * it->ml;
    sum_mg += it->mg;
    sum_mg2 += it->mg * it->mg;
  }
  const double m = samples;
  rep.mean_ml = sum_ml / m;
  rep.var_ml = std::max(0.0, (sum_ml2 - m * rep.mean_ml * rep.mean_ml) / (m - 1.0));
  rep.se_ml = std::sqrt(rep.var_ml / m);
  rep.mean_mg = sum_mg / m;
  const double var_mg = std::max(0.0, (sum_mg2 - m * rep.mean_mg * rep.mean_mg) / (m - 1.0));
  rep.se_mg = std::sqrt(var_mg / m);

  const double p = theta1 / 2.0;
  const auto label = describe("theta1=%g n=%g samples=%g", theta1, n, samples);
  rep.checks.push_back(
      make_check("ml-concentration", label, std::abs(rep.mean_ml - p), rep.bias_bound + 3.0 * rep.se_ml));
  rep.checks.push_back(
      make_check("mg-concentration", label, std::abs(rep.mean_mg - p), rep.bias_bound + 3.0 * rep.se_mg));
  rep.checks.push_back(make_check("ml-variance", label, rep.var_ml, 10.0 / n));
  return rep;
}

BoundCheck check_remarks(const Instance& inst, const MatchingOutcome& outcome, const std::string& policy) {
  if (policy != "gre" && policy != "pb") throw std::invalid_argument("check_remarks takes gre or pb");
  require_mco(inst, "check_remarks");
  if (outcome.trace.empty()) throw std::invalid_argument("check_remarks needs a recorded trace");
  int violations = 0;
  for (const auto& ev : outcome.trace) {
    if (ev.kind != EventKind::Critical || !ev.decision) continue;
    const JobIndex j = ev.job;
    const double tj = inst.value(j);
    std::vector<JobIndex> others;
    for (JobIndex k : ev.available) {
      if (k != j) others.push_back(k);
    }
    const auto* match = std::get_if<MatchWith>(&*ev.decision);
    if (!match) {
      if (!others.empty()) ++violations;
      continue;
    }
    const double tk = inst.value(match->k);
    if (policy == "gre") {
      const bool any_higher =
          std::any_of(others.begin(), others.end(), [&](JobIndex k) { return inst.value(k) >= tj; });
      if (any_higher && !(tk >= tj)) ++violations;
    } else {
      double closest = std::numeric_limits<double>::infinity();
      for (JobIndex k : others) closest = std::min(closest, std::abs(tj - inst.value(k)));
      if (std::abs(tj - tk) > closest + 1e-12) ++violations;
    }
  }
  auto c = make_check("remark-" + policy, describe("n=%g", inst.size()), violations, 0.0);
  return c;
}

// ---- named check sets -------------------------------------------------------------

std::vector<std::string> check_names() {
  return {"laminar", "offline-pb", "online-pb", "lower-bounds", "ml-mg", "concentration", "remarks"};
}

std::vector<BoundCheck> run_check(const std::string& name, std::uint64_t seed) {
  std::vector<BoundCheck> out;
  auto append = [&](std::vector<BoundCheck> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  if (name == "laminar") {
    for (int s = 0; s < 50; ++s) {
      const auto inst = gen_uniform_1d(200, stream_seed(seed, s));
      const auto fam = check_laminar(inst, simulate(inst, make_pb(Topology::MinCommonOrigin)));
      out.push_back(make_check("laminar", describe("uniform n=200 seed=%g", s), fam.violations, 0.0));
    }
    out.push_back(make_check("laminar", "k=3 construction", check_laminar(adversarial_pb_offline(3),
        simulate(adversarial_pb_offline(3), make_pb(Topology::MinCommonOrigin))).violations, 0.0));
  } else if (name == "offline-pb") {
    for (int s = 0; s < 50; ++s) {
      append(check_offline_pb_bound(gen_uniform_1d(s % 2 ? 100 : 400, stream_seed(seed, s))));
    }
  } else if (name == "online-pb") {
    for (int s = 0; s < 40; ++s) {
      const int d = std::vector<int>{5, 10, 20, 30}[s % 4];
      append(check_online_pb_bound(gen_uniform_1d(500, stream_seed(seed, s), CountWindow{d})));
    }
  } else if (name == "lower-bounds") {
    append(check_lower_bound_constructions());
  } else if (name == "ml-mg") {
    for (int s = 0; s < 100; ++s) out.push_back(check_ml_mg_identity(gen_uniform_1d(50, stream_seed(seed, s))));
  } else if (name == "concentration") {
    append(check_marginal_concentration(0.5, 1000, 2000, seed).checks);
    append(check_marginal_concentration(0.0, 1000, 200, seed).checks);
  } else if (name == "remarks") {
    SimOptions opts;
    opts.record_trace = true;
    for (int s = 0; s < 30; ++s) {
      const auto inst = gen_uniform_1d(100, stream_seed(seed, s), CountWindow{1 + s % 10});
      out.push_back(check_remarks(inst, simulate(inst, make_gre(Topology::MinCommonOrigin), opts), "gre"));
      out.push_back(check_remarks(inst, simulate(inst, make_pb(Topology::MinCommonOrigin), opts), "pb"));
    }
    const auto adv = adversarial_gre_offline(16, 0.1);
    out.push_back(check_remarks(adv, simulate(adv, make_gre(Topology::MinCommonOrigin), opts), "gre"));
    const auto pbk = adversarial_pb_offline(2);
    out.push_back(check_remarks(pbk, simulate(pbk, make_pb(Topology::MinCommonOrigin), opts), "pb"));
  } else {
    throw std::invalid_argument("unknown check: " + name);
  }
  return out;
}

}  // namespace pooling
