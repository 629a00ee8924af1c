#include <gtest/gtest.h>

#include <cmath>

#include "pooling/policies.hpp"
#include "pooling/rng.hpp"
#include "pooling/verify.hpp"

using namespace pooling;

TEST(Verify, LaminarOnTrap) {
  const auto inst = adversarial_pb_offline(0);
  const auto fam = check_laminar(inst, simulate(inst, make_pb(Topology::MinCommonOrigin)));
  ASSERT_EQ(fam.intervals.size(), 2u);
  EXPECT_EQ(fam.intervals[0], std::make_pair(0.0, 0.5));
  EXPECT_EQ(fam.intervals[1], std::make_pair(0.0, 1.0));
  EXPECT_EQ(fam.depth, (std::vector<int>{2, 1}));
  EXPECT_TRUE(fam.laminar);
  EXPECT_TRUE(fam.depth_bound_holds);
}

TEST(Verify, LaminarOnRandomInstances) {
  for (int s = 0; s < 200; ++s) {
    const auto inst = gen_uniform_1d(200, stream_seed(4, s));
    const auto fam = check_laminar(inst, simulate(inst, make_pb(Topology::MinCommonOrigin)));
    ASSERT_TRUE(fam.laminar) << s;
    ASSERT_TRUE(fam.depth_bound_holds) << s;
  }
  const auto pair = Instance::from_values(std::vector<double>{0.2, 0.9}, Topology::MinCommonOrigin);
  EXPECT_TRUE(check_laminar(pair, simulate(pair, make_pb(Topology::MinCommonOrigin))).laminar);
  const auto prox = pair.with_topology(Topology::Proximity);
  EXPECT_THROW(check_laminar(prox, simulate(prox, make_pb(Topology::Proximity))), std::invalid_argument);
}

TEST(Verify, OfflineBound) {
  const auto checks = check_offline_pb_bound(adversarial_pb_offline(0));
  ASSERT_EQ(checks.size(), 3u);
  EXPECT_DOUBLE_EQ(checks[0].observed, 0.5);
  EXPECT_DOUBLE_EQ(checks[0].bound, 1.0 + std::log2(3.0) / 2.0);
  EXPECT_TRUE(all_hold(checks));
  const auto twins = Instance::from_values(std::vector<double>{0.7, 0.7}, Topology::MinCommonOrigin);
  EXPECT_DOUBLE_EQ(check_offline_pb_bound(twins)[0].observed, 0.0);
}

TEST(Verify, OnlineBound) {
  for (int s = 0; s < 10; ++s) {
    EXPECT_TRUE(all_hold(check_online_pb_bound(gen_uniform_1d(300, s, CountWindow{10}))));
  }
  // a window covering everything falls back to the offline check
  EXPECT_EQ(check_online_pb_bound(gen_uniform_1d(20, 1))[0].name, "offline-pb-regret");
}

TEST(Verify, LowerBoundConstructions) {
  const auto checks = check_lower_bound_constructions();
  for (const auto& c : checks) {
    if (!c.report_only) EXPECT_TRUE(c.holds) << c.name << " " << c.instance << " " << c.observed << " vs " << c.bound;
  }
}

TEST(Verify, IdentityAndConcentration) {
  const auto inst = Instance::from_values(std::vector<double>{0.9, 0.5, 0.2}, Topology::MinCommonOrigin);
  EXPECT_TRUE(check_ml_mg_identity(inst).holds);
  EXPECT_TRUE(check_ml_mg_identity(Instance::from_values(std::vector<double>(6, 0.4), Topology::MinCommonOrigin)).holds);
  const auto rep = check_marginal_concentration(0.5, 200, 500, 3);
  EXPECT_TRUE(all_hold(rep.checks));
  const auto zero = check_marginal_concentration(0.0, 100, 50, 3);
  EXPECT_EQ(zero.mean_ml, 0.0);
}

TEST(Verify, Remarks) {
  SimOptions opts;
  opts.record_trace = true;
  for (int s = 0; s < 10; ++s) {
    const auto inst = gen_uniform_1d(80, s, CountWindow{1 + s});
    EXPECT_TRUE(check_remarks(inst, simulate(inst, make_gre(Topology::MinCommonOrigin), opts), "gre").holds);
    EXPECT_TRUE(check_remarks(inst, simulate(inst, make_pb(Topology::MinCommonOrigin), opts), "pb").holds);
  }
  // greedy decisions do not satisfy the closest-type rule on the trap
  const auto trap = adversarial_gre_offline(8, 0.1);
  EXPECT_FALSE(check_remarks(trap, simulate(trap, make_gre(Topology::MinCommonOrigin), opts), "pb").holds);
  const auto inst = gen_uniform_1d(10, 1);
  EXPECT_THROW(check_remarks(inst, simulate(inst, make_gre(Topology::MinCommonOrigin), opts), "hd"),
               std::invalid_argument);
}

TEST(Verify, NamedChecks) {
  for (const auto& name : check_names()) {
    if (name == "lower-bounds") continue;  // covered above
    EXPECT_TRUE(all_hold(run_check(name, 1))) << name;
  }
  EXPECT_THROW(run_check("everything", 1), std::invalid_argument);
}
