#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pooling/rng.hpp"
#include "pooling/topology.hpp"

using namespace pooling;

namespace {

TwoD trip(double ox, double oy, double dx, double dy) { return TwoD{Point2(ox, oy), Point2(dx, dy)}; }

TwoD random_trip(Rng& rng) {
  return trip(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform());
}

}  // namespace

TEST(Topology, OneDimensionalRewards) {
  EXPECT_DOUBLE_EQ(reward(Topology::MinCommonOrigin, OneD{0.3}, OneD{0.7}), 0.3);
  EXPECT_DOUBLE_EQ(reward(Topology::Proximity, OneD{0.3}, OneD{0.7}), 0.6);
  EXPECT_DOUBLE_EQ(reward(Topology::Separation, OneD{0.3}, OneD{0.7}), 0.4);
}

TEST(Topology, PlanarRewardExamples) {
  const auto a = trip(0, 0, 3, 4);
  EXPECT_NEAR(reward(Topology::Pool2D, a, a), 5.0, 1e-12);
  EXPECT_NEAR(reward(Topology::Pool2D, trip(0, 0, 1, 0), trip(0, 0, 0, 1)), 1.0 - std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(reward(Topology::Pool2D, trip(0, 0, 1, 0), trip(2, 0, 3, 0)), -3.0, 1e-12);
}

TEST(Topology, PlanarRewardMatchesRouteEnumeration) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_trip(rng);
    const auto b = random_trip(rng);
    EXPECT_NEAR(pooled_route_length(a, b), oracle::pooled_route_by_enumeration(a, b), 1e-12);
    EXPECT_NEAR(reward(Topology::Pool2D, a, b), oracle::pool2d_reward_by_enumeration(a, b), 1e-12);
  }
}

TEST(Topology, Potentials) {
  EXPECT_DOUBLE_EQ(potential(Topology::MinCommonOrigin, OneD{0.8}), 0.4);
  EXPECT_DOUBLE_EQ(potential(Topology::Proximity, OneD{0.1}), 0.5);
  EXPECT_DOUBLE_EQ(potential(Topology::Separation, OneD{0.3}), 0.35);
  EXPECT_DOUBLE_EQ(potential(Topology::Pool2D, trip(0, 0, 3, 4)), 2.5);
}

TEST(Topology, SoloDistance) {
  EXPECT_DOUBLE_EQ(*solo_distance(Topology::MinCommonOrigin, OneD{0.8}), 0.8);
  EXPECT_DOUBLE_EQ(*solo_distance(Topology::Pool2D, trip(0, 0, 3, 4)), 5.0);
  EXPECT_FALSE(solo_distance(Topology::Proximity, OneD{0.3}).has_value());
  EXPECT_FALSE(solo_distance(Topology::Separation, OneD{0.3}).has_value());
}

TEST(Topology, DimensionMismatchThrows) {
  EXPECT_THROW(reward(Topology::MinCommonOrigin, OneD{0.3}, trip(0, 0, 1, 1)), std::invalid_argument);
  EXPECT_THROW(reward(Topology::Pool2D, OneD{0.3}, OneD{0.4}), std::invalid_argument);
  EXPECT_THROW(potential(Topology::Pool2D, OneD{0.3}), std::invalid_argument);
}

TEST(Topology, NamesRoundTrip) {
  for (auto top : {Topology::MinCommonOrigin, Topology::Proximity, Topology::Separation, Topology::Pool2D}) {
    EXPECT_EQ(parse_topology(to_string(top)), top);
  }
  EXPECT_THROW(parse_topology("manhattan"), std::invalid_argument);
}

TEST(Topology, SymmetryAndPotentialDualFeasibility) {
  Rng rng(5);
  for (auto top : {Topology::MinCommonOrigin, Topology::Proximity, Topology::Separation}) {
    for (int i = 0; i < 1000; ++i) {
      const OneD a{rng.uniform()}, b{rng.uniform()};
      EXPECT_DOUBLE_EQ(reward(top, a, b), reward(top, b, a));
      EXPECT_LE(reward(top, a, b), potential(top, a) + potential(top, b) + 1e-12);
      EXPECT_GE(reward(top, a, b), 0.0);
      EXPECT_LE(reward(top, a, b), 1.0);
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_trip(rng);
    const auto b = random_trip(rng);
    const double r = reward(Topology::Pool2D, a, b);
    EXPECT_NEAR(r, reward(Topology::Pool2D, b, a), 1e-12);
    EXPECT_LE(r, potential(Topology::Pool2D, a) + potential(Topology::Pool2D, b) + 1e-12);
    EXPECT_LE(r, std::min(*solo_distance(Topology::Pool2D, a), *solo_distance(Topology::Pool2D, b)) + 1e-12);
  }
}

TEST(Topology, SelfMatchSaturation) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const OneD a{rng.uniform()};
    EXPECT_DOUBLE_EQ(reward(Topology::MinCommonOrigin, a, a), 2.0 * potential(Topology::MinCommonOrigin, a));
    const auto t = random_trip(rng);
    EXPECT_NEAR(reward(Topology::Pool2D, t, t), 2.0 * potential(Topology::Pool2D, t), 1e-12);
  }
}

TEST(Topology, PotentialIndexPicksClosestType) {
  // |a - b| = a - 2 (r(a,b) - p(b)) on the min-common-origin line
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    const double q = reward(Topology::MinCommonOrigin, OneD{a}, OneD{b}) - potential(Topology::MinCommonOrigin, OneD{b});
    EXPECT_NEAR(std::abs(a - b), a - 2.0 * q, 1e-12);
  }
}
