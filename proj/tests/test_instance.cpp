#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "pooling/instance.hpp"

using namespace pooling;

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST(Instance, RejectsEmptyAndMismatchedTypes) {
  EXPECT_THROW(Instance({}, CountWindow{1}, Topology::MinCommonOrigin), std::invalid_argument);
  std::vector<Arrival> planar = {{1, TwoD{}, std::nullopt}};
  EXPECT_THROW(Instance(planar, CountWindow{1}, Topology::MinCommonOrigin), std::invalid_argument);
  std::vector<Arrival> out_of_range = {{1, OneD{1.5}, std::nullopt}};
  EXPECT_THROW(Instance(out_of_range, CountWindow{1}, Topology::MinCommonOrigin), std::invalid_argument);
  std::vector<Arrival> no_time = {{1, OneD{0.5}, std::nullopt}};
  EXPECT_THROW(Instance(no_time, TimeWindow{10}, Topology::MinCommonOrigin), std::invalid_argument);
  EXPECT_THROW(Instance(no_time, CountWindow{0}, Topology::MinCommonOrigin), std::invalid_argument);
}

TEST(Instance, UniformGeneratorIsDeterministic) {
  const auto a = gen_uniform_1d(1000, 7);
  const auto b = gen_uniform_1d(1000, 7);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), gen_uniform_1d(1000, 8).values());
  EXPECT_EQ(gen_uniform_1d(1, 0).size(), 1);
  EXPECT_THROW(gen_uniform_1d(0, 1), std::invalid_argument);
  EXPECT_TRUE(a.is_offline());
}

TEST(Instance, UniformAndBetaMeans) {
  EXPECT_NEAR(mean_of(gen_uniform_1d(100000, 3).values()), 0.5, 0.01);
  EXPECT_NEAR(mean_of(gen_beta_1d(100000, 0.5, 2.0, 3).values()), 0.2, 0.01);
  EXPECT_NEAR(mean_of(gen_beta_1d(100000, 1.0, 1.0, 4).values()), 0.5, 0.01);
  EXPECT_THROW(gen_beta_1d(10, 0.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(gen_beta_1d(0, 1.0, 1.0, 1), std::invalid_argument);
}

TEST(Instance, PlanarGenerators) {
  const auto common = gen_2d_common_origin(100000, 9);
  double mx = 0.0, my = 0.0;
  for (const auto& a : common.arrivals()) {
    const auto& t = std::get<TwoD>(a.type);
    ASSERT_EQ(t.origin, Point2(0, 0));
    mx += t.dest.x();
    my += t.dest.y();
  }
  EXPECT_NEAR(mx / common.size(), 0.5, 0.01);
  EXPECT_NEAR(my / common.size(), 0.5, 0.01);

  const auto het = gen_2d_heterogeneous(100000, 9);
  double ox = 0.0;
  for (const auto& a : het.arrivals()) ox += std::get<TwoD>(a.type).origin.x();
  EXPECT_NEAR(ox / het.size(), 0.5, 0.01);
  EXPECT_EQ(het.topology(), Topology::Pool2D);
  EXPECT_THROW(gen_2d_heterogeneous(0, 1), std::invalid_argument);
}

TEST(Instance, PoissonTimestamps) {
  const auto inst = with_poisson_timestamps(gen_uniform_1d(5000, 1), 2.0, 30.0, 5);
  ASSERT_TRUE(inst.has_timestamps());
  EXPECT_FALSE(inst.uses_count_window());
  EXPECT_DOUBLE_EQ(inst.time(0), 0.0);
  for (int j = 1; j < inst.size(); ++j) EXPECT_GE(inst.time(j), inst.time(j - 1));
  EXPECT_NEAR(inst.time(inst.size() - 1) / (inst.size() - 1), 0.5, 0.03);
}

TEST(Instance, Batches) {
  const auto inst = gen_uniform_1d(10, 1, CountWindow{3});
  const auto part = batches(inst);
  ASSERT_EQ(part.batches.size(), 3u);
  EXPECT_EQ(part.batches[0], (std::vector<JobIndex>{0, 1, 2, 3}));
  EXPECT_EQ(part.batches[2], (std::vector<JobIndex>{8, 9}));
  EXPECT_EQ(batches(gen_uniform_1d(4, 1, CountWindow{3})).batches.size(), 1u);
  EXPECT_THROW(batches(with_poisson_timestamps(inst, 1.0, 5.0, 1)), std::invalid_argument);
}

TEST(Instance, GreedyOfflineConstruction) {
  const auto inst = adversarial_gre_offline(4, 0.1);
  const auto v = inst.values();
  ASSERT_EQ(v.size(), 4u);
  EXPECT_NEAR(v[0], 0.09, 1e-12);
  EXPECT_NEAR(v[1], 0.05, 1e-12);
  EXPECT_EQ(v[2], 1.0);
  EXPECT_EQ(v[3], 1.0);
  EXPECT_TRUE(inst.is_offline());
  EXPECT_THROW(adversarial_gre_offline(6, 0.1), std::invalid_argument);
  EXPECT_THROW(adversarial_gre_offline(8, 0.4), std::invalid_argument);
  const auto big = adversarial_gre_offline(64, 0.1).values();
  for (int j = 1; j < 32; ++j) EXPECT_LT(big[j], big[j - 1]);
  EXPECT_LT(big[0], 0.1);
  EXPECT_GT(big[31], 0.05 - 1e-12);
}

TEST(Instance, PotentialGreedyOfflineConstruction) {
  EXPECT_EQ(adversarial_pb_offline(0).values(), (std::vector<double>{0.5, 0, 1, 0}));
  const std::vector<double> k1 = {0.125, 0, 0.25, 0, 0.625, 0.5, 0.75, 0.5, 0.5, 0, 1, 0};
  const auto v = adversarial_pb_offline(1).values();
  ASSERT_EQ(v.size(), k1.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], k1[i], 1e-15);
  EXPECT_EQ(adversarial_pb_offline(2).size(), 28);
  EXPECT_EQ(adversarial_pb_offline(5).size(), 252);
}

TEST(Instance, GreedyOnlineConstruction) {
  const auto inst = adversarial_gre_online(8, 3, 0.1);
  const auto v = inst.values();
  EXPECT_LT(v[1], v[0]);
  EXPECT_LT(v[0], 0.1);
  EXPECT_GT(v[1], 0.05);
  EXPECT_LT(v[4], 0.05);
  EXPECT_GT(v[5], 0.025);
  EXPECT_EQ(v[2], 1.0);
  for (const auto& b : batches(inst).batches) EXPECT_EQ(b.size(), 4u);
  EXPECT_THROW(adversarial_gre_online(8, 4, 0.1), std::invalid_argument);
  EXPECT_THROW(adversarial_gre_online(10, 3, 0.1), std::invalid_argument);
}

TEST(Instance, PotentialGreedyOnlineConstruction) {
  const auto v = adversarial_pb_online(8, 3).values();
  const std::vector<double> expect = {1.0 / 6, 0, 1.0 / 3, 0, 1.0 / 6 + 2.0 / 3, 2.0 / 3, 1.0, 2.0 / 3};
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], expect[i], 1e-12);
  for (double x : adversarial_pb_online(96, 11).values()) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
  EXPECT_THROW(adversarial_pb_online(10, 4), std::invalid_argument);
}

TEST(Instance, AnyIndexConstruction) {
  const auto inst = adversarial_any_index_offline(8, 0.5);
  EXPECT_EQ(inst.values(), (std::vector<double>{0.5, 0.5, 0, 0, 0, 0, 1, 1}));
  EXPECT_EQ(inst.topology(), Topology::Separation);
  EXPECT_THROW(adversarial_any_index_offline(6, 0.5), std::invalid_argument);
  EXPECT_EQ(adversarial_any_index_offline(4, 0.0, 0.1).values(), (std::vector<double>{0.1, 1, 1, 0}));
}

TEST(Instance, SeparationOnlineConstruction) {
  const auto inst = adversarial_separation_online(8, 3, 0.1);
  EXPECT_EQ(inst.values(), (std::vector<double>{0.5, 0.1, 0.1, 1, 0, 0, 1, 1}));
  for (double x : adversarial_separation_online(64, 7, 0.1).values()) {
    EXPECT_TRUE(x == 0.0 || x == 0.1 || x == 0.5 || x == 1.0);
  }
  EXPECT_THROW(adversarial_separation_online(12, 3, 0.1), std::invalid_argument);
}

TEST(Instance, WithoutAndWithCopy) {
  const auto inst = Instance::from_values(std::vector<double>{0.9, 0.5, 0.2}, Topology::MinCommonOrigin);
  EXPECT_EQ(inst.without(0).values(), (std::vector<double>{0.5, 0.2}));
  EXPECT_EQ(inst.with_copy(1).values(), (std::vector<double>{0.9, 0.5, 0.5, 0.2}));
  EXPECT_EQ(inst.with_copy(1).arrivals().back().id, 4);
}

TEST(Ingest, EpochTimestamps) {
  const auto path = write_temp("pooling_ingest_a.csv",
                               "order_id,order_time,origin_x,origin_y,dest_x,dest_y\n"
                               "b,70,0,0,1,1\n"
                               "a,0,0,0,2,2\n"
                               "c,10,1,1,3,3\n");
  const auto res = ingest_orders_csv(path, 180.0);
  EXPECT_TRUE(res.rejected.empty());
  ASSERT_EQ(res.instance.size(), 3);
  EXPECT_EQ(res.instance.time(0), 0.0);
  EXPECT_EQ(res.instance.time(1), 10.0);
  EXPECT_EQ(res.instance.time(2), 70.0);
  EXPECT_EQ(res.instance.topology(), Topology::Pool2D);
  EXPECT_DOUBLE_EQ(res.instance.time_window(), 180.0);
}

TEST(Ingest, RejectsBadRows) {
  const auto path = write_temp("pooling_ingest_b.csv",
                               "order_id,order_time,origin_x,origin_y,dest_x,dest_y\n"
                               "1,0,0,0,1,1\n"
                               "1,5,0,0,1,1\n"
                               "2,yesterday,0,0,1,1\n"
                               "3,7,0,nan,1,1\n"
                               "4,9,0,0,1,1\n");
  const auto res = ingest_orders_csv(path, 60.0);
  EXPECT_EQ(res.instance.size(), 2);
  ASSERT_EQ(res.rejected.size(), 3u);
  EXPECT_EQ(res.rejected[0].line, 3);
  EXPECT_EQ(res.rejected[1].line, 4);
  EXPECT_EQ(res.rejected[2].line, 5);
  EXPECT_THROW(ingest_orders_csv(path, 60.0, PlanarProjection::Auto, true), IngestError);
}

TEST(Ingest, MissingColumns) {
  const auto path = write_temp("pooling_ingest_c.csv", "order_id,order_time,origin_x\n1,0,0\n");
  EXPECT_THROW(ingest_orders_csv(path, 60.0), IngestError);
}

TEST(Ingest, EquirectangularProjection) {
  const auto path = write_temp("pooling_ingest_d.csv",
                               "order_id,order_time,origin_lng,origin_lat,dest_lng,dest_lat\n"
                               "1,2024-01-01T00:00:00Z,116.4,39.9,116.4,39.901\n");
  const auto res = ingest_orders_csv(path, 60.0);
  const auto& t = std::get<TwoD>(res.instance.type(0));
  EXPECT_NEAR((t.dest - t.origin).norm(), 111.2, 0.5);
}

TEST(Ingest, TimestampParsing) {
  EXPECT_EQ(*parse_timestamp("12.5"), 12.5);
  EXPECT_EQ(*parse_timestamp("1970-01-01T00:01:00Z"), 60.0);
  EXPECT_EQ(*parse_timestamp("1970-01-02 00:00:00"), 86400.0);
  EXPECT_EQ(*parse_timestamp("1970-01-01T01:00:00+01:00"), 0.0);
  EXPECT_NEAR(*parse_timestamp("1970-01-01T00:00:01.25"), 1.25, 1e-12);
  EXPECT_FALSE(parse_timestamp("1970-13-01T00:00:00").has_value());
  EXPECT_FALSE(parse_timestamp("noon").has_value());
}
