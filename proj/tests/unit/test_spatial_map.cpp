#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "kdplan/spatial_map.hpp"
#include "oracles.hpp"

using namespace kdplan;

TEST(InstanceMap, KeepsOnlyPointsInsideRadius) {
  const PointCloud cloud{{Vec3(1, 0, 0), Vec3(10, 0, 0)}};
  const auto map = build_instance_map(cloud, Vec3::Zero(), 4.0, 0.0);
  ASSERT_EQ(map.size(), 1u);
  EXPECT_EQ(map.points()[0], Vec3(1, 0, 0));
}

TEST(InstanceMap, EmptyCloudGivesInfiniteDistance) {
  const auto map = build_instance_map(PointCloud{}, Vec3::Zero(), 4.0, 0.3);
  EXPECT_TRUE(map.empty());
  EXPECT_EQ(signed_distance(map, Vec3(1, 2, 3)), kInf);
  EXPECT_FALSE(map.nearest(Vec3::Zero()).has_value());
}

TEST(InstanceMap, SizeMatchesBruteForceCount) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  PointCloud cloud;
  for (int i = 0; i < 10000; ++i) cloud.points.emplace_back(u(rng), u(rng), u(rng));
  const Vec3 c(10, 10, 10);
  const auto map = build_instance_map(cloud, c, 4.0, 0.0);
  std::size_t count = 0;
  for (const auto& p : cloud.points) count += (p - c).norm() <= 4.0;
  EXPECT_EQ(map.size(), count);
  for (const auto& p : map.points()) EXPECT_LE((p - c).norm(), 4.0);
}

TEST(InstanceMap, RejectsBadArguments) {
  EXPECT_THROW(build_instance_map(PointCloud{}, Vec3::Zero(), 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(build_instance_map(PointCloud{}, Vec3::Zero(), 1.0, -0.1), std::invalid_argument);
}

TEST(SignedDistance, SinglePointExamples) {
  const auto map = build_instance_map(PointCloud{{Vec3(2, 0, 0)}}, Vec3::Zero(), kInf, 0.5);
  EXPECT_DOUBLE_EQ(signed_distance(map, Vec3::Zero()), 1.5);
  EXPECT_DOUBLE_EQ(signed_distance(map, Vec3(2, 0, 0)), -0.5);
}

TEST(SignedDistance, MatchesExhaustiveScan) {
  const PointCloud world = random_world({50, 20.0, 0.5, 42});
  const auto map = build_instance_map(world, Vec3::Zero(), kInf, 0.3);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 22.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    EXPECT_NEAR(signed_distance(map, p), oracle::brute_signed_distance(world.points, p, 0.3), 1e-9);
  }
}

TEST(SignedDistance, IndependentOfInsertionOrder) {
  PointCloud world = random_world({20, 10.0, 0.5, 3});
  const auto a = build_instance_map(world, Vec3::Zero(), kInf, 0.1);
  std::shuffle(world.points.begin(), world.points.end(), std::mt19937_64(1));
  const auto b = build_instance_map(world, Vec3::Zero(), kInf, 0.1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 50; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    EXPECT_EQ(a.signed_distance(p), b.signed_distance(p));
  }
}

TEST(SegmentClear, EmptyMapAlwaysClear) {
  const InstanceMap map = build_instance_map(PointCloud{}, Vec3::Zero(), kInf, 0.0);
  EXPECT_TRUE(segment_clear(map, Vec3::Zero(), Vec3(100, 5, 3), 0.1, 10.0));
}

TEST(SegmentClear, ThroughObstacleIsBlocked) {
  const auto map = build_instance_map(PointCloud{{Vec3(5, 0, 0)}}, Vec3::Zero(), kInf, 0.5);
  EXPECT_FALSE(segment_clear(map, Vec3::Zero(), Vec3(10, 0, 0), 0.1, 0.0));
}

TEST(SegmentClear, ClearanceBoundaryAgainstAnalyticDistance) {
  // Obstacle offset sideways; the closest approach of the segment is at a
  // sample point (x = 5 lies on the 0.1 grid), so sampling is exact there.
  const double clearance = 0.4, inflation = 0.3;
  const Vec3 a(0, 0, 0), b(10, 0, 0);
  for (double eps : {1e-6, -1e-6}) {
    const double offset = clearance + inflation + eps;
    const Vec3 q(5, offset, 0);
    const auto map = build_instance_map(PointCloud{{q}}, Vec3::Zero(), kInf, inflation);
    const double analytic = oracle::point_segment_distance(q, a, b) - inflation;
    EXPECT_EQ(segment_clear(map, a, b, 0.1, clearance), analytic >= clearance) << eps;
    EXPECT_EQ(segment_clear(map, a, b, 0.1, clearance), eps > 0) << eps;
  }
}

TEST(SegmentClear, MinClearanceIsSampledMinimum) {
  const auto map = build_instance_map(PointCloud{{Vec3(5, 1, 0)}}, Vec3::Zero(), kInf, 0.0);
  EXPECT_NEAR(segment_min_clearance(map, Vec3::Zero(), Vec3(10, 0, 0), 0.1), 1.0, 1e-12);
}

TEST(RandomWorld, DeterministicAndBounded) {
  const WorldSpec spec{50, 20.0, 0.5, 7};
  const auto a = random_world(spec);
  const auto b = random_world(spec);
  ASSERT_EQ(a.points.size(), b.points.size());
  EXPECT_EQ(a.points.size(), 50u * (kObstacleShellPoints + 1));
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i], b.points[i]);
  for (const auto& p : a.points)
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(p[k], -0.5 - 1e-12);
      EXPECT_LE(p[k], 20.5 + 1e-12);
    }
  EXPECT_TRUE(random_world({0, 20.0, 0.5, 1}).points.empty());
  EXPECT_NE(random_world({5, 20.0, 0.5, 1}).points[0], random_world({5, 20.0, 0.5, 2}).points[0]);
}

TEST(MapBuffer, ReadersSeePreviousUntilPublish) {
  MapBuffer buf;
  EXPECT_TRUE(buf.snapshot()->empty());
  buf.rebuild(PointCloud{{Vec3(1, 0, 0)}}, Vec3::Zero(), kInf, 0.0);
  const auto first = buf.snapshot();
  EXPECT_DOUBLE_EQ(first->signed_distance(Vec3::Zero()), 1.0);

  buf.stage(build_instance_map(PointCloud{{Vec3(3, 0, 0)}}, Vec3::Zero(), kInf, 0.0));
  EXPECT_EQ(buf.snapshot().get(), first.get());
  buf.publish();
  const auto second = buf.snapshot();
  EXPECT_DOUBLE_EQ(second->signed_distance(Vec3::Zero()), 3.0);
  EXPECT_GT(second->generation(), first->generation());
  // The old snapshot is still intact for whoever holds it.
  EXPECT_DOUBLE_EQ(first->signed_distance(Vec3::Zero()), 1.0);
}

TEST(MapBuffer, ConcurrentRebuildNeverMixesMaps) {
  // Map g contains a single point at (g, 0, 0) => from the origin a reader
  // must see distance exactly equal to the generation's point.
  MapBuffer buf;
  buf.rebuild(PointCloud{{Vec3(1, 0, 0)}}, Vec3::Zero(), kInf, 0.0);
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::atomic<long> reads{0};
  std::vector<std::jthread> readers;
  for (int t = 0; t < 3; ++t) {
    readers.emplace_back([&] {
      while (!stop) {
        const auto snap = buf.snapshot();
        const double d0 = snap->signed_distance(Vec3::Zero());
        const double x = snap->points().front().x();
        for (int k = 0; k < 20; ++k)
          if (snap->signed_distance(Vec3::Zero()) != d0) ++bad;
        if (d0 != x || snap->size() != 1) ++bad;
        ++reads;
      }
    });
  }
  while (reads.load() == 0) std::this_thread::yield();
  for (int g = 2; g < 500; ++g) {
    buf.rebuild(PointCloud{{Vec3(g, 0, 0)}}, Vec3::Zero(), kInf, 0.0);
    std::this_thread::yield();
  }
  stop = true;
  readers.clear();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_GT(reads.load(), 0);
  EXPECT_DOUBLE_EQ(buf.snapshot()->signed_distance(Vec3::Zero()), 499.0);
}
