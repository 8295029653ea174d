#include <gtest/gtest.h>

#include <random>

#include "kdplan/trajectory.hpp"
#include "oracles.hpp"

using namespace kdplan;

namespace {

std::vector<Vec3> random_waypoints(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<Vec3> w(static_cast<std::size_t>(n));
  for (auto& p : w) p = Vec3(u(rng), u(rng), u(rng));
  return w;
}

}  // namespace

TEST(BSpline, ConstantCurve) {
  const std::vector<Vec3> w(4, Vec3(1, 2, 3));
  const auto s = fit_bspline(w, 1.5);
  // Zero-length polyline: duration is zero, the domain is the single instant.
  EXPECT_EQ(s.duration(), 0.0);
  const auto r = s.sample(0.0);
  EXPECT_EQ(r.position, Vec3(1, 2, 3));
  EXPECT_EQ(r.velocity, Vec3::Zero());
  EXPECT_EQ(r.acceleration, Vec3::Zero());

  // Same control points on an explicit knot vector with positive duration.
  const BSpline c(w, {0, 0, 0, 0, 1, 1, 1, 1}, 2.0);
  for (double t = 0.0; t <= 2.0; t += 0.125) {
    const auto q = c.sample(t);
    EXPECT_LT((q.position - Vec3(1, 2, 3)).norm(), 1e-14);
    EXPECT_LT(q.velocity.norm(), 1e-14);
    EXPECT_LT(q.acceleration.norm(), 1e-14);
  }
}

TEST(BSpline, ClampedKnotStructure) {
  std::mt19937_64 rng(1);
  for (int n : {2, 3, 4, 7, 12}) {
    const auto w = random_waypoints(rng, n);
    const auto s = fit_bspline(w, 2.0);
    const auto& k = s.knots();
    const std::size_t nc = s.control_points().size();
    EXPECT_GE(nc, 4u);
    EXPECT_EQ(k.size(), nc + 4);
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(k[static_cast<std::size_t>(i)], 0.0);
      EXPECT_EQ(k[k.size() - 1 - static_cast<std::size_t>(i)], 1.0);
    }
    EXPECT_TRUE(std::is_sorted(k.begin(), k.end()));
    EXPECT_NEAR(s.duration(), oracle::path_cost(w, w.back()) / 2.0, 1e-12);
  }
}

TEST(BSpline, EndpointsExact) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto w = random_waypoints(rng, 2 + i % 9);
    const auto s = fit_bspline(w, 1.5);
    EXPECT_EQ(s.sample(0.0).position, w.front());
    EXPECT_EQ(s.sample(s.duration()).position, w.back());
  }
}

TEST(BSpline, CollinearStaysOnLine) {
  const Vec3 a(1, -2, 0.5), d = Vec3(1, 2, 2).normalized();
  const std::vector<Vec3> w{a, a + 0.7 * d, a + 1.1 * d, a + 2.5 * d, a + 3.0 * d, a + 4.2 * d};
  const auto s = fit_bspline(w, 1.0);
  for (int i = 0; i <= 200; ++i) {
    const Vec3 p = s.position(s.duration() * (i / 200.0));
    EXPECT_LT(oracle::point_segment_distance(p, a, a + 4.2 * d), 1e-12);
  }
}

TEST(BSpline, VelocityMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  const double h = 1e-4;
  for (int i = 0; i < 50; ++i) {
    const auto w = random_waypoints(rng, 4 + i % 8);
    const auto s = fit_bspline(w, 1.5);
    for (int j = 1; j < 40; ++j) {
      const double t = s.duration() * (j / 40.0);
      const Vec3 fd = (s.position(t + h) - s.position(t - h)) / (2 * h);
      const Vec3 v = s.sample(t).velocity;
      EXPECT_LE((fd - v).norm(), 1e-5 * std::max(1.0, v.norm())) << i << " " << t;
      const Vec3 fda = (s.sample(t + h).velocity - s.sample(t - h).velocity) / (2 * h);
      // Jerk jumps at knots, so this one is only first-order accurate nearby.
      EXPECT_LE((fda - s.sample(t).acceleration).norm(), 1e-3 * std::max(1.0, fda.norm()));
    }
  }
}

TEST(BSpline, NoAccelerationJumpAtInteriorKnots) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto s = fit_bspline(random_waypoints(rng, 5 + i % 6), 1.5);
    const auto knots = s.interior_knot_times();
    EXPECT_EQ(knots.size(), s.control_points().size() - 4);
    for (double tk : knots) {
      const double e = 1e-10 * s.duration();
      const Vec3 left = s.sample(tk - e).acceleration;
      const Vec3 right = s.sample(tk + e).acceleration;
      EXPECT_LT((left - right).norm(), 1e-6);
    }
  }
}

TEST(BSpline, ConvexHullProperty) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto w = random_waypoints(rng, 4 + i % 5);
    const auto s = fit_bspline(w, 1.5);
    for (int j = 0; j <= 50; ++j)
      EXPECT_TRUE(oracle::in_convex_hull(s.control_points(), s.position(s.duration() * (j / 50.0))));
  }
}

TEST(BSpline, OutOfDomain) {
  const std::vector<Vec3> w{Vec3::Zero(), Vec3(3, 0, 0)};
  const auto s = fit_bspline(w, 1.5);
  EXPECT_DOUBLE_EQ(s.duration(), 2.0);
  EXPECT_THROW(s.sample(-1e-9), OutOfDomain);
  EXPECT_THROW(s.sample(2.0 + 1e-9), OutOfDomain);
  EXPECT_NO_THROW(s.sample(2.0));
}

TEST(BSpline, RejectsBadInput) {
  const std::vector<Vec3> one{Vec3::Zero()};
  EXPECT_THROW(fit_bspline(one, 1.0), std::invalid_argument);
  const std::vector<Vec3> two{Vec3::Zero(), Vec3::Ones()};
  EXPECT_THROW(fit_bspline(two, 0.0), std::invalid_argument);
}
