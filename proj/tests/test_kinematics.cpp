#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "trgo/kinematics.hpp"

using namespace trgo;

namespace {

// Sequential 4x4 chain built from plain arrays, independent of the Eigen path.
using M4 = std::array<std::array<double, 4>, 4>;

M4 identity() {
  M4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

M4 mul(const M4& a, const M4& b) {
  M4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

M4 ty(double d) {
  M4 m = identity();
  m[1][3] = d;
  return m;
}

M4 rx(double deg) {
  const double t = deg * M_PI / 180.0;
  M4 m = identity();
  m[1][1] = std::cos(t);
  m[1][2] = -std::sin(t);
  m[2][1] = std::sin(t);
  m[2][2] = std::cos(t);
  return m;
}

M4 rz(double deg) {
  const double t = deg * M_PI / 180.0;
  M4 m = identity();
  m[0][0] = std::cos(t);
  m[0][1] = -std::sin(t);
  m[1][0] = std::sin(t);
  m[1][1] = std::cos(t);
  return m;
}

std::array<double, 3> oracle_fk(const std::array<double, 4>& l, double t1, double t2, double t3) {
  M4 m = identity();
  for (const M4& f : {ty(l[0]), rz(t1), ty(l[1]), rx(t2), ty(l[2]), rx(t3), ty(l[3])}) m = mul(m, f);
  return {m[0][3], m[1][3], m[2][3]};
}

GaitGenome random_genome(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(-80.0, 120.0), p(-4.0, 4.0), d(-200.0, 100.0);
  GaitGenome g;
  for (auto& gene : g.genes) gene = {a(rng), p(rng), d(rng)};
  return g;
}

}  // namespace

TEST(JointTrajectory, ZeroAmplitudeIsDrift) {
  EXPECT_EQ(joint_trajectory({0.0, 1.3, 30.0}, 2.0 * kPi, 0.77), 30.0);
}

TEST(JointTrajectory, QuarterPeriodPeak) {
  EXPECT_NEAR(joint_trajectory({1.0, 0.0, 0.0}, 2.0 * kPi, 0.25), 1.0, 1e-15);
}

TEST(JointTrajectory, MatchesScalarOracle) {
  const double expected = 10.0 * std::sin(1.0 * 2.0 + M_PI / 6.0) - 5.0;
  EXPECT_DOUBLE_EQ(joint_trajectory({10.0, M_PI / 6.0, -5.0}, 1.0, 2.0), expected);
}

TEST(JointTrajectory, StaysWithinBand) {
  const Gene g{7.0, 0.4, -3.0};
  for (int i = 0; i < 500; ++i) {
    const double v = joint_trajectory(g, 2.0 * kPi, i * 0.0037);
    EXPECT_GE(v, -10.0 - 1e-12);
    EXPECT_LE(v, 4.0 + 1e-12);
  }
}

TEST(ForwardKinematics, ZeroAnglesStraightChain) {
  RobotGeometry geo;
  JointLimits wide;
  wide.range = {JointRange{-90, 90}, JointRange{-90, 90}, JointRange{-90, 90}};
  const auto p = forward_kinematics(0, {0.0, 0.0, 0.0}, geo, wide);
  EXPECT_NEAR(p.x(), 0.0, 1e-15);
  EXPECT_NEAR(p.y(), geo.reach(), 1e-15);
  EXPECT_NEAR(p.z(), 0.0, 1e-15);
}

TEST(ForwardKinematics, RightAngleLiftsDistalLinks) {
  RobotGeometry geo;
  JointLimits wide;
  wide.range = {JointRange{-90, 90}, JointRange{-90, 90}, JointRange{-90, 90}};
  const auto& l = geo.link_lengths;
  const auto p = forward_kinematics(0, {0.0, 90.0, 0.0}, geo, wide);
  EXPECT_NEAR(p.x(), 0.0, 1e-12);
  EXPECT_NEAR(p.y(), l[0] + l[1], 1e-12);
  EXPECT_NEAR(p.z(), l[2] + l[3], 1e-12);
}

TEST(ForwardKinematics, MatchesChainOracle) {
  RobotGeometry geo;
  JointLimits lim;
  std::mt19937_64 rng(11);
  for (std::size_t leg = 0; leg < kLegCount; ++leg) {
    for (int i = 0; i < 1000; ++i) {
      std::array<double, 3> q{};
      for (std::size_t k = 0; k < 3; ++k) {
        q[k] = std::uniform_real_distribution<double>(lim.range[k].lo, lim.range[k].hi)(rng);
      }
      const auto p = forward_kinematics(leg, q, geo, lim);
      const auto o = oracle_fk(geo.link_lengths, q[0], q[1], q[2]);
      EXPECT_NEAR(p.x(), o[0], 1e-9);
      EXPECT_NEAR(p.y(), o[1], 1e-9);
      EXPECT_NEAR(p.z(), o[2], 1e-9);
      EXPECT_LE(p.norm(), geo.reach() + 1e-12);
    }
  }
}

TEST(ForwardKinematics, OutOfLimitNamesJoint) {
  RobotGeometry geo;
  try {
    forward_kinematics(2, {0.0, 50.0, -100.0}, geo, JointLimits{});
    FAIL() << "expected LimitViolation";
  } catch (const LimitViolation& e) {
    EXPECT_NE(std::string(e.what()).find(joint_name(7)), std::string::npos);
  }
  EXPECT_THROW(forward_kinematics(6, {0.0, 0.0, -100.0}, geo), ParameterError);
}

TEST(ClampToLimits, HandExample) {
  JointLimits lim;
  GaitGenome g = triangular_gait_template(lim);
  g.genes[0] = {100.0, 0.0, 0.0};
  const auto c = clamp_to_limits(g, lim);
  EXPECT_DOUBLE_EQ(c.genes[0].amplitude, 40.0);
  EXPECT_DOUBLE_EQ(c.genes[0].drift, -20.0);
  EXPECT_DOUBLE_EQ(c.genes[0].drift - c.genes[0].amplitude, -60.0);
  EXPECT_DOUBLE_EQ(c.genes[0].drift + c.genes[0].amplitude, 20.0);
}

TEST(ClampToLimits, FeasibleUnchanged) {
  JointLimits lim;
  const auto g = triangular_gait_template(lim);
  ASSERT_TRUE(is_feasible(g, lim));
  EXPECT_EQ(clamp_to_limits(g, lim), g);
}

TEST(ClampToLimits, IdempotentAndFeasible) {
  JointLimits lim;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto once = clamp_to_limits(random_genome(rng), lim);
    EXPECT_TRUE(is_feasible(once, lim));
    EXPECT_EQ(clamp_to_limits(once, lim), once);
  }
}

TEST(GaitTemplate, TripodPhases) {
  JointLimits lim;
  const auto g = triangular_gait_template(lim);
  for (std::size_t k = 0; k < 3; ++k) {
    const double pa = g.genes[kTripodA[0] * 3 + k].phase;
    const double pb = g.genes[kTripodB[0] * 3 + k].phase;
    for (auto leg : kTripodA) EXPECT_DOUBLE_EQ(g.genes[leg * 3 + k].phase, pa);
    for (auto leg : kTripodB) EXPECT_DOUBLE_EQ(g.genes[leg * 3 + k].phase, pb);
    EXPECT_NEAR(std::abs(std::remainder(pa - pb, 2.0 * kPi)), kPi, 1e-12);
  }
}

TEST(GaitTemplate, FeasibleAndNearInitialAngles) {
  JointLimits lim;
  const auto g = triangular_gait_template(lim);
  EXPECT_TRUE(is_feasible(g, lim));
  for (std::size_t j = 0; j < kJointCount; ++j) {
    EXPECT_GT(g.genes[j].amplitude, 0.0);
    EXPECT_LE(std::abs(g.genes[j].drift - lim.initial[j]), g.genes[j].amplitude + 1e-12);
  }
}

TEST(Genome, VectorRoundTrip) {
  std::mt19937_64 rng(5);
  const auto g = random_genome(rng);
  const auto v = g.to_vector();
  ASSERT_EQ(v.size(), kGenomeSize);
  EXPECT_EQ(GaitGenome::from_vector(v), g);
  EXPECT_THROW(GaitGenome::from_vector(std::vector<double>(53)), ParameterError);
}

TEST(Limits, DefaultsAndValidation) {
  JointLimits lim;
  EXPECT_NO_THROW(lim.validate());
  EXPECT_EQ(lim.initial[0], -60.0);
  EXPECT_EQ(lim.initial[6], 0.0);
  EXPECT_EQ(lim.initial[9], 0.0);
  EXPECT_EQ(lim.initial[1], 30.0);
  EXPECT_EQ(lim.initial[2], -125.0);
  lim.range[1] = {40.0, -20.0};
  EXPECT_THROW(lim.validate(), ParameterError);
}

TEST(Geometry, SymmetricMounts) {
  RobotGeometry geo;
  EXPECT_NO_THROW(geo.validate());
  geo.mounts[1].y += 0.01;
  EXPECT_THROW(geo.validate(), ParameterError);
}

TEST(RobotConfig, ParsesOverrides) {
  std::istringstream in("# robot\nl2 = 0.12\ntheta2_hi = 35\ntheta1_init_middle = -5\n");
  const auto cfg = parse_robot_config(in);
  EXPECT_DOUBLE_EQ(cfg.geometry.link_lengths[2], 0.12);
  EXPECT_DOUBLE_EQ(cfg.limits.range[1].hi, 35.0);
  EXPECT_DOUBLE_EQ(cfg.limits.initial[6], -5.0);
  std::istringstream bad("wingspan = 3\n");
  EXPECT_THROW(parse_robot_config(bad), ParameterError);
  EXPECT_THROW(load_robot_config("/nonexistent/robot.cfg"), IoError);
}
