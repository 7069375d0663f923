#pragma once

// Hexapod geometry, joint limits, the sinusoidal gait genome and leg forward
// kinematics.
//
// Frames: body frame has x forward, y left, z up, origin at the hip plane in
// the middle of the body. Each leg frame has y pointing along the leg at
// theta1 = 0 and z up. Legs are indexed 0..5 as front-left, front-right,
// middle-left, middle-right, back-left, back-right.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "trgo/error.hpp"

namespace trgo {

inline constexpr std::size_t kLegCount = 6;
inline constexpr std::size_t kJointsPerLeg = 3;
inline constexpr std::size_t kJointCount = kLegCount * kJointsPerLeg;
inline constexpr std::size_t kGenomeSize = kJointCount * 3;
inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// The two support tripods: front and back leg of one side plus the middle leg
// of the other side.
inline constexpr std::array<std::size_t, 3> kTripodA{0, 3, 4};
inline constexpr std::array<std::size_t, 3> kTripodB{1, 2, 5};

inline std::string joint_name(std::size_t joint) {
  return "leg" + std::to_string(joint / kJointsPerLeg + 1) + ".theta" +
         std::to_string(joint % kJointsPerLeg + 1);
}

/// Where a hip sits on the body. `yaw` rotates the leg frame into the body
/// frame; `mirrored` flips the leg x axis first so that positive theta1
/// sweeps the foot forward on both sides.
struct LegMount {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  bool mirrored = false;
};

/// Mounts for a body of the given length and width, hips at equal intervals
/// along each side. `base_sweep_deg` is the leg direction at theta1 = 0,
/// measured from lateral toward forward, for the front/middle/back pairs.
inline std::array<LegMount, kLegCount> default_mounts(
    double body_length, double body_width,
    std::array<double, 3> base_sweep_deg = {90.0, 0.0, 30.0}) {
  std::array<LegMount, kLegCount> mounts{};
  const double spacing = body_length / 3.0;
  const std::array<double, 3> xs{spacing, 0.0, -spacing};
  for (std::size_t pair = 0; pair < 3; ++pair) {
    const double alpha = deg2rad(base_sweep_deg[pair]);
    mounts[2 * pair] = {xs[pair], body_width / 2.0, -alpha, true};
    mounts[2 * pair + 1] = {xs[pair], -body_width / 2.0, kPi + alpha, false};
  }
  return mounts;
}

struct RobotGeometry {
  // Link lengths in meters: hip offset, coxa, femur, tibia.
  std::array<double, 4> link_lengths{0.05, 0.05, 0.10, 0.15};
  double body_mass = 5.2;
  double leg_mass = 0.9;
  double body_length = 0.72;
  double body_width = 0.42;
  double body_height = 0.1;
  std::array<LegMount, kLegCount> mounts = default_mounts(0.72, 0.42);
  // Terminates the transform chain; (0,0,0,1) yields the foot point.
  Eigen::Vector4d u{0.0, 0.0, 0.0, 1.0};

  double reach() const {
    return link_lengths[0] + link_lengths[1] + link_lengths[2] +
           link_lengths[3];
  }

  void validate() const {
    for (double l : link_lengths) {
      if (!(l > 0.0)) throw ParameterError("link lengths must be positive");
    }
    for (std::size_t leg = 0; leg < kLegCount; leg += 2) {
      const auto& left = mounts[leg];
      const auto& right = mounts[leg + 1];
      if (std::abs(left.x - right.x) > 1e-12 ||
          std::abs(left.y + right.y) > 1e-12 ||
          left.mirrored == right.mirrored) {
        throw ParameterError("leg mounts must be left/right symmetric");
      }
    }
  }
};

struct JointRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct JointLimits {
  // Per joint role (theta1, theta2, theta3), degrees.
  std::array<JointRange, kJointsPerLeg> range{
      JointRange{-60.0, 20.0}, JointRange{-20.0, 40.0},
      JointRange{-140.0, -85.0}};
  // Per joint (leg-major), degrees.
  std::array<double, kJointCount> initial = [] {
    std::array<double, kJointCount> init{};
    for (std::size_t leg = 0; leg < kLegCount; ++leg) {
      const bool middle = leg == 2 || leg == 3;
      init[leg * 3 + 0] = middle ? 0.0 : -60.0;
      init[leg * 3 + 1] = 30.0;
      init[leg * 3 + 2] = -125.0;
    }
    return init;
  }();

  const JointRange& of(std::size_t joint) const {
    return range[joint % kJointsPerLeg];
  }

  void validate() const {
    for (const auto& r : range) {
      if (!(r.lo < r.hi)) throw ParameterError("joint range needs lo < hi");
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
      if (initial[j] < of(j).lo || initial[j] > of(j).hi) {
        throw ParameterError("initial angle of " + joint_name(j) +
                             " outside its range");
      }
    }
  }
};

struct Gene {
  double amplitude = 0.0;  // deg
  double phase = 0.0;      // rad
  double drift = 0.0;      // deg

  bool operator==(const Gene&) const = default;
};

/// Sinusoidal joint template: angle(t) = a sin(omega t + p) + d.
inline double joint_trajectory(const Gene& gene, double omega, double t) {
  return gene.amplitude * std::sin(omega * t + gene.phase) + gene.drift;
}

struct GaitGenome {
  std::array<Gene, kJointCount> genes{};
  double omega = 2.0 * kPi;

  bool operator==(const GaitGenome&) const = default;

  // Flat layout: (a, p, d) per joint, leg-major.
  std::vector<double> to_vector() const {
    std::vector<double> v;
    v.reserve(kGenomeSize);
    for (const auto& g : genes) {
      v.push_back(g.amplitude);
      v.push_back(g.phase);
      v.push_back(g.drift);
    }
    return v;
  }

  static GaitGenome from_vector(std::span<const double> v,
                                double omega = 2.0 * kPi) {
    if (v.size() != kGenomeSize) {
      throw ParameterError("gait genome needs " + std::to_string(kGenomeSize) +
                           " values, got " + std::to_string(v.size()));
    }
    GaitGenome g;
    g.omega = omega;
    for (std::size_t j = 0; j < kJointCount; ++j) {
      g.genes[j] = {v[3 * j], v[3 * j + 1], v[3 * j + 2]};
    }
    return g;
  }

  std::array<double, kJointsPerLeg> leg_angles(std::size_t leg,
                                               double t) const {
    return {joint_trajectory(genes[leg * 3 + 0], omega, t),
            joint_trajectory(genes[leg * 3 + 1], omega, t),
            joint_trajectory(genes[leg * 3 + 2], omega, t)};
  }
};

inline constexpr double kLimitTolerance = 1e-9;

inline bool is_feasible(const GaitGenome& genome, const JointLimits& limits) {
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const auto& g = genome.genes[j];
    const auto& r = limits.of(j);
    if (g.amplitude < 0.0) return false;
    if (g.drift - g.amplitude < r.lo - kLimitTolerance) return false;
    if (g.drift + g.amplitude > r.hi + kLimitTolerance) return false;
  }
  return true;
}

/// Throws LimitViolation naming the first joint whose trajectory can leave
/// its range.
inline void require_feasible(const GaitGenome& genome,
                             const JointLimits& limits) {
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const auto& g = genome.genes[j];
    const auto& r = limits.of(j);
    if (g.amplitude < 0.0) {
      throw LimitViolation(joint_name(j) + " amplitude", g.amplitude, 0.0,
                           r.hi - r.lo);
    }
    if (g.drift - g.amplitude < r.lo - kLimitTolerance) {
      throw LimitViolation(joint_name(j), g.drift - g.amplitude, r.lo, r.hi);
    }
    if (g.drift + g.amplitude > r.hi + kLimitTolerance) {
      throw LimitViolation(joint_name(j), g.drift + g.amplitude, r.lo, r.hi);
    }
  }
}

/// Minimal repair: negative amplitudes become positive with a half-turn phase
/// shift, amplitude is capped at half the range, then the drift is moved the
/// least distance that keeps d +/- a inside the range. Idempotent.
inline GaitGenome clamp_to_limits(GaitGenome genome,
                                  const JointLimits& limits) {
  for (std::size_t j = 0; j < kJointCount; ++j) {
    auto& g = genome.genes[j];
    const auto& r = limits.of(j);
    if (g.amplitude < 0.0) {
      g.amplitude = -g.amplitude;
      g.phase = std::remainder(g.phase + kPi, 2.0 * kPi);
    }
    g.amplitude = std::min(g.amplitude, (r.hi - r.lo) / 2.0);
    g.drift = std::clamp(g.drift, r.lo + g.amplitude, r.hi - g.amplitude);
  }
  return genome;
}

inline Eigen::Matrix4d trans_y(double d) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(1, 3) = d;
  return m;
}

inline Eigen::Matrix4d rot_x(double rad) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  const double c = std::cos(rad), s = std::sin(rad);
  m(1, 1) = c;
  m(1, 2) = -s;
  m(2, 1) = s;
  m(2, 2) = c;
  return m;
}

inline Eigen::Matrix4d rot_z(double rad) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  const double c = std::cos(rad), s = std::sin(rad);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return m;
}

/// Foot position in the leg frame for angles in degrees. Angles are checked
/// against `limits`.
inline Eigen::Vector3d forward_kinematics(
    std::size_t leg, const std::array<double, kJointsPerLeg>& angles_deg,
    const RobotGeometry& geometry, const JointLimits& limits = {}) {
  if (leg >= kLegCount) throw ParameterError("leg index out of range");
  for (std::size_t k = 0; k < kJointsPerLeg; ++k) {
    const auto& r = limits.range[k];
    if (angles_deg[k] < r.lo - kLimitTolerance ||
        angles_deg[k] > r.hi + kLimitTolerance) {
      throw LimitViolation(joint_name(leg * kJointsPerLeg + k), angles_deg[k],
                           r.lo, r.hi);
    }
  }
  const auto& l = geometry.link_lengths;
  const Eigen::Matrix4d chain =
      trans_y(l[0]) * rot_z(deg2rad(angles_deg[0])) * trans_y(l[1]) *
      rot_x(deg2rad(angles_deg[1])) * trans_y(l[2]) *
      rot_x(deg2rad(angles_deg[2])) * trans_y(l[3]);
  const Eigen::Vector4d p = chain * geometry.u;
  return p.head<3>();
}

/// Maps a leg-frame point into the body frame.
inline Eigen::Vector3d leg_to_body(std::size_t leg, const Eigen::Vector3d& p,
                                   const RobotGeometry& geometry) {
  const auto& mount = geometry.mounts[leg];
  const double px = mount.mirrored ? -p.x() : p.x();
  const double c = std::cos(mount.yaw), s = std::sin(mount.yaw);
  return {mount.x + c * px - s * p.y(), mount.y + s * px + c * p.y(), p.z()};
}

/// Tripod gait: both tripods share per-role amplitudes, tripod B runs half a
/// cycle behind tripod A. theta1 lags theta2 by a quarter cycle so the foot
/// sweeps backward while it is down. Drifts start at the initial angles and
/// are pulled inside the range just enough to fit the amplitude.
inline GaitGenome triangular_gait_template(
    const JointLimits& limits, double omega = 2.0 * kPi,
    std::array<double, kJointsPerLeg> amplitude_deg = {10.0, 10.0, 5.0}) {
  GaitGenome genome;
  genome.omega = omega;
  for (std::size_t leg = 0; leg < kLegCount; ++leg) {
    const bool in_a = leg == kTripodA[0] || leg == kTripodA[1] ||
                      leg == kTripodA[2];
    const double base = in_a ? 0.0 : kPi;
    const std::array<double, kJointsPerLeg> phases{
        std::remainder(base - kPi / 2.0, 2.0 * kPi), base,
        std::remainder(base + kPi, 2.0 * kPi)};
    for (std::size_t k = 0; k < kJointsPerLeg; ++k) {
      const std::size_t j = leg * kJointsPerLeg + k;
      const auto& r = limits.range[k];
      const double a = std::min(amplitude_deg[k], (r.hi - r.lo) / 2.0);
      genome.genes[j] = {a, phases[k],
                         std::clamp(limits.initial[j], r.lo + a, r.hi - a)};
    }
  }
  return genome;
}

struct RobotConfig {
  RobotGeometry geometry;
  JointLimits limits;
};

namespace detail {

inline std::map<std::string, double> read_key_values(std::istream& in,
                                                     const std::string& name) {
  std::map<std::string, double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParameterError(name + ":" + std::to_string(lineno) +
                           ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      std::size_t used = 0;
      values[key] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ParameterError(name + ":" + std::to_string(lineno) +
                           ": bad number for " + key);
    }
  }
  return values;
}

}  // namespace detail

/// Reads `key = value` lines; unknown keys are rejected, missing keys keep
/// their defaults. Keys: l0..l3, body_mass, leg_mass, body_length,
/// body_width, body_height, theta{1,2,3}_lo, theta{1,2,3}_hi,
/// theta{1,2,3}_init and theta1_init_middle.
inline RobotConfig parse_robot_config(std::istream& in,
                                      const std::string& name = "config") {
  RobotConfig cfg;
  auto& g = cfg.geometry;
  auto& lim = cfg.limits;
  std::array<double, 3> init{-60.0, 30.0, -125.0};
  double init_middle = 0.0;
  for (const auto& [key, value] : detail::read_key_values(in, name)) {
    if (key.size() == 2 && key[0] == 'l' && key[1] >= '0' && key[1] <= '3') {
      g.link_lengths[static_cast<std::size_t>(key[1] - '0')] = value;
    } else if (key == "body_mass") {
      g.body_mass = value;
    } else if (key == "leg_mass") {
      g.leg_mass = value;
    } else if (key == "body_length") {
      g.body_length = value;
    } else if (key == "body_width") {
      g.body_width = value;
    } else if (key == "body_height") {
      g.body_height = value;
    } else if (key == "theta1_init_middle") {
      init_middle = value;
    } else if (key.size() > 7 && key.rfind("theta", 0) == 0 &&
               key[5] >= '1' && key[5] <= '3' && key[6] == '_') {
      const auto k = static_cast<std::size_t>(key[5] - '1');
      const std::string field = key.substr(7);
      if (field == "lo") {
        lim.range[k].lo = value;
      } else if (field == "hi") {
        lim.range[k].hi = value;
      } else if (field == "init") {
        init[k] = value;
      } else {
        throw ParameterError(name + ": unknown key " + key);
      }
    } else {
      throw ParameterError(name + ": unknown key " + key);
    }
  }
  g.mounts = default_mounts(g.body_length, g.body_width);
  for (std::size_t leg = 0; leg < kLegCount; ++leg) {
    const bool middle = leg == 2 || leg == 3;
    lim.initial[leg * 3 + 0] = middle ? init_middle : init[0];
    lim.initial[leg * 3 + 1] = init[1];
    lim.initial[leg * 3 + 2] = init[2];
  }
  g.validate();
  lim.validate();
  return cfg;
}

inline RobotConfig load_robot_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open robot config " + path);
  return parse_robot_config(in, path);
}

}  // namespace trgo
