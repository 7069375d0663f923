#pragma once

// Quasi-static locomotion over a heightmap.
//
// Each sample the legs are posed from the genome, the rigid body settles onto
// the lowest support plane that keeps every foot on or above the ground (the
// upper-hull facet under the body centre), feet within contact_tolerance of
// the ground are in stance, and the body moves by the planar rigid motion
// that keeps the stance feet fixed in the world. There are no dynamics:
// accelerations are finite differences of the resulting body path.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/kinematics.hpp"
#include "trgo/terrain.hpp"

namespace trgo {

struct SimConfig {
  double sample_rate = 100.0;   // Hz
  double cycle_duration = 0.0;  // s; <= 0 means one period 2*pi/omega
  double contact_tolerance = 0.01;
  double slip_coefficient = 0.3;
  double rollover_threshold_deg = 45.0;
  std::array<double, 2> desired_direction{1.0, 0.0};
  // Start pose; NaN places the body at the centre of the map.
  double start_x = std::numeric_limits<double>::quiet_NaN();
  double start_y = std::numeric_limits<double>::quiet_NaN();
  double start_yaw = 0.0;

  void validate() const {
    if (sample_rate != 100.0) throw ParameterError("sample_rate is fixed at 100 Hz");
    if (!(contact_tolerance > 0.0)) throw ParameterError("contact_tolerance must be > 0");
    if (slip_coefficient < 0.0 || slip_coefficient > 1.0) {
      throw ParameterError("slip_coefficient must lie in [0, 1]");
    }
    if (!(rollover_threshold_deg > 0.0)) {
      throw ParameterError("rollover_threshold must be > 0");
    }
    const double norm = std::hypot(desired_direction[0], desired_direction[1]);
    if (std::abs(norm - 1.0) > 1e-9) throw ParameterError("desired_direction must be a unit vector");
  }

  double duration_for(double omega) const {
    return cycle_duration > 0.0 ? cycle_duration : 2.0 * kPi / omega;
  }
};

enum class SimFailure { none, rollover, stuck, out_of_bounds };

inline const char* to_string(SimFailure f) {
  switch (f) {
    case SimFailure::none: return "none";
    case SimFailure::rollover: return "rollover";
    case SimFailure::stuck: return "stuck";
    case SimFailure::out_of_bounds: return "out_of_bounds";
  }
  return "unknown";
}

struct SimulationTrace {
  double sample_rate = 100.0;
  double cycle_duration = 1.0;
  std::vector<Eigen::Vector3d> positions;
  std::vector<double> roll;   // rad
  std::vector<double> pitch;  // rad
  std::array<std::vector<double>, 3> acc;  // m/s^2 per axis
  SimFailure failed = SimFailure::none;

  std::size_t size() const { return positions.size(); }
};

struct PlanarMotion {
  double dx = 0.0;
  double dy = 0.0;
  double dyaw = 0.0;
};

/// Least-squares rigid motion T minimising sum |T(curr_i) - prev_i|^2 over
/// corresponding stance feet (2-D Procrustes). T is the body displacement
/// expressed in the previous body frame.
inline PlanarMotion body_update(std::span<const Eigen::Vector2d> prev,
                                std::span<const Eigen::Vector2d> curr) {
  if (prev.size() != curr.size()) throw ParameterError("stance correspondence size mismatch");
  if (prev.size() < 3) throw InsufficientSupport("fewer than 3 stance feet");
  Eigen::Vector2d pc = Eigen::Vector2d::Zero(), cc = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < prev.size(); ++i) {
    pc += prev[i];
    cc += curr[i];
  }
  pc /= static_cast<double>(prev.size());
  cc /= static_cast<double>(curr.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const Eigen::Vector2d a = curr[i] - cc;
    const Eigen::Vector2d b = prev[i] - pc;
    sxx += a.dot(b);
    sxy += a.x() * b.y() - a.y() * b.x();
  }
  const double yaw = std::atan2(sxy, sxx);
  const double c = std::cos(yaw), s = std::sin(yaw);
  const Eigen::Vector2d rc{c * cc.x() - s * cc.y(), s * cc.x() + c * cc.y()};
  const Eigen::Vector2d t = pc - rc;
  return {t.x(), t.y(), yaw};
}

/// Indices of feet whose height is within `tolerance` of the ground below.
inline std::vector<std::size_t> stance_set(std::span<const Eigen::Vector3d> feet,
                                           const Heightmap& terrain, double tolerance) {
  std::vector<std::size_t> stance;
  for (std::size_t k = 0; k < feet.size(); ++k) {
    const double ground = terrain.height_at(feet[k].x(), feet[k].y());
    if (std::abs(feet[k].z() - ground) <= tolerance) stance.push_back(k);
  }
  return stance;
}

/// z = a + b u + c v in body-aligned planar coordinates.
struct SupportPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double u, double v) const { return a + b * u + c * v; }
};

namespace detail {

inline std::optional<SupportPlane> plane_through(const Eigen::Vector3d& p0,
                                                 const Eigen::Vector3d& p1,
                                                 const Eigen::Vector3d& p2) {
  Eigen::Matrix3d m;
  m << 1.0, p0.x(), p0.y(), 1.0, p1.x(), p1.y(), 1.0, p2.x(), p2.y();
  const double det = m.determinant();
  if (std::abs(det) < 1e-12) return std::nullopt;
  const Eigen::Vector3d coef = m.partialPivLu().solve(Eigen::Vector3d{p0.z(), p1.z(), p2.z()});
  return SupportPlane{coef[0], coef[1], coef[2]};
}

inline bool triangle_contains_origin(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                     const Eigen::Vector3d& p2) {
  auto cross = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return a.x() * b.y() - a.y() * b.x();
  };
  const double area = cross(p1 - p0, p2 - p0);
  if (std::abs(area) < 1e-12) return false;
  const Eigen::Vector3d o = Eigen::Vector3d::Zero();
  const double w0 = cross(p1 - o, p2 - o) / area;
  const double w1 = cross(p2 - o, p0 - o) / area;
  const double w2 = 1.0 - w0 - w1;
  constexpr double eps = -1e-12;
  return w0 >= eps && w1 >= eps && w2 >= eps;
}

}  // namespace detail

/// Lowest plane over the body centre that no point rises above. Points are
/// (u, v, required body height). Empty when the centre is outside every
/// support triangle.
inline std::optional<SupportPlane> lowest_support_plane(
    std::span<const Eigen::Vector3d> points) {
  std::optional<SupportPlane> best;
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (!detail::triangle_contains_origin(points[i], points[j], points[k])) continue;
        const auto plane = detail::plane_through(points[i], points[j], points[k]);
        if (!plane) continue;
        bool above_all = true;
        for (const auto& p : points) {
          if (p.z() > (*plane)(p.x(), p.y()) + 1e-12) {
            above_all = false;
            break;
          }
        }
        if (above_all && (!best || plane->a < best->a)) best = plane;
      }
    }
  }
  return best;
}

/// Least-squares plane through the given points (>= 3, not collinear).
inline std::optional<SupportPlane> fit_plane(std::span<const Eigen::Vector3d> points) {
  if (points.size() < 3) return std::nullopt;
  Eigen::MatrixXd a(points.size(), 3);
  Eigen::VectorXd z(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    a(static_cast<Eigen::Index>(i), 1) = points[i].x();
    a(static_cast<Eigen::Index>(i), 2) = points[i].y();
    z[static_cast<Eigen::Index>(i)] = points[i].z();
  }
  const Eigen::Matrix3d normal = a.transpose() * a;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12) return std::nullopt;
  const Eigen::Vector3d coef = ldlt.solve(a.transpose() * z);
  return SupportPlane{coef[0], coef[1], coef[2]};
}

/// Second derivative by central differences; one-sided second-order stencils
/// at both ends.
inline std::vector<double> second_difference(std::span<const double> x, double dt) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  const double inv = 1.0 / (dt * dt);
  if (n < 3) return out;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (x[i + 1] - 2.0 * x[i] + x[i - 1]) * inv;
  if (n >= 4) {
    out[0] = (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) * inv;
    out[n - 1] = (2.0 * x[n - 1] - 5.0 * x[n - 2] + 4.0 * x[n - 3] - x[n - 4]) * inv;
  } else {
    out[0] = out[1];
    out[n - 1] = out[1];
  }
  return out;
}

/// Runs one motion cycle. Throws LimitViolation for infeasible genomes;
/// leaving the map, tipping past the rollover threshold and losing support
/// for half a cycle end the run with the matching failure flag. Samples after
/// a failure hold the last pose.
inline SimulationTrace simulate_gait(const GaitGenome& genome, const Heightmap& terrain,
                                     const RobotGeometry& geometry, const JointLimits& limits,
                                     const SimConfig& config) {
  config.validate();
  require_feasible(genome, limits);

  SimulationTrace trace;
  trace.sample_rate = config.sample_rate;
  trace.cycle_duration = config.duration_for(genome.omega);
  const auto n = static_cast<std::size_t>(std::llround(config.sample_rate * trace.cycle_duration));
  if (n < 2) throw ParameterError("cycle shorter than two samples");
  const double dt = 1.0 / config.sample_rate;
  const double rollover = deg2rad(config.rollover_threshold_deg);

  double px = std::isnan(config.start_x) ? terrain.center_x() : config.start_x;
  double py = std::isnan(config.start_y) ? terrain.center_y() : config.start_y;
  double yaw = config.start_yaw;

  trace.positions.reserve(n);
  trace.roll.reserve(n);
  trace.pitch.reserve(n);

  std::array<Eigen::Vector3d, kLegCount> feet{};
  std::array<Eigen::Vector3d, kLegCount> prev_feet{};
  std::vector<std::size_t> prev_stance;
  std::size_t unsupported_run = 0;
  const std::size_t stuck_after = std::max<std::size_t>(1, n / 2);

  const double probe = terrain.cell_size();
  auto terrain_grade = [&](double x, double y) {
    const double x0 = std::max(x - probe, terrain.origin_x());
    const double x1 = std::min(x + probe, terrain.origin_x() + terrain.extent_x());
    const double y0 = std::max(y - probe, terrain.origin_y());
    const double y1 = std::min(y + probe, terrain.origin_y() + terrain.extent_y());
    const double gx = (terrain.height_at(x1, y) - terrain.height_at(x0, y)) / (x1 - x0);
    const double gy = (terrain.height_at(x, y1) - terrain.height_at(x, y0)) / (y1 - y0);
    return std::hypot(gx, gy);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    for (std::size_t leg = 0; leg < kLegCount; ++leg) {
      feet[leg] = leg_to_body(
          leg, forward_kinematics(leg, genome.leg_angles(leg, t), geometry, limits), geometry);
    }

    const double c = std::cos(yaw), s = std::sin(yaw);
    std::array<Eigen::Vector3d, kLegCount> required{};
    std::array<Eigen::Vector3d, kLegCount> world{};
    bool off_map = false;
    for (std::size_t leg = 0; leg < kLegCount; ++leg) {
      const double wx = px + c * feet[leg].x() - s * feet[leg].y();
      const double wy = py + s * feet[leg].x() + c * feet[leg].y();
      if (!terrain.contains(wx, wy)) {
        off_map = true;
        break;
      }
      const double ground = terrain.height_at(wx, wy);
      required[leg] = {feet[leg].x(), feet[leg].y(), ground - feet[leg].z()};
      world[leg] = {wx, wy, 0.0};
    }
    if (off_map) {
      trace.failed = SimFailure::out_of_bounds;
      break;
    }

    const auto support = lowest_support_plane(required);
    if (!support) {
      trace.failed = SimFailure::rollover;
      break;
    }
    for (std::size_t leg = 0; leg < kLegCount; ++leg) {
      world[leg].z() = (*support)(feet[leg].x(), feet[leg].y()) + feet[leg].z();
    }
    const auto stance = stance_set(world, terrain, config.contact_tolerance);

    std::vector<Eigen::Vector3d> stance_points;
    for (auto k : stance) stance_points.push_back(required[k]);
    const SupportPlane body = fit_plane(stance_points).value_or(*support);
    const double pitch = std::atan(body.b);
    const double roll = std::atan(body.c);
    if (std::abs(roll) > rollover || std::abs(pitch) > rollover) {
      trace.failed = SimFailure::rollover;
      break;
    }

    if (i > 0) {
      std::vector<Eigen::Vector2d> before, after;
      for (auto k : stance) {
        if (std::find(prev_stance.begin(), prev_stance.end(), k) == prev_stance.end()) continue;
        before.emplace_back(prev_feet[k].x(), prev_feet[k].y());
        after.emplace_back(feet[k].x(), feet[k].y());
      }
      if (before.size() >= 3) {
        unsupported_run = 0;
        const PlanarMotion motion = body_update(before, after);
        const double scale =
            std::clamp(1.0 - config.slip_coefficient * terrain_grade(px, py), 0.0, 1.0);
        px += scale * (c * motion.dx - s * motion.dy);
        py += scale * (s * motion.dx + c * motion.dy);
        yaw += scale * motion.dyaw;
      } else if (++unsupported_run >= stuck_after) {
        trace.failed = SimFailure::stuck;
      }
    }

    trace.positions.emplace_back(px, py, body.a);
    trace.roll.push_back(roll);
    trace.pitch.push_back(pitch);
    if (trace.failed != SimFailure::none) break;
    prev_feet = feet;
    prev_stance = stance;
  }

  if (trace.positions.empty()) {
    trace.positions.emplace_back(px, py, 0.0);
    trace.roll.push_back(0.0);
    trace.pitch.push_back(0.0);
  }
  while (trace.positions.size() < n) {
    trace.positions.push_back(trace.positions.back());
    trace.roll.push_back(trace.roll.back());
    trace.pitch.push_back(trace.pitch.back());
  }

  for (std::size_t axis = 0; axis < 3; ++axis) {
    std::vector<double> coord(n);
    for (std::size_t i = 0; i < n; ++i) coord[i] = trace.positions[i][static_cast<Eigen::Index>(axis)];
    trace.acc[axis] = second_difference(coord, dt);
  }
  return trace;
}

inline void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
  out << "t,x,y,z,roll,pitch,acc_x,acc_y,acc_z\n";
  char buf[256];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& p = trace.positions[i];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<double>(i) / trace.sample_rate, p.x(), p.y(), p.z(), trace.roll[i],
                  trace.pitch[i], trace.acc[0][i], trace.acc[1][i], trace.acc[2][i]);
    out << buf;
  }
}

}  // namespace trgo
