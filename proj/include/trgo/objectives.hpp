#pragma once

// Walking velocity and stability objectives, packaged as a two-component
// minimisation vector (1/Wv, St).

#include <array>
#include <cmath>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/kinematics.hpp"
#include "trgo/simulator.hpp"
#include "trgo/terrain.hpp"

namespace trgo {

struct ObjectiveConfig {
  double zeta_s = 0.5;
  double zeta_q = 0.5;
  double scaling_factor = 50.0;
  double penalty_value = 1e6;
  double reference_speed = 0.5;  // m/s; f_s = min(1, speed / reference_speed)
  std::array<double, 2> desired_direction{1.0, 0.0};

  void validate() const {
    if (std::abs(zeta_s + zeta_q - 1.0) > 1e-12) throw ParameterError("zeta_s + zeta_q must be 1");
    if (!(scaling_factor > 0.0)) throw ParameterError("scaling_factor must be > 0");
    if (!(reference_speed > 0.0)) throw ParameterError("reference_speed must be > 0");
    if (!(penalty_value >= 1e3)) throw ParameterError("penalty_value must be >= 1e3");
    const double norm = std::hypot(desired_direction[0], desired_direction[1]);
    if (std::abs(norm - 1.0) > 1e-9) throw ParameterError("desired_direction must be a unit vector");
  }
};

struct ObjectiveVector {
  double f1 = 0.0;  // 1 / Wv
  double f2 = 0.0;  // St

  std::vector<double> to_vector() const { return {f1, f2}; }
  bool operator==(const ObjectiveVector&) const = default;
};

/// Wv: weighted speed and heading terms when the body moved along the
/// desired direction, otherwise -1.
inline double walking_velocity(const SimulationTrace& trace, const ObjectiveConfig& cfg) {
  if (trace.size() == 0) throw MalformedTrace("empty trace");
  const auto& start = trace.positions.front();
  const auto& end = trace.positions.back();
  const double dx = end.x() - start.x();
  const double dy = end.y() - start.y();
  const auto& v = cfg.desired_direction;
  const double along = dx * v[0] + dy * v[1];
  if (!(along > 0.0)) return -1.0;
  const double dist = std::hypot(dx, dy);
  const double speed = dist / trace.cycle_duration;
  const double f_s = std::min(1.0, speed / cfg.reference_speed);
  const double cross = v[0] * dy - v[1] * dx;
  const double dtheta = std::atan2(std::abs(cross), along);
  const double f_q = std::exp(-dtheta * dtheta);
  return cfg.zeta_s * f_s + cfg.zeta_q * f_q;
}

/// St = (F_x + F_y + F_z) / scaling_factor + rms(roll) + rms(pitch), with F_j
/// the standard deviation of the acceleration along axis j.
inline double stability(const SimulationTrace& trace, const ObjectiveConfig& cfg) {
  const std::size_t n = trace.size();
  if (n < 2) throw MalformedTrace("stability needs at least two samples");
  const double inv_n = 1.0 / static_cast<double>(n);
  double f_sum = 0.0;
  for (const auto& axis : trace.acc) {
    if (axis.size() != n) throw MalformedTrace("acceleration length mismatch");
    double sum = 0.0, sum_sq = 0.0;
    for (double a : axis) {
      sum += a;
      sum_sq += a * a;
    }
    const double mean = sum * inv_n;
    f_sum += std::sqrt(std::max(0.0, sum_sq * inv_n - mean * mean));
  }
  if (trace.roll.size() != n || trace.pitch.size() != n) {
    throw MalformedTrace("orientation length mismatch");
  }
  double roll_sq = 0.0, pitch_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    roll_sq += trace.roll[i] * trace.roll[i];
    pitch_sq += trace.pitch[i] * trace.pitch[i];
  }
  const double g = std::sqrt(roll_sq * inv_n) + std::sqrt(pitch_sq * inv_n);
  return f_sum / cfg.scaling_factor + g;
}

/// Failed or non-forward gaits map to the penalty pair.
inline ObjectiveVector to_objective_vector(double wv, double st, const ObjectiveConfig& cfg) {
  if (!(wv > 0.0)) return {cfg.penalty_value, cfg.penalty_value};
  return {1.0 / wv, st};
}

inline bool is_penalty(const ObjectiveVector& f, const ObjectiveConfig& cfg) {
  return f.f1 >= cfg.penalty_value || f.f2 >= cfg.penalty_value;
}

/// Everything needed to score a genome besides the genome and the terrain.
struct GaitModel {
  RobotGeometry geometry;
  JointLimits limits;
  SimConfig sim;
  ObjectiveConfig objective;
};

inline ObjectiveVector evaluate(const GaitGenome& genome, const Heightmap& environment,
                                const GaitModel& model) {
  model.objective.validate();
  const auto trace = simulate_gait(genome, environment, model.geometry, model.limits, model.sim);
  if (trace.failed != SimFailure::none) {
    return {model.objective.penalty_value, model.objective.penalty_value};
  }
  return to_objective_vector(walking_velocity(trace, model.objective),
                             stability(trace, model.objective), model.objective);
}

}  // namespace trgo
