#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "trgo/kinematics.hpp"
#include "trgo/moea/population.hpp"
#include "trgo/moea/variation.hpp"
#include "trgo/objectives.hpp"
#include "trgo/terrain.hpp"

namespace trgo::harness {

/// Gait optimisation in one environment as a box-bounded problem over the
/// flat 54-value genome. Amplitude in [0, range/2], phase in [-pi, pi],
/// drift in [lo, hi]; repair is clamp_to_limits.
class GaitProblem {
 public:
  GaitProblem(const Heightmap& environment, const GaitModel& model)
      : env_(&environment), model_(&model) {
    model.geometry.validate();
    model.limits.validate();
    model.sim.validate();
    model.objective.validate();
  }

  std::size_t dimension() const { return kGenomeSize; }

  std::vector<double> lower_bounds() const {
    std::vector<double> lo;
    lo.reserve(kGenomeSize);
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const auto& r = model_->limits.of(j);
      lo.insert(lo.end(), {0.0, -kPi, r.lo});
    }
    return lo;
  }

  std::vector<double> upper_bounds() const {
    std::vector<double> hi;
    hi.reserve(kGenomeSize);
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const auto& r = model_->limits.of(j);
      hi.insert(hi.end(), {(r.hi - r.lo) / 2.0, kPi, r.hi});
    }
    return hi;
  }

  void repair(std::vector<double>& x) const {
    x = clamp_to_limits(genome(x), model_->limits).to_vector();
  }

  moea::Objectives evaluate(const std::vector<double>& x) const {
    return trgo::evaluate(genome(x), *env_, *model_).to_vector();
  }

  GaitGenome genome(const std::vector<double>& x) const {
    return GaitGenome::from_vector(x, 2.0 * kPi);
  }

  const Heightmap& environment() const { return *env_; }
  const GaitModel& model() const { return *model_; }

 private:
  const Heightmap* env_;
  const GaitModel* model_;
};

/// Template genome plus a uniform perturbation of +/- `spread` times each
/// coordinate's box width, clamped and repaired. Members are unevaluated.
inline moea::Population sample_around_template(const GaitProblem& problem, std::size_t count,
                                               moea::Rng& rng, double spread = 0.25) {
  const auto base = triangular_gait_template(problem.model().limits).to_vector();
  const auto lo = problem.lower_bounds();
  const auto hi = problem.upper_bounds();
  moea::Population pop;
  pop.members.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> x = base;
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] += (2.0 * moea::uniform01(rng) - 1.0) * spread * (hi[k] - lo[k]);
    }
    moea::clamp_to_box(x, lo, hi);
    problem.repair(x);
    moea::Individual ind;
    ind.x = std::move(x);
    pop.members.push_back(std::move(ind));
  }
  return pop;
}

}  // namespace trgo::harness
