#pragma once

// Bound-constrained, derivative-free search for a genome whose projected
// feature lands on a given latent point. Multi-start randomized pattern
// search: each start walks along random directions, doubling the step on
// success and halving it after both signs fail. The evaluation budget is
// split evenly over the starts and the best point seen is returned.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/moea/population.hpp"
#include "trgo/moea/variation.hpp"
#include "trgo/transfer/tca.hpp"

namespace trgo::transfer {

struct InverseSearchConfig {
  std::size_t budget = 200;
  std::size_t nearest = 3;          // starts taken from the closest target samples
  std::size_t random_restarts = 1;  // additional uniform starts
  bool start_from_source = true;    // also start at the source genome itself
  double initial_step = 0.1;        // fraction of each coordinate's range
  double min_step = 1e-3;
  double max_step = 0.5;
  std::uint64_t seed = 1;

  void validate() const {
    if (budget < 1) throw ParameterError("search budget must be >= 1");
    if (!(initial_step > 0.0) || !(min_step > 0.0) || min_step > initial_step || initial_step > max_step) {
      throw ParameterError("search steps must satisfy 0 < min_step <= initial_step <= max_step");
    }
  }
};

struct Candidate {
  std::vector<double> x;
  double distance = std::numeric_limits<double>::infinity();
  moea::Objectives f;  // objectives observed while probing, if any
  bool evaluated = false;
  bool probed = false;  // distance known
};

/// Core search. `probe(x)` returns a Candidate with x, distance and (when the
/// distance required a simulation) the objectives. `repair(x)` maps a boxed
/// vector to a feasible one. Starts whose distance is unknown cost one probe.
template <class Probe, class Repair>
Candidate pattern_search(Probe&& probe, Repair&& repair, std::vector<Candidate> starts,
                         const std::vector<double>& lo, const std::vector<double>& hi,
                         const InverseSearchConfig& cfg, moea::Rng& rng) {
  cfg.validate();
  const std::size_t dim = lo.size();
  if (hi.size() != dim) throw ParameterError("bounds differ in dimension");
  for (std::size_t r = 0; r < cfg.random_restarts; ++r) {
    Candidate c;
    c.x.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) c.x[i] = lo[i] + moea::uniform01(rng) * (hi[i] - lo[i]);
    repair(c.x);
    starts.push_back(std::move(c));
  }
  if (starts.empty()) throw ParameterError("inverse search needs at least one start");

  std::size_t used = 0;
  Candidate best;
  auto consider = [&](const Candidate& c) {
    if (c.distance < best.distance || best.x.empty()) best = c;
  };
  auto eval = [&](std::vector<double> x) {
    ++used;
    return probe(std::move(x));
  };

  const std::size_t share = std::max<std::size_t>(1, cfg.budget / starts.size());
  for (std::size_t s = 0; s < starts.size() && used < cfg.budget; ++s) {
    const std::size_t stop = s + 1 == starts.size() ? cfg.budget : std::min(cfg.budget, used + share);
    Candidate cur = std::move(starts[s]);
    if (!cur.probed) cur = eval(cur.x);
    consider(cur);
    double step = cfg.initial_step;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> dir(dim);
    while (used < stop) {
      double norm = 0.0;
      for (auto& v : dir) {
        v = gauss(rng);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      bool improved = false;
      for (double sign : {1.0, -1.0}) {
        if (used >= stop) break;
        std::vector<double> x = cur.x;
        for (std::size_t i = 0; i < dim; ++i) {
          x[i] = std::clamp(x[i] + sign * step * dir[i] / norm * (hi[i] - lo[i]), lo[i], hi[i]);
        }
        repair(x);
        Candidate trial = eval(std::move(x));
        consider(trial);
        if (trial.distance < cur.distance) {
          cur = std::move(trial);
          improved = true;
          break;
        }
      }
      step = improved ? std::min(cfg.max_step, step * 2.0) : step * 0.5;
      if (step < cfg.min_step) step = cfg.initial_step;
    }
  }
  return best;
}

/// Feature used for the distance: the objective vector (simulated in the
/// target domain) or the genome itself.
inline Eigen::VectorXd to_feature(const std::vector<double>& x, const moea::Objectives& f, FeatureKind kind) {
  const auto& v = kind == FeatureKind::objective_space ? f : x;
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Finds x minimising |phi(F_T(x)) - target_latent| under the problem's box
/// and repair. Evaluation failures count as infinitely far.
template <moea::Problem P>
Candidate latent_inverse_search(const TransferModel& model, const Eigen::VectorXd& target_latent,
                                const P& target_problem, std::vector<Candidate> starts,
                                const InverseSearchConfig& cfg) {
  if (target_latent.size() != static_cast<Eigen::Index>(model.d)) {
    throw ParameterError("latent target has the wrong dimension");
  }
  auto probe = [&](std::vector<double> x) {
    Candidate c;
    c.probed = true;
    try {
      if (model.feature_kind == FeatureKind::objective_space) {
        c.f = target_problem.evaluate(x);
        c.evaluated = true;
      }
      c.distance = (tca_project(model, to_feature(x, c.f, model.feature_kind)) - target_latent).norm();
    } catch (const std::exception&) {
      c.distance = std::numeric_limits<double>::infinity();
      c.evaluated = false;
    }
    c.x = std::move(x);
    return c;
  };
  auto repair = [&](std::vector<double>& x) { target_problem.repair(x); };
  moea::Rng rng(cfg.seed);
  return pattern_search(probe, repair, std::move(starts), target_problem.lower_bounds(),
                        target_problem.upper_bounds(), cfg, rng);
}

}  // namespace trgo::transfer
