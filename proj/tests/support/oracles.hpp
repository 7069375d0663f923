#pragma once

// Test-only problems and brute-force references shared by the unit tests and
// the acceptance binary.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "trgo/moea/pareto.hpp"
#include "trgo/moea/population.hpp"

namespace trgo::testing {

// f1 = x^2, f2 = (x - 2)^2 on x in [-4, 4].
struct ConvexProblem {
  std::size_t dimension() const { return 1; }
  std::vector<double> lower_bounds() const { return {-4.0}; }
  std::vector<double> upper_bounds() const { return {4.0}; }
  void repair(std::vector<double>&) const {}
  moea::Objectives evaluate(const std::vector<double>& x) const {
    return {x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0)};
  }
};

// ZDT1-like problem on [0,1]^dim whose repair enforces x0 + x1 <= 1.
struct ConstrainedProblem {
  std::size_t dim = 6;
  mutable std::size_t calls = 0;

  std::size_t dimension() const { return dim; }
  std::vector<double> lower_bounds() const { return std::vector<double>(dim, 0.0); }
  std::vector<double> upper_bounds() const { return std::vector<double>(dim, 1.0); }
  static bool feasible(const std::vector<double>& x) {
    for (double v : x)
      if (v < 0.0 || v > 1.0) return false;
    return x[0] + x[1] <= 1.0 + 1e-12;
  }
  void repair(std::vector<double>& x) const {
    const double s = x[0] + x[1];
    if (s > 1.0) {
      x[0] /= s;
      x[1] /= s;
    }
  }
  moea::Objectives evaluate(const std::vector<double>& x) const {
    if (!feasible(x)) throw std::runtime_error("infeasible point evaluated");
    ++calls;
    double g = 0.0;
    for (std::size_t i = 1; i < dim; ++i) g += x[i];
    g = 1.0 + 9.0 * g / static_cast<double>(dim - 1);
    return {x[0], g * (1.0 - std::sqrt(x[0] / g))};
  }
};

inline moea::Population random_population(const ConstrainedProblem& p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  moea::Population pop;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(p.dim);
    for (auto& v : x) v = u(rng);
    p.repair(x);
    pop.members.push_back({x, {}, false});
  }
  return pop;
}

inline moea::Population uniform_population(const ConvexProblem& p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  moea::Population pop;
  for (std::size_t i = 0; i < n; ++i) pop.members.push_back({{u(rng)}, {}, false});
  (void)p;
  return pop;
}

// Repeatedly peels off the points no remaining point dominates.
inline std::vector<std::vector<std::size_t>> brute_force_fronts(const std::vector<moea::Objectives>& pts) {
  auto dom = [](const moea::Objectives& u, const moea::Objectives& v) {
    bool strict = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] > v[i]) return false;
      if (u[i] < v[i]) strict = true;
    }
    return strict;
  };
  std::vector<bool> removed(pts.size(), false);
  std::vector<std::vector<std::size_t>> fronts;
  std::size_t left = pts.size();
  while (left > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (removed[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
        if (!removed[j] && j != i && dom(pts[j], pts[i])) dominated = true;
      }
      if (!dominated) front.push_back(i);
    }
    for (auto i : front) removed[i] = true;
    left -= front.size();
    fronts.push_back(front);
  }
  return fronts;
}

// Hypervolume of the analytic front of ConvexProblem, by dense sampling of
// x in [0, 2].
inline double convex_reference_hypervolume(const moea::Objectives& ref, std::size_t samples = 20001) {
  std::vector<moea::Objectives> pts;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = 2.0 * static_cast<double>(i) / static_cast<double>(samples - 1);
    pts.push_back({x * x, (x - 2.0) * (x - 2.0)});
  }
  return moea::hypervolume(pts, ref);
}

// n points in `dim` dimensions, standard normal plus `shift` per coordinate.
inline std::vector<Eigen::VectorXd> gaussian_cloud(std::size_t n, std::size_t dim, double shift,
                                                   std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
    for (auto& c : v) c = g(rng) + shift;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace trgo::testing
