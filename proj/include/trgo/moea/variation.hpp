#pragma once

// Real-coded variation operators shared by the optimizers.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

namespace trgo::moea {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline void clamp_to_box(std::vector<double>& x, const std::vector<double>& lo,
                         const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

/// Bounded simulated binary crossover.
inline void sbx_crossover(std::vector<double>& c1, std::vector<double>& c2,
                          const std::vector<double>& lo, const std::vector<double>& hi,
                          double eta, Rng& rng) {
  for (std::size_t i = 0; i < c1.size(); ++i) {
    if (uniform01(rng) > 0.5) continue;
    if (std::abs(c1[i] - c2[i]) <= 1e-14) continue;
    const double y1 = std::min(c1[i], c2[i]);
    const double y2 = std::max(c1[i], c2[i]);
    const double yl = lo[i], yu = hi[i];
    const double r = uniform01(rng);
    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
      return r <= 1.0 / alpha ? std::pow(r * alpha, 1.0 / (eta + 1.0))
                              : std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta + 1.0));
    };
    const double betaq1 = spread(1.0 + 2.0 * (y1 - yl) / (y2 - y1));
    const double betaq2 = spread(1.0 + 2.0 * (yu - y2) / (y2 - y1));
    double a = std::clamp(0.5 * ((y1 + y2) - betaq1 * (y2 - y1)), yl, yu);
    double b = std::clamp(0.5 * ((y1 + y2) + betaq2 * (y2 - y1)), yl, yu);
    if (uniform01(rng) <= 0.5) std::swap(a, b);
    c1[i] = a;
    c2[i] = b;
  }
}

/// Bounded polynomial mutation, each variable with probability `rate`.
inline void polynomial_mutation(std::vector<double>& x, const std::vector<double>& lo,
                                const std::vector<double>& hi, double eta, double rate,
                                Rng& rng) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (uniform01(rng) > rate) continue;
    const double yl = lo[i], yu = hi[i];
    if (yu - yl <= 0.0) continue;
    const double y = x[i];
    const double d1 = (y - yl) / (yu - yl);
    const double d2 = (yu - y) / (yu - yl);
    const double r = uniform01(rng);
    const double pw = 1.0 / (eta + 1.0);
    double dq;
    if (r <= 0.5) {
      const double v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
      dq = std::pow(v, pw) - 1.0;
    } else {
      const double v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      dq = 1.0 - std::pow(v, pw);
    }
    x[i] = std::clamp(y + dq * (yu - yl), yl, yu);
  }
}

}  // namespace trgo::moea
