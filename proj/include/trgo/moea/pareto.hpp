#pragma once

// Pareto dominance, non-dominated sorting, crowding distance, truncation and
// the 2-D hypervolume indicator. All objectives are minimised.

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "trgo/error.hpp"

namespace trgo::moea {

using Objectives = std::vector<double>;

/// u dominates v: no worse in every objective and strictly better in one.
inline bool dominates(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw ParameterError("objective dimension mismatch");
  bool strictly_better = false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > v[i]) return false;
    if (u[i] < v[i]) strictly_better = true;
  }
  return strictly_better;
}

/// Fast non-dominated sort. Front 0 is the non-dominated set; indices inside
/// a front are ascending.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(
    const std::vector<Objectives>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  if (n == 0) return fronts;

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(points[p], points[q])) {
        dominated_by[p].push_back(q);
        ++domination_count[q];
      } else if (dominates(points[q], points[p])) {
        dominated_by[q].push_back(p);
        ++domination_count[p];
      }
    }
  }
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    if (domination_count[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto p : current) {
      for (auto q : dominated_by[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

/// Crowding distance of each member of `front` (same order as `front`).
/// Boundary members get +inf.
inline std::vector<double> crowding_distance(const std::vector<Objectives>& points,
                                             std::span<const std::size_t> front) {
  const std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n == 0) return distance;
  if (n <= 2) {
    std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
    return distance;
  }
  const std::size_t m = points[front[0]].size();
  std::vector<std::size_t> order(n);
  for (std::size_t obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points[front[a]][obj] < points[front[b]][obj];
    });
    const double lo = points[front[order.front()]][obj];
    const double hi = points[front[order.back()]][obj];
    distance[order.front()] = std::numeric_limits<double>::infinity();
    distance[order.back()] = std::numeric_limits<double>::infinity();
    if (hi - lo <= 0.0) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      distance[order[i]] +=
          (points[front[order[i + 1]]][obj] - points[front[order[i - 1]]][obj]) / (hi - lo);
    }
  }
  return distance;
}

/// Indices of the k best points: whole fronts in order, the boundary front
/// truncated by crowding distance (larger first, then lower index). The
/// result is sorted ascending.
inline std::vector<std::size_t> select_top_indices(const std::vector<Objectives>& points,
                                                   std::size_t k) {
  if (k > points.size()) throw ParameterError("cannot select more members than exist");
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (const auto& front : non_dominated_sort(points)) {
    if (chosen.size() == k) break;
    if (chosen.size() + front.size() <= k) {
      chosen.insert(chosen.end(), front.begin(), front.end());
      continue;
    }
    const auto dist = crowding_distance(points, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (dist[a] != dist[b]) return dist[a] > dist[b];
      return front[a] < front[b];
    });
    for (std::size_t i = 0; chosen.size() < k; ++i) chosen.push_back(front[order[i]]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

/// Area dominated by a 2-D point set and bounded by `ref`.
inline double hypervolume(std::vector<Objectives> front, const Objectives& ref) {
  if (ref.size() != 2) throw ParameterError("hypervolume is implemented for 2 objectives");
  for (const auto& p : front) {
    if (p.size() != 2) throw ParameterError("objective dimension mismatch");
    if (p[0] > ref[0] || p[1] > ref[1]) {
      throw ParameterError("point lies beyond the reference point");
    }
  }
  std::sort(front.begin(), front.end());
  double volume = 0.0;
  double ceiling = ref[1];
  for (const auto& p : front) {
    if (p[1] >= ceiling) continue;
    volume += (ref[0] - p[0]) * (ceiling - p[1]);
    ceiling = p[1];
  }
  return volume;
}

}  // namespace trgo::moea
