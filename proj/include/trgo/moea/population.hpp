#pragma once

#include <concepts>
#include <cstdint>
#include <exception>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/moea/pareto.hpp"

namespace trgo::moea {

/// A box-bounded multi-objective problem over real vectors. `repair` maps any
/// in-box vector to a feasible one; `evaluate` must be pure.
template <class P>
concept Problem = requires(const P& p, std::vector<double>& x, const std::vector<double>& cx) {
  { p.dimension() } -> std::convertible_to<std::size_t>;
  { p.lower_bounds() } -> std::convertible_to<std::vector<double>>;
  { p.upper_bounds() } -> std::convertible_to<std::vector<double>>;
  { p.repair(x) };
  { p.evaluate(cx) } -> std::convertible_to<Objectives>;
};

struct Individual {
  std::vector<double> x;
  Objectives f;
  bool evaluated = false;

  bool operator==(const Individual&) const = default;
};

struct Population {
  std::vector<Individual> members;
  int generation = 0;

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }

  std::vector<Objectives> objectives() const {
    std::vector<Objectives> out;
    out.reserve(members.size());
    for (const auto& m : members) {
      if (!m.evaluated) throw ParameterError("population contains an unevaluated individual");
      out.push_back(m.f);
    }
    return out;
  }

  bool operator==(const Population&) const = default;
};

inline std::vector<std::vector<std::size_t>> non_dominated_sort(const Population& pop) {
  return non_dominated_sort(pop.objectives());
}

inline Population select_top(const Population& pop, std::size_t k) {
  Population out;
  out.generation = pop.generation;
  for (auto i : select_top_indices(pop.objectives(), k)) out.members.push_back(pop.members[i]);
  return out;
}

/// Members of front 0.
inline Population first_front(const Population& pop) {
  Population out;
  out.generation = pop.generation;
  const auto fronts = non_dominated_sort(pop);
  if (fronts.empty()) return out;
  for (auto i : fronts.front()) out.members.push_back(pop.members[i]);
  return out;
}

/// Forwards to another problem and counts evaluate() calls.
template <Problem P>
struct CountingProblem {
  const P& inner;
  std::size_t* calls;

  std::size_t dimension() const { return inner.dimension(); }
  std::vector<double> lower_bounds() const { return inner.lower_bounds(); }
  std::vector<double> upper_bounds() const { return inner.upper_bounds(); }
  void repair(std::vector<double>& x) const { inner.repair(x); }
  Objectives evaluate(const std::vector<double>& x) const {
    ++*calls;
    return inner.evaluate(x);
  }
};

template <Problem P>
Objectives evaluate_checked(const P& problem, const std::vector<double>& x, int generation) {
  try {
    return problem.evaluate(x);
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(generation, e.what());
  }
}

/// Evaluates every member not yet evaluated. Returns the number of calls.
template <Problem P>
std::size_t evaluate_population(Population& pop, const P& problem) {
  std::size_t calls = 0;
  for (auto& m : pop.members) {
    if (m.evaluated) continue;
    m.f = evaluate_checked(problem, m.x, pop.generation);
    m.evaluated = true;
    ++calls;
  }
  return calls;
}

}  // namespace trgo::moea
