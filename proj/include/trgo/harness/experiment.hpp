#pragma once

// Source optimisation, the Random / PlatData / TrGO comparison in a target
// environment, and time-to-benchmark analysis.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/harness/gait_problem.hpp"
#include "trgo/moea/optimizer.hpp"
#include "trgo/moea/population.hpp"
#include "trgo/objectives.hpp"
#include "trgo/terrain.hpp"
#include "trgo/transfer/tr_gigp.hpp"

namespace trgo::harness {

enum class Condition { random, platdata, trgo };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::random: return "Random";
    case Condition::platdata: return "PlatData";
    case Condition::trgo: return "TrGO";
  }
  return "unknown";
}

inline Condition parse_condition(const std::string& name) {
  std::string lower;
  for (char ch : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (lower == "random") return Condition::random;
  if (lower == "platdata") return Condition::platdata;
  if (lower == "trgo" || lower == "tr-go") return Condition::trgo;
  throw ParameterError("unknown condition " + name + " (expected Random, PlatData or TrGO)");
}

/// Generation sentinel for "benchmark never reached".
inline constexpr int kNever = std::numeric_limits<int>::max();

struct TransferSettings {
  transfer::TrGigpConfig tr_gigp;
  std::size_t target_samples = 100;
};

struct ExperimentSpec {
  std::string source_env = "E0";
  std::string target_env = "E1";
  std::vector<Condition> conditions{Condition::random, Condition::platdata, Condition::trgo};
  moea::OptimizerConfig optimizer{.pop_size = 40, .generations = 30};
  int source_generations = 30;
  TransferSettings transfer;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::uint64_t terrain_seed = 1;
  int benchmark_generation = 10;
  GaitModel model;
  std::string output_dir;

  void validate() const {
    if (conditions.empty()) throw ParameterError("at least one condition is required");
    if (seeds.empty()) throw ParameterError("at least one seed is required");
    optimizer.validate();
    if (optimizer.generations < 1) throw ParameterError("generations must be >= 1");
    if (source_generations < 0) throw ParameterError("source_generations must be >= 0");
    if (benchmark_generation < 0) throw ParameterError("benchmark_generation must be >= 0");
    if (transfer.target_samples < 1) throw ParameterError("target_samples must be >= 1");
    transfer.tr_gigp.search.validate();
    terrain_preset(source_env);
    terrain_preset(target_env);
  }
};

struct RunResult {
  Condition condition = Condition::random;
  std::uint64_t seed = 0;
  std::string environment;
  moea::Population final_front;
  moea::Population initial;
  moea::History history;
  std::size_t evaluations = 0;
  double wall_time = 0.0;  // seconds; never exported
  std::optional<int> benchmark_generation;  // kNever when not reached
  bool degraded = false;
};

/// Independent, reproducible substream for one purpose of one run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
  std::uint32_t w[2];
  seq.generate(w, w + 2);
  return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

namespace stream {
inline constexpr std::uint32_t source_init = 1;
inline constexpr std::uint32_t source_opt = 2;
inline constexpr std::uint32_t random_init = 3;
inline constexpr std::uint32_t target_samples = 4;
inline constexpr std::uint32_t search = 5;
inline constexpr std::uint32_t target_opt = 6;
}  // namespace stream

/// Environment maps are fixed by name and terrain seed, independent of the
/// run seed.
inline Heightmap make_environment(const std::string& name, std::uint64_t terrain_seed) {
  return terrain_preset(name).generate(terrain_seed);
}

/// Template-perturbed initial population of spec.optimizer.pop_size,
/// optimised in the source environment; returns the best pop_size / 2.
inline moea::Population run_source(const ExperimentSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Heightmap env = make_environment(spec.source_env, spec.terrain_seed);
  const GaitProblem problem(env, spec.model);
  moea::Rng rng(derive_seed(seed, stream::source_init));
  moea::Population init = sample_around_template(problem, spec.optimizer.pop_size, rng);
  moea::OptimizerConfig cfg = spec.optimizer;
  cfg.generations = spec.source_generations;
  cfg.rng_seed = derive_seed(seed, stream::source_opt);
  const auto result = moea::run_optimizer(std::move(init), problem, cfg);
  moea::Population best = moea::select_top(result.final, spec.optimizer.pop_size / 2);
  best.generation = 0;
  return best;
}

/// First generation whose mean objectives are all at or below the benchmark.
inline int time_to_benchmark(const moea::History& history, const moea::Objectives& benchmark) {
  if (history.empty()) throw ParameterError("empty history");
  for (const auto& s : history) {
    if (s.mean.size() != benchmark.size()) throw ParameterError("benchmark dimension mismatch");
    bool ok = true;
    for (std::size_t j = 0; j < benchmark.size(); ++j) ok = ok && s.mean[j] <= benchmark[j];
    if (ok) return s.generation;
  }
  return kNever;
}

/// Mean objectives of the TrGO run at the benchmark generation (the last
/// generation when the run is shorter).
inline moea::Objectives benchmark_from(const moea::History& trgo_history, int generation) {
  if (trgo_history.empty()) throw ParameterError("empty history");
  const std::size_t g = std::min<std::size_t>(static_cast<std::size_t>(generation), trgo_history.size() - 1);
  return trgo_history[g].mean;
}

inline moea::Population evaluate_initial(moea::Population pop, const GaitProblem& problem,
                                         std::size_t& evaluations) {
  pop.generation = 0;
  evaluations += moea::evaluate_population(pop, problem);
  return pop;
}

/// Builds the condition's initial population in `target_env`, optimises it
/// there and returns the final front and history. Benchmark generations are
/// filled in by run_comparison.
inline RunResult run_condition(Condition condition, const ExperimentSpec& spec,
                               const moea::Population& source_pop, std::uint64_t seed,
                               const std::string& target_env) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const TerrainSpec tspec = terrain_preset(target_env);
  const Heightmap env = tspec.generate(spec.terrain_seed);
  const GaitProblem problem(env, spec.model);

  RunResult r;
  r.condition = condition;
  r.seed = seed;
  r.environment = target_env;
  r.degraded = tspec.stress;

  moea::Population init;
  std::size_t evaluations = 0;
  switch (condition) {
    case Condition::random: {
      moea::Rng rng(derive_seed(seed, stream::random_init));
      init = sample_around_template(problem, spec.optimizer.pop_size, rng);
      break;
    }
    case Condition::platdata: {
      if (source_pop.empty()) throw ParameterError("PlatData needs a source population");
      for (const auto& m : source_pop.members) init.members.push_back({m.x, {}, false});
      break;
    }
    case Condition::trgo: {
      if (source_pop.empty()) throw ParameterError("TrGO needs a source population");
      moea::Rng rng(derive_seed(seed, stream::target_samples));
      moea::Population samples = sample_around_template(problem, spec.transfer.target_samples, rng);
      samples = evaluate_initial(std::move(samples), problem, evaluations);
      transfer::TrGigpConfig tc = spec.transfer.tr_gigp;
      tc.penalty_value = spec.model.objective.penalty_value;
      tc.search.seed = derive_seed(seed, stream::search);
      auto out = transfer::tr_gigp(source_pop, samples, problem, tc);
      evaluations += out.evaluations;
      r.degraded = r.degraded || out.degenerate_samples;
      init = std::move(out.population);
      break;
    }
  }
  init = evaluate_initial(std::move(init), problem, evaluations);
  r.initial = init;

  moea::OptimizerConfig cfg = spec.optimizer;
  cfg.rng_seed = derive_seed(seed, stream::target_opt);
  auto result = moea::run_optimizer(std::move(init), problem, cfg);
  // History counts include evaluations spent building the initial population.
  for (auto& s : result.history) s.evaluations += evaluations;
  r.history = std::move(result.history);
  r.evaluations = evaluations + result.evaluations;
  r.final_front = moea::first_front(result.final);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// One TrGO result per environment, each transferred from `source_pop`.
inline std::vector<RunResult> run_trgo_driver(const ExperimentSpec& spec, const moea::Population& source_pop,
                                              const std::vector<std::string>& environments, std::uint64_t seed) {
  if (environments.empty()) throw ParameterError("environment sequence is empty");
  std::vector<RunResult> results;
  for (const auto& env : environments) {
    results.push_back(run_condition(Condition::trgo, spec, source_pop, seed, env));
  }
  return results;
}

/// Sets benchmark_generation on every result that shares a seed and
/// environment with a TrGO result.
inline void assign_benchmarks(std::vector<RunResult>& results, int benchmark_generation) {
  for (const auto& ref : results) {
    if (ref.condition != Condition::trgo) continue;
    const auto bench = benchmark_from(ref.history, benchmark_generation);
    for (auto& r : results) {
      if (r.seed == ref.seed && r.environment == ref.environment) {
        r.benchmark_generation = time_to_benchmark(r.history, bench);
      }
    }
  }
}

struct Comparison {
  std::vector<moea::Population> source;  // per seed
  std::vector<RunResult> runs;           // seed-major, conditions in spec order
};

inline Comparison run_comparison(const ExperimentSpec& spec) {
  spec.validate();
  const bool needs_source = std::any_of(spec.conditions.begin(), spec.conditions.end(),
                                        [](Condition c) { return c != Condition::random; });
  Comparison out;
  for (auto seed : spec.seeds) {
    moea::Population source = needs_source ? run_source(spec, seed) : moea::Population{};
    for (auto c : spec.conditions) out.runs.push_back(run_condition(c, spec, source, seed, spec.target_env));
    out.source.push_back(std::move(source));
  }
  assign_benchmarks(out.runs, spec.benchmark_generation);
  return out;
}

// ---------------------------------------------------------------------------
// Summary statistics

/// Median with kNever treated as +inf; +inf when the middle pair touches it.
inline double median_generation(std::vector<int> values) {
  if (values.empty()) throw ParameterError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  auto as_double = [](int v) { return v == kNever ? std::numeric_limits<double>::infinity() : double(v); };
  if (n % 2 == 1) return as_double(values[n / 2]);
  return 0.5 * (as_double(values[n / 2 - 1]) + as_double(values[n / 2]));
}

/// Random / TrGO benchmark generations. A zero denominator gives 1 when the
/// numerator is also zero and +inf otherwise; both unreached gives 1.
inline double speedup_ratio(double numerator, double denominator) {
  const double inf = std::numeric_limits<double>::infinity();
  if (std::isinf(numerator) && std::isinf(denominator)) return 1.0;
  if (std::isinf(numerator)) return inf;
  if (std::isinf(denominator)) return 0.0;
  if (denominator == 0.0) return numerator == 0.0 ? 1.0 : inf;
  return numerator / denominator;
}

inline std::vector<int> benchmark_generations(const std::vector<RunResult>& runs, Condition c,
                                              const std::string& environment) {
  std::vector<int> out;
  for (const auto& r : runs) {
    if (r.condition == c && r.environment == environment && r.benchmark_generation) {
      out.push_back(*r.benchmark_generation);
    }
  }
  return out;
}

}  // namespace trgo::harness
