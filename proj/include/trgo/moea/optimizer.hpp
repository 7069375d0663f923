#pragma once

// NSGA-II, RM-MEDA and MOPSO behind one entry point, run_optimizer().
//
// The working population size is cfg.pop_size whatever the size of the
// initial population: each generation produces pop_size offspring and keeps
// the best pop_size of parents and offspring. Every
// candidate produced by a variation operator is clamped to the box and
// passed through Problem::repair before evaluation. All randomness comes
// from one mt19937_64 stream seeded from the config.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/moea/pareto.hpp"
#include "trgo/moea/population.hpp"
#include "trgo/moea/variation.hpp"

namespace trgo::moea {

enum class Algorithm { nsga2, rmmeda, mopso };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::nsga2: return "nsga2";
    case Algorithm::rmmeda: return "rmmeda";
    case Algorithm::mopso: return "mopso";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(const std::string& name) {
  if (name == "nsga2") return Algorithm::nsga2;
  if (name == "rmmeda") return Algorithm::rmmeda;
  if (name == "mopso") return Algorithm::mopso;
  throw ParameterError("unknown optimizer " + name + " (expected nsga2, rmmeda or mopso)");
}

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::nsga2;
  std::size_t pop_size = 200;
  int generations = 100;
  std::uint64_t rng_seed = 1;

  // NSGA-II
  double crossover_rate = 0.9;
  double crossover_eta = 15.0;
  double mutation_eta = 20.0;
  double mutation_rate = -1.0;  // <= 0 means 1 / dimension

  // RM-MEDA
  std::size_t clusters = 5;
  double extension = 0.25;
  int clustering_iterations = 50;

  // MOPSO
  std::size_t archive_size = 100;
  std::size_t grid_divisions = 30;
  double inertia = 0.4;
  double c1 = 2.0;
  double c2 = 2.0;
  double turbulence_rate = 0.5;

  void validate() const {
    if (pop_size < 4) throw ParameterError("pop_size must be >= 4");
    if (generations < 0) throw ParameterError("generations must be >= 0");
    if (clusters < 1) throw ParameterError("clusters must be >= 1");
    if (archive_size < 1 || grid_divisions < 1) throw ParameterError("bad MOPSO archive settings");
  }
};

struct GenerationStats {
  int generation = 0;
  Objectives mean;
  Objectives min;
  std::size_t evaluations = 0;  // cumulative

  bool operator==(const GenerationStats&) const = default;
};

using History = std::vector<GenerationStats>;

struct OptimizerResult {
  Population final;
  History history;
  std::size_t evaluations = 0;
};

inline GenerationStats population_stats(const Population& pop, std::size_t evaluations) {
  GenerationStats s;
  s.generation = pop.generation;
  s.evaluations = evaluations;
  if (pop.empty()) return s;
  const std::size_t m = pop.members.front().f.size();
  s.mean.assign(m, 0.0);
  s.min.assign(m, std::numeric_limits<double>::infinity());
  for (const auto& ind : pop.members) {
    for (std::size_t j = 0; j < m; ++j) {
      s.mean[j] += ind.f[j];
      s.min[j] = std::min(s.min[j], ind.f[j]);
    }
  }
  for (auto& v : s.mean) v /= static_cast<double>(pop.size());
  return s;
}

/// generation,mean_f1,min_f1,mean_f2,min_f2 (further objectives append
/// mean_fk,min_fk columns).
inline void write_history_csv(std::ostream& out, const History& history) {
  const std::size_t m = history.empty() ? 2 : history.front().mean.size();
  out << "generation";
  for (std::size_t j = 1; j <= m; ++j) out << ",mean_f" << j << ",min_f" << j;
  out << "\n";
  char buf[64];
  for (const auto& s : history) {
    out << s.generation;
    for (std::size_t j = 0; j < m; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", s.mean[j]);
      out << buf;
      std::snprintf(buf, sizeof(buf), ",%.17g", s.min[j]);
      out << buf;
    }
    out << "\n";
  }
}

namespace detail {

template <Problem P>
struct Context {
  const P& problem;
  const OptimizerConfig& cfg;
  std::vector<double> lo;
  std::vector<double> hi;
  Rng rng;
  std::size_t evaluations = 0;

  Context(const P& p, const OptimizerConfig& c)
      : problem(p), cfg(c), lo(p.lower_bounds()), hi(p.upper_bounds()), rng(c.rng_seed) {
    if (lo.size() != p.dimension() || hi.size() != p.dimension()) {
      throw ParameterError("bounds do not match problem dimension");
    }
  }

  Individual make(std::vector<double> x, int generation) {
    clamp_to_box(x, lo, hi);
    problem.repair(x);
    Individual ind;
    ind.f = evaluate_checked(problem, x, generation);
    ind.x = std::move(x);
    ind.evaluated = true;
    ++evaluations;
    return ind;
  }
};

struct RankInfo {
  std::vector<std::size_t> rank;
  std::vector<double> crowding;
};

inline RankInfo rank_population(const Population& pop) {
  const auto objs = pop.objectives();
  RankInfo info;
  info.rank.assign(pop.size(), 0);
  info.crowding.assign(pop.size(), 0.0);
  const auto fronts = non_dominated_sort(objs);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const auto dist = crowding_distance(objs, fronts[r]);
    for (std::size_t i = 0; i < fronts[r].size(); ++i) {
      info.rank[fronts[r][i]] = r;
      info.crowding[fronts[r][i]] = dist[i];
    }
  }
  return info;
}

inline std::size_t tournament(const RankInfo& info, Rng& rng) {
  const std::size_t n = info.rank.size();
  const std::size_t a = uniform_index(rng, n);
  const std::size_t b = uniform_index(rng, n);
  if (info.rank[a] != info.rank[b]) return info.rank[a] < info.rank[b] ? a : b;
  if (info.crowding[a] != info.crowding[b]) return info.crowding[a] > info.crowding[b] ? a : b;
  return std::min(a, b);
}

inline Population merge_and_truncate(const Population& parents, std::vector<Individual> offspring,
                                     std::size_t keep, int generation) {
  Population combined;
  combined.members = parents.members;
  for (auto& o : offspring) combined.members.push_back(std::move(o));
  Population next = select_top(combined, std::min(keep, combined.size()));
  next.generation = generation;
  return next;
}

template <Problem P>
Population nsga2_step(const Population& pop, Context<P>& ctx, int generation) {
  const auto info = rank_population(pop);
  const double mutation_rate =
      ctx.cfg.mutation_rate > 0.0 ? ctx.cfg.mutation_rate
                                  : 1.0 / static_cast<double>(ctx.problem.dimension());
  const std::size_t count = ctx.cfg.pop_size;
  std::vector<Individual> offspring;
  offspring.reserve(count);
  while (offspring.size() < count) {
    auto c1 = pop.members[tournament(info, ctx.rng)].x;
    auto c2 = pop.members[tournament(info, ctx.rng)].x;
    if (uniform01(ctx.rng) <= ctx.cfg.crossover_rate) {
      sbx_crossover(c1, c2, ctx.lo, ctx.hi, ctx.cfg.crossover_eta, ctx.rng);
    }
    polynomial_mutation(c1, ctx.lo, ctx.hi, ctx.cfg.mutation_eta, mutation_rate, ctx.rng);
    polynomial_mutation(c2, ctx.lo, ctx.hi, ctx.cfg.mutation_eta, mutation_rate, ctx.rng);
    offspring.push_back(ctx.make(std::move(c1), generation));
    if (offspring.size() < count) offspring.push_back(ctx.make(std::move(c2), generation));
  }
  return merge_and_truncate(pop, std::move(offspring), count, generation);
}

// RM-MEDA: local PCA partitions the population into clusters, each modelled
// as a 1-D segment (two objectives) extended by `extension` at both ends
// plus isotropic Gaussian noise from the discarded eigenvalues.
struct LineModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd direction;
  double from = 0.0;
  double to = 0.0;
  double sigma = 0.0;
};

inline std::vector<LineModel> build_line_models(const std::vector<Eigen::VectorXd>& points,
                                                std::size_t clusters, double extension,
                                                int iterations, Rng& rng) {
  const std::size_t n = points.size();
  const auto dim = points.front().size();
  const std::size_t k = std::max<std::size_t>(1, std::min(clusters, n / 2));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> assign(n);
  for (std::size_t i = 0; i < n; ++i) assign[order[i]] = i % k;

  std::vector<Eigen::VectorXd> means(k, Eigen::VectorXd::Zero(dim));
  std::vector<Eigen::VectorXd> dirs(k, Eigen::VectorXd::Zero(dim));
  std::vector<Eigen::VectorXd> eigvals(k, Eigen::VectorXd::Zero(dim));

  auto fit = [&]() {
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] == c) idx.push_back(i);
      }
      if (idx.empty()) idx.push_back(uniform_index(rng, n));
      Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
      for (auto i : idx) mu += points[i];
      mu /= static_cast<double>(idx.size());
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
      for (auto i : idx) {
        const Eigen::VectorXd d = points[i] - mu;
        cov.noalias() += d * d.transpose();
      }
      cov /= static_cast<double>(idx.size());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
      means[c] = mu;
      dirs[c] = es.eigenvectors().col(dim - 1);
      eigvals[c] = es.eigenvalues().cwiseMax(0.0);
    }
  };

  for (int it = 0; it < iterations; ++it) {
    fit();
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = assign[i];
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const Eigen::VectorXd d = points[i] - means[c];
        const double along = d.dot(dirs[c]);
        const double dist = d.squaredNorm() - along * along;
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (best != assign[i]) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  fit();

  std::vector<LineModel> models;
  for (std::size_t c = 0; c < k; ++c) {
    LineModel m;
    m.mean = means[c];
    m.direction = dirs[c];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (assign[i] != c) continue;
      const double s = (points[i] - m.mean).dot(m.direction);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      any = true;
    }
    if (!any) lo = hi = 0.0;
    const double span = hi - lo;
    m.from = lo - extension * span;
    m.to = hi + extension * span;
    const double rest = eigvals[c].head(dim - 1).sum();
    m.sigma = dim > 1 ? std::sqrt(rest / static_cast<double>(dim - 1)) : 0.0;
    models.push_back(std::move(m));
  }
  return models;
}

template <Problem P>
Population rmmeda_step(const Population& pop, Context<P>& ctx, int generation) {
  std::vector<Eigen::VectorXd> points;
  points.reserve(pop.size());
  for (const auto& m : pop.members) {
    points.push_back(Eigen::Map<const Eigen::VectorXd>(m.x.data(), static_cast<Eigen::Index>(m.x.size())));
  }
  const auto models = build_line_models(points, ctx.cfg.clusters, ctx.cfg.extension,
                                        ctx.cfg.clustering_iterations, ctx.rng);
  std::vector<double> volume;
  for (const auto& m : models) volume.push_back(m.to - m.from);
  const double total = std::accumulate(volume.begin(), volume.end(), 0.0);

  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t count = ctx.cfg.pop_size;
  std::vector<Individual> offspring;
  offspring.reserve(count);
  while (offspring.size() < count) {
    std::size_t c = 0;
    if (total > 0.0) {
      double pick = uniform01(ctx.rng) * total;
      while (c + 1 < models.size() && pick > volume[c]) pick -= volume[c++];
    } else {
      c = uniform_index(ctx.rng, models.size());
    }
    const auto& m = models[c];
    const double s = m.from + uniform01(ctx.rng) * (m.to - m.from);
    Eigen::VectorXd y = m.mean + s * m.direction;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += m.sigma * gauss(ctx.rng);
    offspring.push_back(ctx.make(std::vector<double>(y.data(), y.data() + y.size()), generation));
  }
  return merge_and_truncate(pop, std::move(offspring), count, generation);
}

// MOPSO with an external archive on an adaptive hypercube grid: leaders are
// drawn by roulette over occupied cubes (fitness 10 / occupancy) and the
// archive sheds members from its most crowded cube when full. A turbulence
// operator perturbs one coordinate with a probability and range that decay
// over the run.
class HypercubeGrid {
 public:
  HypercubeGrid(const std::vector<Individual>& archive, std::size_t divisions)
      : divisions_(divisions) {
    const std::size_t m = archive.front().f.size();
    lo_.assign(m, std::numeric_limits<double>::infinity());
    hi_.assign(m, -std::numeric_limits<double>::infinity());
    for (const auto& a : archive) {
      for (std::size_t j = 0; j < m; ++j) {
        lo_[j] = std::min(lo_[j], a.f[j]);
        hi_[j] = std::max(hi_[j], a.f[j]);
      }
    }
    for (const auto& a : archive) cells_.push_back(cell_of(a.f));
    for (std::size_t i = 0; i < cells_.size(); ++i) occupancy_[cells_[i]].push_back(i);
  }

  std::size_t cell_of(const Objectives& f) const {
    std::size_t key = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double width = hi_[j] - lo_[j];
      std::size_t c = 0;
      if (width > 0.0) {
        c = static_cast<std::size_t>((f[j] - lo_[j]) / width * static_cast<double>(divisions_));
        c = std::min(c, divisions_ - 1);
      }
      key = key * divisions_ + c;
    }
    return key;
  }

  const std::map<std::size_t, std::vector<std::size_t>>& occupancy() const { return occupancy_; }

 private:
  std::size_t divisions_;
  Objectives lo_, hi_;
  std::vector<std::size_t> cells_;
  std::map<std::size_t, std::vector<std::size_t>> occupancy_;
};

inline void archive_insert(std::vector<Individual>& archive, const Individual& cand) {
  for (const auto& a : archive) {
    if (dominates(a.f, cand.f) || a.x == cand.x) return;
  }
  std::erase_if(archive, [&](const Individual& a) { return dominates(cand.f, a.f); });
  archive.push_back(cand);
}

inline void archive_prune(std::vector<Individual>& archive, std::size_t cap,
                          std::size_t divisions, Rng& rng) {
  while (archive.size() > cap) {
    const HypercubeGrid grid(archive, divisions);
    const std::vector<std::size_t>* crowded = nullptr;
    for (const auto& [cell, members] : grid.occupancy()) {
      if (!crowded || members.size() > crowded->size()) crowded = &members;
    }
    archive.erase(archive.begin() +
                  static_cast<std::ptrdiff_t>((*crowded)[uniform_index(rng, crowded->size())]));
  }
}

inline const Individual& select_leader(const std::vector<Individual>& archive,
                                       std::size_t divisions, Rng& rng) {
  const HypercubeGrid grid(archive, divisions);
  double total = 0.0;
  for (const auto& [cell, members] : grid.occupancy()) total += 10.0 / static_cast<double>(members.size());
  double pick = uniform01(rng) * total;
  for (const auto& [cell, members] : grid.occupancy()) {
    pick -= 10.0 / static_cast<double>(members.size());
    if (pick <= 0.0) return archive[members[uniform_index(rng, members.size())]];
  }
  const auto& last = grid.occupancy().rbegin()->second;
  return archive[last[uniform_index(rng, last.size())]];
}

inline Population mopso_snapshot(const std::vector<Individual>& archive,
                                 const std::vector<Individual>& swarm, int generation) {
  // Best swarm-size members of archive and swarm, duplicates removed.
  Population pool;
  pool.generation = generation;
  for (const auto* group : {&archive, &swarm}) {
    for (const auto& ind : *group) {
      const bool seen = std::any_of(pool.members.begin(), pool.members.end(),
                                    [&](const Individual& p) { return p.x == ind.x; });
      if (!seen) pool.members.push_back(ind);
    }
  }
  Population out = select_top(pool, std::min(swarm.size(), pool.size()));
  out.generation = generation;
  return out;
}

template <Problem P>
OptimizerResult run_mopso(Population init, Context<P>& ctx, OptimizerResult result) {
  const std::size_t n = ctx.cfg.pop_size;
  const std::size_t dim = ctx.problem.dimension();
  const int total = ctx.cfg.generations;

  // A short initial population is cycled to fill the swarm; a long one is
  // truncated by select_top.
  std::vector<Individual> swarm;
  if (init.size() >= n) {
    swarm = select_top(init, n).members;
  } else {
    for (std::size_t i = 0; swarm.size() < n; ++i) swarm.push_back(init.members[i % init.size()]);
  }
  std::vector<Individual> best = swarm;
  std::vector<std::vector<double>> velocity(n, std::vector<double>(dim, 0.0));
  std::vector<Individual> archive;
  for (const auto& s : swarm) archive_insert(archive, s);
  archive_prune(archive, ctx.cfg.archive_size, ctx.cfg.grid_divisions, ctx.rng);

  for (int g = 1; g <= total; ++g) {
    const double progress = 1.0 - static_cast<double>(g - 1) / static_cast<double>(total);
    const double turbulence = std::pow(progress, 5.0 / ctx.cfg.turbulence_rate);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& leader = select_leader(archive, ctx.cfg.grid_divisions, ctx.rng);
      auto x = swarm[i].x;
      for (std::size_t d = 0; d < dim; ++d) {
        const double r1 = uniform01(ctx.rng), r2 = uniform01(ctx.rng);
        velocity[i][d] = ctx.cfg.inertia * velocity[i][d] +
                         ctx.cfg.c1 * r1 * (best[i].x[d] - x[d]) +
                         ctx.cfg.c2 * r2 * (leader.x[d] - x[d]);
        x[d] += velocity[i][d];
        if (x[d] < ctx.lo[d]) {
          x[d] = ctx.lo[d];
          velocity[i][d] = -velocity[i][d];
        } else if (x[d] > ctx.hi[d]) {
          x[d] = ctx.hi[d];
          velocity[i][d] = -velocity[i][d];
        }
      }
      if (uniform01(ctx.rng) < turbulence) {
        const std::size_t d = uniform_index(ctx.rng, dim);
        const double range = (ctx.hi[d] - ctx.lo[d]) * turbulence;
        const double a = std::max(x[d] - range, ctx.lo[d]);
        const double b = std::min(x[d] + range, ctx.hi[d]);
        x[d] = a + uniform01(ctx.rng) * (b - a);
      }
      swarm[i] = ctx.make(std::move(x), g);
    }
    for (std::size_t i = 0; i < n; ++i) {
      archive_insert(archive, swarm[i]);
      if (dominates(swarm[i].f, best[i].f)) {
        best[i] = swarm[i];
      } else if (!dominates(best[i].f, swarm[i].f) && uniform01(ctx.rng) < 0.5) {
        best[i] = swarm[i];
      }
    }
    archive_prune(archive, ctx.cfg.archive_size, ctx.cfg.grid_divisions, ctx.rng);
    const Population snap = mopso_snapshot(archive, swarm, g);
    result.history.push_back(population_stats(snap, ctx.evaluations));
    result.final = snap;
  }
  return result;
}

}  // namespace detail

/// Runs cfg.generations iterations of the configured algorithm from `init`.
/// Unevaluated members of `init` are evaluated first (generation 0). The
/// history has one entry per generation including generation 0.
template <Problem P>
OptimizerResult run_optimizer(Population init, const P& problem, const OptimizerConfig& cfg) {
  if (init.empty()) throw ParameterError("initial population is empty");
  if (cfg.generations < 0) throw ParameterError("generations must be >= 0");
  detail::Context<P> ctx(problem, cfg);

  init.generation = 0;
  ctx.evaluations += evaluate_population(init, problem);

  OptimizerResult result;
  result.history.push_back(population_stats(init, ctx.evaluations));
  result.final = init;
  if (cfg.generations == 0) {
    result.evaluations = ctx.evaluations;
    return result;
  }

  if (cfg.algorithm == Algorithm::mopso) {
    result = detail::run_mopso(std::move(init), ctx, std::move(result));
    result.evaluations = ctx.evaluations;
    return result;
  }

  Population pop = std::move(init);
  for (int g = 1; g <= cfg.generations; ++g) {
    pop = cfg.algorithm == Algorithm::nsga2 ? detail::nsga2_step(pop, ctx, g)
                                            : detail::rmmeda_step(pop, ctx, g);
    result.history.push_back(population_stats(pop, ctx.evaluations));
  }
  result.final = std::move(pop);
  result.evaluations = ctx.evaluations;
  return result;
}

}  // namespace trgo::moea
