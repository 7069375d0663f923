#pragma once

// Initial target population by transfer: fit TCA on source and target
// features, then for every source individual search the target genome whose
// projected feature lands on the source individual's latent point.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/moea/population.hpp"
#include "trgo/transfer/inverse_search.hpp"
#include "trgo/transfer/kernel.hpp"
#include "trgo/transfer/tca.hpp"

namespace trgo::transfer {

struct TrGigpConfig {
  TcaOptions tca{.d = 20, .mu = 0.5, .rel_eigen_floor = 1e-12, .clip_to_rank = true};
  KernelConfig kernel;
  FeatureKind features = FeatureKind::objective_space;
  InverseSearchConfig search;
  double penalty_value = 1e6;
};

struct TrGigpResult {
  moea::Population population;
  TransferModel model;
  bool degenerate_samples = false;  // every target sample was a penalty
  bool rank_clipped = false;        // fewer than the requested components
  std::size_t evaluations = 0;
};

inline bool is_penalty_objectives(const moea::Objectives& f, double penalty_value) {
  return std::any_of(f.begin(), f.end(), [&](double v) { return v >= penalty_value; });
}

/// Members whose objectives are not the penalty pair.
inline moea::Population drop_penalties(const moea::Population& pop, double penalty_value) {
  moea::Population out;
  out.generation = pop.generation;
  for (const auto& m : pop.members) {
    if (!m.evaluated) throw ParameterError("population contains an unevaluated individual");
    if (!is_penalty_objectives(m.f, penalty_value)) out.members.push_back(m);
  }
  return out;
}

inline Eigen::VectorXd feature_of(const moea::Individual& ind, FeatureKind kind) {
  return to_feature(ind.x, ind.f, kind);
}

template <moea::Problem P>
TrGigpResult tr_gigp(const moea::Population& pop_s, const moea::Population& samples_t,
                     const P& target_problem, const TrGigpConfig& cfg) {
  if (pop_s.empty() || samples_t.empty()) throw ParameterError("tr_gigp needs source and target samples");
  cfg.search.validate();

  TrGigpResult result;
  moea::Population src = drop_penalties(pop_s, cfg.penalty_value);
  moea::Population tgt = drop_penalties(samples_t, cfg.penalty_value);
  if (src.empty()) src = pop_s;
  if (tgt.empty()) {
    tgt = samples_t;
    result.degenerate_samples = true;
  }

  FeatureSet feats;
  feats.kind = cfg.features;
  for (const auto& m : src.members) feats.source.push_back(feature_of(m, cfg.features));
  for (const auto& m : tgt.members) feats.target.push_back(feature_of(m, cfg.features));

  TcaOptions opt = cfg.tca;
  opt.d = std::min(opt.d, feats.total());
  result.model = tca_fit(feats, opt, cfg.kernel);
  result.rank_clipped = result.model.d < cfg.tca.d;

  std::vector<Eigen::VectorXd> sample_latent;
  sample_latent.reserve(tgt.size());
  for (const auto& f : feats.target) sample_latent.push_back(tca_project(result.model, f));

  std::size_t evaluations = 0;
  const moea::CountingProblem<P> counting_problem{target_problem, &evaluations};

  for (std::size_t i = 0; i < pop_s.size(); ++i) {
    const Eigen::VectorXd p = tca_project(result.model, feature_of(pop_s.members[i], cfg.features));

    std::vector<std::size_t> order(tgt.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return (sample_latent[a] - p).squaredNorm() < (sample_latent[b] - p).squaredNorm();
    });
    std::vector<Candidate> starts;
    if (cfg.search.start_from_source) {
      Candidate c;
      c.x = pop_s.members[i].x;
      target_problem.repair(c.x);
      starts.push_back(std::move(c));
    }
    for (std::size_t k = 0; k < std::min(cfg.search.nearest, order.size()); ++k) {
      const auto& s = tgt.members[order[k]];
      Candidate c;
      c.x = s.x;
      c.f = s.f;
      c.evaluated = true;
      c.probed = true;
      c.distance = (sample_latent[order[k]] - p).norm();
      starts.push_back(std::move(c));
    }

    InverseSearchConfig sc = cfg.search;
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.search.seed), static_cast<std::uint32_t>(cfg.search.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    sc.seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];

    Candidate best = latent_inverse_search(result.model, p, counting_problem, std::move(starts), sc);
    moea::Individual ind;
    ind.x = std::move(best.x);
    if (best.evaluated) {
      ind.f = std::move(best.f);
      ind.evaluated = true;
    }
    result.population.members.push_back(std::move(ind));
  }
  result.evaluations = evaluations;
  return result;
}

}  // namespace trgo::transfer
