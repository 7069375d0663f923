#pragma once

// Result files: population and history CSVs, summary.json and config.json.
// Wall-clock times are not written so reruns produce identical bytes.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/harness/experiment.hpp"
#include "trgo/moea/optimizer.hpp"
#include "trgo/moea/population.hpp"

namespace trgo::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::logic_error&) {
    throw IoError("bad number '" + s + "'");
  }
  if (used != s.size()) throw IoError("bad number '" + s + "'");
  return v;
}

inline std::ofstream open_for_write(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

inline void write_text(const fs::path& path, const std::string& text) {
  auto out = open_for_write(path);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Populations: header f1,f2,x0..x{n-1}; objective cells are empty for
// unevaluated members.

inline void write_population_csv(std::ostream& out, const moea::Population& pop) {
  const std::size_t m = pop.empty() || !pop.members.front().evaluated ? 2 : pop.members.front().f.size();
  const std::size_t n = pop.empty() ? 0 : pop.members.front().x.size();
  for (std::size_t j = 1; j <= m; ++j) out << (j > 1 ? "," : "") << "f" << j;
  for (std::size_t k = 0; k < n; ++k) out << ",x" << k;
  out << "\n";
  for (const auto& ind : pop.members) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j > 0) out << ",";
      if (ind.evaluated) out << format_double(ind.f[j]);
    }
    for (double v : ind.x) out << "," << format_double(v);
    out << "\n";
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline moea::Population read_population_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty population file");
  const auto header = split_csv_line(line);
  std::size_t m = 0;
  while (m < header.size() && !header[m].empty() && header[m][0] == 'f') ++m;
  moea::Population pop;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw IoError("population row has " + std::to_string(cells.size()) +
                                                     " cells, expected " + std::to_string(header.size()));
    moea::Individual ind;
    ind.evaluated = m > 0 && !cells[0].empty();
    if (ind.evaluated) {
      for (std::size_t j = 0; j < m; ++j) ind.f.push_back(parse_double(cells[j]));
    }
    for (std::size_t k = m; k < cells.size(); ++k) ind.x.push_back(parse_double(cells[k]));
    pop.members.push_back(std::move(ind));
  }
  return pop;
}

inline void save_population(const fs::path& path, const moea::Population& pop) {
  auto out = open_for_write(path);
  write_population_csv(out, pop);
  if (!out) throw IoError("failed writing " + path.string());
}

inline moea::Population load_population(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_population_csv(in);
}

inline void save_history(const fs::path& path, const moea::History& history) {
  auto out = open_for_write(path);
  moea::write_history_csv(out, history);
  if (!out) throw IoError("failed writing " + path.string());
}

/// Reads the generation,mean_f1,min_f1,... layout back.
inline moea::History load_history(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty history file " + path.string());
  const std::size_t m = (split_csv_line(line).size() - 1) / 2;
  moea::History history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2 * m + 1) throw IoError("malformed history row in " + path.string());
    moea::GenerationStats s;
    s.generation = static_cast<int>(parse_double(cells[0]));
    for (std::size_t j = 0; j < m; ++j) {
      s.mean.push_back(parse_double(cells[1 + 2 * j]));
      s.min.push_back(parse_double(cells[2 + 2 * j]));
    }
    history.push_back(std::move(s));
  }
  return history;
}

// ---------------------------------------------------------------------------
// Summary

struct RunSummary {
  std::string condition;
  std::uint64_t seed = 0;
  std::string environment;
  std::optional<int> benchmark_generation;  // kNever when not reached
  std::size_t evaluations = 0;
  std::size_t initial_size = 0;
  std::size_t final_front_size = 0;
  bool degraded = false;

  bool operator==(const RunSummary&) const = default;
};

struct SeedSpeedup {
  std::uint64_t seed = 0;
  std::string environment;
  double ratio = 0.0;

  bool operator==(const SeedSpeedup& o) const {
    return seed == o.seed && environment == o.environment &&
           (ratio == o.ratio || (std::isnan(ratio) && std::isnan(o.ratio)));
  }
};

struct Summary {
  std::string source_env;
  std::string target_env;
  std::string algorithm;
  int benchmark_reference = 10;
  std::vector<RunSummary> runs;
  std::map<std::string, double> median_benchmark_generation;  // by condition
  std::vector<SeedSpeedup> speedup_per_seed;                  // Random / TrGO
  std::optional<double> speedup;                              // of the medians

  bool operator==(const Summary&) const = default;
};

inline Summary summarize(const ExperimentSpec& spec, const std::vector<RunResult>& runs) {
  Summary s;
  s.source_env = spec.source_env;
  s.target_env = spec.target_env;
  s.algorithm = moea::to_string(spec.optimizer.algorithm);
  s.benchmark_reference = spec.benchmark_generation;
  for (const auto& r : runs) {
    s.runs.push_back({to_string(r.condition), r.seed, r.environment, r.benchmark_generation, r.evaluations,
                      r.initial.size(), r.final_front.size(), r.degraded});
  }
  for (auto c : {Condition::random, Condition::platdata, Condition::trgo}) {
    const auto gens = benchmark_generations(runs, c, spec.target_env);
    if (!gens.empty()) s.median_benchmark_generation[to_string(c)] = median_generation(gens);
  }
  auto as_double = [](int v) { return v == kNever ? std::numeric_limits<double>::infinity() : double(v); };
  for (const auto& r : runs) {
    if (r.condition != Condition::random || !r.benchmark_generation) continue;
    for (const auto& t : runs) {
      if (t.condition == Condition::trgo && t.seed == r.seed && t.environment == r.environment &&
          t.benchmark_generation) {
        s.speedup_per_seed.push_back(
            {r.seed, r.environment, speedup_ratio(as_double(*r.benchmark_generation), as_double(*t.benchmark_generation))});
      }
    }
  }
  const auto& med = s.median_benchmark_generation;
  if (med.count("Random") && med.count("TrGO")) s.speedup = speedup_ratio(med.at("Random"), med.at("TrGO"));
  return s;
}

namespace detail {

inline json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double number_from(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

inline json generation(const std::optional<int>& g) {
  if (!g) return nullptr;
  if (*g == kNever) return "inf";
  return *g;
}

inline std::optional<int> generation_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    if (j.get<std::string>() != "inf") throw IoError("bad benchmark generation");
    return kNever;
  }
  return j.get<int>();
}

}  // namespace detail

inline json to_json(const Summary& s) {
  json j;
  j["source_env"] = s.source_env;
  j["target_env"] = s.target_env;
  j["algorithm"] = s.algorithm;
  j["benchmark_reference_generation"] = s.benchmark_reference;
  json runs = json::array();
  for (const auto& r : s.runs) {
    runs.push_back({{"condition", r.condition},
                    {"seed", r.seed},
                    {"environment", r.environment},
                    {"benchmark_generation", detail::generation(r.benchmark_generation)},
                    {"evaluations", r.evaluations},
                    {"initial_size", r.initial_size},
                    {"final_front_size", r.final_front_size},
                    {"degraded", r.degraded}});
  }
  j["runs"] = std::move(runs);
  json med = json::object();
  for (const auto& [k, v] : s.median_benchmark_generation) med[k] = detail::number(v);
  j["median_benchmark_generation"] = std::move(med);
  json per_seed = json::array();
  for (const auto& p : s.speedup_per_seed) {
    per_seed.push_back({{"seed", p.seed}, {"environment", p.environment}, {"ratio", detail::number(p.ratio)}});
  }
  j["speedup_per_seed"] = std::move(per_seed);
  j["speedup"] = s.speedup ? detail::number(*s.speedup) : json(nullptr);
  return j;
}

inline Summary summary_from_json(const json& j) {
  try {
    Summary s;
    s.source_env = j.at("source_env").get<std::string>();
    s.target_env = j.at("target_env").get<std::string>();
    s.algorithm = j.at("algorithm").get<std::string>();
    s.benchmark_reference = j.at("benchmark_reference_generation").get<int>();
    for (const auto& r : j.at("runs")) {
      s.runs.push_back({r.at("condition").get<std::string>(), r.at("seed").get<std::uint64_t>(),
                        r.at("environment").get<std::string>(), detail::generation_from(r.at("benchmark_generation")),
                        r.at("evaluations").get<std::size_t>(), r.at("initial_size").get<std::size_t>(),
                        r.at("final_front_size").get<std::size_t>(), r.at("degraded").get<bool>()});
    }
    for (const auto& [k, v] : j.at("median_benchmark_generation").items()) {
      s.median_benchmark_generation[k] = detail::number_from(v);
    }
    for (const auto& p : j.at("speedup_per_seed")) {
      s.speedup_per_seed.push_back({p.at("seed").get<std::uint64_t>(), p.at("environment").get<std::string>(),
                                    detail::number_from(p.at("ratio"))});
    }
    if (!j.at("speedup").is_null()) s.speedup = detail::number_from(j.at("speedup"));
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed summary: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Experiment configuration

inline json to_json(const ExperimentSpec& spec) {
  json conditions = json::array();
  for (auto c : spec.conditions) conditions.push_back(to_string(c));
  const auto& o = spec.optimizer;
  const auto& t = spec.transfer.tr_gigp;
  return json{
      {"source_env", spec.source_env},
      {"target_env", spec.target_env},
      {"conditions", conditions},
      {"ea", moea::to_string(o.algorithm)},
      {"pop_size", o.pop_size},
      {"generations", o.generations},
      {"source_generations", spec.source_generations},
      {"seeds", spec.seeds},
      {"terrain_seed", spec.terrain_seed},
      {"benchmark_generation", spec.benchmark_generation},
      {"crossover_rate", o.crossover_rate},
      {"crossover_eta", o.crossover_eta},
      {"mutation_eta", o.mutation_eta},
      {"mutation_rate", o.mutation_rate},
      {"clusters", o.clusters},
      {"extension", o.extension},
      {"archive_size", o.archive_size},
      {"grid_divisions", o.grid_divisions},
      {"inertia", o.inertia},
      {"target_samples", spec.transfer.target_samples},
      {"target_sampling", "fresh per environment"},
      {"features", transfer::to_string(t.features)},
      {"latent_dim", t.tca.d},
      {"mu", t.tca.mu},
      {"kernel", transfer::to_string(t.kernel.kind)},
      {"bandwidth", t.kernel.median_heuristic() ? json("median") : json(t.kernel.bandwidth)},
      {"search_budget", t.search.budget},
      {"search_nearest", t.search.nearest},
      {"search_random_restarts", t.search.random_restarts},
      {"start_from_source", t.search.start_from_source},
  };
}

/// Overwrites the fields named in `j`; unknown keys are rejected.
inline void apply_config(const json& j, ExperimentSpec& spec) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  auto& o = spec.optimizer;
  auto& t = spec.transfer.tr_gigp;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "source_env") spec.source_env = v.get<std::string>();
      else if (key == "target_env") spec.target_env = v.get<std::string>();
      else if (key == "conditions") {
        spec.conditions.clear();
        for (const auto& c : v) spec.conditions.push_back(parse_condition(c.get<std::string>()));
      } else if (key == "ea") o.algorithm = moea::parse_algorithm(v.get<std::string>());
      else if (key == "pop_size") o.pop_size = v.get<std::size_t>();
      else if (key == "generations") o.generations = v.get<int>();
      else if (key == "source_generations") spec.source_generations = v.get<int>();
      else if (key == "seeds") spec.seeds = v.get<std::vector<std::uint64_t>>();
      else if (key == "terrain_seed") spec.terrain_seed = v.get<std::uint64_t>();
      else if (key == "benchmark_generation") spec.benchmark_generation = v.get<int>();
      else if (key == "crossover_rate") o.crossover_rate = v.get<double>();
      else if (key == "crossover_eta") o.crossover_eta = v.get<double>();
      else if (key == "mutation_eta") o.mutation_eta = v.get<double>();
      else if (key == "mutation_rate") o.mutation_rate = v.get<double>();
      else if (key == "clusters") o.clusters = v.get<std::size_t>();
      else if (key == "extension") o.extension = v.get<double>();
      else if (key == "archive_size") o.archive_size = v.get<std::size_t>();
      else if (key == "grid_divisions") o.grid_divisions = v.get<std::size_t>();
      else if (key == "inertia") o.inertia = v.get<double>();
      else if (key == "target_samples") spec.transfer.target_samples = v.get<std::size_t>();
      else if (key == "target_sampling") {
        if (v.get<std::string>() != "fresh per environment") {
          throw ParameterError("only fresh per-environment target sampling is supported");
        }
      } else if (key == "features") t.features = transfer::parse_feature_kind(v.get<std::string>());
      else if (key == "latent_dim") t.tca.d = v.get<std::size_t>();
      else if (key == "mu") t.tca.mu = v.get<double>();
      else if (key == "kernel") t.kernel.kind = transfer::parse_kernel_kind(v.get<std::string>());
      else if (key == "bandwidth") t.kernel.bandwidth = v.is_string() ? 0.0 : v.get<double>();
      else if (key == "search_budget") t.search.budget = v.get<std::size_t>();
      else if (key == "search_nearest") t.search.nearest = v.get<std::size_t>();
      else if (key == "search_random_restarts") t.search.random_restarts = v.get<std::size_t>();
      else if (key == "start_from_source") t.search.start_from_source = v.get<bool>();
      else if (key == "out" || key == "output_dir") spec.output_dir = v.get<std::string>();
      else throw ParameterError("unknown config key " + key);
    }
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad config value: ") + e.what());
  }
}

inline ExperimentSpec load_spec_file(const fs::path& path, ExperimentSpec base = {}) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParameterError("cannot parse " + path.string() + ": " + e.what());
  }
  apply_config(j, base);
  return base;
}

// ---------------------------------------------------------------------------

inline std::string run_stem(const RunResult& r) {
  return r.environment + "_" + to_string(r.condition) + "_seed" + std::to_string(r.seed);
}

/// runs/<env>_<condition>_seed<k>_history.csv and _front.csv, summary.json
/// and config.json under `output_dir`.
inline Summary export_results(const ExperimentSpec& spec, const std::vector<RunResult>& runs,
                              const fs::path& output_dir) {
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw IoError("cannot create " + output_dir.string() + ": " + ec.message());
  for (const auto& r : runs) {
    save_history(output_dir / "runs" / (run_stem(r) + "_history.csv"), r.history);
    save_population(output_dir / "runs" / (run_stem(r) + "_front.csv"), r.final_front);
  }
  const Summary s = summarize(spec, runs);
  write_text(output_dir / "summary.json", to_json(s).dump(2) + "\n");
  write_text(output_dir / "config.json", to_json(spec).dump(2) + "\n");
  return s;
}

inline Summary load_summary(const fs::path& path) {
  try {
    return summary_from_json(json::parse(read_text(path)));
  } catch (const json::parse_error& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
}

}  // namespace trgo::harness
