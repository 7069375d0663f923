// trgo: gait optimisation with transferred initial populations.
//
//   trgo source   optimise in the source environment and save POP_S
//   trgo compare  Random / PlatData / TrGO in one target environment
//   trgo transfer build a transferred initial population only
//   trgo plot     render fronts and histories of a compare run
//   trgo stress   compare on the rough-terrain stress presets
//
// Exit codes: 0 success, 1 bad parameters, 2 runtime failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "trgo/trgo.hpp"

namespace fs = std::filesystem;
using namespace trgo;
using namespace trgo::harness;

namespace {

std::string default_output_dir() {
  const char* env = std::getenv("TRGO_OUTPUT_DIR");
  return env && *env ? env : "trgo_output";
}

struct CommonOptions {
  std::string source_env = "E0";
  std::string target_env = "E1";
  std::string ea = "nsga2";
  std::vector<std::string> conditions{"Random", "PlatData", "TrGO"};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t pop_size = 40;
  int generations = 30;
  int source_generations = 30;
  std::size_t target_samples = 100;
  std::size_t search_budget = 200;
  std::string features = "objective";
  std::uint64_t terrain_seed = 1;
  std::string out = default_output_dir();
  std::string config;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool target = true) {
  cmd->add_option("--source-env", o.source_env, "Source environment")->capture_default_str();
  if (target) cmd->add_option("--target-env", o.target_env, "Target environment")->capture_default_str();
  cmd->add_option("--ea", o.ea, "Optimizer")->check(CLI::IsMember({"nsga2", "rmmeda", "mopso"}))->capture_default_str();
  cmd->add_option("--seeds", o.seeds, "Run seeds")->delimiter(',')->capture_default_str();
  cmd->add_option("--pop-size", o.pop_size, "Population size")->capture_default_str();
  cmd->add_option("--generations", o.generations, "Generations in the target environment")->capture_default_str();
  cmd->add_option("--source-generations", o.source_generations, "Generations in the source environment")
      ->capture_default_str();
  cmd->add_option("--target-samples", o.target_samples, "Target samples drawn for the transfer")->capture_default_str();
  cmd->add_option("--search-budget", o.search_budget, "Evaluations per latent point")->capture_default_str();
  cmd->add_option("--features", o.features, "Transfer features")->check(CLI::IsMember({"objective", "genome"}))
      ->capture_default_str();
  cmd->add_option("--terrain-seed", o.terrain_seed, "Terrain generator seed")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory (default $TRGO_OUTPUT_DIR or trgo_output)")->capture_default_str();
  cmd->add_option("--config", o.config, "JSON config; its keys override flags");
}

ExperimentSpec build_spec(const CommonOptions& o) {
  ExperimentSpec spec;
  spec.source_env = o.source_env;
  spec.target_env = o.target_env;
  spec.conditions.clear();
  for (const auto& c : o.conditions) spec.conditions.push_back(parse_condition(c));
  spec.optimizer.algorithm = moea::parse_algorithm(o.ea);
  spec.optimizer.pop_size = o.pop_size;
  spec.optimizer.generations = o.generations;
  spec.source_generations = o.source_generations;
  spec.seeds = o.seeds;
  spec.transfer.target_samples = o.target_samples;
  spec.transfer.tr_gigp.search.budget = o.search_budget;
  spec.transfer.tr_gigp.features = transfer::parse_feature_kind(o.features);
  spec.terrain_seed = o.terrain_seed;
  spec.output_dir = o.out;
  if (!o.config.empty()) spec = load_spec_file(o.config, spec);
  spec.validate();
  return spec;
}

std::string format_generation(double g) { return std::isinf(g) ? "inf" : format_double(g); }

void write_seed_plots(const fs::path& out, const std::vector<RunResult>& runs) {
  std::map<std::pair<std::string, std::uint64_t>, std::vector<LabeledFront>> fronts;
  for (const auto& r : runs) {
    LabeledFront f{to_string(r.condition), r.final_front.objectives()};
    fronts[{r.environment, r.seed}].push_back(std::move(f));
  }
  for (const auto& [key, list] : fronts) {
    plot_front(list, out / ("fronts_" + key.first + "_seed" + std::to_string(key.second) + ".svg"),
               key.first + " seed " + std::to_string(key.second));
  }
}

void print_summary(const Summary& s) {
  std::printf("%s -> %s (%s)\n", s.source_env.c_str(), s.target_env.c_str(), s.algorithm.c_str());
  for (const auto& r : s.runs) {
    std::string g = "-";
    if (r.benchmark_generation) g = *r.benchmark_generation == kNever ? "inf" : std::to_string(*r.benchmark_generation);
    std::printf("  %-8s seed %-4llu benchmark generation %-5s evaluations %zu%s\n", r.condition.c_str(),
                static_cast<unsigned long long>(r.seed), g.c_str(), r.evaluations, r.degraded ? " [degraded]" : "");
  }
  for (const auto& [c, g] : s.median_benchmark_generation) {
    std::printf("  median benchmark generation %-8s %s\n", c.c_str(), format_generation(g).c_str());
  }
  if (s.speedup) std::printf("  speedup Random/TrGO %s\n", format_generation(*s.speedup).c_str());
}

Summary run_compare(const ExperimentSpec& spec, const fs::path& out) {
  const auto cmp = run_comparison(spec);
  for (std::size_t i = 0; i < cmp.source.size(); ++i) {
    if (!cmp.source[i].empty()) {
      save_population(out / "source" / ("source_seed" + std::to_string(spec.seeds[i]) + ".csv"), cmp.source[i]);
    }
  }
  const Summary s = export_results(spec, cmp.runs, out);
  write_seed_plots(out, cmp.runs);
  return s;
}

int cmd_source(const CommonOptions& o) {
  ExperimentSpec spec = build_spec(o);
  const fs::path out = spec.output_dir;
  for (auto seed : spec.seeds) {
    const auto pop = run_source(spec, seed);
    const auto path = out / "source" / ("source_seed" + std::to_string(seed) + ".csv");
    save_population(path, pop);
    std::printf("seed %llu: %zu individuals -> %s\n", static_cast<unsigned long long>(seed), pop.size(),
                path.string().c_str());
  }
  return 0;
}

int cmd_compare(const CommonOptions& o) {
  const ExperimentSpec spec = build_spec(o);
  print_summary(run_compare(spec, spec.output_dir));
  return 0;
}

int cmd_transfer(const CommonOptions& o, const std::string& source_file) {
  ExperimentSpec spec = build_spec(o);
  const fs::path out = spec.output_dir;
  const auto seed = spec.seeds.front();
  const moea::Population source = source_file.empty() ? run_source(spec, seed) : load_population(source_file);
  if (source.empty()) throw ParameterError("source population is empty");
  for (const auto& m : source.members) {
    if (!m.evaluated) throw ParameterError("source population must carry objective values");
    if (m.x.size() != kGenomeSize) throw ParameterError("source genomes must have 54 values");
  }

  const Heightmap env = make_environment(spec.target_env, spec.terrain_seed);
  const GaitProblem problem(env, spec.model);
  moea::Rng rng(derive_seed(seed, stream::target_samples));
  std::size_t evaluations = 0;
  auto samples = evaluate_initial(sample_around_template(problem, spec.transfer.target_samples, rng), problem,
                                  evaluations);
  transfer::TrGigpConfig tc = spec.transfer.tr_gigp;
  tc.penalty_value = spec.model.objective.penalty_value;
  tc.search.seed = derive_seed(seed, stream::search);
  auto result = transfer::tr_gigp(source, samples, problem, tc);
  auto pop = evaluate_initial(std::move(result.population), problem, evaluations);
  evaluations += result.evaluations;

  save_population(out / "transferred.csv", pop);
  save_population(out / "target_samples.csv", samples);
  transfer::save_transfer_model((out / "transfer_model.bin").string(), result.model);
  std::printf("%zu individuals transferred to %s with %zu evaluations (latent dimension %zu)%s\n", pop.size(),
              spec.target_env.c_str(), evaluations, result.model.d,
              result.degenerate_samples ? " [degraded: all target samples failed]" : "");
  return 0;
}

int cmd_plot(const std::string& in_dir, std::string out_dir) {
  const fs::path in = in_dir;
  if (out_dir.empty()) out_dir = in_dir;
  const Summary s = load_summary(in / "summary.json");
  if (s.runs.empty()) throw ParameterError("no runs in " + in.string());
  std::map<std::pair<std::string, std::uint64_t>, std::vector<LabeledFront>> fronts;
  std::map<std::uint64_t, std::vector<LabeledHistory>> histories;
  for (const auto& r : s.runs) {
    const std::string stem = r.environment + "_" + r.condition + "_seed" + std::to_string(r.seed);
    fronts[{r.environment, r.seed}].push_back({r.condition, load_population(in / "runs" / (stem + "_front.csv")).objectives()});
    histories[r.seed].push_back({r.condition, load_history(in / "runs" / (stem + "_history.csv"))});
  }
  std::size_t files = 0;
  for (const auto& [key, list] : fronts) {
    plot_front(list, fs::path(out_dir) / ("fronts_" + key.first + "_seed" + std::to_string(key.second) + ".svg"),
               key.first + " seed " + std::to_string(key.second));
    ++files;
  }
  for (const auto& [seed, list] : histories) {
    write_text(fs::path(out_dir) / ("history_f1_seed" + std::to_string(seed) + ".svg"),
               render_history_svg(list, 0, "mean 1/Wv"));
    write_text(fs::path(out_dir) / ("history_f2_seed" + std::to_string(seed) + ".svg"),
               render_history_svg(list, 1, "mean St"));
    files += 2;
  }
  std::printf("wrote %zu plots to %s\n", files, out_dir.c_str());
  return 0;
}

int cmd_stress(const CommonOptions& o, std::vector<std::string> presets) {
  if (presets.empty()) presets = stress_presets();
  for (const auto& preset : presets) {
    CommonOptions po = o;
    po.target_env = preset;
    po.out = (fs::path(o.out) / preset).string();
    const ExperimentSpec spec = build_spec(po);
    print_summary(run_compare(spec, spec.output_dir));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hexapod gait optimisation with transferred initial populations"};
  app.require_subcommand(1);

  CommonOptions source_opts, compare_opts, transfer_opts, stress_opts;
  source_opts.target_env = "E0";

  auto* source = app.add_subcommand("source", "Optimise in the source environment and save POP_S");
  add_common(source, source_opts, false);

  auto* compare = app.add_subcommand("compare", "Random / PlatData / TrGO in one target environment");
  add_common(compare, compare_opts);
  compare->add_option("--conditions", compare_opts.conditions, "Conditions to run")->delimiter(',')
      ->capture_default_str();

  std::string source_file;
  auto* transfer_cmd = app.add_subcommand("transfer", "Build a transferred initial population only");
  add_common(transfer_cmd, transfer_opts);
  transfer_cmd->add_option("--source-pop", source_file, "Source population CSV (default: optimise one)");

  std::string plot_in, plot_out;
  auto* plot = app.add_subcommand("plot", "Render fronts and histories of a compare run");
  plot->add_option("--in", plot_in, "Directory written by compare")->required();
  plot->add_option("--out", plot_out, "Directory for the SVG files (default: --in)");

  std::vector<std::string> presets;
  auto* stress = app.add_subcommand("stress", "Compare on rough-terrain stress presets");
  add_common(stress, stress_opts, false);
  stress->add_option("--presets", presets, "Presets (default: all)")->delimiter(',');
  stress->add_option("--conditions", stress_opts.conditions, "Conditions to run")->delimiter(',')
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*source) return cmd_source(source_opts);
    if (*compare) return cmd_compare(compare_opts);
    if (*transfer_cmd) return cmd_transfer(transfer_opts, source_file);
    if (*plot) return cmd_plot(plot_in, plot_out);
    if (*stress) return cmd_stress(stress_opts, presets);
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
