#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <regex>
#include <sstream>

#include "support/oracles.hpp"
#include "trgo/trgo.hpp"

using namespace trgo;
using namespace trgo::harness;
namespace fs = std::filesystem;

namespace {

moea::History history_of(std::vector<double> means) {
  moea::History h;
  for (std::size_t g = 0; g < means.size(); ++g) h.push_back({int(g), {means[g]}, {means[g]}, g});
  return h;
}

ExperimentSpec tiny_spec() {
  ExperimentSpec s;
  s.optimizer.pop_size = 8;
  s.optimizer.generations = 3;
  s.source_generations = 2;
  s.transfer.target_samples = 10;
  s.transfer.tr_gigp.search.budget = 6;
  s.seeds = {1};
  s.benchmark_generation = 2;
  return s;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("trgo_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(TimeToBenchmark, Examples) {
  EXPECT_EQ(time_to_benchmark(history_of({5, 4, 3, 2}), {3.0}), 2);
  EXPECT_EQ(time_to_benchmark(history_of({5, 4, 3, 2}), {1.0}), kNever);
  EXPECT_EQ(time_to_benchmark(history_of({5, 4, 3, 2}), {6.0}), 0);
  EXPECT_THROW(time_to_benchmark({}, {1.0}), ParameterError);
}

TEST(TimeToBenchmark, BothObjectivesMustReach) {
  moea::History h{{0, {3, 1}, {}, 0}, {1, {1, 3}, {}, 0}, {2, {2, 2}, {}, 0}};
  EXPECT_EQ(time_to_benchmark(h, {2.0, 2.0}), 2);
}

TEST(Speedup, EdgeRules) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_DOUBLE_EQ(speedup_ratio(20, 10), 2.0);
  EXPECT_EQ(speedup_ratio(inf, 10), inf);
  EXPECT_EQ(speedup_ratio(10, inf), 0.0);
  EXPECT_EQ(speedup_ratio(inf, inf), 1.0);
  EXPECT_EQ(speedup_ratio(0, 0), 1.0);
  EXPECT_EQ(speedup_ratio(4, 0), inf);
  EXPECT_EQ(median_generation({3, kNever, 1}), 3.0);
  EXPECT_EQ(median_generation({3, kNever}), inf);
  EXPECT_EQ(median_generation({2, 4, 9, 1}), 3.0);
}

TEST(Conditions, ParseAndName) {
  EXPECT_EQ(parse_condition("trgo"), Condition::trgo);
  EXPECT_EQ(parse_condition("PlatData"), Condition::platdata);
  EXPECT_STREQ(to_string(Condition::random), "Random");
  EXPECT_THROW(parse_condition("Oracle"), ParameterError);
}

TEST(Spec, Validation) {
  auto s = tiny_spec();
  EXPECT_NO_THROW(s.validate());
  s.conditions.clear();
  EXPECT_THROW(s.validate(), ParameterError);
  s = tiny_spec();
  s.seeds.clear();
  EXPECT_THROW(s.validate(), ParameterError);
  s = tiny_spec();
  s.target_env = "mars";
  EXPECT_THROW(s.validate(), ParameterError);
}

TEST(GaitProblemTest, TemplateSamplesAreFeasible) {
  GaitModel model;
  const auto env = make_environment("E0", 1);
  const GaitProblem p(env, model);
  moea::Rng rng(3);
  const auto pop = sample_around_template(p, 20, rng);
  ASSERT_EQ(pop.size(), 20u);
  for (const auto& m : pop.members) {
    EXPECT_FALSE(m.evaluated);
    EXPECT_TRUE(is_feasible(p.genome(m.x), model.limits));
    auto again = m.x;
    p.repair(again);
    EXPECT_EQ(again, m.x);
  }
}

TEST(Runs, SourceAndConditions) {
  const auto spec = tiny_spec();
  const auto source = run_source(spec, 1);
  ASSERT_EQ(source.size(), spec.optimizer.pop_size / 2);
  EXPECT_EQ(source, run_source(spec, 1));
  const auto f0 = moea::first_front(source);
  for (const auto& m : f0.members) EXPECT_NE(std::find(source.members.begin(), source.members.end(), m), source.members.end());

  const auto random = run_condition(Condition::random, spec, source, 1, "E1");
  EXPECT_EQ(random.initial.size(), spec.optimizer.pop_size);

  const auto plat = run_condition(Condition::platdata, spec, source, 1, "E1");
  ASSERT_EQ(plat.initial.size(), source.size());
  for (std::size_t i = 0; i < source.size(); ++i) EXPECT_EQ(plat.initial.members[i].x, source.members[i].x);

  const auto trgo = run_condition(Condition::trgo, spec, source, 1, "E1");
  EXPECT_EQ(trgo.initial.size(), source.size());

  for (const auto* r : {&random, &plat, &trgo}) {
    EXPECT_EQ(r->history.size(), static_cast<std::size_t>(spec.optimizer.generations + 1));
    EXPECT_EQ(r->history.back().evaluations, r->evaluations);
    const auto pts = r->final_front.objectives();
    const auto fronts = trgo::testing::brute_force_fronts(pts);
    EXPECT_EQ(fronts.size(), 1u);
    for (const auto& m : r->final_front.members) EXPECT_TRUE(is_feasible(GaitGenome::from_vector(m.x), spec.model.limits));
    EXPECT_FALSE(r->degraded);
  }
  EXPECT_THROW(run_condition(Condition::platdata, spec, moea::Population{}, 1, "E1"), ParameterError);
}

TEST(Runs, StressPresetFlagsDegradation) {
  auto spec = tiny_spec();
  spec.optimizer.generations = 1;
  const auto source = run_source(spec, 2);
  EXPECT_TRUE(run_condition(Condition::random, spec, source, 2, "perlin8").degraded);
}

TEST(Runs, Driver) {
  auto spec = tiny_spec();
  spec.optimizer.generations = 1;
  const auto source = run_source(spec, 1);
  EXPECT_EQ(run_trgo_driver(spec, source, {"E1"}, 1).size(), 1u);
  const auto all = run_trgo_driver(spec, source, {"E1", "E2", "E3"}, 1);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].environment, "E1");
  EXPECT_EQ(all[2].environment, "E3");
  for (const auto& r : all) EXPECT_EQ(r.initial.size(), source.size());
  EXPECT_THROW(run_trgo_driver(spec, source, {}, 1), ParameterError);
}

TEST(Export, CsvJsonAndDeterminism) {
  auto spec = tiny_spec();
  const auto cmp = run_comparison(spec);
  ASSERT_EQ(cmp.runs.size(), 3u);
  for (const auto& r : cmp.runs) ASSERT_TRUE(r.benchmark_generation.has_value());

  const auto a = scratch("export_a"), b = scratch("export_b");
  const auto sa = export_results(spec, cmp.runs, a);
  export_results(spec, run_comparison(spec).runs, b);
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a);
    EXPECT_EQ(read_text(entry.path()), read_text(b / rel)) << rel;
  }

  const auto hist = read_text(a / "runs" / (run_stem(cmp.runs[0]) + "_history.csv"));
  EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), spec.optimizer.generations + 2);
  const auto loaded = load_history(a / "runs" / (run_stem(cmp.runs[0]) + "_history.csv"));
  ASSERT_EQ(loaded.size(), cmp.runs[0].history.size());
  for (std::size_t g = 0; g < loaded.size(); ++g) {
    EXPECT_EQ(loaded[g].generation, cmp.runs[0].history[g].generation);
    EXPECT_EQ(loaded[g].mean, cmp.runs[0].history[g].mean);
    EXPECT_EQ(loaded[g].min, cmp.runs[0].history[g].min);
  }

  const auto back = load_summary(a / "summary.json");
  EXPECT_TRUE(back == sa);

  const auto& gens = back.runs;
  std::optional<int> rnd, tr;
  for (const auto& r : gens) {
    if (r.condition == "Random") rnd = r.benchmark_generation;
    if (r.condition == "TrGO") tr = r.benchmark_generation;
  }
  ASSERT_EQ(back.speedup_per_seed.size(), 1u);
  auto as_double = [](int v) { return v == kNever ? INFINITY : double(v); };
  EXPECT_EQ(back.speedup_per_seed[0].ratio, speedup_ratio(as_double(*rnd), as_double(*tr)));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Export, SummaryWithUnreachedBenchmark) {
  Summary s;
  s.source_env = "E0";
  s.target_env = "E1";
  s.algorithm = "nsga2";
  s.runs.push_back({"Random", 1, "E1", kNever, 100, 8, 3, false});
  s.runs.push_back({"TrGO", 1, "E1", 2, 90, 4, 2, true});
  s.runs.push_back({"PlatData", 1, "E1", std::nullopt, 90, 4, 2, false});
  s.median_benchmark_generation = {{"Random", INFINITY}, {"TrGO", 2.0}};
  s.speedup_per_seed.push_back({1, "E1", INFINITY});
  s.speedup = INFINITY;
  const auto j = to_json(s);
  EXPECT_EQ(j["speedup"], "inf");
  EXPECT_TRUE(summary_from_json(json::parse(j.dump())) == s);
}

TEST(Export, PopulationCsvRoundTrip) {
  moea::Population pop;
  pop.members.push_back({{0.1, 1.0 / 3.0}, {2.5, 0.125}, true});
  pop.members.push_back({{-4.0, 1e-300}, {}, false});
  std::stringstream s;
  write_population_csv(s, pop);
  EXPECT_EQ(read_population_csv(s), pop);
}

TEST(Export, ConfigOverrides) {
  ExperimentSpec spec;
  apply_config(json::parse(R"({"pop_size": 12, "ea": "mopso", "conditions": ["Random", "TrGO"], "seeds": [7]})"), spec);
  EXPECT_EQ(spec.optimizer.pop_size, 12u);
  EXPECT_EQ(spec.optimizer.algorithm, moea::Algorithm::mopso);
  EXPECT_EQ(spec.conditions.size(), 2u);
  EXPECT_EQ(spec.seeds, std::vector<std::uint64_t>{7});
  EXPECT_THROW(apply_config(json::parse(R"({"popsize": 12})"), spec), ParameterError);
  EXPECT_THROW(load_spec_file("/nonexistent/spec.json"), IoError);
}

TEST(Plot, DeterministicAndCarriesCoordinates) {
  std::vector<LabeledFront> fronts{{"Random", {{1.5, 0.25}, {2.0, 0.125}}},
                                   {"TrGO", {{1.2, 0.3}}},
                                   {"PlatData", {}}};
  const auto svg = render_fronts_svg(fronts, "E1");
  EXPECT_EQ(svg, render_fronts_svg(fronts, "E1"));
  EXPECT_NE(svg.find("1/Wv"), std::string::npos);
  EXPECT_NE(svg.find(">St<"), std::string::npos);
  EXPECT_NE(svg.find("fill=\"red\""), std::string::npos);
  EXPECT_NE(svg.find("fill=\"green\""), std::string::npos);
  EXPECT_NE(svg.find("fill=\"black\""), std::string::npos);

  std::vector<std::pair<double, double>> found;
  const std::regex re("data-f1=\"([^\"]+)\" data-f2=\"([^\"]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    found.emplace_back(parse_double((*it)[1]), parse_double((*it)[2]));
  }
  std::vector<std::pair<double, double>> expected;
  for (const auto& f : fronts)
    for (const auto& p : f.points) expected.emplace_back(p[0], p[1]);
  EXPECT_EQ(found, expected);

  EXPECT_THROW(render_fronts_svg({}), ParameterError);
  EXPECT_THROW(render_history_svg({}, 0, "mean 1/Wv"), ParameterError);
}

TEST(Plot, FileOutput) {
  const auto dir = scratch("plot");
  std::vector<LabeledFront> fronts{{"Random", {{1.5, 0.25}}}};
  plot_front(fronts, dir / "a.svg");
  plot_front(fronts, dir / "b.svg");
  EXPECT_EQ(read_text(dir / "a.svg"), read_text(dir / "b.svg"));
  fs::remove_all(dir);
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, stream::random_init), derive_seed(1, stream::target_opt));
  EXPECT_NE(derive_seed(1, stream::search), derive_seed(2, stream::search));
  EXPECT_EQ(derive_seed(5, stream::search), derive_seed(5, stream::search));
}
