// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Usage: acceptance [path-to-trgo-cli] [work-dir]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "trgo/trgo.hpp"

using namespace trgo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs > limit_s) {
    o.pass = false;
    o.detail += " (over time limit " + std::to_string(limit_s) + " s)";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

transfer::FeatureSet clouds(std::size_t m, std::size_t n, std::size_t dim, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  transfer::FeatureSet f;
  f.source = testing::gaussian_cloud(m, dim, 0.0, rng);
  f.target = testing::gaussian_cloud(n, dim, shift, rng);
  return f;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> mean_objectives(const moea::Population& pop) {
  std::vector<double> mean(2, 0.0);
  for (const auto& m : pop.members)
    for (std::size_t j = 0; j < 2; ++j) mean[j] += m.f[j];
  for (auto& v : mean) v /= static_cast<double>(pop.size());
  return mean;
}

Outcome tca_constraint() {
  double worst = 0.0;
  int fits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t dim = seed % 2 ? 10 : 2;
    const auto f = clouds(50, 50, dim, 1.0 + 0.1 * seed, seed);
    for (std::size_t d : {1, 5, 20}) {
      const auto model = transfer::tca_fit(f, {.d = std::min(d, f.total())});
      worst = std::max(worst, transfer::constraint_error(model));
      ++fits;
    }
  }
  return {worst < 1e-6, fmt("%g fits, max |W'KHKW - I| = %.3g", fits, worst)};
}

Outcome mmd_oracle() {
  auto same = clouds(30, 30, 3, 0.0, 1);
  same.target = same.source;
  const double zero = transfer::mmd(same, {});

  transfer::FeatureSet pair;
  pair.source = {Eigen::VectorXd::Constant(1, 0.0)};
  pair.target = {Eigen::VectorXd::Constant(1, 1.0)};
  const double closed = transfer::mmd(pair, {transfer::KernelKind::gaussian, 1.0 / std::sqrt(2.0)});
  const double closed_err = std::abs(closed - (2.0 - 2.0 * std::exp(-1.0)));

  double block_err = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = clouds(4 + seed, 20 - seed / 2, 1 + seed % 5, 0.7, 50 + seed);
    const auto kc = transfer::resolve_kernel({}, f);
    double ss = 0.0, st = 0.0, tt = 0.0;
    for (const auto& a : f.source)
      for (const auto& b : f.source) ss += transfer::kernel_eval(a, b, kc);
    for (const auto& a : f.source)
      for (const auto& b : f.target) st += transfer::kernel_eval(a, b, kc);
    for (const auto& a : f.target)
      for (const auto& b : f.target) tt += transfer::kernel_eval(a, b, kc);
    const double m = double(f.m()), n = double(f.n());
    const double blockwise = ss / (m * m) + tt / (n * n) - 2.0 * st / (m * n);
    const Eigen::MatrixXd k = transfer::build_kernel_matrix(f, kc);
    const double direct = (k * transfer::build_L(f.m(), f.n())).trace();
    block_err = std::max({block_err, std::abs(blockwise - direct), std::abs(transfer::mmd(f, kc) - direct)});
  }
  const bool ok = std::abs(zero) < 1e-12 && closed_err < 1e-9 && block_err < 1e-12;
  return {ok, fmt("identical %.2g, closed-form err %.2g, blockwise err %.2g", zero, closed_err, block_err)};
}

Outcome transfer_efficacy() {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = clouds(50, 50, 2, 2.0, 1000 + seed);
    const auto model = transfer::tca_fit(f, {.d = 5});
    transfer::FeatureSet latent;
    for (const auto& v : f.source) latent.source.push_back(transfer::tca_project(model, v));
    for (const auto& v : f.target) latent.target.push_back(transfer::tca_project(model, v));
    if (transfer::mmd(latent, {}) < transfer::mmd(f, {})) ++wins;
  }
  return {wins >= 18, fmt("projected MMD below raw MMD in %g/20 seeds", wins)};
}

Outcome sorting_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int matches = 0;
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<moea::Objectives> pts;
    for (int i = 0; i < 200; ++i) {
      double a = u(rng), b = u(rng);
      if (inst % 2) {
        a = std::floor(a * 15);
        b = std::floor(b * 15);
      }
      pts.push_back({a, b});
    }
    if (moea::non_dominated_sort(pts) == testing::brute_force_fronts(pts)) ++matches;
  }
  return {matches == 50, fmt("%g/50 instances identical", matches)};
}

Outcome fk_oracle() {
  RobotGeometry geo;
  JointLimits lim;
  std::mt19937_64 rng(5);
  double worst = 0.0;
  const auto& l = geo.link_lengths;
  for (std::size_t leg = 0; leg < kLegCount; ++leg) {
    for (int i = 0; i < 1000; ++i) {
      std::array<double, 3> q{};
      for (std::size_t k = 0; k < 3; ++k) {
        q[k] = std::uniform_real_distribution<double>(lim.range[k].lo, lim.range[k].hi)(rng);
      }
      // Closed-form chain: yaw about z, then two pitches about x.
      const double t1 = deg2rad(q[0]), t2 = deg2rad(q[1]), t3 = deg2rad(q[2]);
      const double reach_y = l[2] * std::cos(t2) + l[3] * std::cos(t2 + t3);
      const double reach_z = l[2] * std::sin(t2) + l[3] * std::sin(t2 + t3);
      const double y1 = l[1] + reach_y;
      const Eigen::Vector3d expect{-std::sin(t1) * y1, l[0] + std::cos(t1) * y1, reach_z};
      const auto p = forward_kinematics(leg, q, geo, lim);
      worst = std::max(worst, (p - expect).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-9, fmt("6000 triples, max error %.3g m", worst)};
}

SimulationTrace level_trace(std::size_t n, double dx, double dy) {
  SimulationTrace t;
  t.cycle_duration = static_cast<double>(n) / 100.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = n > 1 ? double(i) / double(n - 1) : 0.0;
    t.positions.emplace_back(s * dx, s * dy, 0.1);
  }
  t.roll.assign(n, 0.0);
  t.pitch.assign(n, 0.0);
  for (auto& a : t.acc) a.assign(n, 0.0);
  return t;
}

Outcome objective_units() {
  ObjectiveConfig cfg;
  const double back = walking_velocity(level_trace(100, -0.3, 0.0), cfg);
  const auto fwd = level_trace(100, 0.2, 0.0);
  const double fs = std::min(1.0, 0.2 / fwd.cycle_duration / cfg.reference_speed);
  const double aligned = walking_velocity(fwd, cfg);
  const double fq = (aligned - cfg.zeta_s * fs) / cfg.zeta_q;
  const double still = stability(level_trace(100, 0.0, 0.0), cfg);
  auto two = level_trace(2, 0.0, 0.0);
  two.acc[0] = {0.0, 2.0};
  const double hand = stability(two, cfg);
  const bool ok = back == -1.0 && std::abs(fq - 1.0) < 1e-12 && still == 0.0 && std::abs(hand - 0.02) < 1e-12;
  return {ok, fmt("Wv(backward) %g, f_q %.15g, St(hand) %.15g", back, fq, hand)};
}

Outcome moea_sanity() {
  testing::ConvexProblem p;
  const moea::Objectives ref{4.4, 4.4};
  const double optimum = testing::convex_reference_hypervolume(ref);
  int ok = 0;
  double worst = 1.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    moea::OptimizerConfig cfg{.pop_size = 100, .generations = 100, .rng_seed = seed};
    const auto r = moea::run_optimizer(testing::uniform_population(p, 100, seed), p, cfg);
    std::vector<moea::Objectives> pts;
    for (const auto& m : moea::first_front(r.final).members) {
      if (m.f[0] <= ref[0] && m.f[1] <= ref[1]) pts.push_back(m.f);
    }
    const double ratio = moea::hypervolume(pts, ref) / optimum;
    worst = std::min(worst, ratio);
    if (ratio >= 0.95) ++ok;
  }
  return {ok == 3, fmt("%g/3 seeds, worst hypervolume ratio %.4f", ok, worst)};
}

Outcome self_transfer() {
  harness::ExperimentSpec spec;
  spec.target_env = "E0";
  const auto env = harness::make_environment("E0", spec.terrain_seed);
  const harness::GaitProblem problem(env, spec.model);
  std::vector<double> dev1, dev2;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto source = harness::run_source(spec, seed);
    moea::Rng rng(harness::derive_seed(seed, harness::stream::target_samples));
    auto samples = harness::sample_around_template(problem, spec.transfer.target_samples, rng);
    moea::evaluate_population(samples, problem);
    auto tc = spec.transfer.tr_gigp;
    tc.search.seed = harness::derive_seed(seed, harness::stream::search);
    auto out = transfer::tr_gigp(source, samples, problem, tc);
    moea::evaluate_population(out.population, problem);
    const auto s = mean_objectives(source), t = mean_objectives(out.population);
    dev1.push_back(std::abs(t[0] - s[0]) / std::abs(s[0]));
    dev2.push_back(std::abs(t[1] - s[1]) / std::abs(s[1]));
  }
  const double m1 = median(dev1), m2 = median(dev2);
  return {m1 <= 0.10 && m2 <= 0.10, fmt("median relative deviation f1 %.4f, f2 %.4f", m1, m2)};
}

Outcome desk_speedup() {
  harness::ExperimentSpec spec;  // E0 -> E1, NSGA-II, pop 40, 30 generations, seeds 1..5
  const auto cmp = harness::run_comparison(spec);
  const double rnd = harness::median_generation(harness::benchmark_generations(cmp.runs, harness::Condition::random, "E1"));
  const double tr = harness::median_generation(harness::benchmark_generations(cmp.runs, harness::Condition::trgo, "E1"));
  return {rnd >= 2.0 * tr, fmt("median benchmark generation Random %g, TrGO %g, ratio %.2f", rnd, tr,
                               harness::speedup_ratio(rnd, tr))};
}

Outcome stress() {
  harness::ExperimentSpec spec;
  spec.target_env = "perlin8";
  const auto cmp = harness::run_comparison(spec);
  std::size_t flagged = 0;
  for (const auto& r : cmp.runs) flagged += r.degraded ? 1 : 0;
  const bool ok = cmp.runs.size() == 3 * spec.seeds.size() && flagged == cmp.runs.size();
  const double rnd = harness::median_generation(harness::benchmark_generations(cmp.runs, harness::Condition::random, "perlin8"));
  const double tr = harness::median_generation(harness::benchmark_generations(cmp.runs, harness::Condition::trgo, "perlin8"));
  return {ok, fmt("%g runs completed and flagged; medians Random %g, TrGO %g", double(flagged), rnd, tr)};
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  if (cli.empty()) return {false, "no CLI path given"};
  fs::remove_all(work);
  const fs::path a = work / "a", b = work / "b";
  for (const auto& dir : {a, b}) {
    const std::string cmd = "\"" + cli + "\" compare --seeds 1 --out \"" + dir.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "compare exited nonzero"};
  }
  std::size_t files = 0, differ = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext != ".csv" && ext != ".json") continue;
    ++files;
    const auto other = b / fs::relative(entry.path(), a);
    if (!fs::exists(other) || harness::read_text(entry.path()) != harness::read_text(other)) ++differ;
  }
  return {files > 0 && differ == 0, fmt("%g CSV/JSON files compared, %g differ", double(files), double(differ))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "trgo_acceptance";

  criterion(1, "TCA constraint", 5, tca_constraint);
  criterion(2, "MMD oracle", 0, mmd_oracle);
  criterion(3, "transfer efficacy", 10, transfer_efficacy);
  criterion(4, "dominance sorting oracle", 5, sorting_oracle);
  criterion(5, "FK oracle", 0, fk_oracle);
  criterion(6, "objective unit behaviours", 0, objective_units);
  criterion(7, "MOEA sanity", 30, moea_sanity);
  criterion(8, "self-transfer", 300, self_transfer);
  criterion(9, "desk-scale speedup", 600, desk_speedup);
  criterion(10, "negative-transfer stress", 600, stress);
  criterion(11, "determinism", 0, [&] { return determinism(cli, work); });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
