// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs a single
// criterion; `--cli PATH` names the padic-bm binary for the reproducibility check.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "padic/laws.hpp"
#include "padic/process.hpp"
#include "padic/stats.hpp"

using namespace padic;

namespace {

// Pinned tolerances and sizes.
constexpr double kCharIntegralTol = 1e-12;
constexpr double kNormalizationTol = 1e-10;
constexpr double kZ = 3.0;
constexpr int kExitGrid = 64;
constexpr std::uint64_t kExitSamples = 100000;
constexpr int kExitPassBar = 34;
constexpr double kMachineRel = 1e-14;
constexpr std::uint64_t kCondMinAccepted = 1000;
constexpr double kGammaTol = 1e-4;
constexpr std::uint64_t kMarginalSamples = 100000;
constexpr std::uint64_t kWitnessDraws = 1000000;
constexpr int kWitnessR = 1;
constexpr int kWitnessK = 1;
constexpr std::uint64_t kFastSamples = 100000;
constexpr std::uint64_t kFullSamples = 20000;
constexpr int kEquivalenceGrid = 32;
constexpr double kLimitTol = 1e-6;
constexpr double kProductFloor = 1e-10;
constexpr unsigned kWorkers = 4;
constexpr std::uint64_t kSeed = 0xACCE97;

struct Outcome {
  bool pass;
  std::string summary;
  std::vector<std::string> notes;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

McRun run_for(std::uint64_t cell) { return {derive_seed(kSeed, cell), kWorkers}; }

Outcome char_integral_oracle() {
  double worst = 0.0;
  int cells = 0;
  for (Prime p : {2u, 3u})
    for (int d = 1; d <= 2; ++d)
      for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n, ++cells) {
          const double brute = static_cast<double>(oracle::brute_force_char_integral(p, m, n, d));
          worst = std::max(worst, std::abs(brute - char_integral(p, m, n, d).value()));
        }
  return {worst <= kCharIntegralTol, fmt::format("{} cells, max |error| = {:.3g}", cells, worst), {}};
}

Outcome density_normalization() {
  double worst = 0.0;
  int laws = 0;
  for (Prime p : {2u, 3u})
    for (double b : {0.5, 1.0, 2.0})
      for (double t : {0.1, 1.0, 10.0})
        for (int d = 1; d <= 3; ++d) {
          const ProcessParams params{p, d, b, 1.0};
          for (const RadialLaw& law :
               {adaptive_radial_law(params, t), radial_law(params, t, -10, 10)}) {
            worst = std::max(worst, std::abs(law.total() - 1.0));
            ++laws;
          }
        }
  return {worst <= kNormalizationTol,
          fmt::format("{} radial laws, max |total - 1| = {:.3g}", laws, worst), {}};
}

Outcome exit_grid(ProcessKind kind, std::uint64_t cell_offset) {
  int passed = 0, cells = 0;
  std::vector<std::string> notes;
  for (Prime p : {2u, 3u})
    for (int d = 1; d <= 3; ++d)
      for (double b : {1.0, 2.0})
        for (int R = -1; R <= 1; ++R, ++cells) {
          const ProcessParams params{p, d, b, 1.0};
          const ExitEstimate e = estimate_exit_survival(kind, params, 1.0, R, kExitGrid,
                                                        kExitSamples, run_for(cell_offset + cells));
          // score-test SE; the plug-in one is zero when every path exits
          const double se = binomial_se(e.closed_form, e.n_samples);
          const TestVerdict v = compare_to_closed_form(e.survival_estimate, se, e.closed_form, kZ);
          passed += v.pass;
          if (!v.pass)
            notes.push_back(fmt::format("miss p={} d={} b={} R={}: est {:.5f} se {:.5f} closed {:.5f}",
                                        p, d, b, R, e.survival_estimate, se, e.closed_form));
        }
  return {passed >= kExitPassBar, fmt::format("{}/{} cells within {} SE", passed, cells, kZ), notes};
}

Outcome exit_maxnorm() { return exit_grid(ProcessKind::maxnorm, 300); }

Outcome exit_product() {
  Outcome o = exit_grid(ProcessKind::product, 400);
  double worst = 0.0;
  for (Prime p : {2u, 3u})
    for (double b : {1.0, 2.0})
      for (int R = -1; R <= 1; ++R)
        for (int d = 1; d <= 8; ++d) {
          const ProcessParams params{p, d, b, 1.0};
          const double lhs = survival_product(params, 1.0, R);
          const double rhs = std::pow(survival_maxnorm(params.with_dim(1), 1.0, R), d);
          worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
  const bool identity = worst <= kMachineRel;
  o.summary += fmt::format("; identity max rel error {:.3g}", worst);
  o.pass = o.pass && identity;
  return o;
}

Outcome conditional_law() {
  int passed = 0, cells = 0;
  bool enough = true;
  std::vector<std::string> notes;
  for (int d : {2, 3})
    for (int R : {0, 1})
      for (int r = R - 2; r <= R; ++r)
        for (double t : {0.5, 2.0}) {
          const ProcessParams params{2, d, 1.0, 1.0};
          const double accept = conditioning_probability(params, t, R);
          const auto n = std::max<std::uint64_t>(
              20000, static_cast<std::uint64_t>(std::ceil(3.0 * kCondMinAccepted / accept)));
          const CondEstimate e = estimate_conditional(params, t, r, R, n, run_for(500 + cells));
          ++cells;
          const TestVerdict v = compare_to_closed_form(e.estimate, e.standard_error, e.closed_form, kZ);
          passed += v.pass;
          enough = enough && e.n_conditioned >= kCondMinAccepted;
          if (!v.pass || e.n_conditioned < kCondMinAccepted)
            notes.push_back(fmt::format("d={} R={} r={} t={}: est {:.5f} se {:.5f} closed {:.5f} n={}",
                                        d, R, r, t, e.estimate, e.standard_error, e.closed_form,
                                        e.n_conditioned));
        }
  return {passed == cells && enough,
          fmt::format("{}/{} cells within {} SE, all with >= {} accepted: {}", passed, cells, kZ,
                      kCondMinAccepted, enough ? "yes" : "no"),
          notes};
}

Outcome gamma_asymptotics() {
  bool monotone = true;
  double worst = 0.0, worst_limit = 0.0;
  for (Prime p : {2u, 3u})
    for (double b : {1.0, 2.0})
      for (int d : {2, 3})
        for (int R : {0, 1}) {
          const ProcessParams params{p, d, b, 1.0};
          const int r = R - 1;
          const double gamma = gamma_factor(params);
          const double scale = std::pow(static_cast<double>(p), r - R);
          double prev = std::numeric_limits<double>::infinity();
          double ratio = 0.0;
          for (double t : {1e-2, 1e-4, 1e-6}) {
            ratio = conditional_ball_prob(params, t, r, R) / scale;
            const double gap = std::abs(ratio - gamma);
            monotone = monotone && gap < prev;
            prev = gap;
          }
          worst = std::max(worst, std::abs(ratio - gamma));
          worst_limit = std::max(worst_limit, std::abs(ratio - p * gamma));
        }
  return {monotone && worst < kGammaTol,
          fmt::format("monotone toward gamma: {}; max |ratio - gamma| at t=1e-6 = {:.4g} (tol {:g})",
                      monotone ? "yes" : "no", worst, kGammaTol),
          {fmt::format("the ratio converges to p * gamma instead: max |ratio - p*gamma| at t=1e-6 = {:.3g}",
                       worst_limit)}};
}

Outcome component_marginals() {
  int passed = 0, cells = 0;
  std::vector<std::string> notes;
  for (Prime p : {2u, 3u})
    for (double b : {1.0, 2.0}) {
      const ProcessParams params{p, 3, b, 1.0};
      const RadialLaw line = adaptive_radial_law(params.with_dim(1), 1.0);
      const LevelCounts h = marginal_radial_histogram(params, 1.0, kMarginalSamples,
                                                      run_for(700 + cells), 1, line.k_min(), line.k_max());
      const TestVerdict v = chi_square_gof(h, line);
      ++cells;
      passed += v.pass;
      notes.push_back(fmt::format("p={} b={}: chi2 {:.2f} vs {:.2f} ({})", p, b, v.statistic,
                                  v.threshold, v.details));
    }
  return {passed == cells, fmt::format("{}/{} cells pass at 0.001", passed, cells), notes};
}

Outcome dependence_witness() {
  const ProcessParams params{2, 2, 1.0, 1.0};
  const int level = kWitnessR + kWitnessK;
  const std::uint64_t half = kWitnessDraws / 2;
  const LevelCounts h = marginal_radial_histogram(params, 1.0, half, run_for(800), 1, level, level);
  const double inside = static_cast<double>(h.below + h.counts[0]) / static_cast<double>(half);
  const double se_u = binomial_se(inside, half);
  const CondEstimate c = estimate_conditional(params, 1.0, level, level + 1, half, run_for(801));
  const double gap = inside - c.estimate;
  const double se = std::hypot(se_u, c.standard_error);
  return {gap > kZ * se,
          fmt::format("(R,K)=({},{}): P(B) = {:.5f} +- {:.5f}, P(B | S) = {:.5f} +- {:.5f}, gap = {:.2f} SE",
                      kWitnessR, kWitnessK, inside, se_u, c.estimate, c.standard_error, gap / se),
          {fmt::format("closed forms: {:.5f} vs {:.5f}", ball_probability(params.with_dim(1), 1.0, level),
                       c.closed_form)}};
}

Outcome estimator_equivalence() {
  struct Cell {
    ProcessKind kind;
    ProcessParams params;
    int R;
  };
  const std::vector<Cell> cells{
      {ProcessKind::maxnorm, {2, 2, 1.0, 1.0}, 0}, {ProcessKind::maxnorm, {3, 1, 2.0, 1.0}, 0},
      {ProcessKind::maxnorm, {2, 3, 1.0, 1.0}, 1}, {ProcessKind::maxnorm, {3, 2, 1.0, 1.0}, -1},
      {ProcessKind::product, {2, 2, 1.0, 1.0}, 0}, {ProcessKind::product, {3, 3, 2.0, 1.0}, 1},
  };
  int passed = 0;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const auto fast = estimate_exit_survival(c.kind, c.params, 1.0, c.R, kEquivalenceGrid,
                                             kFastSamples, run_for(900 + 2 * i));
    const auto full = estimate_exit_survival(c.kind, c.params, 1.0, c.R, kEquivalenceGrid,
                                             kFullSamples, run_for(901 + 2 * i), ExitPath::full);
    const double se = std::hypot(fast.standard_error, full.standard_error);
    const bool ok = std::abs(fast.survival_estimate - full.survival_estimate) <= kZ * se;
    passed += ok;
    notes.push_back(fmt::format("{} p={} d={} b={} R={}: fast {:.5f} full {:.5f} ({:.2f} SE)",
                                to_string(c.kind), c.params.p, c.params.d, c.params.b, c.R,
                                fast.survival_estimate, full.survival_estimate,
                                std::abs(fast.survival_estimate - full.survival_estimate) / se));
  }
  return {passed == static_cast<int>(cells.size()),
          fmt::format("{}/{} cells agree within {} combined SE", passed, cells.size(), kZ), notes};
}

Outcome dimension_limits() {
  const ProcessParams base{2, 1, 1.0, 1.0};
  bool increasing = true, decreasing = true;
  double prev = 0.0, last_max = 0.0, last_prod = 0.0;
  for (int d = 1; d <= 50; ++d) {
    const ProcessParams params = base.with_dim(d);
    last_max = survival_maxnorm(params, 1.0, 0);
    last_prod = survival_product(params, 1.0, 0);
    if (d > 1) {
      increasing = increasing && last_max > prev;
      decreasing = decreasing && last_max <= prev;
    }
    prev = last_max;
  }
  const double gap = std::abs(last_max - std::exp(-1.0));
  return {increasing && gap < kLimitTol && last_prod < kProductFloor,
          fmt::format("maxnorm monotone increasing: {}; |S_50 - e^-1| = {:.3g}; product S_50 = {:.3g}",
                      increasing ? "yes" : "no", gap, last_prod),
          {fmt::format("maxnorm column is non-increasing in d: {} (alpha_d grows toward 1, so the "
                       "survival falls toward e^-1 from above)",
                       decreasing ? "yes" : "no")}};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome reproducibility(const std::string& cli) {
  if (cli.empty() || !std::filesystem::exists(cli))
    return {false, "padic-bm binary not found (pass --cli PATH)", {}};
  const auto dir = std::filesystem::temp_directory_path() / fmt::format("padic-acc-{}", ::getpid());
  std::filesystem::create_directories(dir);
  const std::vector<std::string> commands{
      "exit --kind both --d 2 --n 20000 --seed 99 --workers 3 --format json",
      "conditional --t 1 0.5 --n 20000 --seed 99 --workers 3 --format csv",
      "marginals --n 20000 --seed 99 --workers 3 --format json",
  };
  int identical = 0;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outputs[2];
    for (int k = 0; k < 2; ++k) {
      const auto file = dir / fmt::format("run{}_{}.out", i, k);
      const std::string cmd =
          fmt::format("\"{}\" {} --out \"{}\" 2>/dev/null", cli, commands[i], file.string());
      const int rc = std::system(cmd.c_str());
      (void)rc;
      outputs[k] = slurp(file);
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    identical += same;
    notes.push_back(fmt::format("{}: {} bytes, {}", commands[i].substr(0, commands[i].find(' ')),
                                outputs[0].size(), same ? "identical" : "DIFFERENT"));
  }
  std::filesystem::remove_all(dir);
  return {identical == static_cast<int>(commands.size()),
          fmt::format("{}/{} subcommands byte-identical across repeated runs", identical,
                      commands.size()),
          notes};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string cli_path;
  bool verbose = false;
  app.add_option("--only", only, "run a single criterion (1-11)");
  app.add_option("--cli", cli_path, "path to the padic-bm binary");
  app.add_flag("--verbose", verbose, "print per-cell notes");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "character-integral oracle", 10, char_integral_oracle},
      {2, "density normalization", 5, density_normalization},
      {3, "exit law, max-norm process", 180, exit_maxnorm},
      {4, "exit law, product process", 180, exit_product},
      {5, "conditional law", 180, conditional_law},
      {6, "gamma asymptotics", 1, gamma_asymptotics},
      {7, "component marginals", 60, component_marginals},
      {8, "dependence witness", 120, dependence_witness},
      {9, "ultrametric estimator equivalence", 120, estimator_equivalence},
      {10, "dimension-limit contrast", 1, dimension_limits},
      {11, "reproducibility", 120, [&] { return reproducibility(cli_path); }},
  };

  bool all = true;
  int ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    all = all && pass;
    fmt::print("{} [{:2}] {}: {} ({:.2f}s of {:g}s{})\n", pass ? "PASS" : "FAIL", c.id, c.title,
               o.summary, secs, c.budget_seconds, in_time ? "" : ", over budget");
    if (verbose || !pass)
      for (const auto& n : o.notes) fmt::print("       {}\n", n);
  }
  if (ran == 0) {
    fmt::print(stderr, "no criterion {}\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
