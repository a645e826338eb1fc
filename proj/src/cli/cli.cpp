#include "padic/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "padic/laws.hpp"
#include "padic/process.hpp"

namespace padic::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  unsigned p = 2;
  int d = 1;
  double b = 1.0;
  double sigma = 1.0;
  std::string seed = "0x5EEDCAFE";
  unsigned workers = 1;
  double epsilon = 1e-15;
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App& app, Common& c, bool with_mc) {
  app.add_option("--p", c.p, "prime")->capture_default_str();
  app.add_option("--d", c.d, "dimension")->capture_default_str();
  app.add_option("--b", c.b, "diffusion exponent")->capture_default_str();
  app.add_option("--sigma", c.sigma, "diffusion constant")->capture_default_str();
  app.add_option("--epsilon", c.epsilon, "relative series tolerance")->capture_default_str();
  app.add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", c.out, "output file (stdout when omitted)");
  if (with_mc) {
    app.add_option("--seed", c.seed, "base seed")->capture_default_str();
    app.add_option("--workers", c.workers, "worker threads (default: PADIC_WORKERS or 1)")
        ->capture_default_str();
  }
}

std::uint64_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    throw UsageError("invalid seed: " + text);
  }
  if (used != text.size()) throw UsageError("invalid seed: " + text);
  return v;
}

// Accepts "100000" and "1e5"; must be a positive integer.
std::uint64_t parse_count(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError(fmt::format("invalid {}: {}", what, text));
  }
  if (used != text.size() || !(v >= 1) || v != std::floor(v) || v > 1e15)
    throw UsageError(fmt::format("{} must be a positive integer, got {}", what, text));
  return static_cast<std::uint64_t>(v);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw UsageError(fmt::format("{} must be positive", what));
}

ProcessParams params_of(const Common& c) {
  ProcessParams params{c.p, c.d, c.b, c.sigma};
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return params;
}

SeriesTolerance tolerance_of(const Common& c) {
  require_positive(c.epsilon, "epsilon");
  return {c.epsilon, SeriesTolerance{}.max_terms};
}

void echo_common(Report& r, const Common& c, bool with_mc) {
  r.config.emplace_back("p", std::int64_t{c.p});
  r.config.emplace_back("d", std::int64_t{c.d});
  r.config.emplace_back("b", c.b);
  r.config.emplace_back("sigma", c.sigma);
  r.config.emplace_back("epsilon", c.epsilon);
  if (with_mc) {
    r.config.emplace_back("seed", static_cast<std::int64_t>(parse_seed(c.seed)));
    r.config.emplace_back("workers", std::int64_t{c.workers});
  }
  r.config.emplace_back("format", c.format);
}

McRun run_of(const Common& c) {
  if (c.workers < 1) throw UsageError("workers must be >= 1");
  return {parse_seed(c.seed), c.workers};
}

// --- density -------------------------------------------------------------

struct DensityArgs {
  double t = 1.0;
  int kmin = -10;
  int kmax = 10;
  std::string x;
};

Report run_density(const Common& c, const DensityArgs& a) {
  const ProcessParams params = params_of(c);
  const SeriesTolerance tol = tolerance_of(c);
  require_positive(a.t, "t");
  Report r;
  r.command = "density";
  echo_common(r, c, false);
  r.config.emplace_back("t", a.t);

  if (!a.x.empty()) {
    PadicVector x = PadicVector::zero(params.p, params.d);
    try {
      x = parse_point(a.x, params.p);
    } catch (const std::exception& e) {
      throw UsageError(fmt::format("cannot parse point '{}': {}", a.x, e.what()));
    }
    if (x.dim() != params.d)
      throw UsageError(fmt::format("point has {} coordinates, expected {}", x.dim(), params.d));
    r.config.emplace_back("x", a.x);
    const NormLevel level = max_norm(x);
    r.columns = {"point", "norm_level", "density"};
    r.rows.push_back({to_compact_string(x),
                      level.is_zero ? Cell{std::string("zero")}
                                    : Cell{std::int64_t{level.exponent}},
                      density(params, a.t, x, tol)});
    return r;
  }

  if (a.kmin > a.kmax) throw UsageError("kmin must not exceed kmax");
  r.config.emplace_back("kmin", std::int64_t{a.kmin});
  r.config.emplace_back("kmax", std::int64_t{a.kmax});
  const RadialLaw law = radial_law(params, a.t, a.kmin, a.kmax, tol);
  r.columns = {"level", "mass", "cumulative"};
  double cumulative = law.lower_tail;
  r.rows.push_back({std::string("below"), law.lower_tail, cumulative});
  for (const auto& l : law.levels) {
    cumulative += l.mass;
    r.rows.push_back({std::int64_t{l.level}, l.mass, cumulative});
  }
  cumulative += law.upper_tail;
  r.rows.push_back({std::string("above"), law.upper_tail, cumulative});
  return r;
}

// --- exit ----------------------------------------------------------------

struct ExitArgs {
  std::string kind = "maxnorm";
  std::string path = "fast";
  double T = 1.0;
  int R = 0;
  std::string n = "100000";
  int n_grid = 64;
  double z = 3.0;
};

Report run_exit(const Common& c, const ExitArgs& a) {
  const ProcessParams params = params_of(c);
  const SeriesTolerance tol = tolerance_of(c);
  require_positive(a.T, "T");
  if (a.n_grid < 1) throw UsageError("n-grid must be >= 1");
  const std::uint64_t n = parse_count(a.n, "n");
  const McRun run = run_of(c);

  Report r;
  r.command = "exit";
  echo_common(r, c, true);
  r.config.emplace_back("kind", a.kind);
  r.config.emplace_back("path", a.path);
  r.config.emplace_back("T", a.T);
  r.config.emplace_back("R", std::int64_t{a.R});
  r.config.emplace_back("n", static_cast<std::int64_t>(n));
  r.config.emplace_back("n_grid", std::int64_t{a.n_grid});
  r.config.emplace_back("z", a.z);

  const ExitPath path = a.path == "full" ? ExitPath::full : ExitPath::fast;
  std::vector<ProcessKind> kinds;
  if (a.kind != "product") kinds.push_back(ProcessKind::maxnorm);
  if (a.kind != "maxnorm") kinds.push_back(ProcessKind::product);

  r.columns = {"kind", "path", "estimate", "standard_error", "closed_form", "survivors",
               "n_samples", "n_grid"};
  std::vector<ExitEstimate> estimates;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    // Each kind gets its own seed so the estimates are independent.
    McRun kind_run = run;
    if (i > 0) kind_run.seed = derive_seed(run.seed, i);
    const ExitEstimate e =
        estimate_exit_survival(kinds[i], params, a.T, a.R, a.n_grid, n, kind_run, path, tol);
    estimates.push_back(e);
    r.rows.push_back({std::string(to_string(e.kind)), std::string(to_string(e.path)),
                      e.survival_estimate, e.standard_error, e.closed_form,
                      static_cast<std::int64_t>(e.survivors),
                      static_cast<std::int64_t>(e.n_samples), std::int64_t{e.grid_size}});
    // SE under the closed form; the plug-in SE vanishes when no path survives
    r.verdicts.push_back(compare_to_closed_form(e.survival_estimate,
                                                binomial_se(e.closed_form, e.n_samples),
                                                e.closed_form, a.z,
                                                std::string(to_string(e.kind)) + " vs closed form"));
  }
  if (estimates.size() == 2 && params.d == 1) {
    const double se = std::hypot(estimates[0].standard_error, estimates[1].standard_error);
    r.verdicts.push_back(compare_to_closed_form(estimates[0].survival_estimate, se,
                                                estimates[1].survival_estimate, a.z,
                                                "maxnorm vs product at d=1"));
  }
  return r;
}

// --- conditional ---------------------------------------------------------

struct ConditionalArgs {
  std::vector<double> t{1.0};
  int r = 0;
  int R = 0;
  std::string n = "100000";
  double z = 3.0;
};

Report run_conditional(Common c, const ConditionalArgs& a, std::ostream& err) {
  const ProcessParams params = params_of(c);
  const SeriesTolerance tol = tolerance_of(c);
  if (params.d < 2) throw UsageError("conditional law needs d >= 2");
  if (a.r > a.R) throw UsageError("conditional law needs r <= R");
  for (double t : a.t) require_positive(t, "t");
  const std::uint64_t n = parse_count(a.n, "n");
  const McRun run = run_of(c);

  Report r;
  r.command = "conditional";
  echo_common(r, c, true);
  std::string ts;
  for (double t : a.t) ts += (ts.empty() ? "" : ";") + format_double(t);
  r.config.emplace_back("t", ts);
  r.config.emplace_back("r", std::int64_t{a.r});
  r.config.emplace_back("R", std::int64_t{a.R});
  r.config.emplace_back("n", static_cast<std::int64_t>(n));
  r.config.emplace_back("z", a.z);

  const double scale = std::pow(static_cast<double>(params.p), a.r);
  const double gamma = gamma_factor(params);
  const double limit = conditional_small_time_limit(params, a.R);
  r.columns = {"t",
               "estimate",
               "standard_error",
               "closed_form",
               "ratio_estimate",
               "ratio_closed_form",
               "gamma_p_minus_R",
               "small_time_limit",
               "acceptance_rate",
               "n_conditioned",
               "n_draws",
               "low_statistics"};
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    const double t = a.t[i];
    const double accept = conditioning_probability(params, t, a.R, tol);
    if (accept * static_cast<double>(n) < kLowStatisticsThreshold)
      err << fmt::format("warning: t={} expects {:.0f} accepted draws out of {}\n",
                         format_double(t), accept * static_cast<double>(n), n);
    const CondEstimate e =
        estimate_conditional(params, t, a.r, a.R, n, {derive_seed(run.seed, i), run.workers}, tol);
    if (e.low_statistics)
      err << fmt::format("warning: t={} low statistics, {} accepted draws\n", format_double(t),
                         e.n_conditioned);
    r.rows.push_back({t, e.estimate, e.standard_error, e.closed_form, e.estimate / scale,
                      e.closed_form / scale, gamma * std::pow(static_cast<double>(params.p), -a.R),
                      limit, accept, static_cast<std::int64_t>(e.n_conditioned),
                      static_cast<std::int64_t>(e.n_draws), e.low_statistics});
    r.verdicts.push_back(compare_to_closed_form(e.estimate, e.standard_error, e.closed_form, a.z,
                                                "t=" + format_double(t) + " vs closed form"));
  }
  return r;
}

// --- marginals -----------------------------------------------------------

struct MarginalArgs {
  double t = 1.0;
  int component = 1;
  std::string n = "100000";
  double pooling_min = 5.0;
};

Report run_marginals(const Common& c, const MarginalArgs& a) {
  const ProcessParams params = params_of(c);
  const SeriesTolerance tol = tolerance_of(c);
  require_positive(a.t, "t");
  if (a.component < 1 || a.component > params.d)
    throw UsageError(fmt::format("component must lie in 1..{}", params.d));
  const std::uint64_t n = parse_count(a.n, "n");
  const McRun run = run_of(c);

  Report r;
  r.command = "marginals";
  echo_common(r, c, true);
  r.config.emplace_back("t", a.t);
  r.config.emplace_back("component", std::int64_t{a.component});
  r.config.emplace_back("n", static_cast<std::int64_t>(n));
  r.config.emplace_back("pooling_min", a.pooling_min);

  const RadialLaw line = adaptive_radial_law(params.with_dim(1), a.t, 1e-12, tol);
  const LevelCounts counts =
      marginal_radial_histogram(params, a.t, n, run, a.component, line.k_min(), line.k_max(), tol);
  const double nn = static_cast<double>(n);
  r.columns = {"level", "observed", "expected"};
  r.rows.push_back({std::string("below"), static_cast<std::int64_t>(counts.below),
                    line.lower_tail * nn});
  for (const auto& l : line.levels)
    r.rows.push_back({std::int64_t{l.level},
                      static_cast<std::int64_t>(
                          counts.counts[static_cast<std::size_t>(l.level - counts.k_min)]),
                      l.mass * nn});
  r.rows.push_back({std::string("above"), static_cast<std::int64_t>(counts.above),
                    line.upper_tail * nn});
  r.verdicts.push_back(chi_square_gof(counts, line, a.pooling_min,
                                      fmt::format("component {} vs d=1 law", a.component)));
  return r;
}

// --- limits --------------------------------------------------------------

struct LimitArgs {
  double T = 1.0;
  int R = 0;
  int dmin = 1;
  int dmax = 20;
};

Report run_limits(Common c, const LimitArgs& a) {
  require_positive(a.T, "T");
  if (a.dmin < 1 || a.dmin > a.dmax) throw UsageError("need 1 <= dmin <= dmax");
  const ProcessParams base = params_of(c);
  Report r;
  r.command = "limits";
  echo_common(r, c, false);
  r.config.emplace_back("T", a.T);
  r.config.emplace_back("R", std::int64_t{a.R});
  r.config.emplace_back("dmin", std::int64_t{a.dmin});
  r.config.emplace_back("dmax", std::int64_t{a.dmax});
  r.columns = {"d", "alpha", "gamma", "survival_maxnorm", "survival_product"};
  for (int d = a.dmin; d <= a.dmax; ++d) {
    const ProcessParams params = base.with_dim(d);
    r.rows.push_back({std::int64_t{d}, alpha(params, d), gamma_factor(params),
                      survival_maxnorm(params, a.T, a.R), survival_product(params, a.T, a.R)});
  }
  return r;
}

void emit(const Report& report, const Common& c, std::ostream& out) {
  const std::string text = render(report, c.format == "json" ? Format::json : Format::csv);
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot open output file " + c.out);
  file << text;
  if (!file) throw UsageError("failed writing " + c.out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form laws and Monte-Carlo checks for Brownian motion on Q_p^d",
               "padic-bm"};
  app.require_subcommand(1);

  const unsigned env_workers = default_workers(1);
  Common common_density, common_exit, common_cond, common_marg, common_limits;
  for (Common* c : {&common_exit, &common_cond, &common_marg}) c->workers = env_workers;
  common_cond.d = 2;
  common_marg.p = 3;
  common_marg.d = 3;
  common_marg.b = 2.0;

  DensityArgs density_args;
  auto* density_cmd = app.add_subcommand("density", "density value at a point or radial law table");
  add_common(*density_cmd, common_density, false);
  density_cmd->add_option("--t", density_args.t, "time")->capture_default_str();
  density_cmd->add_option("--kmin", density_args.kmin, "lowest level")->capture_default_str();
  density_cmd->add_option("--kmax", density_args.kmax, "highest level")->capture_default_str();
  density_cmd->add_option("--x", density_args.x, "point, e.g. 2^-1:1,2^0:01");

  ExitArgs exit_args;
  auto* exit_cmd = app.add_subcommand("exit", "first-exit survival estimate vs closed form");
  add_common(*exit_cmd, common_exit, true);
  exit_cmd->add_option("--kind", exit_args.kind, "maxnorm, product or both")
      ->check(CLI::IsMember({"maxnorm", "product", "both"}))
      ->capture_default_str();
  exit_cmd->add_option("--path", exit_args.path, "fast (increment norms) or full (vector sums)")
      ->check(CLI::IsMember({"fast", "full"}))
      ->capture_default_str();
  exit_cmd->add_option("--T", exit_args.T, "horizon")->capture_default_str();
  exit_cmd->add_option("--R", exit_args.R, "ball level")->capture_default_str();
  exit_cmd->add_option("--n", exit_args.n, "sample paths")->capture_default_str();
  exit_cmd->add_option("--n-grid", exit_args.n_grid, "grid steps")->capture_default_str();
  exit_cmd->add_option("--z", exit_args.z, "verdict width in SE")->capture_default_str();

  ConditionalArgs cond_args;
  auto* cond_cmd = app.add_subcommand("conditional", "conditional component law vs closed form");
  add_common(*cond_cmd, common_cond, true);
  cond_cmd->add_option("--t", cond_args.t, "time(s)")->capture_default_str();
  cond_cmd->add_option("--r", cond_args.r, "inner ball level")->capture_default_str();
  cond_cmd->add_option("--R", cond_args.R, "conditioning sphere level")->capture_default_str();
  cond_cmd->add_option("--n", cond_args.n, "draws per time")->capture_default_str();
  cond_cmd->add_option("--z", cond_args.z, "verdict width in SE")->capture_default_str();

  MarginalArgs marg_args;
  auto* marg_cmd = app.add_subcommand("marginals", "component radial law vs the d=1 law");
  add_common(*marg_cmd, common_marg, true);
  marg_cmd->add_option("--t", marg_args.t, "time")->capture_default_str();
  marg_cmd->add_option("--component", marg_args.component, "1-based coordinate")
      ->capture_default_str();
  marg_cmd->add_option("--n", marg_args.n, "draws")->capture_default_str();
  marg_cmd->add_option("--pooling-min", marg_args.pooling_min, "minimum expected count per bin")
      ->capture_default_str();

  LimitArgs limit_args;
  auto* limits_cmd = app.add_subcommand("limits", "alpha, gamma and survival laws over d");
  add_common(*limits_cmd, common_limits, false);
  limits_cmd->add_option("--T", limit_args.T, "horizon")->capture_default_str();
  limits_cmd->add_option("--R", limit_args.R, "ball level")->capture_default_str();
  limits_cmd->add_option("--dmin", limit_args.dmin, "first dimension")->capture_default_str();
  limits_cmd->add_option("--dmax", limit_args.dmax, "last dimension")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Report report;
    const Common* common = nullptr;
    if (*density_cmd) {
      report = run_density(common_density, density_args);
      common = &common_density;
    } else if (*exit_cmd) {
      report = run_exit(common_exit, exit_args);
      common = &common_exit;
    } else if (*cond_cmd) {
      report = run_conditional(common_cond, cond_args, err);
      common = &common_cond;
    } else if (*marg_cmd) {
      report = run_marginals(common_marg, marg_args);
      common = &common_marg;
    } else {
      report = run_limits(common_limits, limit_args);
      common = &common_limits;
    }
    emit(report, *common, out);
    return report.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace padic::cli
