#include "padic/process.hpp"

#include <cmath>
#include <cstdlib>
#include <deque>
#include <stdexcept>
#include <string>

namespace padic {

namespace {

struct Tally {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;

  Tally& operator+=(const Tally& o) {
    hits += o.hits;
    trials += o.trials;
    return *this;
  }
};

void check_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0)
    throw std::invalid_argument("time grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("time grid must be increasing");
}

// Samplers keyed by step length; a uniform grid produces steps that differ by
// rounding only, so lookups match within a relative 1e-12.
class SamplerCache {
 public:
  SamplerCache(ProcessParams params, SeriesTolerance tol) : params_(params), tol_(tol) {}

  bool matches(const ProcessParams& params, const SeriesTolerance& tol) const {
    return params.p == params_.p && params.d == params_.d && params.b == params_.b &&
           params.sigma == params_.sigma && tol.epsilon == tol_.epsilon &&
           tol.max_terms == tol_.max_terms;
  }

  const IncrementSampler& at(double dt) {
    for (const auto& s : samplers_)
      if (std::abs(s.dt() - dt) <= 1e-12 * dt) return s;
    if (samplers_.size() == kMaxSteps) samplers_.pop_front();
    samplers_.emplace_back(params_, dt, tol_);
    return samplers_.back();
  }

 private:
  ProcessParams params_;
  SeriesTolerance tol_;
  std::deque<IncrementSampler> samplers_;
  static constexpr std::size_t kMaxSteps = 64;
};

// Single paths are usually drawn in a loop with the same parameters, and building
// the radial law costs far more than a step, so each thread keeps a few caches.
SamplerCache& thread_cache(const ProcessParams& params, const SeriesTolerance& tol) {
  thread_local std::deque<SamplerCache> caches;
  for (auto& c : caches)
    if (c.matches(params, tol)) return c;
  if (caches.size() == 8) caches.pop_front();
  return caches.emplace_back(params, tol);
}

PathSample maxnorm_path(const ProcessParams& params, const std::vector<double>& grid,
                        RngStream& rng, SamplerCache& cache) {
  PathSample path{params, grid, {}};
  path.positions.reserve(grid.size());
  path.positions.push_back(PadicVector::zero(params.p, params.d));
  for (std::size_t i = 1; i < grid.size(); ++i)
    path.positions.push_back(path.positions.back() +
                             cache.at(grid[i] - grid[i - 1]).sample(rng));
  return path;
}

PathSample product_path(const ProcessParams& params, const std::vector<double>& grid,
                        RngStream& rng, SamplerCache& line_cache) {
  PathSample path{params, grid, {}};
  path.positions.reserve(grid.size());
  path.positions.push_back(PadicVector::zero(params.p, params.d));
  std::vector<PadicScalar> step;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const IncrementSampler& line = line_cache.at(grid[i] - grid[i - 1]);
    step.clear();
    for (int c = 0; c < params.d; ++c) step.push_back(line.sample(rng)[0]);
    path.positions.push_back(path.positions.back() + PadicVector(step));
  }
  return path;
}

bool path_survives(const PathSample& path, int R) {
  for (const auto& x : path.positions)
    if (!max_norm(x).at_most(R)) return false;
  return true;
}

}  // namespace

const char* to_string(ProcessKind kind) {
  return kind == ProcessKind::maxnorm ? "maxnorm" : "product";
}

const char* to_string(ExitPath path) { return path == ExitPath::fast ? "fast" : "full"; }

std::vector<double> uniform_grid(double T, int n) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (n < 1) throw std::invalid_argument("grid needs at least one step");
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) grid[static_cast<std::size_t>(j)] = T * j / n;
  return grid;
}

PathSample simulate_maxnorm_path(const ProcessParams& params, const std::vector<double>& grid,
                                 RngStream& rng, const SeriesTolerance& tol) {
  params.validate();
  check_grid(grid);
  return maxnorm_path(params, grid, rng, thread_cache(params, tol));
}

PathSample simulate_product_path(const ProcessParams& params, const std::vector<double>& grid,
                                 RngStream& rng, const SeriesTolerance& tol) {
  params.validate();
  check_grid(grid);
  return product_path(params, grid, rng, thread_cache(params.with_dim(1), tol));
}

ExitEstimate estimate_exit_survival(ProcessKind kind, const ProcessParams& params, double T,
                                    int R, int n_grid, std::uint64_t n_samples,
                                    const McRun& run, ExitPath path,
                                    const SeriesTolerance& tol) {
  params.validate();
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const std::vector<double> grid = uniform_grid(T, n_grid);
  const double dt = T / n_grid;
  const bool product = kind == ProcessKind::product;
  const ProcessParams step_params = product ? params.with_dim(1) : params;

  Tally tally;
  if (path == ExitPath::fast) {
    const IncrementSampler sampler(step_params, dt, tol);
    const int draws_per_step = product ? params.d : 1;
    tally = detail::parallel_reduce<Tally>(n_samples, run, [&](RngStream& rng, std::uint64_t n) {
      Tally local{0, n};
      for (std::uint64_t s = 0; s < n; ++s) {
        bool alive = true;
        for (int j = 0; j < n_grid && alive; ++j)
          for (int c = 0; c < draws_per_step && alive; ++c)
            alive = sampler.sample_norm(rng).at_most(R);
        local.hits += alive ? 1 : 0;
      }
      return local;
    });
  } else {
    tally = detail::parallel_reduce<Tally>(n_samples, run, [&](RngStream& rng, std::uint64_t n) {
      SamplerCache cache(step_params, tol);
      Tally local{0, n};
      for (std::uint64_t s = 0; s < n; ++s) {
        const PathSample sample = product ? product_path(params, grid, rng, cache)
                                          : maxnorm_path(params, grid, rng, cache);
        local.hits += path_survives(sample, R) ? 1 : 0;
      }
      return local;
    });
  }

  ExitEstimate out;
  out.kind = kind;
  out.path = path;
  out.n_samples = tally.trials;
  out.survivors = tally.hits;
  out.survival_estimate = static_cast<double>(tally.hits) / static_cast<double>(tally.trials);
  out.standard_error = binomial_se(out.survival_estimate, tally.trials);
  out.closed_form = product ? survival_product(params, T, R) : survival_maxnorm(params, T, R);
  out.grid_size = n_grid;
  return out;
}

double conditioning_probability(const ProcessParams& params, double t, int R,
                                const SeriesTolerance& tol) {
  if (params.d < 2) throw std::domain_error("conditioning needs d >= 2");
  return sphere_probability(params.with_dim(params.d - 1), t, R, tol);
}

CondEstimate estimate_conditional(const ProcessParams& params, double t, int r, int R,
                                  std::uint64_t n_samples, const McRun& run,
                                  const SeriesTolerance& tol) {
  params.validate();
  if (params.d < 2) throw std::domain_error("conditioning needs d >= 2");
  if (r > R) throw std::domain_error("conditional law needs r <= R");
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");

  const IncrementSampler sampler(params, t, tol);
  struct Acc {
    Tally inner;
    std::uint64_t draws = 0;
    Acc& operator+=(const Acc& o) {
      inner += o.inner;
      draws += o.draws;
      return *this;
    }
  };
  const NormLevel target = NormLevel::of(R);
  const Acc acc = detail::parallel_reduce<Acc>(n_samples, run, [&](RngStream& rng, std::uint64_t n) {
    Acc local;
    local.draws = n;
    for (std::uint64_t s = 0; s < n; ++s) {
      const PadicVector x = sampler.sample(rng);
      if (max_norm_excluding(x, 0) != target) continue;
      ++local.inner.trials;
      if (x[0].norm().at_most(r)) ++local.inner.hits;
    }
    return local;
  });

  CondEstimate out;
  out.r = r;
  out.R = R;
  out.n_draws = acc.draws;
  out.n_conditioned = acc.inner.trials;
  if (out.n_conditioned > 0)
    out.estimate = static_cast<double>(acc.inner.hits) / static_cast<double>(out.n_conditioned);
  out.standard_error = binomial_se(out.estimate, out.n_conditioned);
  out.closed_form = conditional_ball_prob(params, t, r, R, tol);
  out.low_statistics = out.n_conditioned < kLowStatisticsThreshold;
  return out;
}

LevelCounts marginal_radial_histogram(const ProcessParams& params, double t,
                                      std::uint64_t n_samples, const McRun& run, int component,
                                      int k_lo, int k_hi, const SeriesTolerance& tol) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  if (component < 1 || component > params.d)
    throw std::out_of_range("component must lie in 1..d");
  if (k_lo > k_hi) throw std::invalid_argument("empty level range");

  const IncrementSampler sampler(params, t, tol);
  const int index = component - 1;
  return detail::parallel_reduce<LevelCounts>(n_samples, run, [&](RngStream& rng, std::uint64_t n) {
    LevelCounts local(k_lo, k_hi);
    for (std::uint64_t s = 0; s < n; ++s) local.record(sampler.sample(rng)[index].norm());
    return local;
  });
}

unsigned default_workers(unsigned fallback) {
  if (const char* env = std::getenv("PADIC_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return fallback;
}

}  // namespace padic
