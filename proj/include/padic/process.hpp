#pragma once

// Path simulation and Monte-Carlo estimators for the max-norm and product
// processes. Paths start at the origin and are built from exact increments on
// a time grid.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "padic/core.hpp"
#include "padic/laws.hpp"
#include "padic/rng.hpp"
#include "padic/sampling.hpp"
#include "padic/stats.hpp"

namespace padic {

enum class ProcessKind { maxnorm, product };
enum class ExitPath { fast, full };

const char* to_string(ProcessKind kind);
const char* to_string(ExitPath path);

/// Seed and worker count. Worker w draws from RngStream(seed, w); results are
/// deterministic for a fixed pair.
struct McRun {
  std::uint64_t seed = 0x5EEDCAFE;
  unsigned workers = 1;
};

struct PathSample {
  ProcessParams params;
  std::vector<double> times;           // times[0] == 0
  std::vector<PadicVector> positions;  // positions[0] is the origin
};

/// {0, T/n, 2T/n, ..., T}.
std::vector<double> uniform_grid(double T, int n);

PathSample simulate_maxnorm_path(const ProcessParams& params, const std::vector<double>& grid,
                                 RngStream& rng, const SeriesTolerance& tol = {});

/// d independent copies of the one-dimensional process with the same sigma, b.
PathSample simulate_product_path(const ProcessParams& params, const std::vector<double>& grid,
                                 RngStream& rng, const SeriesTolerance& tol = {});

struct ExitEstimate {
  ProcessKind kind = ProcessKind::maxnorm;
  ExitPath path = ExitPath::fast;
  double survival_estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t survivors = 0;
  double closed_form = 0.0;
  int grid_size = 0;
};

/// P(max_j ||X_{t_j}|| <= p^R) on a uniform grid of n_grid steps over [0, T].
/// The fast path only draws increment norms: by the ultrametric inequality the
/// grid path stays in B(R) iff every increment does.
ExitEstimate estimate_exit_survival(ProcessKind kind, const ProcessParams& params, double T,
                                    int R, int n_grid, std::uint64_t n_samples,
                                    const McRun& run, ExitPath path = ExitPath::fast,
                                    const SeriesTolerance& tol = {});

struct CondEstimate {
  int r = 0;
  int R = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t n_conditioned = 0;
  std::uint64_t n_draws = 0;
  double closed_form = 0.0;
  bool low_statistics = false;
};

inline constexpr std::uint64_t kLowStatisticsThreshold = 100;

/// P(||(X^(2), ..., X^(d))|| = p^R), the acceptance rate of the conditioning
/// event. The other coordinates carry the (d-1)-dimensional law.
double conditioning_probability(const ProcessParams& params, double t, int R,
                                const SeriesTolerance& tol = {});

/// Draws X_t, keeps those whose coordinates 2..d have norm exactly p^R and
/// estimates P(|X^(1)| <= p^r) among them.
CondEstimate estimate_conditional(const ProcessParams& params, double t, int r, int R,
                                  std::uint64_t n_samples, const McRun& run,
                                  const SeriesTolerance& tol = {});

/// Levels of |X^(component)_t| (component is 1-based) from full d-dimensional
/// draws, counted over [k_lo, k_hi].
LevelCounts marginal_radial_histogram(const ProcessParams& params, double t,
                                      std::uint64_t n_samples, const McRun& run, int component,
                                      int k_lo, int k_hi, const SeriesTolerance& tol = {});

/// Worker count from PADIC_WORKERS, else `fallback`.
unsigned default_workers(unsigned fallback = 1);

namespace detail {

/// Splits n into `workers` contiguous chunks, runs fn(rng, count) -> Acc on
/// stream w for chunk w, and folds the results in stream order.
template <class Acc, class Fn>
Acc parallel_reduce(std::uint64_t n, const McRun& run, Fn fn) {
  const unsigned workers = std::max(1u, run.workers);
  std::vector<Acc> partial(workers);
  std::vector<std::exception_ptr> failure(workers);
  auto job = [&](unsigned w) {
    try {
      const std::uint64_t count = n / workers + (w < n % workers ? 1 : 0);
      RngStream rng(run.seed, w);
      partial[w] = fn(rng, count);
    } catch (...) {
      failure[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : failure)
    if (e) std::rethrow_exception(e);
  Acc total = partial[0];
  for (unsigned w = 1; w < workers; ++w) total += partial[w];
  return total;
}

}  // namespace detail

}  // namespace padic
