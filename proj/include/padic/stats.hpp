#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "padic/laws.hpp"

namespace padic {

struct TestVerdict {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string details;
};

struct Interval {
  double low;
  double high;
};

/// Normal-approximation interval p_hat +- z sqrt(p_hat (1 - p_hat) / n), clipped to [0, 1].
Interval binomial_ci(std::uint64_t successes, std::uint64_t n, double z = 3.0);

/// sqrt(est (1 - est) / n).
double binomial_se(double estimate, std::uint64_t n);

/// Counts of observed norm levels. Levels outside [k_min, k_min + counts.size())
/// are accumulated in `below` (including exact zeros) and `above`.
struct LevelCounts {
  int k_min = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t below = 0;
  std::uint64_t above = 0;

  LevelCounts() = default;
  LevelCounts(int lo, int hi) : k_min(lo), counts(static_cast<std::size_t>(hi - lo + 1), 0) {}

  int k_max() const { return k_min + static_cast<int>(counts.size()) - 1; }
  void record(NormLevel level);
  std::uint64_t total() const;
  LevelCounts& operator+=(const LevelCounts& other);
};

/// Upper 0.001 quantile of chi-square with `df` degrees of freedom: tabulated
/// for df <= 64, Wilson-Hilferty beyond.
double chi_square_critical_001(int df);

struct PooledBins {
  std::vector<std::uint64_t> observed;
  std::vector<double> expected;  // counts, total = observed total
};

/// Bins in level order (lower tail, law levels, upper tail), adjacent bins
/// merged until each expected count reaches `pooling_min`; a short remainder
/// joins the last bin.
PooledBins pool_bins(const LevelCounts& observed, const RadialLaw& expected, double pooling_min);

/// Pearson goodness of fit of observed levels against a radial law. Adjacent
/// bins (tails at either end) are pooled until each expected count reaches
/// `pooling_min`; the verdict is taken at the 0.001 level with
/// df = pooled bins - 1. Throws std::invalid_argument on fewer than two bins.
TestVerdict chi_square_gof(const LevelCounts& observed, const RadialLaw& expected,
                           double pooling_min = 5.0, std::string name = "chi-square");

/// Pass iff |estimate - closed_form| <= z * se.
TestVerdict compare_to_closed_form(double estimate, double se, double closed_form,
                                   double z = 3.0, std::string name = "closed-form");

/// Pearson chi-square for independence of a two-way contingency table, with
/// rows and columns whose margins are empty removed. df = (r-1)(c-1).
TestVerdict chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table,
                                    std::string name = "independence");

}  // namespace padic
