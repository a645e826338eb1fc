#include "padic/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace padic {

namespace {

constexpr std::array<double, 64> kChiSquare001 = {
    10.8276, 13.8155, 16.2662, 18.4668,  20.5150,  22.4577,  24.3219,  26.1245,
    27.8772, 29.5883, 31.2641, 32.9095,  34.5282,  36.1233,  37.6973,  39.2524,
    40.7902, 42.3124, 43.8202, 45.3147,  46.7970,  48.2679,  49.7282,  51.1786,
    52.6197, 54.0520, 55.4760, 56.8923,  58.3012,  59.7031,  61.0983,  62.4872,
    63.8701, 65.2472, 66.6188, 67.9852,  69.3465,  70.7029,  72.0547,  73.4020,
    74.7449, 76.0838, 77.4186, 78.7495,  80.0767,  81.4003,  82.7204,  84.0371,
    85.3506, 86.6608, 87.9680, 89.2722,  90.5734,  91.8718,  93.1675,  94.4605,
    95.7510, 97.0388, 98.3242, 99.6072, 100.8879, 102.1662, 103.4424, 104.7163,
};

constexpr double kNormalUpper001 = 3.090232306167813;

}  // namespace

Interval binomial_ci(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) throw std::invalid_argument("binomial interval needs n >= 1");
  if (successes > n) throw std::invalid_argument("successes exceed trials");
  const double est = static_cast<double>(successes) / static_cast<double>(n);
  const double half = z * binomial_se(est, n);
  return {std::max(0.0, est - half), std::min(1.0, est + half)};
}

double binomial_se(double estimate, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(n));
}

void LevelCounts::record(NormLevel level) {
  if (level.is_zero || level.exponent < k_min) ++below;
  else if (level.exponent > k_max()) ++above;
  else ++counts[static_cast<std::size_t>(level.exponent - k_min)];
}

std::uint64_t LevelCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), below + above);
}

LevelCounts& LevelCounts::operator+=(const LevelCounts& other) {
  if (other.k_min != k_min || other.counts.size() != counts.size())
    throw std::invalid_argument("level count windows differ");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  below += other.below;
  above += other.above;
  return *this;
}

double chi_square_critical_001(int df) {
  if (df < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
  if (df <= static_cast<int>(kChiSquare001.size()))
    return kChiSquare001[static_cast<std::size_t>(df - 1)];
  const double h = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - h + kNormalUpper001 * std::sqrt(h), 3);
}

PooledBins pool_bins(const LevelCounts& observed, const RadialLaw& expected, double pooling_min) {
  const double n = static_cast<double>(observed.total());
  // Out-of-window counts are only attributable when the window covers the law's.
  if ((observed.below > 0 && observed.k_min > expected.k_min()) ||
      (observed.above > 0 && observed.k_max() < expected.k_max()))
    throw std::invalid_argument("observed level window does not cover the expected law");

  // Bins in level order: lower tail, each law level, upper tail.
  std::vector<double> exp_count;
  std::vector<std::uint64_t> obs;
  exp_count.push_back(expected.lower_tail * n);
  for (const auto& l : expected.levels) exp_count.push_back(l.mass * n);
  exp_count.push_back(expected.upper_tail * n);
  obs.assign(exp_count.size(), 0);

  auto bin_of = [&](int level) -> std::size_t {
    if (level < expected.k_min()) return 0;
    if (level > expected.k_max()) return obs.size() - 1;
    return static_cast<std::size_t>(level - expected.k_min()) + 1;
  };
  obs[0] += observed.below;
  for (std::size_t i = 0; i < observed.counts.size(); ++i)
    obs[bin_of(observed.k_min + static_cast<int>(i))] += observed.counts[i];
  obs[bin_of(observed.k_max() + 1)] += observed.above;

  PooledBins out;
  double acc_e = 0.0;
  std::uint64_t acc_o = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    acc_e += exp_count[i];
    acc_o += obs[i];
    if (acc_e >= pooling_min) {
      out.expected.push_back(acc_e);
      out.observed.push_back(acc_o);
      acc_e = 0.0;
      acc_o = 0;
    }
  }
  if (out.expected.empty()) {
    out.expected.push_back(acc_e);
    out.observed.push_back(acc_o);
  } else {
    out.expected.back() += acc_e;
    out.observed.back() += acc_o;
  }
  return out;
}

TestVerdict chi_square_gof(const LevelCounts& observed, const RadialLaw& expected,
                           double pooling_min, std::string name) {
  const std::uint64_t n = observed.total();
  if (n == 0) throw std::invalid_argument("no observations");
  const PooledBins bins = pool_bins(observed, expected, pooling_min);
  const auto& pooled_exp = bins.expected;
  const auto& pooled_obs = bins.observed;
  if (pooled_exp.size() < 2)
    throw std::invalid_argument("chi-square test needs at least two pooled bins");

  double stat = 0.0;
  for (std::size_t i = 0; i < pooled_exp.size(); ++i) {
    const double diff = static_cast<double>(pooled_obs[i]) - pooled_exp[i];
    stat += diff * diff / pooled_exp[i];
  }
  const int df = static_cast<int>(pooled_exp.size()) - 1;
  const double critical = chi_square_critical_001(df);
  std::ostringstream details;
  details << "bins=" << pooled_exp.size() << " df=" << df << " n=" << n;
  return {std::move(name), stat, critical, stat <= critical, details.str()};
}

TestVerdict compare_to_closed_form(double estimate, double se, double closed_form, double z,
                                   std::string name) {
  if (se < 0.0) throw std::invalid_argument("standard error must be nonnegative");
  const double gap = std::abs(estimate - closed_form);
  const double threshold = z * se;
  std::ostringstream details;
  details.precision(17);
  details << "estimate=" << estimate << " closed_form=" << closed_form << " se=" << se;
  return {std::move(name), gap, threshold, gap <= threshold, details.str()};
}

TestVerdict chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table,
                                    std::string name) {
  if (table.empty()) throw std::invalid_argument("empty contingency table");
  const std::size_t cols = table.front().size();
  std::vector<double> row_sum, col_sum(cols, 0.0);
  double total = 0.0;
  for (const auto& row : table) {
    if (row.size() != cols) throw std::invalid_argument("ragged contingency table");
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      s += static_cast<double>(row[j]);
      col_sum[j] += static_cast<double>(row[j]);
    }
    row_sum.push_back(s);
    total += s;
  }
  std::vector<std::size_t> rows_kept, cols_kept;
  for (std::size_t i = 0; i < row_sum.size(); ++i)
    if (row_sum[i] > 0) rows_kept.push_back(i);
  for (std::size_t j = 0; j < cols; ++j)
    if (col_sum[j] > 0) cols_kept.push_back(j);
  if (rows_kept.size() < 2 || cols_kept.size() < 2)
    throw std::invalid_argument("contingency table needs two nonempty rows and columns");

  double stat = 0.0;
  for (auto i : rows_kept)
    for (auto j : cols_kept) {
      const double e = row_sum[i] * col_sum[j] / total;
      const double diff = static_cast<double>(table[i][j]) - e;
      stat += diff * diff / e;
    }
  const int df = static_cast<int>((rows_kept.size() - 1) * (cols_kept.size() - 1));
  const double critical = chi_square_critical_001(df);
  return {std::move(name), stat, critical, stat <= critical,
          "df=" + std::to_string(df)};
}

}  // namespace padic
