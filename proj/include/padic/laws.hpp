#pragma once

// Closed-form laws of the max-norm and product Brownian motions on Q_p^d.
//
// Notation used throughout: for a level j, u_j = sigma * t * p^(j*b) and
//   c_j(t) = exp(-u_j) - exp(-u_{j+1}),
// the weight with which the density contains the uniform law on B_d(-j).

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <vector>

#include "padic/core.hpp"

namespace padic {

using Rational = boost::multiprecision::cpp_rational;

struct ProcessParams {
  Prime p = 2;
  int d = 1;
  double b = 1.0;      // diffusion exponent
  double sigma = 1.0;  // diffusion constant

  /// Throws std::invalid_argument unless p is prime, d >= 1, b > 0, sigma > 0.
  void validate() const;
  ProcessParams with_dim(int dd) const { return {p, dd, b, sigma}; }
  /// b as an integer when it is one; exact-rational routes need it.
  std::optional<long> integer_exponent() const;
};

struct SeriesTolerance {
  double epsilon = 1e-15;  // relative bound on the discarded remainder
  int max_terms = 10000;
};

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact power p^exponent.
struct PowerOfP {
  Prime p;
  long exponent;

  Rational exact() const;
  double value() const;
};

PowerOfP ball_measure(Prime p, int k, int d);
Rational sphere_measure(Prime p, int k, int d);

/// Integral over B_d(m) x B_d(n) of chi(x . y).
PowerOfP char_integral(Prime p, int m, int n, int d);

/// Sum over j <= -R of c_j(t) * p^(dd*j). At dd = d this is the density on
/// the sphere of level R. `R = nullopt` sums over all j (density at 0).
double tail_sum(const ProcessParams& params, std::optional<int> R, int dd, double t,
                const SeriesTolerance& tol = {});

/// d/dt of tail_sum at t = 0: sigma (p^b - 1) p^((b+dd)(1-R)) / (p^(b+dd) - 1).
double tail_sum_rate_at_zero(const ProcessParams& params, int R, int dd);

/// rho_d(t, x).
double density(const ProcessParams& params, double t, const PadicVector& x,
               const SeriesTolerance& tol = {});
/// rho_d(t, .) on a sphere of the given level (or at the origin).
double density_at_level(const ProcessParams& params, double t, NormLevel level,
                        const SeriesTolerance& tol = {});

/// P(||X_t|| <= p^R).
double ball_probability(const ProcessParams& params, double t, int R,
                        const SeriesTolerance& tol = {});

/// P(||X_t|| = p^k) = mu(S_d(k)) * rho_d(t, S_d(k)).
double sphere_probability(const ProcessParams& params, double t, int k,
                          const SeriesTolerance& tol = {});

/// P(||X_t|| > p^R), computed without cancellation against 1.
double ball_complement_probability(const ProcessParams& params, double t, int R,
                                   const SeriesTolerance& tol = {});

struct LevelMass {
  int level;
  double mass;
};

/// Probability of each norm level p^k in a window, with both tails accounted.
struct RadialLaw {
  ProcessParams params;
  double t = 0.0;
  std::vector<LevelMass> levels;  // consecutive, ascending
  double lower_tail = 0.0;        // P(||X_t|| < p^k_min), includes the origin
  double upper_tail = 0.0;        // P(||X_t|| > p^k_max)

  int k_min() const { return levels.front().level; }
  int k_max() const { return levels.back().level; }
  double mass(int k) const;
  double total() const;
};

RadialLaw radial_law(const ProcessParams& params, double t, int k_min, int k_max,
                     const SeriesTolerance& tol = {});

/// Radial law over the narrowest window whose tails are each below `tail_bound`.
RadialLaw adaptive_radial_law(const ProcessParams& params, double t, double tail_bound = 1e-12,
                              const SeriesTolerance& tol = {});

/// P(X_t^(i) in B(r, a) | the other d-1 coordinates lie in S_{d-1}(R)), r <= R, d >= 2.
double conditional_ball_prob(const ProcessParams& params, double t, int r, int R,
                             const SeriesTolerance& tol = {});

/// (p^(b+d) - p) / (p^(b+d+1) - p).
double gamma_factor(const ProcessParams& params);
Rational gamma_factor_exact(Prime p, long b, int d);

/// lim_{t->0} p^-r * conditional_ball_prob = p^-R (p^(b+d) - p) / (p^(b+d) - 1),
/// the ratio of the tail_sum slopes at t = 0. Equals p^(1-R) * gamma_factor.
double conditional_small_time_limit(const ProcessParams& params, int R);

/// alpha_dd = 1 - (p^b - 1) / (p^(b+dd) - 1).
double alpha(const ProcessParams& params, int dd);
Rational alpha_exact(Prime p, long b, int dd);

/// P(sup_{t<=T} ||X_t|| <= p^R) = exp(-sigma alpha_d T p^(-R b)).
double survival_maxnorm(const ProcessParams& params, double T, int R);
/// Same for the product process: exp(-d sigma alpha_1 T p^(-R b)).
double survival_product(const ProcessParams& params, double T, int R);

}  // namespace padic
