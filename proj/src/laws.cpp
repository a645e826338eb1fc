#include "padic/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace padic {

namespace {

using boost::multiprecision::cpp_int;

cpp_int int_pow(Prime p, unsigned long e) {
  cpp_int out = 1;
  cpp_int base = p;
  while (e) {
    if (e & 1u) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

Rational rational_pow(Prime p, long e) {
  if (e >= 0) return Rational(int_pow(p, static_cast<unsigned long>(e)));
  return Rational(cpp_int(1), int_pow(p, static_cast<unsigned long>(-e)));
}

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::invalid_argument("time must be positive and finite");
}

// Sum over j <= top of c_j(t) * exp(dd*j*ln p + log_scale).
//
// The sum is split at the level where u_j ~ 1. Below it the terms decay
// geometrically: c_j <= sigma t p^((j+1)b), so the remainder below j0 is at
// most sigma t p^b p^((b+dd)(j0-1)) / (1 - p^-(b+dd)) (times the scale).
// Above it they decay doubly exponentially: once u_j (p^b - 1) >= dd ln p +
// ln 2 successive bounds exp(-u_j) p^(dd j) at least halve, so the remainder
// is at most twice the next bound.
double weighted_sum(const ProcessParams& params, std::optional<int> top, int dd, double t,
                    double log_scale, const SeriesTolerance& tol) {
  if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("time must be nonnegative");
  if (t == 0.0) return 0.0;
  if (dd < 1) throw std::invalid_argument("dimension must be >= 1");

  const double lnp = std::log(static_cast<double>(params.p));
  const double b = params.b;
  const double st = params.sigma * t;
  const double growth = std::expm1(b * lnp);  // p^b - 1
  const double geometric = -std::expm1(-(b + dd) * lnp);  // 1 - p^-(b+dd)

  auto term = [&](long j) {
    const double u = st * std::exp(static_cast<double>(j) * b * lnp);
    const double log_weight = static_cast<double>(dd) * static_cast<double>(j) * lnp + log_scale;
    return std::exp(-u + log_weight) * -std::expm1(-u * growth);
  };

  const double peak = std::floor(-std::log(st) / (b * lnp));
  long split = static_cast<long>(std::clamp(peak, -1e6, 1e6));
  if (top) split = std::min<long>(split, *top);

  double sum = 0.0;
  int terms = 0;
  auto count_term = [&] {
    if (++terms > tol.max_terms)
      throw SeriesError("series did not converge within " + std::to_string(tol.max_terms) +
                        " terms");
  };

  // Upward from split+1 to top.
  for (long j = split + 1; !top || j <= *top; ++j) {
    count_term();
    sum += term(j);
    const double u = st * std::exp(static_cast<double>(j) * b * lnp);
    if (u * growth >= dd * lnp + std::log(2.0)) {
      const double next_u = st * std::exp(static_cast<double>(j + 1) * b * lnp);
      const double bound =
          2.0 * std::exp(-next_u + static_cast<double>(dd) * static_cast<double>(j + 1) * lnp +
                         log_scale);
      if (bound <= tol.epsilon * sum || bound == 0.0) break;
    }
  }

  // Downward from split.
  for (long j = split;; --j) {
    count_term();
    sum += term(j);
    const double log_bound = std::log(st) + b * lnp +
                             (b + dd) * static_cast<double>(j - 1) * lnp + log_scale -
                             std::log(geometric);
    const double bound = std::exp(log_bound);
    if (bound <= tol.epsilon * sum || bound == 0.0) break;
  }
  return sum;
}

double p_pow(Prime p, double e) { return std::exp(e * std::log(static_cast<double>(p))); }

}  // namespace

void ProcessParams::validate() const {
  if (!is_prime(p)) throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
}

std::optional<long> ProcessParams::integer_exponent() const {
  if (b == std::floor(b) && b < 1e9) return static_cast<long>(b);
  return std::nullopt;
}

Rational PowerOfP::exact() const { return rational_pow(p, exponent); }

double PowerOfP::value() const {
  return std::pow(static_cast<double>(p), static_cast<double>(exponent));
}

PowerOfP ball_measure(Prime p, int k, int d) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  return {p, static_cast<long>(k) * d};
}

Rational sphere_measure(Prime p, int k, int d) {
  return ball_measure(p, k, d).exact() * (Rational(1) - rational_pow(p, -static_cast<long>(d)));
}

PowerOfP char_integral(Prime p, int m, int n, int d) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  return {p, static_cast<long>(d) * (n + std::min(-n, m))};
}

double tail_sum(const ProcessParams& params, std::optional<int> R, int dd, double t,
                const SeriesTolerance& tol) {
  std::optional<int> top;
  if (R) top = -*R;
  return weighted_sum(params, top, dd, t, 0.0, tol);
}

double tail_sum_rate_at_zero(const ProcessParams& params, int R, int dd) {
  const double e = params.b + dd;
  return params.sigma * std::expm1(params.b * std::log(static_cast<double>(params.p))) *
         p_pow(params.p, e * (1.0 - R)) / std::expm1(e * std::log(static_cast<double>(params.p)));
}

double density_at_level(const ProcessParams& params, double t, NormLevel level,
                        const SeriesTolerance& tol) {
  require_positive_time(t);
  return level.is_zero ? tail_sum(params, std::nullopt, params.d, t, tol)
                       : tail_sum(params, level.exponent, params.d, t, tol);
}

double density(const ProcessParams& params, double t, const PadicVector& x,
               const SeriesTolerance& tol) {
  if (x.dim() != params.d) throw std::invalid_argument("point dimension does not match d");
  if (x.prime() != params.p) throw std::invalid_argument("point prime does not match p");
  return density_at_level(params, t, max_norm(x), tol);
}

double ball_probability(const ProcessParams& params, double t, int R,
                        const SeriesTolerance& tol) {
  require_positive_time(t);
  const double lnp = std::log(static_cast<double>(params.p));
  const double outer = std::exp(-params.sigma * t * p_pow(params.p, (1.0 - R) * params.b));
  const double inner = weighted_sum(params, -R, params.d, t, params.d * R * lnp, tol);
  return std::min(1.0, outer + inner);
}

double sphere_probability(const ProcessParams& params, double t, int k,
                          const SeriesTolerance& tol) {
  require_positive_time(t);
  const double lnp = std::log(static_cast<double>(params.p));
  return -std::expm1(-params.d * lnp) *
         weighted_sum(params, -k, params.d, t, params.d * k * lnp, tol);
}

double ball_complement_probability(const ProcessParams& params, double t, int R,
                                   const SeriesTolerance& tol) {
  const double inside = ball_probability(params, t, R, tol);
  if (inside < 0.5) return 1.0 - inside;

  // Sum sphere masses upward. Each is at most C p^(-b k) with
  // C = (1 - p^-d) sigma t p^b / (1 - p^-(b+d)).
  const double lnp = std::log(static_cast<double>(params.p));
  const double c = -std::expm1(-params.d * lnp) * params.sigma * t * p_pow(params.p, params.b) /
                   -std::expm1(-(params.b + params.d) * lnp);
  const double ratio = -std::expm1(-params.b * lnp);  // 1 - p^-b
  double sum = 0.0;
  for (int k = R + 1, n = 0;; ++k, ++n) {
    if (n > tol.max_terms) throw SeriesError("ball complement did not converge");
    sum += sphere_probability(params, t, k, tol);
    const double bound = c * p_pow(params.p, -params.b * (k + 1)) / ratio;
    if (bound <= tol.epsilon * sum) break;
  }
  return sum;
}

double RadialLaw::mass(int k) const {
  if (levels.empty() || k < k_min() || k > k_max()) return 0.0;
  return levels[static_cast<std::size_t>(k - k_min())].mass;
}

double RadialLaw::total() const {
  double s = lower_tail + upper_tail;
  for (const auto& l : levels) s += l.mass;
  return s;
}

RadialLaw radial_law(const ProcessParams& params, double t, int k_min, int k_max,
                     const SeriesTolerance& tol) {
  params.validate();
  require_positive_time(t);
  if (k_min > k_max) throw std::invalid_argument("k_min must not exceed k_max");
  RadialLaw law{params, t, {}, 0.0, 0.0};
  law.levels.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) law.levels.push_back({k, sphere_probability(params, t, k, tol)});
  law.lower_tail = ball_probability(params, t, k_min - 1, tol);
  law.upper_tail = ball_complement_probability(params, t, k_max, tol);
  return law;
}

RadialLaw adaptive_radial_law(const ProcessParams& params, double t, double tail_bound,
                              const SeriesTolerance& tol) {
  params.validate();
  require_positive_time(t);
  const double lnp = std::log(static_cast<double>(params.p));
  const int centre = static_cast<int>(
      std::clamp(std::floor(std::log(params.sigma * t) / (params.b * lnp)), -1e4, 1e4));
  int k_min = centre;
  for (int n = 0; ball_probability(params, t, k_min - 1, tol) >= tail_bound; ++n, --k_min)
    if (n > tol.max_terms) throw SeriesError("cannot bound the lower radial tail");
  int k_max = centre;
  for (int n = 0; ball_complement_probability(params, t, k_max, tol) >= tail_bound; ++n, ++k_max)
    if (n > tol.max_terms) throw SeriesError("cannot bound the upper radial tail");
  return radial_law(params, t, k_min, k_max, tol);
}

namespace {

// p^-R * G(R, d, t) / G(R, d-1, t): the factor multiplying p^r.
double conditional_factor(const ProcessParams& params, double t, int R,
                          const SeriesTolerance& tol) {
  const double lnp = std::log(static_cast<double>(params.p));
  const double num = weighted_sum(params, -R, params.d, t, params.d * R * lnp, tol);
  const double den = weighted_sum(params, -R, params.d - 1, t, (params.d - 1) * R * lnp, tol);
  return num / den * p_pow(params.p, -R);
}

}  // namespace

double conditional_ball_prob(const ProcessParams& params, double t, int r, int R,
                             const SeriesTolerance& tol) {
  params.validate();
  require_positive_time(t);
  if (params.d < 2)
    throw std::domain_error("conditioning on the other coordinates needs d >= 2");
  if (r > R) throw std::domain_error("conditional ball probability needs r <= R");
  return p_pow(params.p, r) * conditional_factor(params, t, R, tol);
}

double gamma_factor(const ProcessParams& params) {
  const double q = p_pow(params.p, params.b + params.d);
  const double p = params.p;
  return (q - p) / (q * p - p);
}

Rational gamma_factor_exact(Prime p, long b, int d) {
  const Rational q = rational_pow(p, b + d);
  return (q - p) / (q * p - p);
}

double conditional_small_time_limit(const ProcessParams& params, int R) {
  const double lnp = std::log(static_cast<double>(params.p));
  const double e = params.b + params.d;
  // (p^e - p) / (p^e - 1) = (1 - p^(1-e)) / (1 - p^-e)
  return p_pow(params.p, -R) * std::expm1((1.0 - e) * lnp) / std::expm1(-e * lnp);
}

double alpha(const ProcessParams& params, int dd) {
  if (dd < 1) throw std::invalid_argument("dimension must be >= 1");
  const double lnp = std::log(static_cast<double>(params.p));
  return 1.0 - std::expm1(params.b * lnp) / std::expm1((params.b + dd) * lnp);
}

Rational alpha_exact(Prime p, long b, int dd) {
  return Rational(1) - (rational_pow(p, b) - 1) / (rational_pow(p, b + dd) - 1);
}

double survival_maxnorm(const ProcessParams& params, double T, int R) {
  require_positive_time(T);
  return std::exp(-params.sigma * alpha(params, params.d) * T * p_pow(params.p, -R * params.b));
}

double survival_product(const ProcessParams& params, double T, int R) {
  require_positive_time(T);
  return std::exp(-params.d * params.sigma * alpha(params, 1) * T *
                  p_pow(params.p, -R * params.b));
}

}  // namespace padic
