#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "padic/laws.hpp"

using namespace padic;

namespace {

const ProcessParams kUnit{2, 1, 1.0, 1.0};

// Ball probabilities for p=2, d=1, b=1, sigma=1, t=1 at R = -10..10, from a
// 40-digit summation of the series.
constexpr std::array<double, 21> kBallOracle = {
    0.00070444541341490426741, 0.0014088908268298085348, 0.0028177816536596170696,
    0.0056355633073192341393,  0.011271126614638468279,  0.022542253229276936557,
    0.045084506458541208948,   0.090168900381907698638,  0.18000233813591288544,
    0.34168903738309159058,    0.54804279152957048927,   0.72820614188769865694,
    0.84988162406276389027,    0.92096246505412291229,   0.95942802752365042172,
    0.97944299223382505733,    0.98965274999130603281,   0.99480906297720365963,
    0.99740018769416380716,    0.99869900591821012426,   0.99934923072894477582,
};

}  // namespace

TEST_CASE("ball and sphere measures") {
  CHECK(ball_measure(5, 0, 3).exact() == 1);
  CHECK(ball_measure(3, 1, 2).exact() == 9);
  CHECK(ball_measure(2, -1, 3).exact() == Rational(1, 8));
  CHECK(sphere_measure(2, 0, 1) == Rational(1, 2));
  CHECK(sphere_measure(3, 0, 2) == Rational(8, 9));
  for (Prime p : {2u, 3u, 5u})
    for (int d = 1; d <= 3; ++d)
      for (int k = -3; k <= 3; ++k)
        CHECK(sphere_measure(p, k, d) == ball_measure(p, k, d).exact() -
                                             ball_measure(p, k - 1, d).exact());
}

TEST_CASE("character integral closed form") {
  CHECK(char_integral(2, 0, 0, 1).exact() == 1);
  CHECK(char_integral(3, 1, 1, 2).exact() == 1);
  CHECK(char_integral(2, 1, -2, 1).exact() == Rational(1, 2));
}

TEST_CASE("character integral agrees with the digit-grid oracle") {
  for (Prime p : {2u, 3u})
    for (int d = 1; d <= 2; ++d)
      for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n) {
          if (p == 3 && d == 2 && m + n > 2) continue;  // covered by the acceptance run
          CAPTURE(p);
          CAPTURE(d);
          CAPTURE(m);
          CAPTURE(n);
          CHECK(oracle::brute_force_char_integral(p, m, n, d) == char_integral(p, m, n, d).exact());
        }
}

TEST_CASE("density at the origin matches the high-precision oracle") {
  const double rho0 = density_at_level(kUnit, 1.0, NormLevel::zero());
  CHECK(rho0 == doctest::Approx(0.72135210333686196982).epsilon(1e-14));
  CHECK(density(kUnit, 1.0, PadicVector::zero(2, 1)) == rho0);
}

TEST_CASE("ball probability matches the oracle on R in [-10, 10]") {
  for (int R = -10; R <= 10; ++R) {
    CAPTURE(R);
    CHECK(ball_probability(kUnit, 1.0, R) ==
          doctest::Approx(kBallOracle[static_cast<std::size_t>(R + 10)]).epsilon(1e-13));
  }
  const ProcessParams q{3, 2, 2.0, 0.7};
  CHECK(ball_probability(q, 0.3, -1) == doctest::Approx(0.22643314370719867795).epsilon(1e-13));
  CHECK(ball_probability(q, 0.3, 0) == doctest::Approx(0.82932382267382133959).epsilon(1e-13));
  CHECK(ball_probability(q, 0.3, 1) == doctest::Approx(0.97924043630289525762).epsilon(1e-13));
}

TEST_CASE("sphere masses are differences of ball probabilities") {
  for (int k = -9; k <= 10; ++k) {
    CAPTURE(k);
    const double diff = kBallOracle[static_cast<std::size_t>(k + 10)] -
                        kBallOracle[static_cast<std::size_t>(k + 9)];
    CHECK(sphere_probability(kUnit, 1.0, k) == doctest::Approx(diff).epsilon(1e-12));
  }
  CHECK(sphere_probability(kUnit, 1.0, 0) ==
        doctest::Approx(0.20635375414647889869).epsilon(1e-13));
  CHECK(sphere_probability(kUnit, 1.0, -10) ==
        doctest::Approx(3.5222270670745213e-4).epsilon(1e-12));
}

TEST_CASE("ball probability is monotone and tends to 1") {
  for (Prime p : {2u, 3u})
    for (int d = 1; d <= 3; ++d) {
      const ProcessParams params{p, d, 1.5, 0.8};
      double prev = 0.0;
      for (int R = -15; R <= 15; ++R) {
        const double v = ball_probability(params, 2.0, R);
        CHECK(v >= prev);
        CHECK(v <= 1.0);
        prev = v;
      }
      CHECK(prev == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(ball_complement_probability(params, 2.0, 40) < 1e-15);
      // small t at fixed R <= 0: mass leaves the ball as t grows
      for (int R = -2; R <= 0; ++R)
        CHECK(ball_probability(params, 1e-4, R) > ball_probability(params, 1e-3, R));
    }
  CHECK(ball_probability(kUnit, 1e-9, -3) > 1.0 - 1e-6);
}

TEST_CASE("radial law normalises over a parameter grid") {
  for (Prime p : {2u, 3u, 5u})
    for (int d = 1; d <= 3; ++d)
      for (double b : {0.5, 1.0, 2.0})
        for (double t : {0.01, 1.0, 100.0}) {
          const ProcessParams params{p, d, b, 1.3};
          const RadialLaw law = radial_law(params, t, -6, 6);
          CHECK(law.total() == doctest::Approx(1.0).epsilon(1e-12));
          for (const auto& l : law.levels) CHECK(l.mass >= 0.0);
          const RadialLaw wide = adaptive_radial_law(params, t, 1e-12);
          CHECK(wide.lower_tail < 1e-12);
          CHECK(wide.upper_tail < 1e-12);
          CHECK(wide.total() == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("density times sphere measure reproduces the radial masses") {
  const ProcessParams params{3, 2, 1.0, 1.0};
  const RadialLaw law = radial_law(params, 0.5, -8, 8);
  double total = 0.0;
  for (const auto& l : law.levels) {
    const double via_density =
        density_at_level(params, 0.5, NormLevel::of(l.level)) *
        static_cast<double>(sphere_measure(3, l.level, 2));
    CHECK(via_density == doctest::Approx(l.mass).epsilon(1e-9));
    CHECK(density_at_level(params, 0.5, NormLevel::of(l.level)) >= 0.0);
    total += via_density;
  }
  CHECK(total + law.lower_tail + law.upper_tail == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tail sum at t = 0, its slope and small-t growth") {
  const ProcessParams params{2, 2, 1.0, 1.0};
  CHECK(tail_sum(params, 0, 2, 0.0) == 0.0);
  for (int R : {-1, 0, 2})
    for (int dd : {1, 2, 3}) {
      const double h = 1e-8;
      const double fd = tail_sum(params, R, dd, h) / h;
      CHECK(fd == doctest::Approx(tail_sum_rate_at_zero(params, R, dd)).epsilon(1e-4));
      const double g6 = tail_sum(params, R, dd, 1e-6);
      const double g5 = tail_sum(params, R, dd, 1e-5);
      const double g4 = tail_sum(params, R, dd, 1e-4);
      CHECK(g6 < g5);
      CHECK(g5 < g4);
    }
}

TEST_CASE("conditional probability") {
  const ProcessParams params{2, 2, 1.0, 1.0};
  CHECK_THROWS_AS(conditional_ball_prob(params, 1.0, 1, 0), std::domain_error);
  CHECK_THROWS_AS(conditional_ball_prob(kUnit, 1.0, 0, 0), std::domain_error);

  for (double t : {0.1, 1.0, 10.0})
    for (int R : {-1, 0, 2}) {
      const double at_R = conditional_ball_prob(params, t, R, R);
      CHECK(at_R <= 1.0);
      CHECK(at_R > 0.0);
      // value / p^r does not depend on r
      for (int r = R - 4; r <= R; ++r)
        CHECK(conditional_ball_prob(params, t, r, R) / std::ldexp(1.0, r) ==
              doctest::Approx(at_R / std::ldexp(1.0, R)).epsilon(1e-14));
    }
}

TEST_CASE("gamma factor and the small-time conditional limit") {
  CHECK(gamma_factor({2, 2, 1.0, 1.0}) == doctest::Approx(3.0 / 7.0));
  CHECK(gamma_factor({3, 1, 2.0, 1.0}) == doctest::Approx(4.0 / 13.0));
  CHECK(gamma_factor_exact(2, 1, 2) == Rational(3, 7));
  CHECK(gamma_factor_exact(3, 2, 1) == Rational(4, 13));
  for (Prime p : {2u, 3u, 7u})
    for (int d = 1; d <= 6; ++d) CHECK(gamma_factor({p, d, 1.7, 1.0}) < 1.0);

  // The limit of conditional_ball_prob / p^r is p^(1-R) * gamma, i.e. 6/7 for
  // p=2, b=1, d=2, R=0.
  const ProcessParams params{2, 2, 1.0, 1.0};
  CHECK(conditional_small_time_limit(params, 0) == doctest::Approx(6.0 / 7.0));
  CHECK(conditional_ball_prob(params, 1e-6, 0, 0) == doctest::Approx(6.0 / 7.0).epsilon(1e-5));
  for (Prime p : {2u, 3u})
    for (double b : {1.0, 2.0})
      for (int d : {2, 3})
        for (int R : {-1, 0, 1}) {
          const ProcessParams q{p, d, b, 1.0};
          CHECK(conditional_small_time_limit(q, R) ==
                doctest::Approx(p * gamma_factor(q) * std::pow(p, -R)).epsilon(1e-14));
          double prev_gap = 1.0;
          for (double t : {1e-2, 1e-4, 1e-6}) {
            const double gap = std::abs(conditional_ball_prob(q, t, R, R) / std::pow(p, R) -
                                        conditional_small_time_limit(q, R));
            CHECK(gap < prev_gap);
            prev_gap = gap;
          }
          CHECK(prev_gap < 1e-4);
        }
}

TEST_CASE("conditional values near the small-time limit") {
  // 40-digit oracle of p^R G(R,d)/G(R,d-1) at R=0.
  const ProcessParams a{2, 2, 1.0, 1.0};
  CHECK(conditional_ball_prob(a, 1e-2, 0, 0) == doctest::Approx(0.85616099).epsilon(1e-7));
  CHECK(conditional_ball_prob(a, 1e-4, 0, 0) == doctest::Approx(0.85713306).epsilon(1e-7));
  const ProcessParams b{3, 3, 2.0, 1.0};
  CHECK(conditional_ball_prob(b, 1e-2, 0, 0) == doctest::Approx(0.99136634).epsilon(1e-7));
  CHECK(conditional_ball_prob(b, 1e-6, 0, 0) == doctest::Approx(0.99173550).epsilon(1e-7));
}

TEST_CASE("alpha") {
  CHECK(alpha(kUnit, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(alpha(kUnit, 2) == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
  CHECK(alpha_exact(2, 1, 3) == Rational(14, 15));
  double prev = 0.0;
  for (int dd = 1; dd <= 20; ++dd) {
    const double a = alpha({3, 1, 1.5, 1.0}, dd);
    CHECK(a > prev);
    CHECK(a < 1.0);
    prev = a;
  }
  CHECK(alpha({2, 1, 1.0, 1.0}, 60) == doctest::Approx(1.0));
}

TEST_CASE("survival laws") {
  const ProcessParams d2{2, 2, 1.0, 1.0};
  CHECK(survival_maxnorm(d2, 1.0, 0) == doctest::Approx(std::exp(-6.0 / 7.0)).epsilon(1e-15));
  CHECK(survival_maxnorm(d2, 1.0, 0) == doctest::Approx(0.42437).epsilon(1e-5));
  const ProcessParams d3{2, 3, 1.0, 1.0};
  CHECK(survival_product(d3, 1.0, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(survival_maxnorm(d2, 1e-12, 0) == doctest::Approx(1.0));

  // d = 1 reduces to the one-dimensional exit law
  for (int R = -2; R <= 2; ++R)
    CHECK(survival_maxnorm(kUnit, 1.5, R) == survival_product(kUnit, 1.5, R));

  for (Prime p : {2u, 3u})
    for (int R = -1; R <= 1; ++R) {
      const ProcessParams base{p, 1, 1.0, 1.0};
      const double s1 = survival_maxnorm(base, 1.0, R);
      double prev_max = 2.0, prev_prod = 2.0;
      for (int d = 1; d <= 30; ++d) {
        const ProcessParams q = base.with_dim(d);
        CHECK(survival_product(q, 1.0, R) == doctest::Approx(std::pow(s1, d)).epsilon(1e-13));
        // alpha_d grows with d, so survival falls toward its limit; strict until
        // the steps drop below double resolution
        if (std::pow(p, -d) > 1e-13) CHECK(survival_maxnorm(q, 1.0, R) < prev_max);
        else CHECK(survival_maxnorm(q, 1.0, R) <= prev_max);
        CHECK(survival_maxnorm(q, 1.0, R) >= std::exp(-std::pow(p, -R)));
        CHECK(survival_product(q, 1.0, R) < prev_prod);
        prev_max = survival_maxnorm(q, 1.0, R);
        prev_prod = survival_product(q, 1.0, R);
      }
      CHECK(prev_max == doctest::Approx(std::exp(-std::pow(p, -R))).epsilon(1e-6));
    }
}

TEST_CASE("non-integer exponents and invalid parameters") {
  const ProcessParams q{5, 2, 0.37, 2.5};
  CHECK_FALSE(q.integer_exponent().has_value());
  const RadialLaw law = adaptive_radial_law(q, 0.7);
  CHECK(law.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((ProcessParams{4, 1, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProcessParams{2, 0, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProcessParams{2, 1, -1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProcessParams{2, 1, 1.0, 0.0}.validate()), std::invalid_argument);
}
