#pragma once

// Exact sampling of X_t for the max-norm process: the norm level comes from
// the radial law by inverse CDF, the point is then uniform on that sphere.

#include <cstdint>
#include <vector>

#include "padic/core.hpp"
#include "padic/laws.hpp"
#include "padic/rng.hpp"

namespace padic {

/// Haar-uniform element of B(k): digits from position -k on are i.i.d. uniform.
PadicScalar uniform_ball_scalar(Prime p, int k, RngStream& rng,
                                int window = PadicScalar::kDefaultWindow);

/// Uniform on S_d(k) by rejection from B_d(k)^d; `rejections`, when given, is
/// incremented once per discarded candidate.
PadicVector uniform_sphere_vector(Prime p, int k, int d, RngStream& rng,
                                  int window = PadicScalar::kDefaultWindow,
                                  std::uint64_t* rejections = nullptr);

struct RadiusDraw {
  enum class Kind { level, tail_low, tail_high };
  Kind kind = Kind::level;
  int level = 0;  // meaningful for Kind::level
};

/// Inverse-CDF draw over the law's window, with tail markers outside it.
RadiusDraw sample_radius(const RadialLaw& law, RngStream& rng);

class RadiusSampler {
 public:
  explicit RadiusSampler(RadialLaw law, SeriesTolerance tol = {});

  const RadialLaw& law() const { return law_; }

  RadiusDraw draw(RngStream& rng) const;

  /// Draws a norm level with tails resolved: below the window the increment is
  /// taken to be 0, above it the level is redrawn from the masses above k_max.
  NormLevel draw_level(RngStream& rng) const;

 private:
  int draw_above_window(RngStream& rng) const;

  RadialLaw law_;
  SeriesTolerance tol_;
  std::vector<double> cumulative_;  // cumulative_[i] = P(level <= k_min + i) incl. lower tail
};

/// Sampler for the increment X_{s+dt} - X_s of the max-norm process.
class IncrementSampler {
 public:
  IncrementSampler(const ProcessParams& params, double dt, const SeriesTolerance& tol = {},
                   int window = PadicScalar::kDefaultWindow);

  const ProcessParams& params() const { return params_; }
  double dt() const { return dt_; }
  const RadiusSampler& radius() const { return radius_; }

  /// Full increment vector.
  PadicVector sample(RngStream& rng) const;
  /// Norm of an increment only; same law as max_norm(sample(rng)).
  NormLevel sample_norm(RngStream& rng) const { return radius_.draw_level(rng); }

 private:
  ProcessParams params_;
  double dt_;
  int window_;
  RadiusSampler radius_;
};

PadicVector sample_increment(const ProcessParams& params, double dt, RngStream& rng,
                             const SeriesTolerance& tol = {});

}  // namespace padic
