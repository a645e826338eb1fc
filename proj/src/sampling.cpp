#include "padic/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace padic {

PadicScalar uniform_ball_scalar(Prime p, int k, RngStream& rng, int window) {
  // Skip leading zero digits as they are drawn so the window is always full.
  int position = -k;
  std::uint32_t lead = 0;
  while (position <= PadicScalar::kMaxValuation && (lead = rng.below(p)) == 0) ++position;
  if (position > PadicScalar::kMaxValuation) return PadicScalar::zero(p, window);

  std::vector<std::uint32_t> digits(static_cast<std::size_t>(window));
  digits[0] = lead;
  for (std::size_t i = 1; i < digits.size(); ++i) digits[i] = rng.below(p);
  return PadicScalar::from_digits(p, position, digits, window);
}

PadicVector uniform_sphere_vector(Prime p, int k, int d, RngStream& rng, int window,
                                  std::uint64_t* rejections) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (-k > PadicScalar::kMaxValuation) return PadicVector::zero(p, d, window);
  std::vector<PadicScalar> coords;
  coords.reserve(static_cast<std::size_t>(d));
  while (true) {
    coords.clear();
    bool on_sphere = false;
    for (int i = 0; i < d; ++i) {
      coords.push_back(uniform_ball_scalar(p, k, rng, window));
      on_sphere = on_sphere || coords.back().norm() == NormLevel::of(k);
    }
    if (on_sphere) return PadicVector(std::move(coords));
    if (rejections) ++*rejections;
  }
}

RadiusDraw sample_radius(const RadialLaw& law, RngStream& rng) {
  double u = rng.uniform();
  if (u < law.lower_tail) return {RadiusDraw::Kind::tail_low, 0};
  u -= law.lower_tail;
  for (const auto& [level, mass] : law.levels) {
    if (u < mass) return {RadiusDraw::Kind::level, level};
    u -= mass;
  }
  return {RadiusDraw::Kind::tail_high, 0};
}

RadiusSampler::RadiusSampler(RadialLaw law, SeriesTolerance tol)
    : law_(std::move(law)), tol_(tol) {
  if (law_.levels.empty()) throw std::invalid_argument("radial law has no levels");
  double c = law_.lower_tail;
  cumulative_.reserve(law_.levels.size());
  for (const auto& l : law_.levels) cumulative_.push_back(c += l.mass);
}

RadiusDraw RadiusSampler::draw(RngStream& rng) const {
  const double u = rng.uniform();
  if (u < law_.lower_tail) return {RadiusDraw::Kind::tail_low, 0};
  // First level whose cumulative mass exceeds u; zero-mass levels are never hit.
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return {RadiusDraw::Kind::tail_high, 0};
  return {RadiusDraw::Kind::level, law_.k_min() + static_cast<int>(it - cumulative_.begin())};
}

int RadiusSampler::draw_above_window(RngStream& rng) const {
  // Inverse CDF over k > k_max, normalised by the recorded upper tail.
  double u = rng.uniform() * law_.upper_tail;
  int k = law_.k_max();
  for (int n = 0; n < tol_.max_terms; ++n) {
    ++k;
    const double m = sphere_probability(law_.params, law_.t, k, tol_);
    if (u < m) return k;
    u -= m;
  }
  return k;
}

NormLevel RadiusSampler::draw_level(RngStream& rng) const {
  const RadiusDraw r = draw(rng);
  switch (r.kind) {
    case RadiusDraw::Kind::level: return NormLevel::of(r.level);
    case RadiusDraw::Kind::tail_low: return NormLevel::zero();
    case RadiusDraw::Kind::tail_high: return NormLevel::of(draw_above_window(rng));
  }
  return NormLevel::zero();
}

IncrementSampler::IncrementSampler(const ProcessParams& params, double dt,
                                   const SeriesTolerance& tol, int window)
    : params_(params),
      dt_(dt),
      window_(window),
      radius_(adaptive_radial_law(params, dt, 1e-12, tol), tol) {}

PadicVector IncrementSampler::sample(RngStream& rng) const {
  const NormLevel level = radius_.draw_level(rng);
  if (level.is_zero) return PadicVector::zero(params_.p, params_.d, window_);
  return uniform_sphere_vector(params_.p, level.exponent, params_.d, rng, window_);
}

PadicVector sample_increment(const ProcessParams& params, double dt, RngStream& rng,
                             const SeriesTolerance& tol) {
  return IncrementSampler(params, dt, tol).sample(rng);
}

}  // namespace padic
