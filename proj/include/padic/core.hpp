#pragma once

// Finite-precision elements of Q_p and Q_p^d: digit windows, norms, balls.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace padic {

using Prime = std::uint32_t;

/// Norm of a p-adic value as an exact level: `p^exponent`, or 0.
struct NormLevel {
  bool is_zero = true;
  int exponent = 0;

  static constexpr NormLevel zero() { return {}; }
  static constexpr NormLevel of(int k) { return {false, k}; }

  /// True iff the norm is at most p^k.
  constexpr bool at_most(int k) const { return is_zero || exponent <= k; }

  friend constexpr bool operator==(NormLevel, NormLevel) = default;
  friend constexpr std::strong_ordering operator<=>(NormLevel a, NormLevel b) {
    if (a.is_zero || b.is_zero) return b.is_zero <=> a.is_zero;
    return a.exponent <=> b.exponent;
  }
};

/// Largest of two norm levels.
constexpr NormLevel max(NormLevel a, NormLevel b) { return a < b ? b : a; }

double to_double(NormLevel level, Prime p);

/// An element of Q_p truncated to a window of `window()` base-p digits.
///
/// A nonzero value is sum_{i < W} digits[i] * p^(valuation + i) with
/// digits[0] != 0, so its norm is p^-valuation. Digits beyond the window are
/// discarded (they are smaller than p^-(valuation + W) in norm). Zero is a
/// separate state rather than an all-zero digit pattern.
class PadicScalar {
 public:
  static constexpr int kDefaultWindow = 48;
  static constexpr int kMinValuation = -64;
  static constexpr int kMaxValuation = 64;

  static PadicScalar zero(Prime p, int window = kDefaultWindow);

  /// Builds a scalar from digits starting at position `valuation`. Leading zero
  /// digits are skipped; digits past the window are dropped (and flagged).
  static PadicScalar from_digits(Prime p, int valuation,
                                 std::span<const std::uint32_t> digits,
                                 int window = kDefaultWindow);

  static PadicScalar from_integer(Prime p, std::uint64_t value,
                                  int window = kDefaultWindow);

  Prime prime() const { return prime_; }
  int window() const { return static_cast<int>(digits_.size()); }
  bool is_zero() const { return is_zero_; }
  int valuation() const { return valuation_; }
  std::span<const std::uint32_t> digits() const { return digits_; }

  /// Digit at absolute position `k` (coefficient of p^k).
  std::uint32_t digit_at(int k) const;

  NormLevel norm() const {
    return is_zero_ ? NormLevel::zero() : NormLevel::of(-valuation_);
  }

  /// Nonzero digits were dropped at some point in this value's history.
  bool truncated() const { return truncated_; }
  /// A nonzero result fell below p^-kMaxValuation and was flushed to zero.
  bool underflowed() const { return underflowed_; }

  friend bool operator==(const PadicScalar& a, const PadicScalar& b) {
    return a.prime_ == b.prime_ && a.is_zero_ == b.is_zero_ &&
           (a.is_zero_ || (a.valuation_ == b.valuation_ && a.digits_ == b.digits_));
  }

 private:
  PadicScalar(Prime p, int window);

  Prime prime_;
  int valuation_ = 0;
  bool is_zero_ = true;
  bool truncated_ = false;
  bool underflowed_ = false;
  std::vector<std::uint32_t> digits_;

  friend PadicScalar normalize(Prime p, int window, int low_position,
                               std::vector<std::uint32_t>& raw, bool truncated);
};

PadicScalar add(const PadicScalar& a, const PadicScalar& b);
/// Digitwise difference with borrow. When the exact difference is negative its
/// expansion has an infinite (p-1) tail; that tail is dropped and flagged.
PadicScalar subtract(const PadicScalar& a, const PadicScalar& b);
PadicScalar negate(const PadicScalar& a);
inline PadicScalar operator+(const PadicScalar& a, const PadicScalar& b) { return add(a, b); }
inline PadicScalar operator-(const PadicScalar& a) { return negate(a); }
inline PadicScalar operator-(const PadicScalar& a, const PadicScalar& b) { return subtract(a, b); }

/// Renders as `p^v * (d0 d1 ...)`, trailing zero digits omitted; zero is `0`.
std::string to_string(const PadicScalar& x);

/// Inverse of to_string. `p` is required to parse the literal `0`.
PadicScalar parse_scalar(std::string_view text, Prime p,
                         int window = PadicScalar::kDefaultWindow);

/// Compact form `p^v:d0d1d2...` (digits as 0-9a-z, or '.'-separated when
/// p > 36). A bare `0` is zero.
PadicScalar parse_compact_scalar(std::string_view text, Prime p,
                                 int window = PadicScalar::kDefaultWindow);
std::string to_compact_string(const PadicScalar& x);

/// An element of Q_p^d; all coordinates share the prime and window.
class PadicVector {
 public:
  static PadicVector zero(Prime p, int dim, int window = PadicScalar::kDefaultWindow);
  explicit PadicVector(std::vector<PadicScalar> coords);

  Prime prime() const { return coords_.front().prime(); }
  int dim() const { return static_cast<int>(coords_.size()); }
  int window() const { return coords_.front().window(); }
  const PadicScalar& operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const PadicScalar> coords() const { return coords_; }

  bool is_zero() const;
  bool truncated() const;

  friend bool operator==(const PadicVector&, const PadicVector&) = default;

 private:
  std::vector<PadicScalar> coords_;
};

PadicVector add(const PadicVector& a, const PadicVector& b);
PadicVector subtract(const PadicVector& a, const PadicVector& b);
inline PadicVector operator+(const PadicVector& a, const PadicVector& b) { return add(a, b); }
inline PadicVector operator-(const PadicVector& a, const PadicVector& b) { return subtract(a, b); }

/// max_i |x_i| as an exact level.
NormLevel max_norm(const PadicVector& x);

/// Max-norm of the coordinates other than `skip`.
NormLevel max_norm_excluding(const PadicVector& x, int skip);

bool in_ball(const PadicVector& x, int k);
bool in_sphere(const PadicVector& x, int k);

/// Comma-separated compact coordinates, e.g. `2^-1:1,2^0:1`.
PadicVector parse_point(std::string_view text, Prime p,
                        int window = PadicScalar::kDefaultWindow);
std::string to_string(const PadicVector& x);
/// Inverse of parse_point.
std::string to_compact_string(const PadicVector& x);

struct Ball {
  int level = 0;
  std::optional<PadicVector> center;  // origin when empty

  bool contains(const PadicVector& y) const;
};

struct Sphere {
  int level = 0;
  std::optional<PadicVector> center;

  bool contains(const PadicVector& y) const;
};

bool is_prime(std::uint64_t n);

}  // namespace padic
