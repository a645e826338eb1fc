#include "padic/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace padic {

namespace {

void require_same_field(const PadicScalar& a, const PadicScalar& b) {
  if (a.prime() != b.prime())
    throw std::invalid_argument("p-adic operands have different primes");
  if (a.window() != b.window())
    throw std::invalid_argument("p-adic operands have different digit windows");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <class Int>
Int parse_int(std::string_view s, const char* what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument(std::string("cannot parse ") + what + " from '" +
                                std::string(s) + "'");
  return value;
}

// Parses the `p^v` prefix and checks p against the expected prime.
int parse_power_prefix(std::string_view head, Prime p) {
  auto caret = head.find('^');
  if (caret == std::string_view::npos)
    throw std::invalid_argument("expected 'p^v' in '" + std::string(head) + "'");
  auto base = parse_int<std::uint64_t>(head.substr(0, caret), "prime");
  if (base != p)
    throw std::invalid_argument("point prime " + std::to_string(base) +
                                " does not match p = " + std::to_string(p));
  return parse_int<int>(head.substr(caret + 1), "valuation");
}

std::uint32_t checked_digit(std::uint64_t value, Prime p) {
  if (value >= p)
    throw std::invalid_argument("digit " + std::to_string(value) + " out of range for p = " +
                                std::to_string(p));
  return static_cast<std::uint32_t>(value);
}

}  // namespace

double to_double(NormLevel level, Prime p) {
  return level.is_zero ? 0.0 : std::pow(static_cast<double>(p), level.exponent);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

PadicScalar::PadicScalar(Prime p, int window) : prime_(p) {
  if (p < 2) throw std::invalid_argument("prime must be >= 2");
  if (window < 1) throw std::invalid_argument("digit window must be >= 1");
  digits_.assign(static_cast<std::size_t>(window), 0);
}

PadicScalar PadicScalar::zero(Prime p, int window) { return PadicScalar(p, window); }

// raw[i] is the digit at position low_position + i; every entry is in [0, p).
PadicScalar normalize(Prime p, int window, int low_position, std::vector<std::uint32_t>& raw,
                      bool truncated) {
  PadicScalar out(p, window);
  out.truncated_ = truncated;
  auto first = std::find_if(raw.begin(), raw.end(), [](std::uint32_t d) { return d != 0; });
  if (first == raw.end()) return out;

  const auto offset = static_cast<int>(first - raw.begin());
  const int valuation = low_position + offset;
  if (valuation < PadicScalar::kMinValuation)
    throw std::overflow_error("p-adic valuation " + std::to_string(valuation) +
                              " below supported minimum");
  if (valuation > PadicScalar::kMaxValuation) {
    out.underflowed_ = true;
    return out;
  }
  const auto kept = std::min<std::ptrdiff_t>(window, raw.end() - first);
  std::copy_n(first, kept, out.digits_.begin());
  if (std::any_of(first + kept, raw.end(), [](std::uint32_t d) { return d != 0; }))
    out.truncated_ = true;
  out.valuation_ = valuation;
  out.is_zero_ = false;
  return out;
}

PadicScalar PadicScalar::from_digits(Prime p, int valuation, std::span<const std::uint32_t> digits,
                                     int window) {
  std::vector<std::uint32_t> raw(digits.begin(), digits.end());
  for (auto& d : raw) d = checked_digit(d, p);
  return normalize(p, window, valuation, raw, false);
}

PadicScalar PadicScalar::from_integer(Prime p, std::uint64_t value, int window) {
  std::vector<std::uint32_t> raw;
  while (value != 0) {
    raw.push_back(static_cast<std::uint32_t>(value % p));
    value /= p;
  }
  return normalize(p, window, 0, raw, false);
}

std::uint32_t PadicScalar::digit_at(int k) const {
  if (is_zero_) return 0;
  const int i = k - valuation_;
  if (i < 0 || i >= window()) return 0;
  return digits_[static_cast<std::size_t>(i)];
}

PadicScalar add(const PadicScalar& a, const PadicScalar& b) {
  require_same_field(a, b);
  const Prime p = a.prime();
  const int w = a.window();
  const bool truncated = a.truncated() || b.truncated();
  if (a.is_zero() || b.is_zero()) {
    const PadicScalar& x = a.is_zero() ? b : a;
    std::vector<std::uint32_t> raw(x.digits().begin(), x.digits().end());
    return normalize(p, w, x.valuation(), raw, truncated);
  }
  const int low = std::min(a.valuation(), b.valuation());
  const int high = std::max(a.valuation(), b.valuation()) + w;  // exclusive
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(high - low + 1), 0);

  std::uint64_t carry = 0;
  for (int pos = low; pos < high; ++pos) {
    std::uint64_t s = carry + a.digit_at(pos) + b.digit_at(pos);
    raw[static_cast<std::size_t>(pos - low)] = static_cast<std::uint32_t>(s % p);
    carry = s / p;
  }
  raw.back() = static_cast<std::uint32_t>(carry);
  return normalize(p, w, low, raw, truncated);
}

PadicScalar subtract(const PadicScalar& a, const PadicScalar& b) {
  require_same_field(a, b);
  if (b.is_zero()) return add(a, b);
  const Prime p = a.prime();
  const int w = a.window();
  const int low = a.is_zero() ? b.valuation() : std::min(a.valuation(), b.valuation());
  const int high = (a.is_zero() ? b.valuation() : std::max(a.valuation(), b.valuation())) + w;
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(high - low), 0);

  std::int64_t borrow = 0;
  for (int pos = low; pos < high; ++pos) {
    std::int64_t s = std::int64_t{a.digit_at(pos)} - b.digit_at(pos) - borrow;
    borrow = s < 0 ? 1 : 0;
    raw[static_cast<std::size_t>(pos - low)] = static_cast<std::uint32_t>(s + borrow * p);
  }
  // A final borrow means the exact difference continues with (p-1) digits forever.
  return normalize(p, w, low, raw, a.truncated() || b.truncated() || borrow != 0);
}

PadicScalar negate(const PadicScalar& a) { return subtract(PadicScalar::zero(a.prime(), a.window()), a); }

std::string to_string(const PadicScalar& x) {
  if (x.is_zero()) return "0";
  auto digits = x.digits();
  std::size_t last = digits.size();
  while (last > 1 && digits[last - 1] == 0) --last;
  std::string out = std::to_string(x.prime()) + "^" + std::to_string(x.valuation()) + " * (";
  for (std::size_t i = 0; i < last; ++i) {
    if (i) out += ' ';
    out += std::to_string(digits[i]);
  }
  out += ')';
  return out;
}

std::string to_compact_string(const PadicScalar& x) {
  if (x.is_zero()) return "0";
  auto digits = x.digits();
  std::size_t last = digits.size();
  while (last > 1 && digits[last - 1] == 0) --last;
  std::string out = std::to_string(x.prime()) + "^" + std::to_string(x.valuation()) + ":";
  for (std::size_t i = 0; i < last; ++i) {
    if (x.prime() > 36) {
      if (i) out += '.';
      out += std::to_string(digits[i]);
    } else {
      const auto d = digits[i];
      out += static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10));
    }
  }
  return out;
}

PadicScalar parse_scalar(std::string_view text, Prime p, int window) {
  text = trim(text);
  if (text == "0") return PadicScalar::zero(p, window);
  auto star = text.find('*');
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (star == std::string_view::npos || open == std::string_view::npos ||
      close == std::string_view::npos || open < star || close < open)
    throw std::invalid_argument("expected 'p^v * (d0 d1 ...)', got '" + std::string(text) + "'");
  const int valuation = parse_power_prefix(text.substr(0, star), p);
  std::vector<std::uint32_t> digits;
  std::string_view body = text.substr(open + 1, close - open - 1);
  while (!(body = trim(body)).empty()) {
    auto sp = body.find_first_of(" \t");
    digits.push_back(checked_digit(parse_int<std::uint64_t>(body.substr(0, sp), "digit"), p));
    body = sp == std::string_view::npos ? std::string_view{} : body.substr(sp);
  }
  if (digits.empty()) throw std::invalid_argument("no digits in '" + std::string(text) + "'");
  if (digits.front() == 0) throw std::invalid_argument("leading digit must be nonzero");
  return PadicScalar::from_digits(p, valuation, digits, window);
}

PadicScalar parse_compact_scalar(std::string_view text, Prime p, int window) {
  text = trim(text);
  if (text == "0") return PadicScalar::zero(p, window);
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("expected 'p^v:digits', got '" + std::string(text) + "'");
  const int valuation = parse_power_prefix(text.substr(0, colon), p);
  std::string_view body = text.substr(colon + 1);
  std::vector<std::uint32_t> digits;
  if (p > 36) {
    while (!body.empty()) {
      auto dot = body.find('.');
      digits.push_back(checked_digit(parse_int<std::uint64_t>(body.substr(0, dot), "digit"), p));
      body = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    }
  } else {
    for (char c : body) {
      std::uint64_t v;
      if (c >= '0' && c <= '9') v = static_cast<std::uint64_t>(c - '0');
      else if (c >= 'a' && c <= 'z') v = static_cast<std::uint64_t>(c - 'a' + 10);
      else throw std::invalid_argument(std::string("bad digit character '") + c + "'");
      digits.push_back(checked_digit(v, p));
    }
  }
  if (digits.empty()) throw std::invalid_argument("no digits in '" + std::string(text) + "'");
  return PadicScalar::from_digits(p, valuation, digits, window);
}

PadicVector PadicVector::zero(Prime p, int dim, int window) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  return PadicVector(std::vector<PadicScalar>(static_cast<std::size_t>(dim),
                                              PadicScalar::zero(p, window)));
}

PadicVector::PadicVector(std::vector<PadicScalar> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("a p-adic vector needs at least one coordinate");
  for (const auto& c : coords_) require_same_field(coords_.front(), c);
}

bool PadicVector::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const auto& c) { return c.is_zero(); });
}

bool PadicVector::truncated() const {
  return std::any_of(coords_.begin(), coords_.end(), [](const auto& c) { return c.truncated(); });
}

PadicVector add(const PadicVector& a, const PadicVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("p-adic vectors have different dimensions");
  std::vector<PadicScalar> out;
  out.reserve(static_cast<std::size_t>(a.dim()));
  for (int i = 0; i < a.dim(); ++i) out.push_back(add(a[i], b[i]));
  return PadicVector(std::move(out));
}

PadicVector subtract(const PadicVector& a, const PadicVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("p-adic vectors have different dimensions");
  std::vector<PadicScalar> out;
  out.reserve(static_cast<std::size_t>(a.dim()));
  for (int i = 0; i < a.dim(); ++i) out.push_back(subtract(a[i], b[i]));
  return PadicVector(std::move(out));
}

NormLevel max_norm(const PadicVector& x) {
  NormLevel level;
  for (const auto& c : x.coords()) level = max(level, c.norm());
  return level;
}

NormLevel max_norm_excluding(const PadicVector& x, int skip) {
  NormLevel level;
  for (int i = 0; i < x.dim(); ++i)
    if (i != skip) level = max(level, x[i].norm());
  return level;
}

bool in_ball(const PadicVector& x, int k) { return max_norm(x).at_most(k); }

bool in_sphere(const PadicVector& x, int k) { return max_norm(x) == NormLevel::of(k); }

PadicVector parse_point(std::string_view text, Prime p, int window) {
  std::vector<PadicScalar> coords;
  while (true) {
    auto comma = text.find(',');
    coords.push_back(parse_compact_scalar(text.substr(0, comma), p, window));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return PadicVector(std::move(coords));
}

std::string to_string(const PadicVector& x) {
  std::string out = "(";
  for (int i = 0; i < x.dim(); ++i) {
    if (i) out += ", ";
    out += to_string(x[i]);
  }
  return out + ")";
}

std::string to_compact_string(const PadicVector& x) {
  std::string out;
  for (int i = 0; i < x.dim(); ++i) {
    if (i) out += ',';
    out += to_compact_string(x[i]);
  }
  return out;
}

bool Ball::contains(const PadicVector& y) const {
  return in_ball(center ? y - *center : y, level);
}

bool Sphere::contains(const PadicVector& y) const {
  return in_sphere(center ? y - *center : y, level);
}

}  // namespace padic
