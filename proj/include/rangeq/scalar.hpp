#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rangeq {

// 64-bit integer with reserved +inf / -inf sentinels.
//
// The two extreme representable values are taken by the sentinels, so the
// finite range is [INT64_MIN + 1, INT64_MAX - 1]. Arithmetic is checked:
// leaving the finite range or feeding a sentinel into + or * throws instead
// of wrapping. min / max are total and treat the sentinels as ordinary
// extremes.
class Scalar {
 public:
  using rep = std::int64_t;

  static constexpr rep kPosInf = std::numeric_limits<rep>::max();
  static constexpr rep kNegInf = std::numeric_limits<rep>::min();

  constexpr Scalar() = default;
  constexpr Scalar(rep v) : v_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr Scalar pos_inf() { return Scalar(kPosInf); }
  static constexpr Scalar neg_inf() { return Scalar(kNegInf); }

  [[nodiscard]] constexpr rep raw() const { return v_; }
  [[nodiscard]] constexpr bool is_pos_inf() const { return v_ == kPosInf; }
  [[nodiscard]] constexpr bool is_neg_inf() const { return v_ == kNegInf; }
  [[nodiscard]] constexpr bool is_finite() const { return !is_pos_inf() && !is_neg_inf(); }

  friend constexpr bool operator==(Scalar, Scalar) = default;
  friend constexpr auto operator<=>(Scalar, Scalar) = default;

  friend Scalar operator+(Scalar a, Scalar b) {
    if (!a.is_finite() || !b.is_finite()) {
      throw std::domain_error("infinite operand in +: " + a.str() + " + " + b.str());
    }
    rep out;
    if (__builtin_add_overflow(a.v_, b.v_, &out) || !Scalar(out).is_finite()) {
      throw std::overflow_error("integer overflow: " + a.str() + " + " + b.str());
    }
    return Scalar(out);
  }

  friend Scalar operator*(Scalar a, Scalar b) {
    if (!a.is_finite() || !b.is_finite()) {
      throw std::domain_error("infinite operand in *: " + a.str() + " * " + b.str());
    }
    rep out;
    if (__builtin_mul_overflow(a.v_, b.v_, &out) || !Scalar(out).is_finite()) {
      throw std::overflow_error("integer overflow: " + a.str() + " * " + b.str());
    }
    return Scalar(out);
  }

  friend Scalar operator-(Scalar a) {
    if (a.is_pos_inf()) return neg_inf();
    if (a.is_neg_inf()) return pos_inf();
    return Scalar(-a.v_);
  }

  [[nodiscard]] std::string str() const {
    if (is_pos_inf()) return "inf";
    if (is_neg_inf()) return "-inf";
    return std::to_string(v_);
  }

  // Accepts decimal integers and "inf", "+inf", "-inf".
  static Scalar parse(std::string_view text) {
    if (text == "inf" || text == "+inf") return pos_inf();
    if (text == "-inf") return neg_inf();
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    rep v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !Scalar(v).is_finite()) {
      throw std::invalid_argument("not an integer scalar: '" + std::string(text) + "'");
    }
    return Scalar(v);
  }

  friend std::ostream& operator<<(std::ostream& os, Scalar s) { return os << s.str(); }

 private:
  rep v_ = 0;
};

// Exponentiation by squaring under checked multiplication.
inline Scalar checked_pow(Scalar base, std::uint64_t exp) {
  Scalar result = 1;
  while (exp > 0) {
    if (exp & 1U) result = result * base;
    exp >>= 1U;
    if (exp > 0) base = base * base;
  }
  return result;
}

inline Scalar checked_mul(Scalar v, std::uint64_t k) {
  if (k > static_cast<std::uint64_t>(Scalar::kPosInf)) {
    throw std::overflow_error("repeat count too large: " + std::to_string(k));
  }
  return v * Scalar(static_cast<Scalar::rep>(k));
}

}  // namespace rangeq
