#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "rangeq/algebra.hpp"

namespace rangeq {

using Rational = boost::multiprecision::cpp_rational;

inline Rational parse_rational(std::string_view text) {
  try {
    return Rational(std::string(text));
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
  }
}

inline std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Multiplicative factor whose zeros are counted instead of multiplied in.
// Used both as an update (multiply by factor * 0^zeros) and, under the
// (*,*) pair, as an element. The factor is never zero.
template <class M>
struct ZeroFactor {
  M factor{1};
  std::int64_t zeros = 0;

  static ZeroFactor from_number(const M& x) {
    if (x == M(0)) return ZeroFactor{M(1), 1};
    return ZeroFactor{x, 0};
  }

  // Value of the factor with every tracked zero multiplied in.
  [[nodiscard]] M effective() const { return zeros == 0 ? factor : M(0); }

  friend bool operator==(const ZeroFactor&, const ZeroFactor&) = default;
};

// Sum of multiplicatively updated elements, bucketed by how many times each
// term has been multiplied by zero. The effective value is the depth-0 sum;
// absent depths are 0 and no explicit zero entries are stored.
template <class M>
class ZeroTrackedSum {
 public:
  ZeroTrackedSum() = default;

  // A single element. Zero is encoded as a unit term multiplied by zero once,
  // so that every element has an exact inverse update.
  static ZeroTrackedSum from_number(const M& x) {
    ZeroTrackedSum s;
    if (x == M(0)) {
      s.depth_sums_.emplace(1, M(1));
    } else {
      s.depth_sums_.emplace(0, x);
    }
    return s;
  }

  [[nodiscard]] M effective() const {
    auto it = depth_sums_.find(0);
    return it == depth_sums_.end() ? M(0) : it->second;
  }

  [[nodiscard]] const std::map<std::int64_t, M>& depth_sums() const { return depth_sums_; }

  // Scale every bucket and shift every depth.
  [[nodiscard]] ZeroTrackedSum scaled(const ZeroFactor<M>& u) const {
    if (u.factor == M(0)) throw std::domain_error("zero-tracked factor must be non-zero");
    ZeroTrackedSum out;
    for (const auto& [depth, sum] : depth_sums_) {
      out.depth_sums_.emplace_hint(out.depth_sums_.end(), depth + u.zeros, sum * u.factor);
    }
    return out;
  }

  friend ZeroTrackedSum operator+(const ZeroTrackedSum& a, const ZeroTrackedSum& b) {
    ZeroTrackedSum out = a;
    for (const auto& [depth, sum] : b.depth_sums_) {
      auto [it, inserted] = out.depth_sums_.try_emplace(depth, sum);
      if (!inserted) {
        it->second += sum;
        if (it->second == M(0)) out.depth_sums_.erase(it);
      }
    }
    return out;
  }

  // The update that takes the unit element {0: 1} to this value. Only
  // single-bucket values (in particular every single element) have one.
  [[nodiscard]] ZeroFactor<M> as_factor() const {
    if (depth_sums_.size() != 1) {
      throw std::domain_error("zero-tracked sum with " + std::to_string(depth_sums_.size()) +
                              " buckets has no factor form");
    }
    const auto& [depth, sum] = *depth_sums_.begin();
    return ZeroFactor<M>{sum, depth};
  }

  friend bool operator==(const ZeroTrackedSum&, const ZeroTrackedSum&) = default;

 private:
  std::map<std::int64_t, M> depth_sums_;
};

namespace pairs {

// (*, +) over zero-tracked sums: the standard matrix product domain.
template <class M>
struct ZeroTrackedTimesPlus {
  using value_type = ZeroTrackedSum<M>;
  using update_type = ZeroFactor<M>;
  static constexpr std::string_view name = "times-plus";
  static constexpr bool is_special = false;
  static constexpr bool update_idempotent = false;
  static constexpr bool query_idempotent = false;

  static value_type apply(const value_type& a, const update_type& u) { return a.scaled(u); }
  static update_type compose(const update_type& u, const update_type& v) {
    return {u.factor * v.factor, u.zeros + v.zeros};
  }
  static value_type combine(const value_type& a, const value_type& b) { return a + b; }
  static update_type update_identity() { return {}; }
  static value_type query_identity() { return {}; }
  static value_type aggregate(const value_type& a, const update_type& u, std::uint64_t) {
    return a.scaled(u);
  }
  static update_type repeat(const update_type& u, std::uint64_t j) {
    return repeat_by_squaring(ZeroTrackedTimesPlus{}, u, j);
  }
  static update_type invert(const update_type& u) { return {M(1) / u.factor, -u.zeros}; }

  static value_type encode_value(const M& x) { return value_type::from_number(x); }
  static update_type encode_update(const M& x) { return update_type::from_number(x); }
  static update_type as_update(const value_type& a) { return a.as_factor(); }
  static M decode(const value_type& a) { return a.effective(); }
};

// (*, *) over zero-counted factors. Special, and elements share the update
// domain.
template <class M>
struct ZeroTrackedTimesTimes {
  using value_type = ZeroFactor<M>;
  using update_type = ZeroFactor<M>;
  static constexpr std::string_view name = "times-times";
  static constexpr bool is_special = true;
  static constexpr bool update_idempotent = false;
  static constexpr bool query_idempotent = false;

  static value_type apply(const value_type& a, const update_type& u) { return compose(a, u); }
  static update_type compose(const update_type& u, const update_type& v) {
    return {u.factor * v.factor, u.zeros + v.zeros};
  }
  static value_type combine(const value_type& a, const value_type& b) { return compose(a, b); }
  static update_type update_identity() { return {}; }
  static value_type query_identity() { return {}; }
  static value_type aggregate(const value_type& a, const update_type& u, std::uint64_t k) {
    return compose(a, repeat(u, k));
  }
  static update_type repeat(const update_type& u, std::uint64_t j) {
    return repeat_by_squaring(ZeroTrackedTimesTimes{}, u, j);
  }
  static update_type invert(const update_type& u) { return {M(1) / u.factor, -u.zeros}; }

  static value_type encode_value(const M& x) { return value_type::from_number(x); }
  static update_type encode_update(const M& x) { return update_type::from_number(x); }
  static update_type as_update(const value_type& a) { return a; }
  static M decode(const value_type& a) { return a.effective(); }
};

}  // namespace pairs

template <class M>
std::ostream& operator<<(std::ostream& os, const ZeroFactor<M>& f) {
  return os << "(" << f.factor << " x 0^" << f.zeros << ")";
}

template <class M>
std::ostream& operator<<(std::ostream& os, const ZeroTrackedSum<M>& s) {
  os << "{";
  bool first = true;
  for (const auto& [depth, sum] : s.depth_sums()) {
    os << (first ? "" : ", ") << depth << ": " << sum;
    first = false;
  }
  return os << "}";
}

}  // namespace rangeq
