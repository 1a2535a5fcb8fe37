#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rangeq/scalar.hpp"

namespace rangeq {

// An operator pair (update, query) over elements of `value_type`, with
// updates drawn from `update_type`.
//
//   apply(a, v)        element a updated by v            (a ∇ v)
//   compose(u, v)      stacking two updates              (u ∇ v)
//   combine(a, b)      query fold                        (a △ b)
//   aggregate(a, v, k) fold of k elements each updated by v, given their
//                      fold a; the defining law is
//                        combine_i(apply(a_i, v)) == aggregate(combine_i a_i, v, k)
//   repeat(v, j)       v composed with itself j times
//
// For plain numeric pairs the element and update domains coincide and apply
// equals compose. They differ for the scaled pairs that live inside the
// general 2D tree and for the zero-tracked multiplicative domains.
template <class P>
concept OperatorPair = requires(const P& p, const typename P::value_type& a,
                                const typename P::update_type& u, std::uint64_t k) {
  typename P::value_type;
  typename P::update_type;
  { p.apply(a, u) } -> std::same_as<typename P::value_type>;
  { p.compose(u, u) } -> std::same_as<typename P::update_type>;
  { p.combine(a, a) } -> std::same_as<typename P::value_type>;
  { p.update_identity() } -> std::same_as<typename P::update_type>;
  { p.query_identity() } -> std::same_as<typename P::value_type>;
  { p.aggregate(a, u, k) } -> std::same_as<typename P::value_type>;
  { p.repeat(u, k) } -> std::same_as<typename P::update_type>;
  { P::is_special } -> std::convertible_to<bool>;
};

template <class P>
concept InvertiblePair = OperatorPair<P> && requires(const P& p, const typename P::update_type& u) {
  { p.invert(u) } -> std::same_as<typename P::update_type>;
};

// Pairs whose elements and updates share one domain, the setting of the
// special d-dimensional tree.
template <class P>
concept HomogeneousPair =
    OperatorPair<P> && std::same_as<typename P::value_type, typename P::update_type>;

template <class P>
using value_t = typename P::value_type;
template <class P>
using update_t = typename P::update_type;

// v ∇ v ∇ ... ∇ v by repeated squaring. Reference implementation for
// pairs without a closed form, and the oracle their closed forms are
// tested against.
template <class P>
update_t<P> repeat_by_squaring(const P& pair, update_t<P> v, std::uint64_t j) {
  update_t<P> result = pair.update_identity();
  while (j > 0) {
    if (j & 1U) result = pair.compose(result, v);
    j >>= 1U;
    if (j > 0) v = pair.compose(v, v);
  }
  return result;
}

namespace pairs {

// Shared plumbing for numeric pairs over Scalar.
struct ScalarPairBase {
  using value_type = Scalar;
  using update_type = Scalar;
};

struct PlusMin : ScalarPairBase {
  static constexpr std::string_view name = "plus-min";
  static constexpr bool is_special = false;
  static constexpr bool update_idempotent = false;
  static constexpr bool query_idempotent = true;
  static Scalar apply(Scalar a, Scalar v) { return a + v; }
  static Scalar compose(Scalar u, Scalar v) { return u + v; }
  static Scalar combine(Scalar a, Scalar b) { return std::min(a, b); }
  static Scalar update_identity() { return 0; }
  static Scalar query_identity() { return Scalar::pos_inf(); }
  static Scalar aggregate(Scalar a, Scalar v, std::uint64_t) { return a + v; }
  static Scalar repeat(Scalar v, std::uint64_t j) { return checked_mul(v, j); }
  static Scalar invert(Scalar v) { return -v; }
};

struct PlusMax : ScalarPairBase {
  static constexpr std::string_view name = "plus-max";
  static constexpr bool is_special = false;
  static constexpr bool update_idempotent = false;
  static constexpr bool query_idempotent = true;
  static Scalar apply(Scalar a, Scalar v) { return a + v; }
  static Scalar compose(Scalar u, Scalar v) { return u + v; }
  static Scalar combine(Scalar a, Scalar b) { return std::max(a, b); }
  static Scalar update_identity() { return 0; }
  static Scalar query_identity() { return Scalar::neg_inf(); }
  static Scalar aggregate(Scalar a, Scalar v, std::uint64_t) { return a + v; }
  static Scalar repeat(Scalar v, std::uint64_t j) { return checked_mul(v, j); }
  static Scalar invert(Scalar v) { return -v; }
};

struct PlusPlus : ScalarPairBase {
  static constexpr std::string_view name = "plus-plus";
  static constexpr bool is_special = true;
  static constexpr bool update_idempotent = false;
  static constexpr bool query_idempotent = false;
  static Scalar apply(Scalar a, Scalar v) { return a + v; }
  static Scalar compose(Scalar u, Scalar v) { return u + v; }
  static Scalar combine(Scalar a, Scalar b) { return a + b; }
  static Scalar update_identity() { return 0; }
  static Scalar query_identity() { return 0; }
  static Scalar aggregate(Scalar a, Scalar v, std::uint64_t k) { return a + checked_mul(v, k); }
  static Scalar repeat(Scalar v, std::uint64_t j) { return checked_mul(v, j); }
  static Scalar invert(Scalar v) { return -v; }
};

struct TimesTimes : ScalarPairBase {
  static constexpr std::string_view name = "times-times";
  static constexpr bool is_special = true;
  static constexpr bool update_idempotent = false;
  static constexpr bool query_idempotent = false;
  static Scalar apply(Scalar a, Scalar v) { return a * v; }
  static Scalar compose(Scalar u, Scalar v) { return u * v; }
  static Scalar combine(Scalar a, Scalar b) { return a * b; }
  static Scalar update_identity() { return 1; }
  static Scalar query_identity() { return 1; }
  static Scalar aggregate(Scalar a, Scalar v, std::uint64_t k) { return a * checked_pow(v, k); }
  static Scalar repeat(Scalar v, std::uint64_t j) { return checked_pow(v, j); }
};

struct TimesPlus : ScalarPairBase {
  static constexpr std::string_view name = "times-plus";
  static constexpr bool is_special = false;
  static constexpr bool update_idempotent = false;
  static constexpr bool query_idempotent = false;
  static Scalar apply(Scalar a, Scalar v) { return a * v; }
  static Scalar compose(Scalar u, Scalar v) { return u * v; }
  static Scalar combine(Scalar a, Scalar b) { return a + b; }
  static Scalar update_identity() { return 1; }
  static Scalar query_identity() { return 0; }
  static Scalar aggregate(Scalar a, Scalar v, std::uint64_t) { return a * v; }
  static Scalar repeat(Scalar v, std::uint64_t j) { return checked_pow(v, j); }
};

struct MinMin : ScalarPairBase {
  static constexpr std::string_view name = "min-min";
  static constexpr bool is_special = true;
  static constexpr bool update_idempotent = true;
  static constexpr bool query_idempotent = true;
  static Scalar apply(Scalar a, Scalar v) { return std::min(a, v); }
  static Scalar compose(Scalar u, Scalar v) { return std::min(u, v); }
  static Scalar combine(Scalar a, Scalar b) { return std::min(a, b); }
  static Scalar update_identity() { return Scalar::pos_inf(); }
  static Scalar query_identity() { return Scalar::pos_inf(); }
  static Scalar aggregate(Scalar a, Scalar v, std::uint64_t) { return std::min(a, v); }
  static Scalar repeat(Scalar v, std::uint64_t) { return v; }
};

struct MaxMax : ScalarPairBase {
  static constexpr std::string_view name = "max-max";
  static constexpr bool is_special = true;
  static constexpr bool update_idempotent = true;
  static constexpr bool query_idempotent = true;
  static Scalar apply(Scalar a, Scalar v) { return std::max(a, v); }
  static Scalar compose(Scalar u, Scalar v) { return std::max(u, v); }
  static Scalar combine(Scalar a, Scalar b) { return std::max(a, b); }
  static Scalar update_identity() { return Scalar::neg_inf(); }
  static Scalar query_identity() { return Scalar::neg_inf(); }
  static Scalar aggregate(Scalar a, Scalar v, std::uint64_t) { return std::max(a, v); }
  static Scalar repeat(Scalar v, std::uint64_t) { return v; }
};

}  // namespace pairs

// (∇, ∇): the pair of the lazy trees in the special d-dimensional structure.
// Elements are themselves updates; the query fold is ∇ with identity ∅_U.
template <OperatorPair P>
struct UpdateUpdatePair {
  using base_type = P;
  using value_type = update_t<P>;
  using update_type = update_t<P>;
  static constexpr bool is_special = true;

  P base{};

  value_type apply(const value_type& a, const update_type& v) const { return base.compose(a, v); }
  update_type compose(const update_type& u, const update_type& v) const { return base.compose(u, v); }
  value_type combine(const value_type& a, const value_type& b) const { return base.compose(a, b); }
  update_type update_identity() const { return base.update_identity(); }
  value_type query_identity() const { return base.update_identity(); }
  value_type aggregate(const value_type& a, const update_type& v, std::uint64_t k) const {
    return base.compose(a, base.repeat(v, k));
  }
  update_type repeat(const update_type& v, std::uint64_t j) const { return base.repeat(v, j); }
};

namespace detail {
template <class P>
struct lazy_pair {
  using type = UpdateUpdatePair<P>;
};
template <class P>
struct lazy_pair<UpdateUpdatePair<P>> {
  using type = UpdateUpdatePair<P>;
};
}  // namespace detail

// Lazy pair of P. Idempotent so that nested lazy trees do not produce an
// unbounded tower of wrapper types.
template <class P>
using lazy_pair_t = typename detail::lazy_pair<P>::type;

// (∇_x, △) with a ∇_x v := F(a, v, x): the pair of an inner tree whose outer
// node covers x rows. Updates still stack with the base ∇, since
// F(F(a, u, x), v, x) == F(a, u ∇ v, x).
template <OperatorPair P>
struct ScaledPair {
  using base_type = P;
  using value_type = value_t<P>;
  using update_type = update_t<P>;
  static constexpr bool is_special = false;

  P base{};
  std::uint64_t scale = 1;

  value_type apply(const value_type& a, const update_type& v) const { return base.aggregate(a, v, scale); }
  update_type compose(const update_type& u, const update_type& v) const { return base.compose(u, v); }
  value_type combine(const value_type& a, const value_type& b) const { return base.combine(a, b); }
  update_type update_identity() const { return base.update_identity(); }
  value_type query_identity() const { return base.query_identity(); }
  value_type aggregate(const value_type& a, const update_type& v, std::uint64_t k) const {
    return base.aggregate(a, v, scale * k);
  }
  update_type repeat(const update_type& v, std::uint64_t j) const { return base.repeat(v, j); }
};

template <class P>
std::string pair_name() {
  if constexpr (requires { P::name; }) {
    return std::string(P::name);
  } else {
    return "derived";
  }
}

// F(a, v, k).
template <OperatorPair P>
value_t<P> eval_f(const P& pair, const value_t<P>& a, const update_t<P>& v, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("eval_f: k must be positive");
  return pair.aggregate(a, v, k);
}

template <OperatorPair P>
update_t<P> repeat(const P& pair, const update_t<P>& v, std::uint64_t j) {
  if (j == 0) throw std::invalid_argument("repeat: j must be positive");
  return pair.repeat(v, j);
}

// G(a, v, j, k): fold of k elements (fold a) of which j were updated by v.
// Only defined for special pairs, where it equals a ∇ (v ⊗ j).
template <OperatorPair P>
value_t<P> eval_g(const P& pair, const value_t<P>& a, const update_t<P>& v, std::uint64_t j,
                  std::uint64_t k) {
  if constexpr (!P::is_special) {
    throw std::invalid_argument("eval_g: pair '" + pair_name<P>() + "' is not special");
  } else {
    if (k == 0 || j > k) throw std::invalid_argument("eval_g: need 0 <= j <= k and k >= 1");
    if (j == 0) return a;
    return pair.apply(a, pair.repeat(v, j));
  }
}

template <InvertiblePair P>
update_t<P> invert(const P& pair, const update_t<P>& x) {
  return pair.invert(x);
}

template <class T>
struct SpecialCounterexample {
  T a;
  T b;
  T v;
};

template <class T>
struct SpecialCheck {
  bool holds = true;
  std::optional<SpecialCounterexample<T>> witness;
  std::uint64_t samples_checked = 0;
};

namespace detail {
// 0, 1, -1, 2, -2, ...: small values in order of magnitude.
inline std::int64_t small_value(std::size_t i) {
  auto h = static_cast<std::int64_t>((i + 1) / 2);
  return (i % 2 == 1) ? h : -h;
}
}  // namespace detail

// Samples the law (a ∇ v) △ b == (a △ b) ∇ v. Small triples are enumerated
// first in order of magnitude (so a failing pair reports its smallest
// witness), then the remaining budget goes to seeded random triples.
template <HomogeneousPair P>
  requires std::same_as<value_t<P>, Scalar>
SpecialCheck<Scalar> check_special(const P& pair, std::uint64_t samples = 1000, std::uint64_t seed = 0) {
  SpecialCheck<Scalar> out;
  auto test = [&](Scalar a, Scalar b, Scalar v) {
    ++out.samples_checked;
    if (pair.combine(pair.apply(a, v), b) != pair.apply(pair.combine(a, b), v)) {
      out.holds = false;
      out.witness = SpecialCounterexample<Scalar>{a, b, v};
      return false;
    }
    return true;
  };
  constexpr std::size_t kSmall = 7;  // values -3..3
  for (std::size_t i = 0; i < kSmall; ++i) {
    for (std::size_t j = 0; j < kSmall; ++j) {
      for (std::size_t l = 0; l < kSmall; ++l) {
        if (out.samples_checked >= samples) return out;
        if (!test(detail::small_value(i), detail::small_value(j), detail::small_value(l))) return out;
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(-1000, 1000);
  while (out.samples_checked < samples) {
    if (!test(dist(rng), dist(rng), dist(rng))) return out;
  }
  return out;
}

}  // namespace rangeq
