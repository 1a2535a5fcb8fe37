#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rangeq/algebra.hpp"

namespace rangeq {

// Registry entry for one built-in pair. Identities are rendered as text so
// that the table can describe pairs over any domain.
struct PairInfo {
  std::string name;
  std::string update_op;
  std::string query_op;
  bool is_special = false;
  bool has_inverse = false;
  // The multiplicative pairs only have an inverse inside the zero-tracked
  // domain, which the matrix product uses.
  bool inverse_zero_tracked = false;
  bool update_idempotent = false;
  bool query_idempotent = false;
  Scalar update_identity;
  Scalar query_identity;
};

class UnknownPairError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
template <class P>
PairInfo info_of(std::string_view update_op, std::string_view query_op, bool has_inverse, bool zero_tracked) {
  return PairInfo{std::string(P::name),  std::string(update_op),  std::string(query_op),
                  P::is_special,         has_inverse,             zero_tracked,
                  P::update_idempotent,  P::query_idempotent,     P::update_identity(),
                  P::query_identity()};
}
}  // namespace detail

inline const std::vector<PairInfo>& builtin_pairs() {
  static const std::vector<PairInfo> table = {
      detail::info_of<pairs::PlusMin>("+", "min", true, false),
      detail::info_of<pairs::PlusMax>("+", "max", true, false),
      detail::info_of<pairs::PlusPlus>("+", "+", true, false),
      detail::info_of<pairs::TimesTimes>("*", "*", true, true),
      detail::info_of<pairs::MinMin>("min", "min", false, false),
      detail::info_of<pairs::MaxMax>("max", "max", false, false),
      detail::info_of<pairs::TimesPlus>("*", "+", true, true),
  };
  return table;
}

inline const PairInfo& lookup(std::string_view name) {
  for (const auto& p : builtin_pairs()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : builtin_pairs()) known += (known.empty() ? "" : ", ") + p.name;
  throw UnknownPairError("unknown pair '" + std::string(name) + "' (known: " + known + ")");
}

// Calls fn(P{}) with the Scalar pair named `name` and returns its result.
template <class Fn>
decltype(auto) with_pair(std::string_view name, Fn&& fn) {
  if (name == pairs::PlusMin::name) return fn(pairs::PlusMin{});
  if (name == pairs::PlusMax::name) return fn(pairs::PlusMax{});
  if (name == pairs::PlusPlus::name) return fn(pairs::PlusPlus{});
  if (name == pairs::TimesTimes::name) return fn(pairs::TimesTimes{});
  if (name == pairs::MinMin::name) return fn(pairs::MinMin{});
  if (name == pairs::MaxMax::name) return fn(pairs::MaxMax{});
  if (name == pairs::TimesPlus::name) return fn(pairs::TimesPlus{});
  (void)lookup(name);  // throws with the list of known names
  throw UnknownPairError("unknown pair");
}

}  // namespace rangeq
