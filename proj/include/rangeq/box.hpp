#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rangeq {

// Inclusive index interval [lo, hi], always non-empty.
struct Interval {
  std::size_t lo = 0;
  std::size_t hi = 0;

  Interval() = default;
  Interval(std::size_t l, std::size_t h) : lo(l), hi(h) {
    if (l > h) {
      throw std::invalid_argument("empty interval [" + std::to_string(l) + "," + std::to_string(h) + "]");
    }
  }

  [[nodiscard]] std::size_t size() const { return hi - lo + 1; }
  [[nodiscard]] bool contains(std::size_t x) const { return lo <= x && x <= hi; }
  [[nodiscard]] bool within(std::size_t l, std::size_t h) const { return l <= lo && hi <= h; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Node range [l, r] relative to a query interval q.
inline bool covered_by(std::size_t l, std::size_t r, const Interval& q) { return q.lo <= l && r <= q.hi; }
inline bool disjoint(std::size_t l, std::size_t r, const Interval& q) { return r < q.lo || q.hi < l; }
inline std::size_t overlap(std::size_t l, std::size_t r, const Interval& q) {
  if (disjoint(l, r, q)) return 0;
  return std::min(r, q.hi) - std::max(l, q.lo) + 1;
}

// d-dimensional inclusive box, one Interval per axis.
class RangeBox {
 public:
  RangeBox() = default;
  RangeBox(std::initializer_list<Interval> axes) : axes_(axes) {}
  explicit RangeBox(std::vector<Interval> axes) : axes_(std::move(axes)) {}

  // The box covering every index of `dims`.
  static RangeBox full(std::span<const std::size_t> dims) {
    std::vector<Interval> axes;
    axes.reserve(dims.size());
    for (std::size_t n : dims) {
      if (n == 0) throw std::invalid_argument("zero extent");
      axes.emplace_back(0, n - 1);
    }
    return RangeBox(std::move(axes));
  }

  [[nodiscard]] std::size_t rank() const { return axes_.size(); }
  [[nodiscard]] const Interval& operator[](std::size_t i) const { return axes_[i]; }
  [[nodiscard]] std::span<const Interval> axes() const { return axes_; }

  [[nodiscard]] std::size_t volume() const {
    std::size_t v = 1;
    for (const auto& a : axes_) v *= a.size();
    return v;
  }

  // Throws std::out_of_range unless the box has the same rank as `dims` and
  // lies inside it.
  void check_within(std::span<const std::size_t> dims) const {
    if (axes_.size() != dims.size()) {
      throw std::out_of_range("box rank " + std::to_string(axes_.size()) + " does not match rank " +
                              std::to_string(dims.size()));
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (axes_[i].hi >= dims[i]) {
        throw std::out_of_range("box axis " + std::to_string(i) + " upper bound " +
                                std::to_string(axes_[i].hi) + " exceeds extent " + std::to_string(dims[i]));
      }
    }
  }

  friend bool operator==(const RangeBox&, const RangeBox&) = default;

 private:
  std::vector<Interval> axes_;
};

inline std::ostream& operator<<(std::ostream& os, const Interval& i) {
  return os << "[" << i.lo << "," << i.hi << "]";
}

inline std::ostream& operator<<(std::ostream& os, const RangeBox& b) {
  for (std::size_t i = 0; i < b.rank(); ++i) os << (i ? "x" : "") << b[i];
  return os;
}

}  // namespace rangeq
