#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangeq/algebra.hpp"
#include "rangeq/box.hpp"
#include "rangeq/counters.hpp"
#include "rangeq/dense_tensor.hpp"
#include "rangeq/segtree1d.hpp"

namespace rangeq {

// Thrown when a structure that needs (a ∇ v) △ b == (a △ b) ∇ v is built
// over a pair without it.
class NotSpecialError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <OperatorPair P>
[[noreturn]] void throw_not_special() {
  std::string msg = "pair '" + pair_name<P>() + "' is not special";
  if constexpr (HomogeneousPair<P> && std::same_as<value_t<P>, Scalar>) {
    auto check = check_special(P{});
    if (check.witness) {
      const auto& w = *check.witness;
      P p{};
      msg += ": (a ∇ v) △ b != (a △ b) ∇ v at a=" + w.a.str() + ", b=" + w.b.str() + ", v=" + w.v.str() + " (" +
             p.combine(p.apply(w.a, w.v), w.b).str() + " vs " + p.apply(p.combine(w.a, w.b), w.v).str() + ")";
    }
  }
  throw NotSpecialError(msg);
}

template <HomogeneousPair P, std::size_t D>
class NDTree;

// d = 1: a plain lazy segment tree.
template <HomogeneousPair P>
class NDTree<P, 1> {
 public:
  using pair_type = P;
  using value_type = value_t<P>;
  using update_type = update_t<P>;
  static constexpr std::size_t rank = 1;

  explicit NDTree(TensorView<value_type> init, P pair = {}, OpCounters* sink = nullptr)
      : tree_(checked(init), std::move(pair), sink), dims_{init.dims[0]} {}

  void update(const RangeBox& b, const update_type& v) {
    b.check_within(dims_);
    tree_.update(b[0], v);
  }
  [[nodiscard]] value_type query(const RangeBox& b) const {
    b.check_within(dims_);
    return tree_.query(b[0]);
  }

  [[nodiscard]] std::span<const std::size_t> dims() const { return dims_; }
  [[nodiscard]] const OpCounters& counters() const { return tree_.counters(); }
  OpCounters& counters() { return tree_.counters(); }
  [[nodiscard]] const SegTree1D<P>& tree() const { return tree_; }

 private:
  template <HomogeneousPair, std::size_t>
  friend class NDTree;

  static std::span<const value_type> checked(TensorView<value_type> init) {
    if constexpr (!P::is_special) throw_not_special<P>();
    if (init.rank() != 1) throw std::invalid_argument("tensor rank does not match the tree");
    return init.data;
  }

  void update_nested(std::span<const Interval> b, const update_type& v) { tree_.update(b[0], v); }
  value_type query_nested(std::span<const Interval> b) const { return tree_.query(b[0]); }

  SegTree1D<P> tree_;
  std::size_t dims_[1];
};

// d-dimensional tree for special pairs: O(log^d N) updates and queries.
//
// An outer segment tree splits axis 0. Every outer node n covering rows
// [l, r] owns two (d-1)-dimensional trees over the remaining axes:
//
//   a   (∇, △) tree, a(c) = fold of A[x](c) over x in n, before lazies;
//   az  (∇, ∇) tree, az(c) = update pending for every row of n at c.
//
// The true fold of n × C is a.Q(C) ∇ ((∇ of m.az.Q(C) for m ⊇ n) ⊗ |n|).
// Outer nodes sit in a post-order arena: the subtree of [l, r] starting at
// slot s has its root at s + 2 (r - l + 1) - 2.
template <HomogeneousPair P, std::size_t D>
class NDTree {
  static_assert(D >= 2);

 public:
  using pair_type = P;
  using value_type = value_t<P>;
  using update_type = update_t<P>;
  using lazy_pair = lazy_pair_t<P>;
  static constexpr std::size_t rank = D;

  explicit NDTree(TensorView<value_type> init, P pair = {}, OpCounters* sink = nullptr) : pair_(std::move(pair)) {
    if constexpr (!P::is_special) throw_not_special<P>();
    if (init.rank() != D) throw std::invalid_argument("tensor rank does not match the tree");
    if (sink == nullptr) {
      owned_ = std::make_unique<OpCounters>();
      sink_ = owned_.get();
    } else {
      sink_ = sink;
    }
    dims_.assign(init.dims.begin(), init.dims.end());
    for (std::size_t n : dims_) {
      if (n == 0) throw std::invalid_argument("tensor extents must be positive");
    }
    if (init.data.size() != product(dims_)) throw std::invalid_argument("tensor data does not match dims");
    if (owned_) owned_->begin_op();
    nodes_.reserve(2 * dims_[0] - 1);
    build(0, dims_[0] - 1, init);
  }

  void update(const RangeBox& b, const update_type& v) {
    b.check_within(dims_);
    if (owned_) owned_->begin_op();
    update_nested(b.axes(), v);
  }

  [[nodiscard]] value_type query(const RangeBox& b) const {
    b.check_within(dims_);
    if (owned_) owned_->begin_op();
    return query_nested(b.axes());
  }

  // True fold over (outer node `node`) × `rest`, from the stored trees and
  // the lazy trees of every outer ancestor. `node` must be an outer node.
  [[nodiscard]] value_type outer_true_value(const Interval& node, std::span<const Interval> rest) const {
    std::size_t s = 0, l = 0, r = dims_[0] - 1;
    update_type acc = pair_.update_identity();
    while (true) {
      const auto& n = nodes_[root_slot(s, l, r)];
      acc = pair_.compose(acc, n.az.query_nested(rest));
      if (l == node.lo && r == node.hi) {
        return pair_.apply(n.a.query_nested(rest), pair_.repeat(acc, node.size()));
      }
      std::size_t m = l + (r - l) / 2;
      if (l == r || node.lo < l || node.hi > r) throw std::out_of_range("not an outer node");
      if (node.hi <= m) {
        r = m;
      } else if (node.lo > m) {
        s = right_start(s, l, m);
        l = m + 1;
      } else {
        throw std::out_of_range("not an outer node");
      }
    }
  }

  // Ranges of all outer nodes, in post-order.
  [[nodiscard]] std::vector<Interval> outer_nodes() const {
    std::vector<Interval> out;
    list_nodes(0, dims_[0] - 1, out);
    return out;
  }

  [[nodiscard]] std::span<const std::size_t> dims() const { return dims_; }
  [[nodiscard]] const OpCounters& counters() const { return *sink_; }
  OpCounters& counters() { return *sink_; }
  [[nodiscard]] const P& pair() const { return pair_; }

 private:
  template <HomogeneousPair, std::size_t>
  friend class NDTree;

  struct OuterNode {
    NDTree<P, D - 1> a;
    NDTree<lazy_pair, D - 1> az;
  };

  static std::size_t root_slot(std::size_t s, std::size_t l, std::size_t r) { return s + 2 * (r - l + 1) - 2; }
  static std::size_t right_start(std::size_t s, std::size_t l, std::size_t m) { return s + 2 * (m - l + 1) - 1; }

  // Returns the row fold of [l, r]; emplaces the subtree's nodes in post-order.
  std::vector<value_type> build(std::size_t l, std::size_t r, const TensorView<value_type>& init) {
    sink_->tick();
    std::vector<value_type> rows;
    if (l == r) {
      auto slice = init.slice(l);
      rows.assign(slice.data.begin(), slice.data.end());
    } else {
      std::size_t m = l + (r - l) / 2;
      rows = build(l, m, init);
      std::vector<value_type> right = build(m + 1, r, init);
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = pair_.combine(rows[i], right[i]);
    }
    std::span<const std::size_t> inner_dims(dims_.data() + 1, D - 1);
    std::vector<update_type> idle(rows.size(), pair_.update_identity());
    nodes_.push_back(OuterNode{NDTree<P, D - 1>(TensorView<value_type>{inner_dims, rows}, pair_, sink_),
                               NDTree<lazy_pair, D - 1>(TensorView<update_type>{inner_dims, idle},
                                                        lazy_pair{pair_}, sink_)});
    return rows;
  }

  void update_nested(std::span<const Interval> b, const update_type& v) {
    update_node(0, 0, dims_[0] - 1, b[0], b.subspan(1), v);
  }

  value_type query_nested(std::span<const Interval> b) const {
    return query_node(0, 0, dims_[0] - 1, b[0], b.subspan(1));
  }

  void update_node(std::size_t s, std::size_t l, std::size_t r, const Interval& x, std::span<const Interval> rest,
                   const update_type& v) {
    sink_->tick();
    auto& n = nodes_[root_slot(s, l, r)];
    if (covered_by(l, r, x)) {
      n.az.update_nested(rest, v);
    } else if (!disjoint(l, r, x)) {
      std::size_t m = l + (r - l) / 2;
      update_node(s, l, m, x, rest, v);
      update_node(right_start(s, l, m), m + 1, r, x, rest, v);
      n.a.update_nested(rest, pair_.repeat(v, overlap(l, r, x)));
    }
  }

  value_type query_node(std::size_t s, std::size_t l, std::size_t r, const Interval& x,
                        std::span<const Interval> rest) const {
    sink_->tick();
    const auto& n = nodes_[root_slot(s, l, r)];
    if (covered_by(l, r, x)) {
      return pair_.apply(n.a.query_nested(rest), pair_.repeat(n.az.query_nested(rest), r - l + 1));
    }
    if (disjoint(l, r, x)) return pair_.query_identity();
    std::size_t m = l + (r - l) / 2;
    value_type inner =
        pair_.combine(query_node(s, l, m, x, rest), query_node(right_start(s, l, m), m + 1, r, x, rest));
    return pair_.apply(inner, pair_.repeat(n.az.query_nested(rest), overlap(l, r, x)));
  }

  void list_nodes(std::size_t l, std::size_t r, std::vector<Interval>& out) const {
    if (l < r) {
      std::size_t m = l + (r - l) / 2;
      list_nodes(l, m, out);
      list_nodes(m + 1, r, out);
    }
    out.emplace_back(l, r);
  }

  P pair_;
  std::vector<std::size_t> dims_;
  std::vector<OuterNode> nodes_;
  std::unique_ptr<OpCounters> owned_;
  OpCounters* sink_ = nullptr;
};

}  // namespace rangeq
