#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangeq/algebra.hpp"
#include "rangeq/box.hpp"
#include "rangeq/counters.hpp"
#include "rangeq/dense_tensor.hpp"

namespace rangeq {

namespace detail {
template <class T>
std::string describe(const T& v) {
  if constexpr (requires(std::ostream& os) { os << v; }) {
    std::ostringstream os;
    os << v;
    return os.str();
  } else {
    return "<value>";
  }
}
}  // namespace detail

// Nodes whose lazy value an update changed, and nodes whose aggregate it
// recomputed on the way back up.
struct UpdateTrace {
  std::vector<Interval> lazy_touched;
  std::vector<Interval> rebuilt;
};

// Lazy segment tree over an N-element array for any operator pair.
//
// Node [l, r] with l < r splits at m = (l + r) / 2 into [l, m] and [m+1, r],
// so there are exactly 2N - 1 nodes for every N. Nodes live in one
// preorder arena: the left child of node i is i + 1 and the right child is
// i + 2 (m - l + 1). Each node keeps an aggregate V (the fold of its
// subtree, ignoring lazies above it) and a lazy update Z pending for the
// whole subtree.
//
// update() and query() visit O(log N) nodes. query() and to_array() never
// mutate the tree.
template <OperatorPair P>
class SegTree1D {
 public:
  using pair_type = P;
  using value_type = value_t<P>;
  using update_type = update_t<P>;

  struct Node {
    value_type value;
    update_type lazy;
  };

  // `sink`, when given, receives all visit ticks and is never reset by this
  // tree; it belongs to an enclosing structure.
  explicit SegTree1D(std::span<const value_type> values, P pair = {}, OpCounters* sink = nullptr)
      : pair_(std::move(pair)) {
    if (sink == nullptr) {
      owned_ = std::make_unique<OpCounters>();
      sink_ = owned_.get();
    } else {
      sink_ = sink;
    }
    assign(values);
  }

  // Rebuilds the tree bottom-up from `values` in O(N).
  void assign(std::span<const value_type> values) {
    if (values.empty()) throw std::invalid_argument("segment tree needs at least one element");
    begin_op();
    n_ = values.size();
    if (nodes_.size() != 2 * n_ - 1) {
      nodes_.clear();
      nodes_.reserve(2 * n_ - 1);
      for (std::size_t i = 0; i < 2 * n_ - 1; ++i) {
        nodes_.push_back(Node{pair_.query_identity(), pair_.update_identity()});
      }
    }
    depth_ = 0;
    build(0, 0, n_ - 1, 0, values);
  }

  void update(const Interval& r, const update_type& v, UpdateTrace* trace = nullptr) {
    check(r);
    begin_op();
    update_node(0, 0, n_ - 1, r, v, trace);
  }
  void update(const RangeBox& b, const update_type& v) { update(single_axis(b), v); }

  [[nodiscard]] value_type query(const Interval& r) const {
    check(r);
    begin_op();
    return query_node(0, 0, n_ - 1, r);
  }
  [[nodiscard]] value_type query(const RangeBox& b) const { return query(single_axis(b)); }

  // The canonical decomposition: disjoint node ranges whose union is r.
  [[nodiscard]] std::vector<Interval> decompose(const Interval& r) const {
    check(r);
    std::vector<Interval> out;
    decompose_node(0, 0, n_ - 1, r, out);
    return out;
  }

  // The represented array, in one pass over the nodes.
  [[nodiscard]] std::vector<value_type> to_array() const {
    begin_op();
    std::vector<value_type> out;
    out.reserve(n_);
    collect(0, 0, n_ - 1, pair_.update_identity(), out);
    return out;
  }

  // Checks every node's true value F(V, ∇ of lazies on the root path, |n|)
  // against a brute-force reference holding the same history. Throws
  // std::logic_error naming the first bad node.
  void validate(const DenseTensor<P>& reference) const {
    if (reference.dims().size() != 1 || reference.dims()[0] != n_) {
      throw std::invalid_argument("reference tensor does not match the tree");
    }
    validate_node(0, 0, n_ - 1, pair_.update_identity(), reference);
  }

  // Calls fn(range, node, depth) for every node in preorder.
  template <class Fn>
  void for_each_node(Fn&& fn) const {
    visit_nodes(0, 0, n_ - 1, 0, fn);
  }

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] const Node& root() const { return nodes_.front(); }
  [[nodiscard]] const P& pair() const { return pair_; }
  [[nodiscard]] const OpCounters& counters() const { return *sink_; }
  OpCounters& counters() { return *sink_; }

  // Test hook: mutable access to a node's stored aggregate.
  Node& node_for_testing(const Interval& range) {
    std::size_t i = 0, l = 0, r = n_ - 1;
    while (!(l == range.lo && r == range.hi)) {
      std::size_t m = l + (r - l) / 2;
      if (l == r || range.lo < l || range.hi > r) throw std::out_of_range("not a node range");
      if (range.hi <= m) {
        i = i + 1;
        r = m;
      } else if (range.lo > m) {
        i = i + 2 * (m - l + 1);
        l = m + 1;
      } else {
        throw std::out_of_range("not a node range");
      }
    }
    return nodes_[i];
  }

 private:
  static std::size_t right_child(std::size_t i, std::size_t l, std::size_t m) { return i + 2 * (m - l + 1); }

  static Interval single_axis(const RangeBox& b) {
    if (b.rank() != 1) throw std::out_of_range("1D tree needs a rank-1 box");
    return b[0];
  }

  void check(const Interval& r) const {
    if (r.hi >= n_) {
      throw std::out_of_range("interval " + std::to_string(r.lo) + ".." + std::to_string(r.hi) +
                              " outside [0," + std::to_string(n_ - 1) + "]");
    }
  }

  void begin_op() const {
    if (owned_) owned_->begin_op();
  }

  value_type subtree_value(std::size_t i, std::size_t len) const {
    return pair_.aggregate(nodes_[i].value, nodes_[i].lazy, len);
  }

  void pull(std::size_t i, std::size_t l, std::size_t m, std::size_t r) {
    nodes_[i].value = pair_.combine(subtree_value(i + 1, m - l + 1), subtree_value(right_child(i, l, m), r - m));
  }

  void build(std::size_t i, std::size_t l, std::size_t r, std::size_t depth, std::span<const value_type> values) {
    sink_->tick();
    depth_ = std::max(depth_, depth);
    nodes_[i].lazy = pair_.update_identity();
    if (l == r) {
      nodes_[i].value = values[l];
      return;
    }
    std::size_t m = l + (r - l) / 2;
    build(i + 1, l, m, depth + 1, values);
    build(right_child(i, l, m), m + 1, r, depth + 1, values);
    pull(i, l, m, r);
  }

  void update_node(std::size_t i, std::size_t l, std::size_t r, const Interval& q, const update_type& v,
                   UpdateTrace* trace) {
    sink_->tick();
    if (covered_by(l, r, q)) {
      nodes_[i].lazy = pair_.compose(nodes_[i].lazy, v);
      if (trace) trace->lazy_touched.emplace_back(l, r);
    } else if (!disjoint(l, r, q)) {
      std::size_t m = l + (r - l) / 2;
      update_node(i + 1, l, m, q, v, trace);
      update_node(right_child(i, l, m), m + 1, r, q, v, trace);
      pull(i, l, m, r);
      if (trace) trace->rebuilt.emplace_back(l, r);
    }
  }

  value_type query_node(std::size_t i, std::size_t l, std::size_t r, const Interval& q) const {
    sink_->tick();
    if (covered_by(l, r, q)) return subtree_value(i, r - l + 1);
    if (disjoint(l, r, q)) return pair_.query_identity();
    std::size_t m = l + (r - l) / 2;
    value_type inner = pair_.combine(query_node(i + 1, l, m, q), query_node(right_child(i, l, m), m + 1, r, q));
    return pair_.aggregate(inner, nodes_[i].lazy, overlap(l, r, q));
  }

  void decompose_node(std::size_t i, std::size_t l, std::size_t r, const Interval& q,
                      std::vector<Interval>& out) const {
    if (covered_by(l, r, q)) {
      out.emplace_back(l, r);
    } else if (!disjoint(l, r, q)) {
      std::size_t m = l + (r - l) / 2;
      decompose_node(i + 1, l, m, q, out);
      decompose_node(right_child(i, l, m), m + 1, r, q, out);
    }
  }

  void collect(std::size_t i, std::size_t l, std::size_t r, const update_type& above,
               std::vector<value_type>& out) const {
    sink_->tick();
    update_type z = pair_.compose(above, nodes_[i].lazy);
    if (l == r) {
      out.push_back(pair_.aggregate(nodes_[i].value, z, 1));
      return;
    }
    std::size_t m = l + (r - l) / 2;
    collect(i + 1, l, m, z, out);
    collect(right_child(i, l, m), m + 1, r, z, out);
  }

  void validate_node(std::size_t i, std::size_t l, std::size_t r, const update_type& above,
                     const DenseTensor<P>& reference) const {
    update_type z = pair_.compose(above, nodes_[i].lazy);
    value_type actual = pair_.aggregate(nodes_[i].value, z, r - l + 1);
    value_type expected = reference.query(RangeBox{Interval(l, r)});
    if (!(actual == expected)) {
      throw std::logic_error("node [" + std::to_string(l) + "," + std::to_string(r) + "] true value " +
                             detail::describe(actual) + " != reference " + detail::describe(expected));
    }
    if (l == r) return;
    std::size_t m = l + (r - l) / 2;
    validate_node(i + 1, l, m, z, reference);
    validate_node(right_child(i, l, m), m + 1, r, z, reference);
  }

  template <class Fn>
  void visit_nodes(std::size_t i, std::size_t l, std::size_t r, std::size_t depth, Fn& fn) const {
    fn(Interval(l, r), nodes_[i], depth);
    if (l == r) return;
    std::size_t m = l + (r - l) / 2;
    visit_nodes(i + 1, l, m, depth + 1, fn);
    visit_nodes(right_child(i, l, m), m + 1, r, depth + 1, fn);
  }

  P pair_;
  std::size_t n_ = 0;
  std::size_t depth_ = 0;
  std::vector<Node> nodes_;
  std::unique_ptr<OpCounters> owned_;
  OpCounters* sink_ = nullptr;
};

}  // namespace rangeq
