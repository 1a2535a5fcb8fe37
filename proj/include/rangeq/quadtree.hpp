#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangeq/algebra.hpp"
#include "rangeq/box.hpp"
#include "rangeq/counters.hpp"
#include "rangeq/dense_tensor.hpp"

namespace rangeq {

// Axis-aligned inclusive rectangle of matrix cells.
struct Rect {
  Interval rows;
  Interval cols;

  [[nodiscard]] std::size_t area() const { return rows.size() * cols.size(); }
  [[nodiscard]] bool contains(const Rect& o) const {
    return o.rows.within(rows.lo, rows.hi) && o.cols.within(cols.lo, cols.hi);
  }
  [[nodiscard]] bool intersects(const Rect& o) const {
    return !disjoint(o.rows.lo, o.rows.hi, rows) && !disjoint(o.cols.lo, o.cols.hi, cols);
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Quadtree with lazy values: the 1D lazy segment tree generalized to four
// children per node. Node [x0,x1]×[y0,y1] splits at xm = (x0+x1)/2 and
// ym = (y0+y1)/2; single-row or single-column nodes get two children and
// single cells none. Updates and queries visit O(N) nodes on an N×N matrix.
template <OperatorPair P>
class QuadTree {
 public:
  using pair_type = P;
  using value_type = value_t<P>;
  using update_type = update_t<P>;

  struct Node {
    Rect rect;
    std::array<std::uint32_t, 4> children{};
    std::uint8_t child_count = 0;
    value_type value;
    update_type lazy;
  };

  explicit QuadTree(TensorView<value_type> init, P pair = {}) : pair_(std::move(pair)) { assign(init); }

  void assign(TensorView<value_type> init) {
    if (init.rank() != 2) throw std::invalid_argument("quadtree needs a rank-2 tensor");
    if (init.dims[0] == 0 || init.dims[1] == 0) throw std::invalid_argument("tensor extents must be positive");
    if (init.data.size() != product(init.dims)) throw std::invalid_argument("tensor data does not match dims");
    counters_.begin_op();
    dims_[0] = init.dims[0];
    dims_[1] = init.dims[1];
    nodes_.clear();
    build(Rect{Interval(0, dims_[0] - 1), Interval(0, dims_[1] - 1)}, init);
  }

  void update(const RangeBox& b, const update_type& v) {
    b.check_within(dims_);
    counters_.begin_op();
    update_node(0, Rect{b[0], b[1]}, v);
  }

  [[nodiscard]] value_type query(const RangeBox& b) const {
    b.check_within(dims_);
    counters_.begin_op();
    return query_node(0, Rect{b[0], b[1]});
  }

  template <class Fn>
  void for_each_node(Fn&& fn) const {
    for (const auto& n : nodes_) fn(n);
  }

  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] const Node& root() const { return nodes_.front(); }
  [[nodiscard]] std::span<const std::size_t> dims() const { return dims_; }
  [[nodiscard]] const OpCounters& counters() const { return counters_; }
  OpCounters& counters() { return counters_; }
  [[nodiscard]] const P& pair() const { return pair_; }

 private:
  value_type subtree_value(const Node& n) const { return pair_.aggregate(n.value, n.lazy, n.rect.area()); }

  std::uint32_t build(const Rect& rect, const TensorView<value_type>& init) {
    counters_.tick();
    auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{rect, {}, 0, pair_.query_identity(), pair_.update_identity()});
    if (rect.area() == 1) {
      nodes_[index].value = init.data[rect.rows.lo * dims_[1] + rect.cols.lo];
      return index;
    }
    std::size_t xm = rect.rows.lo + (rect.rows.hi - rect.rows.lo) / 2;
    std::size_t ym = rect.cols.lo + (rect.cols.hi - rect.cols.lo) / 2;
    std::array<Interval, 2> xs{Interval(rect.rows.lo, xm), Interval()};
    std::array<Interval, 2> ys{Interval(rect.cols.lo, ym), Interval()};
    std::size_t nx = 1, ny = 1;
    if (xm < rect.rows.hi) xs[nx++] = Interval(xm + 1, rect.rows.hi);
    if (ym < rect.cols.hi) ys[ny++] = Interval(ym + 1, rect.cols.hi);
    std::array<std::uint32_t, 4> children{};
    std::uint8_t count = 0;
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) children[count++] = build(Rect{xs[i], ys[j]}, init);
    }
    Node& n = nodes_[index];
    n.children = children;
    n.child_count = count;
    pull(index);
    return index;
  }

  void pull(std::uint32_t index) {
    Node& n = nodes_[index];
    value_type acc = pair_.query_identity();
    for (std::uint8_t c = 0; c < n.child_count; ++c) acc = pair_.combine(acc, subtree_value(nodes_[n.children[c]]));
    n.value = acc;
  }

  void update_node(std::uint32_t index, const Rect& b, const update_type& v) {
    counters_.tick();
    Node& n = nodes_[index];
    if (b.contains(n.rect)) {
      n.lazy = pair_.compose(n.lazy, v);
    } else if (b.intersects(n.rect)) {
      for (std::uint8_t c = 0; c < n.child_count; ++c) update_node(n.children[c], b, v);
      pull(index);
    }
  }

  value_type query_node(std::uint32_t index, const Rect& b) const {
    counters_.tick();
    const Node& n = nodes_[index];
    if (b.contains(n.rect)) return subtree_value(n);
    if (!b.intersects(n.rect)) return pair_.query_identity();
    value_type acc = pair_.query_identity();
    for (std::uint8_t c = 0; c < n.child_count; ++c) acc = pair_.combine(acc, query_node(n.children[c], b));
    std::size_t cells = overlap(n.rect.rows.lo, n.rect.rows.hi, b.rows) * overlap(n.rect.cols.lo, n.rect.cols.hi, b.cols);
    return pair_.aggregate(acc, n.lazy, cells);
  }

  P pair_;
  std::size_t dims_[2] = {0, 0};
  std::vector<Node> nodes_;
  mutable OpCounters counters_;
};

// Worst-case visits of any update or query over the probe family: every
// single row, every single column, and `random_boxes` seeded random boxes.
// Defined for square trees with N = 2^k, k >= 2. Probing updates use the
// update identity, so the represented matrix is unchanged.
template <OperatorPair P>
std::uint64_t qt_max_visits(QuadTree<P>& q, std::size_t random_boxes = 200, std::uint64_t seed = 0) {
  const std::size_t n = q.dims()[0];
  if (q.dims()[1] != n || n < 4 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("visit bound probes need a square 2^k x 2^k quadtree with k >= 2");
  }
  std::uint64_t worst = 0;
  auto probe = [&](const RangeBox& b) {
    (void)q.query(b);
    worst = std::max(worst, q.counters().last_op());
    q.update(b, q.pair().update_identity());
    worst = std::max(worst, q.counters().last_op());
  };
  for (std::size_t i = 0; i < n; ++i) {
    probe(RangeBox{Interval(i, i), Interval(0, n - 1)});
    probe(RangeBox{Interval(0, n - 1), Interval(i, i)});
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  for (std::size_t k = 0; k < random_boxes; ++k) {
    std::size_t a = idx(rng), b = idx(rng), c = idx(rng), d = idx(rng);
    probe(RangeBox{Interval(std::min(a, b), std::max(a, b)), Interval(std::min(c, d), std::max(c, d))});
  }
  return worst;
}

}  // namespace rangeq
