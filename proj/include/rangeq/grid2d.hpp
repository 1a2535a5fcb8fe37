#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangeq/algebra.hpp"
#include "rangeq/box.hpp"
#include "rangeq/counters.hpp"
#include "rangeq/dense_tensor.hpp"
#include "rangeq/segtree1d.hpp"

namespace rangeq {

// Segment tree of segment trees for any operator pair with an aggregator.
//
// An outer tree splits the N rows. Outer node n (rows [l, r]) holds an
// inner lazy segment tree over the M columns, representing
// n_A[y] = fold of A[x][y] for x in n, under the scaled pair (∇_|n|, △).
// There are no lazies on outer nodes, so an update walks every outer node
// inside the row range (each gets an inner range update) and rebuilds the
// inner trees of the O(log N) partially covered ones from their children:
// O(N log M + M log N) per update, O(log N log M) per query.
template <OperatorPair P>
class Grid2D {
 public:
  using pair_type = P;
  using value_type = value_t<P>;
  using update_type = update_t<P>;
  using inner_pair = ScaledPair<P>;
  using inner_tree = SegTree1D<inner_pair>;

  // What an update did to one outer node, with the global sequence stamp
  // taken when its inner tree was finalized.
  enum class Action { kRangeUpdate, kRebuild };
  struct LogEntry {
    Interval rows;
    Action action;
    std::uint64_t stamp;
  };

  explicit Grid2D(TensorView<value_type> init, P pair = {}, OpCounters* sink = nullptr) : pair_(std::move(pair)) {
    if (sink == nullptr) {
      owned_ = std::make_unique<OpCounters>();
      sink_ = owned_.get();
    } else {
      sink_ = sink;
    }
    assign(init);
  }

  void assign(TensorView<value_type> init) {
    if (init.rank() != 2) throw std::invalid_argument("general 2D tree needs a rank-2 tensor");
    if (init.dims[0] == 0 || init.dims[1] == 0) throw std::invalid_argument("tensor extents must be positive");
    if (init.data.size() != product(init.dims)) throw std::invalid_argument("tensor data does not match dims");
    if (owned_) owned_->begin_op();
    dims_[0] = init.dims[0];
    dims_[1] = init.dims[1];
    nodes_.clear();
    nodes_.reserve(2 * dims_[0] - 1);
    build(0, dims_[0] - 1, init);
  }

  void update(const RangeBox& b, const update_type& v) {
    b.check_within(dims_);
    if (owned_) owned_->begin_op();
    log_.clear();
    update_node(0, 0, dims_[0] - 1, b[0], b[1], v);
  }

  [[nodiscard]] value_type query(const RangeBox& b) const {
    b.check_within(dims_);
    if (owned_) owned_->begin_op();
    return query_node(0, 0, dims_[0] - 1, b[0], b[1]);
  }

  // Calls fn(rows, inner_tree) for every outer node in post-order.
  template <class Fn>
  void for_each_outer_node(Fn&& fn) const {
    visit(0, 0, dims_[0] - 1, fn);
  }

  // Outer nodes touched by the most recent update, in processing order.
  [[nodiscard]] const std::vector<LogEntry>& last_update_log() const { return log_; }

  [[nodiscard]] std::span<const std::size_t> dims() const { return dims_; }
  [[nodiscard]] const OpCounters& counters() const { return *sink_; }
  OpCounters& counters() { return *sink_; }
  [[nodiscard]] const P& pair() const { return pair_; }

 private:
  static std::size_t root_slot(std::size_t s, std::size_t l, std::size_t r) { return s + 2 * (r - l + 1) - 2; }
  static std::size_t right_start(std::size_t s, std::size_t l, std::size_t m) { return s + 2 * (m - l + 1) - 1; }

  std::vector<value_type> build(std::size_t l, std::size_t r, const TensorView<value_type>& init) {
    sink_->tick();
    std::vector<value_type> cols;
    if (l == r) {
      auto row = init.slice(l);
      cols.assign(row.data.begin(), row.data.end());
    } else {
      std::size_t m = l + (r - l) / 2;
      cols = build(l, m, init);
      std::vector<value_type> right = build(m + 1, r, init);
      for (std::size_t y = 0; y < cols.size(); ++y) cols[y] = pair_.combine(cols[y], right[y]);
    }
    nodes_.emplace_back(cols, inner_pair{pair_, r - l + 1}, sink_);
    return cols;
  }

  void update_node(std::size_t s, std::size_t l, std::size_t r, const Interval& x, const Interval& y,
                   const update_type& v) {
    sink_->tick();
    if (disjoint(l, r, x)) return;
    auto& inner = nodes_[root_slot(s, l, r)];
    if (l < r) {
      std::size_t m = l + (r - l) / 2;
      update_node(s, l, m, x, y, v);
      update_node(right_start(s, l, m), m + 1, r, x, y, v);
      if (!covered_by(l, r, x)) {
        std::vector<value_type> cols = nodes_[root_slot(s, l, m)].to_array();
        std::vector<value_type> right = nodes_[root_slot(right_start(s, l, m), m + 1, r)].to_array();
        for (std::size_t c = 0; c < cols.size(); ++c) cols[c] = pair_.combine(cols[c], right[c]);
        inner.assign(cols);
        log_.push_back({Interval(l, r), Action::kRebuild, ++seq_});
        return;
      }
    }
    inner.update(y, v);
    log_.push_back({Interval(l, r), Action::kRangeUpdate, ++seq_});
  }

  value_type query_node(std::size_t s, std::size_t l, std::size_t r, const Interval& x, const Interval& y) const {
    sink_->tick();
    if (covered_by(l, r, x)) return nodes_[root_slot(s, l, r)].query(y);
    if (disjoint(l, r, x)) return pair_.query_identity();
    std::size_t m = l + (r - l) / 2;
    return pair_.combine(query_node(s, l, m, x, y), query_node(right_start(s, l, m), m + 1, r, x, y));
  }

  template <class Fn>
  void visit(std::size_t s, std::size_t l, std::size_t r, Fn& fn) const {
    if (l < r) {
      std::size_t m = l + (r - l) / 2;
      visit(s, l, m, fn);
      visit(right_start(s, l, m), m + 1, r, fn);
    }
    fn(Interval(l, r), nodes_[root_slot(s, l, r)]);
  }

  P pair_;
  std::size_t dims_[2] = {0, 0};
  std::vector<inner_tree> nodes_;
  std::vector<LogEntry> log_;
  std::uint64_t seq_ = 0;
  std::unique_ptr<OpCounters> owned_;
  OpCounters* sink_ = nullptr;
};

}  // namespace rangeq
