#pragma once

#include <atomic>
#include <cstdint>

namespace rangeq {

// Node-visit counters. Every backend ticks once per node it enters; nested
// structures share the counters of their outermost owner, so one public
// update or query reports the total work across all levels.
//
// Ticks are relaxed atomics so that concurrent read-only queries stay
// race-free, but the per-op figure is only meaningful for one op at a time.
class OpCounters {
 public:
  OpCounters() = default;
  OpCounters(const OpCounters& other) { *this = other; }
  OpCounters& operator=(const OpCounters& other) {
    last_.store(other.last_op(), std::memory_order_relaxed);
    total_.store(other.total(), std::memory_order_relaxed);
    return *this;
  }

  void begin_op() { last_.store(0, std::memory_order_relaxed); }
  void tick(std::uint64_t n = 1) {
    last_.fetch_add(n, std::memory_order_relaxed);
    total_.fetch_add(n, std::memory_order_relaxed);
  }
  void reset() {
    last_.store(0, std::memory_order_relaxed);
    total_.store(0, std::memory_order_relaxed);
  }

  [[nodiscard]] std::uint64_t last_op() const { return last_.load(std::memory_order_relaxed); }
  [[nodiscard]] std::uint64_t total() const { return total_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> last_{0};
  std::atomic<std::uint64_t> total_{0};
};

}  // namespace rangeq
