#include <algorithm>
#include <cmath>
#include <set>

#include "test_support.hpp"

using namespace rangeq;
using namespace rangeq::testing;

namespace {

std::size_t ceil_log2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

std::vector<Interval> sorted(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return v;
}

// True when the ranges are pairwise disjoint and cover exactly r.
bool tiles(std::vector<Interval> parts, const Interval& r) {
  parts = sorted(std::move(parts));
  std::size_t next = r.lo;
  for (const auto& p : parts) {
    if (p.lo != next) return false;
    next = p.hi + 1;
  }
  return !parts.empty() && next == r.hi + 1;
}

}  // namespace

TEST(SegTree1D, BuildExamples) {
  std::vector<Scalar> a{1, 2, 3, 4, 5};
  SegTree1D<pairs::PlusPlus> t(a);
  EXPECT_EQ(t.node_count(), 9U);
  EXPECT_EQ(t.root().value, Scalar(15));
  EXPECT_EQ(t.counters().last_op(), 9U);

  std::vector<Scalar> one{42};
  SegTree1D<pairs::MinMin> s(one);
  EXPECT_EQ(s.node_count(), 1U);
  EXPECT_EQ(s.root().value, Scalar(42));
  EXPECT_EQ(s.depth(), 0U);
  EXPECT_THROW(SegTree1D<pairs::PlusPlus>(std::vector<Scalar>{}), std::invalid_argument);
}

TEST(SegTree1D, UpdateQueryExamples) {
  std::vector<Scalar> a{3, 1, 4, 1, 5};
  SegTree1D<pairs::PlusMin> t(a);
  EXPECT_EQ(t.query(Interval(0, 4)), Scalar(1));
  t.update(Interval(1, 3), 2);
  EXPECT_EQ(t.query(Interval(0, 4)), Scalar(3));
  EXPECT_EQ(t.query(Interval(3, 3)), Scalar(3));
  t.update(Interval(0, 4), 0);
  EXPECT_EQ(t.to_array(), (std::vector<Scalar>{3, 3, 6, 3, 5}));
  EXPECT_THROW(t.update(Interval(2, 5), 1), std::out_of_range);
  EXPECT_THROW((void)t.query(RangeBox{Interval(0, 1), Interval(0, 1)}), std::out_of_range);

  // Q(full) after U(full, v) is F(initial fold, v, N).
  std::vector<Scalar> b{2, 7, 1, 8};
  SegTree1D<pairs::PlusPlus> s(b);
  s.update(Interval(0, 3), 5);
  EXPECT_EQ(s.query(Interval(0, 3)), eval_f(pairs::PlusPlus{}, 18, 5, 4));
}

TEST(SegTree1D, CanonicalLazySet) {
  SegTree1D<pairs::PlusPlus> t(std::vector<Scalar>(8, 0));
  UpdateTrace trace;
  t.update(Interval(1, 6), 3, &trace);
  EXPECT_EQ(sorted(trace.lazy_touched),
            (std::vector<Interval>{Interval(1, 1), Interval(2, 3), Interval(4, 5), Interval(6, 6)}));
  EXPECT_EQ(t.decompose(Interval(1, 6)),
            (std::vector<Interval>{Interval(1, 1), Interval(2, 3), Interval(4, 5), Interval(6, 6)}));
  EXPECT_EQ(t.decompose(Interval(0, 7)), (std::vector<Interval>{Interval(0, 7)}));
  EXPECT_EQ(t.decompose(Interval(4, 7)), (std::vector<Interval>{Interval(4, 7)}));
  // Rebuilt nodes are the strict ancestors of the lazy set, children first.
  EXPECT_EQ(trace.rebuilt.back(), Interval(0, 7));
}

TEST(SegTree1D, NodeCensus) {
  for (std::size_t n = 1; n <= 256; ++n) {
    SegTree1D<pairs::PlusPlus> t(std::vector<Scalar>(n, 1));
    ASSERT_EQ(t.node_count(), 2 * n - 1) << n;
    (void)t.to_array();
    ASSERT_EQ(t.counters().last_op(), t.node_count()) << n;
    std::size_t visited = 0;
    t.for_each_node([&](const Interval&, const auto&, std::size_t) { ++visited; });
    ASSERT_EQ(visited, 2 * n - 1);
  }
}

TEST(SegTree1D, DepthBound) {
  for (std::size_t n = 1; n <= 4096; n += (n < 300 ? 1 : 37)) {
    SegTree1D<pairs::PlusPlus> t(std::vector<Scalar>(n, 0));
    ASSERT_LE(t.depth(), ceil_log2(n)) << n;
  }
}

TEST(SegTree1D, DecompositionExhaustive) {
  for (std::size_t n = 1; n <= 256; ++n) {
    SegTree1D<pairs::PlusPlus> t(std::vector<Scalar>(n, 0));
    std::size_t bound = n == 1 ? 1 : 2 * ceil_log2(n);
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t r = l; r < n; ++r) {
        auto parts = t.decompose(Interval(l, r));
        ASSERT_TRUE(tiles(parts, Interval(l, r))) << n << " " << l << " " << r;
        ASSERT_LE(parts.size(), bound) << n << " " << l << " " << r;
      }
    }
  }
}

TEST(SegTree1D, LazySetTilesRange) {
  for (std::size_t n = 1; n <= 32; ++n) {
    SegTree1D<pairs::PlusMin> t(std::vector<Scalar>(n, 0));
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t r = l; r < n; ++r) {
        UpdateTrace trace;
        t.update(Interval(l, r), 1, &trace);
        ASSERT_TRUE(tiles(trace.lazy_touched, Interval(l, r)));
        ASSERT_EQ(sorted(trace.lazy_touched), t.decompose(Interval(l, r)));
      }
    }
  }
}

TEST(SegTree1D, VisitBound) {
  for (std::size_t n = 1; n <= 64; ++n) {
    SegTree1D<pairs::PlusMax> t(std::vector<Scalar>(n, 0));
    std::uint64_t bound = 4 * (static_cast<std::uint64_t>(std::floor(std::log2(n))) + 1) + 2;
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t r = l; r < n; ++r) {
        t.update(Interval(l, r), 1);
        ASSERT_LE(t.counters().last_op(), bound);
        (void)t.query(Interval(l, r));
        ASSERT_LE(t.counters().last_op(), bound);
      }
    }
  }
  std::mt19937_64 rng(3);
  for (std::size_t n : {1000, 4096, 100000}) {
    SegTree1D<pairs::PlusPlus> t(std::vector<Scalar>(n, 0));
    std::uint64_t bound = 4 * (static_cast<std::uint64_t>(std::floor(std::log2(n))) + 1) + 2;
    for (int i = 0; i < 2000; ++i) {
      std::size_t a = rng() % n, b = rng() % n;
      t.update(Interval(std::min(a, b), std::max(a, b)), 1);
      ASSERT_LE(t.counters().last_op(), bound);
    }
  }
}

TEST(SegTree1D, ValidateAgainstOracle) {
  std::mt19937_64 rng(5);
  std::vector<Scalar> init(37);
  for (auto& x : init) x = static_cast<std::int64_t>(rng() % 200) - 100;
  SegTree1D<pairs::PlusMin> t(init);
  DenseTensor<pairs::PlusMin> oracle(Tensor<Scalar>({init.size()}, init));
  EXPECT_NO_THROW(t.validate(oracle));
  for (int i = 0; i < 1000; ++i) {
    std::size_t a = rng() % 37, b = rng() % 37;
    Interval r(std::min(a, b), std::max(a, b));
    Scalar v = static_cast<std::int64_t>(rng() % 21) - 10;
    t.update(r, v);
    oracle.update(RangeBox{r}, v);
  }
  EXPECT_NO_THROW(t.validate(oracle));
  EXPECT_EQ(t.to_array(), std::vector<Scalar>(oracle.data().begin(), oracle.data().end()));

  auto& node = t.node_for_testing(Interval(9, 9));
  node.value = node.value + Scalar(1);
  try {
    t.validate(oracle);
    FAIL() << "corruption not detected";
  } catch (const std::logic_error& e) {
    EXPECT_NE(std::string(e.what()).find("[9,9]"), std::string::npos) << e.what();
  }
}

TEST(SegTree1D, DifferentialAgainstOracle) {
  for (std::size_t n : {1, 2, 3, 5, 8, 17, 64}) {
    std::mt19937_64 rng(n);
    std::vector<Scalar> init(n);
    for (auto& x : init) x = static_cast<std::int64_t>(rng() % 2001) - 1000;
    SegTree1D<pairs::PlusMax> t(init);
    DenseTensor<pairs::PlusMax> oracle(Tensor<Scalar>({n}, init));
    for (int i = 0; i < 10000; ++i) {
      std::size_t a = rng() % n, b = rng() % n;
      Interval r(std::min(a, b), std::max(a, b));
      if (rng() % 2) {
        Scalar v = static_cast<std::int64_t>(rng() % 2001) - 1000;
        t.update(r, v);
        oracle.update(RangeBox{r}, v);
      } else {
        ASSERT_EQ(t.query(r), oracle.query(RangeBox{r})) << "n=" << n << " op " << i;
      }
    }
  }
}

TEST(SegTree1D, ScaledPairTree) {
  // The inner trees of the general 2D structure: (+,+) scaled by 3 rows.
  ScaledPair<pairs::PlusPlus> sp{{}, 3};
  std::vector<Scalar> cols{1, 2, 3, 4};
  SegTree1D<ScaledPair<pairs::PlusPlus>> t(cols, sp);
  t.update(Interval(1, 2), 10);
  t.update(Interval(0, 3), 1);
  EXPECT_EQ(t.to_array(), (std::vector<Scalar>{4, 35, 36, 7}));
  EXPECT_EQ(t.query(Interval(0, 3)), Scalar(82));
}
