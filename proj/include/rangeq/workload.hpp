#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rangeq/algebra.hpp"
#include "rangeq/box.hpp"
#include "rangeq/dense_tensor.hpp"
#include "rangeq/grid2d.hpp"
#include "rangeq/ndtree.hpp"
#include "rangeq/quadtree.hpp"
#include "rangeq/registry.hpp"
#include "rangeq/segtree1d.hpp"

namespace rangeq {

// Invalid workload: unknown backend, bad dims, backend/rank mismatch.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class BackendId { kOracle, kSeg1D, kNDSpecial, kGrid2D, kQuadTree };

inline constexpr std::string_view backend_name(BackendId id) {
  switch (id) {
    case BackendId::kOracle: return "oracle";
    case BackendId::kSeg1D: return "seg1d";
    case BackendId::kNDSpecial: return "nd-special";
    case BackendId::kGrid2D: return "grid2d-general";
    case BackendId::kQuadTree: return "quadtree";
  }
  return "?";
}

inline constexpr BackendId kAllBackends[] = {BackendId::kOracle, BackendId::kSeg1D, BackendId::kNDSpecial,
                                             BackendId::kGrid2D, BackendId::kQuadTree};

inline BackendId parse_backend(std::string_view text) {
  for (BackendId id : kAllBackends) {
    if (backend_name(id) == text) return id;
  }
  throw ConfigError("unknown backend '" + std::string(text) +
                    "' (known: oracle, seg1d, nd-special, grid2d-general, quadtree)");
}

// "32x32" -> {32, 32}.
inline std::vector<std::size_t> parse_dims(std::string_view text) {
  std::vector<std::size_t> dims;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = text.find('x', pos);
    std::string_view part = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string_view::npos || part.size() > 9) {
      throw ConfigError("bad dims '" + std::string(text) + "': expected positive extents like 32x32");
    }
    std::size_t n = std::stoul(std::string(part));
    if (n == 0) throw ConfigError("bad dims '" + std::string(text) + "': extents must be positive");
    dims.push_back(n);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return dims;
}

inline std::string format_dims(std::span<const std::size_t> dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) out += (i ? "x" : "") + std::to_string(dims[i]);
  return out;
}

// Fraction of ops that are updates: "0.25", or "U:Q" such as "1:3".
inline double parse_ratio(std::string_view text) {
  std::string s(text);
  try {
    std::size_t used = 0;
    auto colon = s.find(':');
    double r = 0;
    if (colon == std::string::npos) {
      r = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument("trailing text");
    } else {
      double u = std::stod(s.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument("trailing text");
      std::string qs = s.substr(colon + 1);
      double q = std::stod(qs, &used);
      if (used != qs.size()) throw std::invalid_argument("trailing text");
      if (u < 0 || q < 0 || u + q <= 0) throw std::invalid_argument("negative");
      r = u / (u + q);
    }
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("range");
    return r;
  } catch (const std::exception&) {
    throw ConfigError("bad ratio '" + s + "': expected a fraction in [0,1] or U:Q");
  }
}

struct ValueRange {
  std::int64_t lo = -1000;
  std::int64_t hi = 1000;
  bool nonzero = false;
};

// Multiplicative pairs keep values small and non-zero so that long op
// sequences stay exact in 64 bits without collapsing to 0.
inline ValueRange default_init_range(std::string_view pair) {
  if (pair == "times-times") return {-1, 1, true};
  if (pair == "times-plus") return {-1000, 1000, true};
  return {};
}
inline ValueRange default_update_range(std::string_view pair) {
  if (pair == "times-times" || pair == "times-plus") return {-1, 1, true};
  return {};
}

struct WorkloadConfig {
  BackendId backend = BackendId::kOracle;
  std::string pair = "plus-plus";
  std::vector<std::size_t> dims{16};
  std::uint64_t ops = 10000;
  double update_ratio = 0.5;
  std::uint64_t seed = 0;
  std::optional<ValueRange> init_values;
  std::optional<ValueRange> update_values;

  [[nodiscard]] ValueRange init_range() const { return init_values.value_or(default_init_range(pair)); }
  [[nodiscard]] ValueRange update_range() const { return update_values.value_or(default_update_range(pair)); }
};

// Throws ConfigError unless the dims suit the backend.
inline void check_config(const WorkloadConfig& cfg) {
  (void)lookup(cfg.pair);
  if (cfg.dims.empty()) throw ConfigError("dims must not be empty");
  for (std::size_t n : cfg.dims) {
    if (n == 0) throw ConfigError("extents must be positive");
  }
  if (cfg.ops == 0) throw ConfigError("ops must be at least 1");
  if (!(cfg.update_ratio >= 0.0 && cfg.update_ratio <= 1.0)) throw ConfigError("ratio must lie in [0,1]");
  const std::size_t rank = cfg.dims.size();
  const std::string b(backend_name(cfg.backend));
  switch (cfg.backend) {
    case BackendId::kOracle: break;
    case BackendId::kSeg1D:
      if (rank != 1) throw ConfigError(b + " needs 1D dims, got " + format_dims(cfg.dims));
      break;
    case BackendId::kNDSpecial:
      if (rank > 3) throw ConfigError(b + " supports 1 to 3 dimensions, got " + format_dims(cfg.dims));
      break;
    case BackendId::kGrid2D:
    case BackendId::kQuadTree:
      if (rank != 2) throw ConfigError(b + " needs 2D dims, got " + format_dims(cfg.dims));
      break;
  }
  for (const ValueRange& r : {cfg.init_range(), cfg.update_range()}) {
    if (r.lo > r.hi || (r.nonzero && r.lo == 0 && r.hi == 0)) throw ConfigError("empty value range");
  }
}

struct Op {
  bool is_update = false;
  RangeBox box;
  Scalar value;
};

// Seeded source of the initial tensor and the op sequence. Draw order is
// fixed: all initial cells, then per op a coin, one index pair per axis
// (sorted), and for updates a value.
class WorkloadGenerator {
 public:
  explicit WorkloadGenerator(const WorkloadConfig& cfg)
      : rng_(cfg.seed), dims_(cfg.dims), ratio_(cfg.update_ratio), init_(cfg.init_range()),
        upd_(cfg.update_range()) {}

  Tensor<Scalar> initial_tensor() {
    std::vector<Scalar> data(product(dims_));
    for (auto& x : data) x = draw(init_);
    return Tensor<Scalar>(dims_, std::move(data));
  }

  Op next() {
    Op op;
    op.is_update = std::bernoulli_distribution(ratio_)(rng_);
    std::vector<Interval> axes;
    axes.reserve(dims_.size());
    for (std::size_t n : dims_) {
      std::uniform_int_distribution<std::size_t> idx(0, n - 1);
      std::size_t a = idx(rng_), b = idx(rng_);
      axes.emplace_back(std::min(a, b), std::max(a, b));
    }
    op.box = RangeBox(std::move(axes));
    if (op.is_update) op.value = draw(upd_);
    return op;
  }

 private:
  Scalar draw(const ValueRange& r) {
    std::uniform_int_distribution<std::int64_t> dist(r.lo, r.hi);
    while (true) {
      std::int64_t x = dist(rng_);
      if (!r.nonzero || x != 0) return x;
    }
  }

  std::mt19937_64 rng_;
  std::vector<std::size_t> dims_;
  double ratio_;
  ValueRange init_;
  ValueRange upd_;
};

// Uniform runtime face of every backend over one pair.
template <OperatorPair P>
class AnyBackend {
 public:
  virtual ~AnyBackend() = default;
  virtual void update(const RangeBox& b, const update_t<P>& v) = 0;
  virtual value_t<P> query(const RangeBox& b) = 0;
  [[nodiscard]] virtual std::span<const std::size_t> dims() const = 0;
  // Node visits of the most recent update, query, or the construction.
  [[nodiscard]] virtual std::uint64_t last_visits() const = 0;
};

template <OperatorPair P, class B>
class BackendModel final : public AnyBackend<P> {
 public:
  template <class... Args>
  explicit BackendModel(Args&&... args) : impl_(std::forward<Args>(args)...) {}
  void update(const RangeBox& b, const update_t<P>& v) override { impl_.update(b, v); }
  value_t<P> query(const RangeBox& b) override { return impl_.query(b); }
  [[nodiscard]] std::span<const std::size_t> dims() const override { return impl_.dims(); }
  [[nodiscard]] std::uint64_t last_visits() const override { return impl_.counters().last_op(); }
  B& impl() { return impl_; }

 private:
  B impl_;
};

// 1D segment tree adapted to the box interface.
template <OperatorPair P>
class Seg1DBackend {
 public:
  explicit Seg1DBackend(TensorView<value_t<P>> init, P pair = {})
      : dims_{init.dims.empty() ? 0 : init.dims[0]}, tree_(checked(init), std::move(pair)) {}
  void update(const RangeBox& b, const update_t<P>& v) { tree_.update(b, v); }
  value_t<P> query(const RangeBox& b) const { return tree_.query(b); }
  [[nodiscard]] std::span<const std::size_t> dims() const { return dims_; }
  [[nodiscard]] const OpCounters& counters() const { return tree_.counters(); }
  const SegTree1D<P>& tree() const { return tree_; }

 private:
  static std::span<const value_t<P>> checked(TensorView<value_t<P>> init) {
    if (init.rank() != 1) throw ConfigError("seg1d needs a 1D tensor");
    return init.data;
  }
  std::size_t dims_[1];
  SegTree1D<P> tree_;
};

// Builds the chosen backend over `init`. nd-special over a non-special
// pair throws NotSpecialError carrying a counterexample.
template <HomogeneousPair P>
std::unique_ptr<AnyBackend<P>> make_backend(BackendId id, TensorView<value_t<P>> init, const P& pair = {}) {
  const std::size_t rank = init.rank();
  switch (id) {
    case BackendId::kOracle: return std::make_unique<BackendModel<P, DenseTensor<P>>>(init, pair);
    case BackendId::kSeg1D: return std::make_unique<BackendModel<P, Seg1DBackend<P>>>(init, pair);
    case BackendId::kNDSpecial:
      if (rank == 1) return std::make_unique<BackendModel<P, NDTree<P, 1>>>(init, pair);
      if (rank == 2) return std::make_unique<BackendModel<P, NDTree<P, 2>>>(init, pair);
      if (rank == 3) return std::make_unique<BackendModel<P, NDTree<P, 3>>>(init, pair);
      throw ConfigError("nd-special supports 1 to 3 dimensions");
    case BackendId::kGrid2D:
      if (rank != 2) throw ConfigError("grid2d-general needs a 2D tensor");
      return std::make_unique<BackendModel<P, Grid2D<P>>>(init, pair);
    case BackendId::kQuadTree:
      if (rank != 2) throw ConfigError("quadtree needs a 2D tensor");
      return std::make_unique<BackendModel<P, QuadTree<P>>>(init, pair);
  }
  throw ConfigError("unknown backend");
}

struct VerifyReport {
  std::uint64_t ops = 0;
  std::uint64_t updates = 0;
  std::uint64_t queries = 0;
  std::uint64_t mismatches = 0;
  std::optional<std::string> first_mismatch;

  [[nodiscard]] bool passed() const { return mismatches == 0; }
};

// Replays the seeded workload on `backend` (already built from the
// generator's initial tensor) and the oracle in lockstep, comparing every
// query.
template <OperatorPair P, class B>
VerifyReport verify_against_oracle(const WorkloadConfig& cfg, WorkloadGenerator& gen, const Tensor<Scalar>& init,
                                   B& backend, const P& pair = {}) {
  DenseTensor<P> oracle(init.view(), pair);
  VerifyReport report;
  for (std::uint64_t i = 0; i < cfg.ops; ++i) {
    Op op = gen.next();
    ++report.ops;
    if (op.is_update) {
      ++report.updates;
      oracle.update(op.box, op.value);
      backend.update(op.box, op.value);
      continue;
    }
    ++report.queries;
    value_t<P> want = oracle.query(op.box);
    value_t<P> got = backend.query(op.box);
    if (!(got == want)) {
      ++report.mismatches;
      if (!report.first_mismatch) {
        std::ostringstream os;
        os << "op " << i << ": query " << op.box << " returned " << got << ", oracle " << want;
        report.first_mismatch = os.str();
      }
    }
  }
  return report;
}

inline VerifyReport run_verify(const WorkloadConfig& cfg) {
  check_config(cfg);
  return with_pair(cfg.pair, [&](auto pair) {
    using P = decltype(pair);
    WorkloadGenerator gen(cfg);
    Tensor<Scalar> init = gen.initial_tensor();
    auto backend = make_backend<P>(cfg.backend, init.view(), pair);
    return verify_against_oracle(cfg, gen, init, *backend, pair);
  });
}

// One benchmark row. Visit fields are deterministic; wall fields are not.
struct BenchRow {
  std::string backend;
  std::string pair;
  std::string dims;
  std::uint64_t init_visits = 0;
  double mean_visits_per_update = 0;
  double mean_visits_per_query = 0;
  double wall_init_seconds = 0;
  double wall_ops_seconds = 0;
  std::uint64_t updates = 0;
  std::uint64_t queries = 0;

  [[nodiscard]] double mean_visits_per_op() const {
    std::uint64_t n = updates + queries;
    if (n == 0) return 0;
    return (mean_visits_per_update * static_cast<double>(updates) +
            mean_visits_per_query * static_cast<double>(queries)) /
           static_cast<double>(n);
  }
};

inline BenchRow run_bench(const WorkloadConfig& cfg) {
  check_config(cfg);
  using clock = std::chrono::steady_clock;
  return with_pair(cfg.pair, [&](auto pair) {
    using P = decltype(pair);
    WorkloadGenerator gen(cfg);
    Tensor<Scalar> init = gen.initial_tensor();
    BenchRow row;
    row.backend = std::string(backend_name(cfg.backend));
    row.pair = cfg.pair;
    row.dims = format_dims(cfg.dims);
    auto t0 = clock::now();
    auto backend = make_backend<P>(cfg.backend, init.view(), pair);
    auto t1 = clock::now();
    row.init_visits = backend->last_visits();
    std::uint64_t update_visits = 0, query_visits = 0;
    for (std::uint64_t i = 0; i < cfg.ops; ++i) {
      Op op = gen.next();
      if (op.is_update) {
        backend->update(op.box, op.value);
        update_visits += backend->last_visits();
        ++row.updates;
      } else {
        (void)backend->query(op.box);
        query_visits += backend->last_visits();
        ++row.queries;
      }
    }
    auto t2 = clock::now();
    if (row.updates) row.mean_visits_per_update = static_cast<double>(update_visits) / row.updates;
    if (row.queries) row.mean_visits_per_query = static_cast<double>(query_visits) / row.queries;
    row.wall_init_seconds = std::chrono::duration<double>(t1 - t0).count();
    row.wall_ops_seconds = std::chrono::duration<double>(t2 - t1).count();
    return row;
  });
}

namespace detail {
inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}
}  // namespace detail

inline std::string bench_csv_header() {
  return "backend,pair,dims,init_visits,mean_visits_per_update,mean_visits_per_query,wall_init_seconds,"
         "wall_ops_seconds";
}

inline std::string bench_csv_line(const BenchRow& r) {
  return r.backend + "," + r.pair + "," + r.dims + "," + std::to_string(r.init_visits) + "," +
         detail::fixed(r.mean_visits_per_update, 4) + "," + detail::fixed(r.mean_visits_per_query, 4) + "," +
         detail::fixed(r.wall_init_seconds, 6) + "," + detail::fixed(r.wall_ops_seconds, 6);
}

// Allowed growth of mean visits per op when every extent doubles. Applied
// as envelope^log2(s2/s1) for other size steps.
struct GrowthEnvelope {
  std::optional<double> min_per_doubling;
  std::optional<double> max_per_doubling;
  std::string shape;
};

inline GrowthEnvelope growth_envelope(BackendId id, std::size_t rank) {
  switch (id) {
    case BackendId::kOracle: return {std::nullopt, std::nullopt, "n/a"};
    case BackendId::kSeg1D: return {std::nullopt, 1.5, "log"};
    case BackendId::kNDSpecial:
      if (rank == 1) return {std::nullopt, 1.5, "log"};
      if (rank == 2) return {std::nullopt, 1.7, "log^2"};
      return {std::nullopt, 2.0, "log^3"};
    case BackendId::kGrid2D: return {std::nullopt, 3.0, "N log N"};
    case BackendId::kQuadTree: return {1.5, 3.0, "linear"};
  }
  return {};
}

struct ScalingStep {
  std::size_t from = 0;
  std::size_t to = 0;
  double ratio = 0;
  std::optional<double> low;
  std::optional<double> high;
  bool passed = true;
};

struct ScalingReport {
  std::string backend;
  std::string pair;
  std::size_t rank = 0;
  std::string shape;
  std::vector<BenchRow> rows;
  std::vector<ScalingStep> steps;

  [[nodiscard]] bool passed() const {
    for (const auto& s : steps) {
      if (!s.passed) return false;
    }
    return true;
  }
};

// Benchmarks `base` at every size (all extents set to the size) and checks
// consecutive mean-visit ratios against the backend's envelope.
inline ScalingReport run_scaling(WorkloadConfig base, const std::vector<std::size_t>& sizes, std::size_t rank) {
  if (sizes.size() < 2) throw ConfigError("scaling needs at least two sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw ConfigError("sizes must be strictly increasing");
  }
  if (sizes.front() == 0) throw ConfigError("sizes must be positive");
  ScalingReport report;
  report.backend = std::string(backend_name(base.backend));
  report.pair = base.pair;
  report.rank = rank;
  GrowthEnvelope env = growth_envelope(base.backend, rank);
  report.shape = env.shape;
  for (std::size_t s : sizes) {
    base.dims.assign(rank, s);
    report.rows.push_back(run_bench(base));
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    ScalingStep step;
    step.from = sizes[i - 1];
    step.to = sizes[i];
    double prev = report.rows[i - 1].mean_visits_per_op();
    step.ratio = prev > 0 ? report.rows[i].mean_visits_per_op() / prev : 0;
    double doublings = std::log2(static_cast<double>(step.to) / static_cast<double>(step.from));
    if (env.min_per_doubling) step.low = std::pow(*env.min_per_doubling, doublings);
    if (env.max_per_doubling) step.high = std::pow(*env.max_per_doubling, doublings);
    step.passed = (!step.low || step.ratio >= *step.low) && (!step.high || step.ratio <= *step.high);
    report.steps.push_back(step);
  }
  return report;
}

}  // namespace rangeq
