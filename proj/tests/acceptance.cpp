// Acceptance gates. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Optional argv[1]: path to the rangeq CLI, used by
// criterion 10.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rangeq/rangeq.hpp"

using namespace rangeq;

namespace {

// Failure detail collected by a criterion; empty means pass.
class Verdict {
 public:
  void fail(const std::string& why) {
    if (why_.empty()) why_ = why;
    ++failures_;
  }
  [[nodiscard]] bool ok() const { return failures_ == 0; }
  [[nodiscard]] const std::string& why() const { return why_; }
  [[nodiscard]] std::size_t failures() const { return failures_; }
  std::string note;

 private:
  std::string why_;
  std::size_t failures_ = 0;
};

template <class... Ts>
std::string cat(const Ts&... xs) {
  std::ostringstream os;
  (os << ... << xs);
  return os.str();
}

std::size_t ceil_log2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

bool tiles(std::vector<Interval> parts, const Interval& r) {
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::size_t next = r.lo;
  for (const auto& p : parts) {
    if (p.lo != next) return false;
    next = p.hi + 1;
  }
  return !parts.empty() && next == r.hi + 1;
}

WorkloadConfig config(BackendId b, const std::string& pair, std::vector<std::size_t> dims, std::uint64_t ops,
                      std::uint64_t seed = 0) {
  WorkloadConfig cfg;
  cfg.backend = b;
  cfg.pair = pair;
  cfg.dims = std::move(dims);
  cfg.ops = ops;
  cfg.seed = seed;
  return cfg;
}

void criterion1(Verdict& v) {
  struct Case {
    BackendId backend;
    std::vector<std::string> pairs;
    std::vector<std::vector<std::size_t>> dims;
  };
  const std::vector<std::string> special{"plus-plus", "times-times", "min-min", "max-max"};
  const std::vector<Case> cases{
      {BackendId::kSeg1D,
       {"plus-min", "plus-max", "plus-plus", "times-times", "min-min", "max-max", "times-plus"},
       {{1}, {2}, {3}, {5}, {8}, {64}}},
      {BackendId::kNDSpecial, special, {{32, 32}, {8, 8, 8}}},
      {BackendId::kGrid2D, {"plus-min", "plus-max", "plus-plus", "times-plus"}, {{32, 32}}},
      {BackendId::kQuadTree, {"plus-min", "plus-plus"}, {{32, 32}}},
  };
  auto t0 = std::chrono::steady_clock::now();
  std::size_t runs = 0;
  for (const auto& c : cases) {
    for (const auto& pair : c.pairs) {
      for (const auto& dims : c.dims) {
        auto r = run_verify(config(c.backend, pair, dims, 10000, 1000 + runs));
        ++runs;
        if (!r.passed()) {
          v.fail(cat(backend_name(c.backend), " ", pair, " ", format_dims(dims), ": ", r.mismatches,
                     " mismatches, ", r.first_mismatch.value_or("")));
        }
      }
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 60) v.fail(cat("took ", secs, " s"));
  v.note = cat(runs, " runs x 10000 ops in ", secs, " s");
}

void criterion2(Verdict& v) {
  for (std::size_t n = 1; n <= 256; ++n) {
    SegTree1D<pairs::PlusPlus> t(std::vector<Scalar>(n, 1));
    if (t.node_count() != 2 * n - 1) v.fail(cat("N=", n, " has ", t.node_count(), " nodes"));
    (void)t.to_array();
    if (t.counters().last_op() != t.node_count()) {
      v.fail(cat("N=", n, " to_array visited ", t.counters().last_op()));
    }
  }
  v.note = "N in 1..256";
}

void criterion3(Verdict& v) {
  std::size_t ranges = 0;
  for (std::size_t n = 2; n <= 64; ++n) {
    SegTree1D<pairs::PlusPlus> t(std::vector<Scalar>(n, 0));
    const std::size_t bound = 2 * ceil_log2(n);
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t r = l; r < n; ++r, ++ranges) {
        auto parts = t.decompose(Interval(l, r));
        if (!tiles(parts, Interval(l, r))) v.fail(cat("N=", n, " [", l, ",", r, "] not tiled"));
        if (parts.size() > bound) v.fail(cat("N=", n, " [", l, ",", r, "] size ", parts.size()));
      }
    }
  }
  v.note = cat(ranges, " ranges");
}

void criterion4(Verdict& v) {
  std::size_t updates = 0;
  for (std::size_t n = 1; n <= 32; ++n) {
    SegTree1D<pairs::PlusMin> t(std::vector<Scalar>(n, 0));
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t r = l; r < n; ++r, ++updates) {
        UpdateTrace trace;
        t.update(Interval(l, r), 1, &trace);
        if (!tiles(trace.lazy_touched, Interval(l, r))) v.fail(cat("N=", n, " [", l, ",", r, "]"));
      }
    }
  }
  v.note = cat(updates, " updates");
}

void criterion5(Verdict& v) {
  for (const PairInfo& info : builtin_pairs()) {
    with_pair(info.name, [&](auto pair) {
      const bool mult = info.name == "times-times" || info.name == "times-plus";
      std::mt19937_64 rng(5);
      std::uniform_int_distribution<std::int64_t> dist(mult ? -3 : -1000, mult ? 3 : 1000);
      for (int i = 0; i < 1000; ++i) {
        Scalar a = dist(rng), b = dist(rng), x = dist(rng), y = dist(rng);
        std::uint64_t k = 1 + rng() % 8, p = 1 + rng() % 6, q = 1 + rng() % 6;
        Scalar lhs = eval_f(pair, a, pair.compose(x, y), k);
        if (lhs != eval_f(pair, eval_f(pair, a, x, k), y, k) || lhs != eval_f(pair, eval_f(pair, a, y, k), x, k)) {
          v.fail(cat(info.name, ": update-stacking law fails at a=", a, " x=", x, " y=", y, " k=", k));
        }
        if (pair.combine(eval_f(pair, a, x, p), eval_f(pair, b, x, q)) != eval_f(pair, pair.combine(a, b), x, p + q)) {
          v.fail(cat(info.name, ": split-fold law fails at a=", a, " b=", b, " v=", x, " p=", p, " q=", q));
        }
      }
      return 0;
    });
  }
  v.note = cat(builtin_pairs().size(), " pairs x 1000 tuples");
}

void criterion6(Verdict& v) {
  for (const PairInfo& info : builtin_pairs()) {
    with_pair(info.name, [&](auto pair) {
      auto check = check_special(pair, 1000);
      if (check.holds != info.is_special) v.fail(cat(info.name, ": special=", check.holds));
      if (!check.holds && !check.witness) v.fail(cat(info.name, ": no witness"));
      if (!check.holds) {
        const auto& w = *check.witness;
        if (pair.combine(pair.apply(w.a, w.v), w.b) == pair.apply(pair.combine(w.a, w.b), w.v)) {
          v.fail(cat(info.name, ": witness does not violate the law"));
        }
      }
      return 0;
    });
  }
  for (const char* must_fail : {"plus-min", "times-plus"}) {
    if (lookup(must_fail).is_special) v.fail(cat(must_fail, " registered as special"));
  }
}

void criterion7(Verdict& v) {
  std::ostringstream worst;
  for (std::size_t k = 2; k <= 7; ++k) {
    const std::size_t n = std::size_t{1} << k;
    QuadTree<pairs::PlusPlus> q(Tensor<Scalar>({n, n}, std::vector<Scalar>(n * n, 0)));
    const std::uint64_t bound = 5 * ((std::uint64_t{1} << (k + 5)) + 3);
    const std::uint64_t w = qt_max_visits(q, 200, k);
    if (w > bound) v.fail(cat("k=", k, ": ", w, " > ", bound));
    worst << (k == 2 ? "" : " ") << w;
    for (std::size_t c = 0; c < n; ++c) {
      q.update(RangeBox{Interval(0, n - 1), Interval(c, c)}, 1);
      if (q.counters().last_op() < n) v.fail(cat("k=", k, " column ", c, ": ", q.counters().last_op()));
    }
  }
  v.note = "max visits k=2..7: " + worst.str();
}

void criterion8(Verdict& v) {
  struct Gate {
    BackendId backend;
    std::string pair;
    std::size_t rank;
  };
  std::ostringstream ratios;
  for (const Gate& g : {Gate{BackendId::kSeg1D, "plus-min", 1}, Gate{BackendId::kNDSpecial, "plus-plus", 2},
                        Gate{BackendId::kQuadTree, "plus-min", 2}}) {
    auto report = run_scaling(config(g.backend, g.pair, {1}, 10000), {128, 256}, g.rank);
    const auto& step = report.steps.at(0);
    ratios << backend_name(g.backend) << " " << step.ratio << "; ";
    if (!step.passed) v.fail(cat(backend_name(g.backend), " ratio ", step.ratio));
  }
  const std::size_t n = 256, m = 256;
  auto row = run_bench(config(BackendId::kGrid2D, "plus-min", {n, m}, 10000));
  const double bound = 8.0 * (n * std::log2(m) + m * std::log2(n));
  if (row.mean_visits_per_update > bound) v.fail(cat("grid2d update visits ", row.mean_visits_per_update));
  ratios << "grid2d update visits " << row.mean_visits_per_update << " <= " << bound;
  v.note = ratios.str();
}

SquareMatrix<Scalar> random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::int64_t> dist(-1000, 1000);
  std::vector<Scalar> values(n * n);
  for (auto& x : values) x = dist(rng);
  return SquareMatrix<Scalar>(n, std::move(values));
}

template <class P, class B>
std::vector<Scalar> cells(B& backend, std::size_t n) {
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.push_back(backend.query(RangeBox{Interval(i, i), Interval(j, j)}));
  }
  return out;
}

template <class P, template <class> class Backend>
void check_reduction(Verdict& v, const char* label) {
  for (std::size_t n : {1, 2, 4, 8, 16, 32}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed * 64 + n);
      auto a = random_matrix(rng, n), b = random_matrix(rng, n);
      auto init = encode_matrix<P>(a);
      Backend<P> backend(init.view());
      CallCounting counted(backend);
      auto got = product_via_uq<P>(a, b, counted);
      if (!(got == schoolbook<P>(a, b))) v.fail(cat(label, " ", P::name, " N=", n, " seed ", seed, " differs"));
      if (counted.updates() != 2 * n * n || counted.queries() != n * n) {
        v.fail(cat(label, " N=", n, ": ", counted.updates(), " updates, ", counted.queries(), " queries"));
      }
      if (n <= 8 && cells<P>(backend, n) != init.data) v.fail(cat(label, " N=", n, " state not restored"));
    }
    // Four products through one backend seeded from an unrelated matrix.
    std::mt19937_64 rng(n);
    auto init = encode_matrix<P>(random_matrix(rng, n));
    Backend<P> backend(init.view());
    std::vector<std::pair<SquareMatrix<Scalar>, SquareMatrix<Scalar>>> inputs;
    for (int k = 0; k < 4; ++k) inputs.emplace_back(random_matrix(rng, n), random_matrix(rng, n));
    auto outs = products_via_uq<P>(inputs, backend);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      if (!(outs.at(k) == schoolbook<P>(inputs[k].first, inputs[k].second))) {
        v.fail(cat(label, " ", P::name, " K=4 product ", k, " N=", n, " differs"));
      }
    }
  }
}

void criterion9(Verdict& v) {
  check_reduction<pairs::PlusMin, Grid2D>(v, "grid2d");
  check_reduction<pairs::PlusMax, Grid2D>(v, "grid2d");
  check_reduction<pairs::PlusMin, QuadTree>(v, "quadtree");
  check_reduction<pairs::PlusMax, QuadTree>(v, "quadtree");
  v.note = "min-plus and max-plus, grid2d-general and quadtree, N up to 32";
}

int run(const std::string& cmd) {
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// The deterministic columns of a bench CSV: everything but the wall times.
std::vector<std::string> visit_columns(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    std::size_t cut = 0;
    for (int commas = 0; commas < 6 && cut != std::string::npos; ++commas) cut = line.find(',', cut + 1);
    out.push_back(line.substr(0, cut));
  }
  return out;
}

void criterion10(Verdict& v, const char* cli) {
  // In-process: visit columns repeat exactly; a wrong backend is reported.
  auto cfg = config(BackendId::kQuadTree, "plus-min", {32, 32}, 2000, 7);
  auto a = run_bench(cfg), b = run_bench(cfg);
  if (a.init_visits != b.init_visits || a.mean_visits_per_update != b.mean_visits_per_update ||
      a.mean_visits_per_query != b.mean_visits_per_query) {
    v.fail("in-process bench visits differ");
  }
  {
    struct Identity {
      void update(const RangeBox&, const Scalar&) {}
      Scalar query(const RangeBox&) const { return 0; }
    } wrong;
    auto vc = config(BackendId::kOracle, "plus-plus", {8, 8}, 200, 1);
    WorkloadGenerator gen(vc);
    auto init = gen.initial_tensor();
    if (verify_against_oracle(vc, gen, init, wrong, pairs::PlusPlus{}).passed()) v.fail("faulty backend passed");
  }
  if (cli == nullptr) {
    v.fail("no CLI path given");
    return;
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / cat("rangeq_acceptance_", ::getpid());
  fs::create_directories(dir);
  const std::string exe = cat("\"", cli, "\"");
  const std::string bench = exe + " bench --backend quadtree --backend grid2d-general --pair plus-min" +
                            " --pair plus-plus --dims 16x16 --dims 32x32 --ops 3000 --seed 11 --format csv";
  const std::string quiet = " >/dev/null 2>&1";
  int e1 = run(bench + " --out \"" + (dir / "a.csv").string() + "\"" + quiet);
  int e2 = run(bench + " --out \"" + (dir / "b.csv").string() + "\"" + quiet);
  if (e1 != 0 || e2 != 0) v.fail(cat("bench exit codes ", e1, " ", e2));
  auto ca = visit_columns(dir / "a.csv"), cb = visit_columns(dir / "b.csv");
  if (ca.size() < 2 || ca != cb) v.fail(cat("bench visit columns differ (", ca.size(), " vs ", cb.size(), " rows)"));

  struct Expect {
    std::string args;
    int code;
  };
  const std::vector<Expect> expects{
      {"verify --backend seg1d --pair plus-min --dims 16 --ops 1000 --seed 42", 0},
      {"verify --backend grid2d-general --pair times-plus --dims 9x7 --ops 2000", 0},
      {"scaling --backend seg1d --pair plus-min --sizes 1,2 --ops 500", 1},
      {"verify --backend nd-special --pair plus-min --dims 8x8", 2},
      {"verify --backend seg1d --pair plus-min --dims 4x4", 2},
      {"verify --backend seg1d --pair plus-min --dims 16 --no-such-flag", 2},
      {"verify --backend seg1d --pair nope --dims 16", 2},
      {"verify --backend seg1d --pair plus-min --dims 16 --ratio 2", 2},
      {"verify --backend seg1d --pair plus-min", 2},
  };
  for (const auto& e : expects) {
    int got = run(exe + " " + e.args + quiet);
    if (got != e.code) v.fail(cat("'", e.args, "' exited ", got, ", want ", e.code));
  }
  fs::remove_all(dir);
  v.note = cat(ca.size() - 1, " bench rows compared, ", expects.size(), " exit-code cases");
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
      {"oracle equivalence", criterion1},
      {"node census", criterion2},
      {"decomposition", criterion3},
      {"lazy-set lemmas", criterion4},
      {"F laws", criterion5},
      {"special-law gate", criterion6},
      {"quadtree bound", criterion7},
      {"growth envelopes", criterion8},
      {"reduction", criterion9},
      {"CLI determinism", [cli](Verdict& v) { criterion10(v, cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.fail(cat("exception: ", e.what()));
    }
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (v.ok() ? "PASS" : "FAIL");
    if (!v.ok()) std::cout << " [" << v.failures() << " failures; first: " << v.why() << "]";
    if (!v.note.empty()) std::cout << " -- " << v.note;
    std::cout << std::endl;
    failed += v.ok() ? 0 : 1;
  }
  std::cout << (failed ? "FAIL" : "PASS") << ": " << criteria.size() - failed << "/" << criteria.size()
            << " criteria" << std::endl;
  return failed ? 1 : 0;
}
