// rangeq: differential verification, visit-count benchmarks, and matrix
// products through range update-query structures.
//
// Exit codes: 0 all gates passed, 1 mismatch or gate failure, 2 usage or
// parse error.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rangeq/rangeq.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace rangeq;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::uint64_t ops = 10000;
  std::string ratio = "0.5";
  std::uint64_t seed = 0;
  std::string format;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::string& default_format) {
  o.format = default_format;
  cmd->add_option("--ops", o.ops, "operations per workload")->capture_default_str();
  cmd->add_option("--ratio", o.ratio, "update fraction (0.5) or update:query ratio (1:1)")->capture_default_str();
  cmd->add_option("--seed", o.seed, "workload seed")->capture_default_str();
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json", "text"}));
  cmd->add_option("--out", o.out, "write output to PATH instead of stdout");
}

// Writes to --out when given, else stdout.
void emit(const CommonOptions& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError("cannot open output file '" + o.out + "'");
  f << text;
}

WorkloadConfig make_config(const std::string& backend, const std::string& pair, const std::string& dims,
                           const CommonOptions& o) {
  WorkloadConfig cfg;
  cfg.backend = parse_backend(backend);
  cfg.pair = pair;
  cfg.dims = parse_dims(dims);
  cfg.ops = o.ops;
  cfg.update_ratio = parse_ratio(o.ratio);
  cfg.seed = o.seed;
  check_config(cfg);
  return cfg;
}

json config_json(const CommonOptions& o) {
  return json{{"ops", o.ops}, {"ratio", parse_ratio(o.ratio)}, {"seed", o.seed}};
}

json row_json(const BenchRow& r) {
  return json{{"backend", r.backend},
              {"pair", r.pair},
              {"dims", r.dims},
              {"init_visits", r.init_visits},
              {"mean_visits_per_update", r.mean_visits_per_update},
              {"mean_visits_per_query", r.mean_visits_per_query},
              {"wall_init_seconds", r.wall_init_seconds},
              {"wall_ops_seconds", r.wall_ops_seconds}};
}

// ---- verify ----

struct VerifyOptions {
  std::string backend, pair, dims;
  CommonOptions common;
};

int cmd_verify(const VerifyOptions& v) {
  WorkloadConfig cfg = make_config(v.backend, v.pair, v.dims, v.common);
  VerifyReport r = run_verify(cfg);
  std::ostringstream os;
  const std::string dims = format_dims(cfg.dims);
  if (v.common.format == "json") {
    json j{{"config",
            {{"backend", v.backend}, {"pair", cfg.pair}, {"dims", dims}, {"ops", cfg.ops},
             {"ratio", cfg.update_ratio}, {"seed", cfg.seed}}},
           {"result",
            {{"updates", r.updates}, {"queries", r.queries}, {"mismatches", r.mismatches},
             {"first_mismatch", r.first_mismatch ? json(*r.first_mismatch) : json(nullptr)},
             {"pass", r.passed()}}}};
    os << j.dump(2) << "\n";
  } else if (v.common.format == "csv") {
    os << "backend,pair,dims,ops,seed,updates,queries,mismatches,result\n"
       << v.backend << "," << cfg.pair << "," << dims << "," << cfg.ops << "," << cfg.seed << "," << r.updates << ","
       << r.queries << "," << r.mismatches << "," << (r.passed() ? "PASS" : "FAIL") << "\n";
  } else {
    os << "verify backend=" << v.backend << " pair=" << cfg.pair << " dims=" << dims << " ops=" << cfg.ops
       << " seed=" << cfg.seed << "\n"
       << "updates=" << r.updates << " queries=" << r.queries << " mismatches=" << r.mismatches << "\n";
    if (r.first_mismatch) os << "first mismatch: " << *r.first_mismatch << "\n";
    os << (r.passed() ? "PASS" : "FAIL") << "\n";
  }
  emit(v.common, os.str());
  return r.passed() ? kPass : kFail;
}

// ---- bench ----

struct BenchOptions {
  std::vector<std::string> backends, pairs, dims;
  CommonOptions common;
};

int cmd_bench(const BenchOptions& b) {
  std::vector<WorkloadConfig> cfgs;
  for (const auto& backend : b.backends) {
    for (const auto& pair : b.pairs) {
      for (const auto& dims : b.dims) cfgs.push_back(make_config(backend, pair, dims, b.common));
    }
  }
  std::vector<BenchRow> rows;
  rows.reserve(cfgs.size());
  for (const auto& cfg : cfgs) rows.push_back(run_bench(cfg));

  std::ostringstream os;
  if (b.common.format == "json") {
    json j{{"config", config_json(b.common)}, {"rows", json::array()}};
    for (const auto& r : rows) j["rows"].push_back(row_json(r));
    os << j.dump(2) << "\n";
  } else {
    os << bench_csv_header() << "\n";
    for (const auto& r : rows) os << bench_csv_line(r) << "\n";
  }
  emit(b.common, os.str());
  return kPass;
}

// ---- scaling ----

struct ScalingOptions {
  std::string backend, pair;
  std::vector<std::size_t> sizes;
  std::size_t rank = 0;
  CommonOptions common;
};

int cmd_scaling(const ScalingOptions& s) {
  WorkloadConfig cfg;
  cfg.backend = parse_backend(s.backend);
  cfg.pair = s.pair;
  cfg.ops = s.common.ops;
  cfg.update_ratio = parse_ratio(s.common.ratio);
  cfg.seed = s.common.seed;
  std::size_t rank = s.rank;
  if (rank == 0) {
    rank = (cfg.backend == BackendId::kSeg1D) ? 1 : 2;
  }
  if (s.sizes.empty()) throw ConfigError("scaling needs --sizes");
  cfg.dims.assign(rank, s.sizes.front());
  check_config(cfg);
  ScalingReport r = run_scaling(cfg, s.sizes, rank);

  auto bound = [](const std::optional<double>& b) { return b ? detail::fixed(*b, 4) : std::string("-"); };
  std::ostringstream os;
  if (s.common.format == "json") {
    json j{{"config",
            {{"backend", r.backend}, {"pair", r.pair}, {"rank", r.rank}, {"envelope", r.shape},
             {"ops", cfg.ops}, {"ratio", cfg.update_ratio}, {"seed", cfg.seed}}},
           {"rows", json::array()},
           {"steps", json::array()},
           {"pass", r.passed()}};
    for (const auto& row : r.rows) j["rows"].push_back(row_json(row));
    for (const auto& st : r.steps) {
      j["steps"].push_back({{"from", st.from}, {"to", st.to}, {"ratio", st.ratio},
                            {"low", st.low ? json(*st.low) : json(nullptr)},
                            {"high", st.high ? json(*st.high) : json(nullptr)}, {"pass", st.passed}});
    }
    os << j.dump(2) << "\n";
  } else if (s.common.format == "csv") {
    os << "backend,pair,from,to,ratio,low,high,result\n";
    for (const auto& st : r.steps) {
      os << r.backend << "," << r.pair << "," << st.from << "," << st.to << "," << detail::fixed(st.ratio, 4) << ","
         << bound(st.low) << "," << bound(st.high) << "," << (st.passed ? "PASS" : "FAIL") << "\n";
    }
  } else {
    os << "scaling backend=" << r.backend << " pair=" << r.pair << " rank=" << r.rank << " envelope=" << r.shape
       << "\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      os << "  size " << s.sizes[i] << ": mean visits/op " << detail::fixed(r.rows[i].mean_visits_per_op(), 2)
         << " (update " << detail::fixed(r.rows[i].mean_visits_per_update, 2) << ", query "
         << detail::fixed(r.rows[i].mean_visits_per_query, 2) << ")\n";
    }
    for (const auto& st : r.steps) {
      os << "  " << st.from << " -> " << st.to << ": ratio " << detail::fixed(st.ratio, 4) << " allowed ["
         << bound(st.low) << ", " << bound(st.high) << "] " << (st.passed ? "PASS" : "FAIL") << "\n";
    }
    os << (r.passed() ? "PASS" : "FAIL") << "\n";
  }
  emit(s.common, os.str());
  return r.passed() ? kPass : kFail;
}

// ---- matmul ----

struct MatmulOptions {
  std::string file_a, file_b, pair = "plus-min", backend = "grid2d-general", out;
  bool check = false;
};

template <class T, class Parse>
SquareMatrix<T> load_matrix(const std::string& path, Parse&& parse) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return SquareMatrix<T>::from_tensor(read_tensor<T>(in, parse));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
}

template <class P, class Backend>
SquareMatrix<number_t<P>> run_product(const SquareMatrix<number_t<P>>& a, const SquareMatrix<number_t<P>>& b) {
  auto init = encode_matrix<P>(a);
  Backend backend(init.view());
  return product_via_uq<P>(a, b, backend);
}

template <class P>
SquareMatrix<number_t<P>> product_on(BackendId id, const SquareMatrix<number_t<P>>& a,
                                     const SquareMatrix<number_t<P>>& b) {
  switch (id) {
    case BackendId::kOracle: return run_product<P, DenseTensor<P>>(a, b);
    case BackendId::kGrid2D: return run_product<P, Grid2D<P>>(a, b);
    case BackendId::kQuadTree: return run_product<P, QuadTree<P>>(a, b);
    case BackendId::kNDSpecial:
      if constexpr (HomogeneousPair<P>) {
        return run_product<P, NDTree<P, 2>>(a, b);
      } else {
        throw_not_special<P>();
      }
    case BackendId::kSeg1D: break;
  }
  throw ConfigError("backend '" + std::string(backend_name(id)) + "' cannot hold a matrix");
}

template <class P, class Parse, class Format, class Deviation>
int matmul_with(const MatmulOptions& m, BackendId id, Parse&& parse, Format&& format, Deviation&& deviation) {
  using T = number_t<P>;
  auto a = load_matrix<T>(m.file_a, parse);
  auto b = load_matrix<T>(m.file_b, parse);
  if (a.size() != b.size()) {
    throw ParseError("matrix sizes differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  auto c = product_on<P>(id, a, b);
  std::ostringstream os;
  write_tensor(os, c.to_tensor().view(), format);
  CommonOptions sink;
  sink.out = m.out;
  emit(sink, os.str());
  if (!m.check) return kPass;
  auto want = schoolbook<P>(a, b);
  T worst{};
  for (std::size_t i = 0; i < c.values().size(); ++i) {
    T d = deviation(c.values()[i], want.values()[i]);
    if (worst < d) worst = d;
  }
  std::cerr << "max deviation: " << format(worst) << "\n";
  return worst == T{} ? kPass : kFail;
}

int cmd_matmul(const MatmulOptions& m) {
  BackendId id = parse_backend(m.backend);
  const PairInfo& info = lookup(m.pair);
  if (!info.has_inverse) throw ConfigError("pair '" + m.pair + "' has no inverse; matrix products need one");

  auto scalar_dev = [](Scalar x, Scalar y) -> Scalar {
    if (x == y) return 0;
    if (!x.is_finite() || !y.is_finite()) return Scalar::pos_inf();
    Scalar d = x + (-y);
    return d < Scalar(0) ? -d : d;
  };
  auto rational_dev = [](const Rational& x, const Rational& y) { return abs(x - y); };
  auto scalar_fmt = [](Scalar s) { return s.str(); };
  auto rational_fmt = [](const Rational& r) { return format_rational(r); };

  if (m.pair == "plus-min") return matmul_with<pairs::PlusMin>(m, id, Scalar::parse, scalar_fmt, scalar_dev);
  if (m.pair == "plus-max") return matmul_with<pairs::PlusMax>(m, id, Scalar::parse, scalar_fmt, scalar_dev);
  if (m.pair == "plus-plus") return matmul_with<pairs::PlusPlus>(m, id, Scalar::parse, scalar_fmt, scalar_dev);
  if (m.pair == "times-plus") {
    return matmul_with<pairs::ZeroTrackedTimesPlus<Rational>>(m, id, parse_rational, rational_fmt, rational_dev);
  }
  if (m.pair == "times-times") {
    return matmul_with<pairs::ZeroTrackedTimesTimes<Rational>>(m, id, parse_rational, rational_fmt, rational_dev);
  }
  throw ConfigError("pair '" + m.pair + "' is not supported for matrix products");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range update-query structures: verification, benchmarks, matrix products"};
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "replay a seeded workload against the brute-force oracle");
  v->add_option("--backend", verify.backend, "oracle | seg1d | nd-special | grid2d-general | quadtree")->required();
  v->add_option("--pair", verify.pair, "operator pair name, e.g. plus-min")->required();
  v->add_option("--dims", verify.dims, "extents, e.g. 32x32")->required();
  add_common(v, verify.common, "text");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "visit-count benchmark rows; repeat flags for a sweep");
  b->add_option("--backend", bench.backends, "backend ids (repeatable)");
  b->add_option("--pair", bench.pairs, "pair names (repeatable)");
  b->add_option("--dims", bench.dims, "extents (repeatable)");
  add_common(b, bench.common, "csv");

  ScalingOptions scaling;
  auto* s = app.add_subcommand("scaling", "growth of mean visits between sizes, checked against an envelope");
  s->add_option("--backend", scaling.backend, "backend id")->required();
  s->add_option("--pair", scaling.pair, "pair name")->required();
  s->add_option("--sizes", scaling.sizes, "strictly increasing extents, e.g. 128,256")->delimiter(',')->required();
  s->add_option("--rank", scaling.rank, "number of dimensions (default 1 for seg1d, else 2)");
  add_common(s, scaling.common, "text");

  MatmulOptions matmul;
  auto* m = app.add_subcommand("matmul", "matrix product through an update-query backend");
  m->add_option("A", matmul.file_a, "left matrix file")->required();
  m->add_option("B", matmul.file_b, "right matrix file")->required();
  m->add_option("--pair", matmul.pair, "plus-min | plus-max | plus-plus | times-plus | times-times")
      ->capture_default_str();
  m->add_option("--backend", matmul.backend, "oracle | grid2d-general | quadtree | nd-special")
      ->capture_default_str();
  m->add_flag("--check", matmul.check, "compare against the schoolbook product");
  m->add_option("--out", matmul.out, "write the product to PATH");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*v) return cmd_verify(verify);
    if (*b) return cmd_bench(bench);
    if (*s) return cmd_scaling(scaling);
    if (*m) return cmd_matmul(matmul);
  } catch (const NotSpecialError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownPairError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
