#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangeq/algebra.hpp"
#include "rangeq/box.hpp"
#include "rangeq/counters.hpp"

namespace rangeq {

inline std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// Non-owning row-major view of a d-dimensional array.
template <class T>
struct TensorView {
  std::span<const std::size_t> dims;
  std::span<const T> data;

  [[nodiscard]] std::size_t rank() const { return dims.size(); }

  // The (d-1)-dimensional slice at index i of axis 0.
  [[nodiscard]] TensorView slice(std::size_t i) const {
    auto inner = dims.subspan(1);
    std::size_t stride = product(inner);
    return TensorView{inner, data.subspan(i * stride, stride)};
  }
};

// Owning row-major array, the value type of the tensor text format.
template <class T>
struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<T> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> d, std::vector<T> values) : dims(std::move(d)), data(std::move(values)) {
    if (dims.empty()) throw std::invalid_argument("tensor needs at least one dimension");
    for (std::size_t n : dims) {
      if (n == 0) throw std::invalid_argument("tensor extents must be positive");
    }
    if (data.size() != product(dims)) {
      throw std::invalid_argument("tensor has " + std::to_string(data.size()) + " values, dims need " +
                                  std::to_string(product(dims)));
    }
  }

  [[nodiscard]] TensorView<T> view() const { return {dims, data}; }
  operator TensorView<T>() const { return view(); }  // NOLINT(google-explicit-constructor)
};

namespace detail {

// Calls fn(flat_index) for every cell of `box` in row-major order.
template <class Fn>
void for_each_cell(std::span<const std::size_t> dims, const RangeBox& box, Fn&& fn) {
  const std::size_t d = dims.size();
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t i = d; i-- > 1;) stride[i - 1] = stride[i] * dims[i];
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < d; ++i) idx[i] = box[i].lo;
  while (true) {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < d; ++i) flat += idx[i] * stride[i];
    fn(flat);
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (idx[axis] < box[axis].hi) {
        ++idx[axis];
        break;
      }
      idx[axis] = box[axis].lo;
      if (axis == 0) return;
    }
  }
}

}  // namespace detail

// Brute-force update-query array: applies every update cell by cell and
// folds every query cell by cell. Ground truth for all tree backends.
template <OperatorPair P>
class DenseTensor {
 public:
  using pair_type = P;
  using value_type = value_t<P>;
  using update_type = update_t<P>;

  DenseTensor(TensorView<value_type> init, P pair = {}) : pair_(std::move(pair)) { assign(init); }
  DenseTensor(const Tensor<value_type>& init, P pair = {}) : DenseTensor(init.view(), std::move(pair)) {}

  void assign(TensorView<value_type> init) {
    if (init.dims.empty()) throw std::invalid_argument("tensor needs at least one dimension");
    dims_.assign(init.dims.begin(), init.dims.end());
    for (std::size_t n : dims_) {
      if (n == 0) throw std::invalid_argument("tensor extents must be positive");
    }
    if (init.data.size() != product(dims_)) throw std::invalid_argument("tensor data does not match dims");
    counters_.begin_op();
    counters_.tick(init.data.size());
    data_.assign(init.data.begin(), init.data.end());
  }

  void update(const RangeBox& box, const update_type& v) {
    box.check_within(dims_);
    counters_.begin_op();
    detail::for_each_cell(dims_, box, [&](std::size_t i) {
      counters_.tick();
      data_[i] = pair_.apply(data_[i], v);
    });
  }

  [[nodiscard]] value_type query(const RangeBox& box) const {
    box.check_within(dims_);
    counters_.begin_op();
    value_type acc = pair_.query_identity();
    detail::for_each_cell(dims_, box, [&](std::size_t i) {
      counters_.tick();
      acc = pair_.combine(acc, data_[i]);
    });
    return acc;
  }

  [[nodiscard]] const value_type& at(std::span<const std::size_t> index) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (index[i] >= dims_[i]) throw std::out_of_range("tensor index out of range");
      flat = flat * dims_[i] + index[i];
    }
    return data_[flat];
  }

  [[nodiscard]] std::span<const std::size_t> dims() const { return dims_; }
  [[nodiscard]] std::span<const value_type> data() const { return data_; }
  [[nodiscard]] TensorView<value_type> view() const { return {dims_, data_}; }
  [[nodiscard]] const P& pair() const { return pair_; }
  [[nodiscard]] const OpCounters& counters() const { return counters_; }
  OpCounters& counters() { return counters_; }

 private:
  P pair_;
  std::vector<std::size_t> dims_;
  std::vector<value_type> data_;
  mutable OpCounters counters_;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text format: first line "d n_0 ... n_{d-1}", then product(dims)
// whitespace-separated values in row-major order.
template <class T, class Parse>
Tensor<T> read_tensor(std::istream& in, Parse&& parse) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing tensor header line");
  std::istringstream hs(header);
  long long d = 0;
  if (!(hs >> d) || d <= 0) throw ParseError("header must start with a positive dimension count");
  std::vector<std::size_t> dims;
  for (long long i = 0; i < d; ++i) {
    long long n = 0;
    if (!(hs >> n) || n <= 0) throw ParseError("header needs " + std::to_string(d) + " positive extents");
    dims.push_back(static_cast<std::size_t>(n));
  }
  std::string extra;
  if (hs >> extra) throw ParseError("unexpected token '" + extra + "' in header");

  const std::size_t count = product(dims);
  std::vector<T> data;
  data.reserve(count);
  std::string token;
  while (in >> token) {
    if (data.size() == count) throw ParseError("more values than the header's " + std::to_string(count));
    try {
      data.push_back(parse(token));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  if (data.size() != count) {
    throw ParseError("expected " + std::to_string(count) + " values, found " + std::to_string(data.size()));
  }
  return Tensor<T>(std::move(dims), std::move(data));
}

// Writes the header, then one line per innermost row.
template <class T, class Format>
void write_tensor(std::ostream& out, TensorView<T> t, Format&& format) {
  out << t.rank();
  for (std::size_t n : t.dims) out << ' ' << n;
  out << '\n';
  const std::size_t row = t.dims.back();
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    out << format(t.data[i]) << ((i + 1) % row == 0 ? '\n' : ' ');
  }
}

}  // namespace rangeq
