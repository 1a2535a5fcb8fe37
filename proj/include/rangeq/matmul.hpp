#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rangeq/algebra.hpp"
#include "rangeq/box.hpp"
#include "rangeq/dense_tensor.hpp"

namespace rangeq {

// N x N matrix of plain numbers, row-major.
template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  SquareMatrix(std::size_t n, std::vector<T> values) : n_(n), values_(std::move(values)) {
    if (n_ == 0) throw std::invalid_argument("matrix size must be positive");
    if (values_.size() != n_ * n_) {
      throw std::invalid_argument("matrix of size " + std::to_string(n_) + " needs " + std::to_string(n_ * n_) +
                                  " values, got " + std::to_string(values_.size()));
    }
  }

  static SquareMatrix from_tensor(const Tensor<T>& t) {
    if (t.dims.size() != 2 || t.dims[0] != t.dims[1]) throw std::invalid_argument("expected a square 2D matrix");
    return SquareMatrix(t.dims[0], t.data);
  }

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] const T& at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  T& at(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  [[nodiscard]] const std::vector<T>& values() const { return values_; }
  [[nodiscard]] Tensor<T> to_tensor() const { return Tensor<T>({n_, n_}, values_); }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> values_;
};

// How plain numbers enter and leave a pair's element and update domains.
// Homogeneous pairs use the numbers as they are; zero-tracked pairs supply
// their own encoders.
template <class P>
struct product_codec {
  using number = value_t<P>;
  static value_t<P> encode_value(const number& x) { return x; }
  static update_t<P> encode_update(const number& x) { return x; }
  // The update taking the identity-like unit element to `a`; for plain
  // homogeneous pairs the value itself.
  static update_t<P> as_update(const value_t<P>& a) { return a; }
  static number decode(const value_t<P>& a) { return a; }
};

template <class P>
  requires requires(const value_t<P>& a) { P::decode(a); }
struct product_codec<P> {
  using number = decltype(P::decode(std::declval<const value_t<P>&>()));
  static value_t<P> encode_value(const number& x) { return P::encode_value(x); }
  static update_t<P> encode_update(const number& x) { return P::encode_update(x); }
  static update_t<P> as_update(const value_t<P>& a) { return P::as_update(a); }
  static number decode(const value_t<P>& a) { return P::decode(a); }
};

template <class P>
using number_t = typename product_codec<P>::number;

template <OperatorPair P>
Tensor<value_t<P>> encode_matrix(const SquareMatrix<number_t<P>>& m) {
  std::vector<value_t<P>> data;
  data.reserve(m.values().size());
  for (const auto& x : m.values()) data.push_back(product_codec<P>::encode_value(x));
  return Tensor<value_t<P>>({m.size(), m.size()}, std::move(data));
}

// C[i][j] = △_k (A[i][k] ∇ B[k][j]), O(N^3).
template <OperatorPair P>
SquareMatrix<number_t<P>> schoolbook(const SquareMatrix<number_t<P>>& a, const SquareMatrix<number_t<P>>& b,
                                     const P& pair = {}) {
  using codec = product_codec<P>;
  if (a.size() != b.size()) throw std::invalid_argument("matrix sizes differ");
  const std::size_t n = a.size();
  std::vector<number_t<P>> out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      value_t<P> acc = pair.query_identity();
      for (std::size_t k = 0; k < n; ++k) {
        acc = pair.combine(acc, pair.apply(codec::encode_value(a.at(i, k)), codec::encode_update(b.at(k, j))));
      }
      out.push_back(codec::decode(acc));
    }
  }
  return SquareMatrix<number_t<P>>(n, std::move(out));
}

template <class B, class P>
concept UpdateQueryBackend = OperatorPair<P> && requires(B& b, const RangeBox& box, const update_t<P>& v) {
  b.update(box, v);
  { b.query(box) } -> std::convertible_to<value_t<P>>;
  { b.dims() } -> std::convertible_to<std::span<const std::size_t>>;
};

// Forwards to a backend and counts the calls made through it.
template <class B>
class CallCounting {
 public:
  explicit CallCounting(B& inner) : inner_(&inner) {}

  template <class V>
  void update(const RangeBox& box, const V& v) {
    ++updates_;
    inner_->update(box, v);
  }
  auto query(const RangeBox& box) {
    ++queries_;
    return inner_->query(box);
  }
  auto dims() const { return inner_->dims(); }

  [[nodiscard]] std::uint64_t updates() const { return updates_; }
  [[nodiscard]] std::uint64_t queries() const { return queries_; }
  void reset() { updates_ = queries_ = 0; }

 private:
  B* inner_;
  std::uint64_t updates_ = 0;
  std::uint64_t queries_ = 0;
};

namespace detail {

template <class P, class B>
void require_square(B& backend, std::size_t n) {
  auto dims = backend.dims();
  if (dims.size() != 2 || dims[0] != n || dims[1] != n) {
    throw std::invalid_argument("backend does not hold an " + std::to_string(n) + "x" + std::to_string(n) +
                                " matrix");
  }
}

// Column loop: with the backend holding A, returns A * B and leaves the
// backend holding A again.
template <InvertiblePair P, class B>
SquareMatrix<number_t<P>> column_products(const SquareMatrix<number_t<P>>& b, B& backend, const P& pair) {
  using codec = product_codec<P>;
  const std::size_t n = b.size();
  const Interval all(0, n - 1);
  std::vector<number_t<P>> out(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) backend.update(RangeBox{all, Interval(k, k)}, codec::encode_update(b.at(k, j)));
    for (std::size_t i = 0; i < n; ++i) out[i * n + j] = codec::decode(backend.query(RangeBox{Interval(i, i), all}));
    for (std::size_t k = 0; k < n; ++k) {
      backend.update(RangeBox{all, Interval(k, k)}, pair.invert(codec::encode_update(b.at(k, j))));
    }
  }
  return SquareMatrix<number_t<P>>(n, std::move(out));
}

}  // namespace detail

// A * B through a 2D update-query structure that already holds A (built
// from encode_matrix<P>(a)). Issues 2N^2 updates and N^2 queries.
template <InvertiblePair P, class B>
  requires UpdateQueryBackend<B, P>
SquareMatrix<number_t<P>> product_via_uq(const SquareMatrix<number_t<P>>& a, const SquareMatrix<number_t<P>>& b,
                                         B& backend, const P& pair = {}) {
  if (a.size() != b.size()) throw std::invalid_argument("matrix sizes differ");
  detail::require_square<P>(backend, a.size());
  return detail::column_products(b, backend, pair);
}

// Several products through one backend initialized with any N x N matrix:
// each cell is reseeded to A_k by U(cell, inv(Q(cell)) ∇ A_k[i][j]) before
// the column loop runs.
template <InvertiblePair P, class B>
  requires UpdateQueryBackend<B, P>
std::vector<SquareMatrix<number_t<P>>> products_via_uq(
    const std::vector<std::pair<SquareMatrix<number_t<P>>, SquareMatrix<number_t<P>>>>& inputs, B& backend,
    const P& pair = {}) {
  using codec = product_codec<P>;
  std::vector<SquareMatrix<number_t<P>>> out;
  out.reserve(inputs.size());
  for (const auto& [a, b] : inputs) {
    if (a.size() != b.size()) throw std::invalid_argument("matrix sizes differ");
    const std::size_t n = a.size();
    detail::require_square<P>(backend, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        RangeBox cell{Interval(i, i), Interval(j, j)};
        value_t<P> current = backend.query(cell);
        backend.update(cell, pair.compose(pair.invert(codec::as_update(current)),
                                          codec::as_update(codec::encode_value(a.at(i, j)))));
      }
    }
    out.push_back(detail::column_products(b, backend, pair));
  }
  return out;
}

}  // namespace rangeq
