#pragma once

#include "tcd/numerics/scalar.hpp"

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace tcd::numerics {

/// Sum of a[i]*b[i] with four independent partial sums. The summation order
/// is fixed, so results are bit-reproducible.
template <Real T> inline T dot(const T *a, const T *b, std::size_t n) {
  T s0{0}, s1{0}, s2{0}, s3{0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i)
    s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

template <Real T> inline T dot(std::span<const T> a, std::span<const T> b) {
  assert(a.size() == b.size());
  return dot(a.data(), b.data(), a.size());
}

/// Symmetric matrix in lower-triangular envelope (skyline) storage.
///
/// Row i stores the contiguous entries (i, first(i)) ... (i, i). A matrix
/// built with `SymmetricMatrix(n)` has first(i) == 0 for every row and is
/// plain dense lower-triangular storage; finite-element matrices use the
/// envelope implied by their connectivity.
template <Real T> class SymmetricMatrix {
public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(std::size_t order)
      : SymmetricMatrix(std::vector<std::size_t>(order, 0)) {}

  explicit SymmetricMatrix(std::vector<std::size_t> first_column)
      : first_(std::move(first_column)), start_(first_.size() + 1, 0) {
    if (first_.empty())
      throw std::invalid_argument("SymmetricMatrix: order must be >= 1");
    for (std::size_t i = 0; i < first_.size(); ++i) {
      if (first_[i] > i)
        throw std::invalid_argument("SymmetricMatrix: envelope beyond diagonal");
      start_[i + 1] = start_[i] + (i - first_[i] + 1);
    }
    data_.assign(start_.back(), T{0});
  }

  std::size_t order() const { return first_.size(); }
  std::size_t first(std::size_t i) const { return first_[i]; }
  std::size_t stored_entries() const { return data_.size(); }
  const std::vector<std::size_t> &envelope() const { return first_; }

  bool in_envelope(std::size_t i, std::size_t j) const {
    if (j > i)
      std::swap(i, j);
    return j >= first_[i];
  }

  T operator()(std::size_t i, std::size_t j) const {
    if (j > i)
      std::swap(i, j);
    if (j < first_[i])
      return T{0};
    return data_[start_[i] + (j - first_[i])];
  }

  /// Mutable reference to (i,j) or (j,i); must lie inside the envelope.
  T &ref(std::size_t i, std::size_t j) {
    if (j > i)
      std::swap(i, j);
    assert(j >= first_[i]);
    return data_[start_[i] + (j - first_[i])];
  }

  void add(std::size_t i, std::size_t j, const T &v) { ref(i, j) += v; }

  /// Entries (i, first(i)) ... (i, i).
  std::span<T> row(std::size_t i) {
    return {data_.data() + start_[i], start_[i + 1] - start_[i]};
  }
  std::span<const T> row(std::size_t i) const {
    return {data_.data() + start_[i], start_[i + 1] - start_[i]};
  }

  T diagonal(std::size_t i) const { return data_[start_[i + 1] - 1]; }

  bool same_envelope(const SymmetricMatrix &o) const { return first_ == o.first_; }

  /// this += a * other (identical envelopes).
  void axpy(const T &a, const SymmetricMatrix &other) {
    if (!same_envelope(other))
      throw std::invalid_argument("SymmetricMatrix::axpy: envelope mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k)
      data_[k] += a * other.data_[k];
  }

  void scale(const T &a) {
    for (auto &v : data_)
      v *= a;
  }

  T max_abs() const {
    using std::abs;
    T m{0};
    for (const auto &v : data_)
      if (abs(v) > m)
        m = abs(v);
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const T &v) { return is_finite(v); });
  }

  /// y = A x
  void multiply(std::span<const T> x, std::span<T> y) const {
    const std::size_t n = order();
    assert(x.size() == n && y.size() == n);
    std::fill(y.begin(), y.end(), T{0});
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = row(i);
      const std::size_t f = first_[i];
      const std::size_t len = r.size() - 1;
      y[i] += dot(r.data(), x.data() + f, len) + r[len] * x[i];
      const T xi = x[i];
      for (std::size_t k = 0; k < len; ++k)
        y[f + k] += r[k] * xi;
    }
  }

  std::vector<T> multiply(std::span<const T> x) const {
    std::vector<T> y(order());
    multiply(x, y);
    return y;
  }

  /// x^T A y
  T bilinear(std::span<const T> x, std::span<const T> y) const {
    const auto Ay = multiply(y);
    return dot<T>(x, Ay);
  }

  /// sum_ij |A_ij| |x_i| |x_j|: the scale against which rounding in x^T A x
  /// is measured.
  T abs_quadratic(std::span<const T> x) const {
    using std::abs;
    T total{0};
    for (std::size_t i = 0; i < order(); ++i) {
      const auto r = row(i);
      const std::size_t f = first_[i];
      const std::size_t len = r.size() - 1;
      T off{0};
      for (std::size_t k = 0; k < len; ++k)
        off += abs(r[k]) * abs(x[f + k]);
      total += abs(x[i]) * (2 * off + abs(r[len]) * abs(x[i]));
    }
    return total;
  }

  friend bool operator==(const SymmetricMatrix &a, const SymmetricMatrix &b) {
    return a.first_ == b.first_ && a.data_ == b.data_;
  }

  std::span<const T> raw() const { return data_; }
  std::span<T> raw() { return data_; }

private:
  std::vector<std::size_t> first_;
  std::vector<std::size_t> start_;
  std::vector<T> data_;
};

} // namespace tcd::numerics
