#pragma once

#include "tcd/errors.hpp"
#include "tcd/numerics/symmetric_matrix.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace tcd::numerics {

/// Cholesky factor L (A = L L^T) in the envelope of A. Throws
/// NotPositiveDefinite carrying the failing pivot index.
template <Real T> SymmetricMatrix<T> cholesky_factor(SymmetricMatrix<T> A) {
  using std::sqrt;
  const std::size_t n = A.order();
  for (std::size_t i = 0; i < n; ++i) {
    auto ri = A.row(i);
    const std::size_t fi = A.first(i);
    for (std::size_t j = fi; j < i; ++j) {
      const std::size_t fj = A.first(j);
      const std::size_t k0 = std::max(fi, fj);
      auto rj = A.row(j);
      const T s = dot(ri.data() + (k0 - fi), rj.data() + (k0 - fj), j - k0);
      ri[j - fi] = (ri[j - fi] - s) / rj[j - fj];
    }
    const std::size_t len = i - fi;
    const T d = ri[len] - dot(ri.data(), ri.data(), len);
    if (!(d > T{0}))
      throw NotPositiveDefinite(i, "pivot " + format(d));
    ri[len] = sqrt(d);
  }
  return A;
}

/// L D L^T factorization without pivoting, kept in the envelope of the input.
/// Works for indefinite matrices that admit it (shifted FEM pencils) and
/// reports the inertia through the pivot signs.
template <Real T> class LdltFactor {
public:
  explicit LdltFactor(SymmetricMatrix<T> A) : f_(std::move(A)) {
    using std::abs;
    const std::size_t n = f_.order();
    for (std::size_t i = 0; i < n; ++i) {
      auto ri = f_.row(i);
      const std::size_t fi = f_.first(i);
      for (std::size_t j = fi; j < i; ++j) {
        const std::size_t fj = f_.first(j);
        const std::size_t k0 = std::max(fi, fj);
        auto rj = f_.row(j);
        ri[j - fi] -= dot(ri.data() + (k0 - fi), rj.data() + (k0 - fj), j - k0);
      }
      const std::size_t len = i - fi;
      T d = ri[len];
      for (std::size_t j = fi; j < i; ++j) {
        const T w = ri[j - fi];
        const T l = w / f_.diagonal(j);
        d -= w * l;
        ri[j - fi] = l;
      }
      if (d == T{0} || !is_finite(d))
        throw SingularMatrix(i);
      ri[len] = d;
      if (d < T{0})
        ++negative_;
    }
  }

  /// Number of negative pivots = number of eigenvalues below zero
  /// (Sylvester's law of inertia).
  std::size_t negative_pivots() const { return negative_; }

  std::size_t order() const { return f_.order(); }

  /// Solves (L D L^T) x = b in place.
  void solve_in_place(std::span<T> x) const {
    const std::size_t n = f_.order();
    for (std::size_t i = 0; i < n; ++i) {
      const auto ri = f_.row(i);
      const std::size_t fi = f_.first(i);
      x[i] -= dot(ri.data(), x.data() + fi, i - fi);
    }
    for (std::size_t i = 0; i < n; ++i)
      x[i] /= f_.diagonal(i);
    for (std::size_t i = n; i-- > 0;) {
      const auto ri = f_.row(i);
      const std::size_t fi = f_.first(i);
      const T xi = x[i];
      for (std::size_t k = 0; k < i - fi; ++k)
        x[fi + k] -= ri[k] * xi;
    }
  }

  std::vector<T> solve(std::span<const T> b) const {
    std::vector<T> x(b.begin(), b.end());
    solve_in_place(x);
    return x;
  }

private:
  SymmetricMatrix<T> f_;
  std::size_t negative_ = 0;
};

/// Solves L L^T x = b for a factor returned by cholesky_factor.
template <Real T>
std::vector<T> cholesky_solve(const SymmetricMatrix<T> &L, std::span<const T> b) {
  const std::size_t n = L.order();
  std::vector<T> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = L.row(i);
    const std::size_t fi = L.first(i);
    x[i] = (x[i] - dot(ri.data(), x.data() + fi, i - fi)) / ri[i - fi];
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto ri = L.row(i);
    const std::size_t fi = L.first(i);
    x[i] /= ri[i - fi];
    const T xi = x[i];
    for (std::size_t k = 0; k < i - fi; ++k)
      x[fi + k] -= ri[k] * xi;
  }
  return x;
}

} // namespace tcd::numerics
