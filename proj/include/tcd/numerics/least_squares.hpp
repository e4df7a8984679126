#pragma once

#include "tcd/errors.hpp"
#include "tcd/numerics/scalar.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tcd::numerics {

template <Real T> struct LeastSquaresResult {
  std::vector<T> coefficients;
  std::vector<T> standard_errors;
  std::vector<T> residuals; ///< observations - design * coefficients
};

/// Linear least squares by Householder QR of the column-equilibrated design
/// (rows = observations). Standard errors use the residual variance
/// RSS/(m-n) and the diagonal of (X^T X)^{-1}; they are zero when m == n.
template <Real T>
LeastSquaresResult<T> linear_least_squares(const std::vector<std::vector<T>> &design,
                                           const std::vector<T> &observations) {
  using std::abs;
  using std::sqrt;
  const std::size_t m = design.size();
  if (m == 0 || observations.size() != m)
    throw std::invalid_argument("least squares: design/observation size mismatch");
  const std::size_t n = design.front().size();
  if (n == 0)
    throw std::invalid_argument("least squares: no columns");
  if (m < n)
    throw std::invalid_argument("least squares: fewer observations than unknowns");
  for (const auto &row : design)
    if (row.size() != n)
      throw std::invalid_argument("least squares: ragged design matrix");

  // Column-major working copy, each column scaled to unit 2-norm.
  std::vector<std::vector<T>> a(n, std::vector<T>(m));
  std::vector<T> scale(n);
  for (std::size_t j = 0; j < n; ++j) {
    T s{0};
    for (std::size_t i = 0; i < m; ++i) {
      a[j][i] = design[i][j];
      s += a[j][i] * a[j][i];
    }
    s = sqrt(s);
    if (!(s > T{0}))
      throw RankDeficient("least squares: zero column " + std::to_string(j));
    scale[j] = s;
    for (auto &v : a[j])
      v /= s;
  }
  std::vector<T> b = observations;

  std::vector<T> rdiag(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto &col = a[k];
    T norm{0};
    for (std::size_t i = k; i < m; ++i)
      norm += col[i] * col[i];
    norm = sqrt(norm);
    const T alpha = col[k] > T{0} ? -norm : norm;
    // v = x - alpha e_k, stored in col[k..m)
    col[k] -= alpha;
    T vnorm2{0};
    for (std::size_t i = k; i < m; ++i)
      vnorm2 += col[i] * col[i];
    rdiag[k] = alpha;
    if (!(vnorm2 > T{0}))
      continue;
    auto reflect = [&](std::vector<T> &y) {
      T d{0};
      for (std::size_t i = k; i < m; ++i)
        d += col[i] * y[i];
      const T f = 2 * d / vnorm2;
      for (std::size_t i = k; i < m; ++i)
        y[i] -= f * col[i];
    };
    for (std::size_t j = k + 1; j < n; ++j)
      reflect(a[j]);
    reflect(b);
  }

  T rmax{0};
  for (const auto &d : rdiag)
    rmax = abs(d) > rmax ? abs(d) : rmax;
  for (std::size_t k = 0; k < n; ++k)
    if (abs(rdiag[k]) <= T(m) * ulp<T>() * rmax)
      throw RankDeficient("least squares: design matrix is rank deficient "
                          "(column " + std::to_string(k) + ")");

  // R(i,j) for j > i lives in a[j][i]; diagonal in rdiag.
  auto R = [&](std::size_t i, std::size_t j) { return i == j ? rdiag[i] : a[j][i]; };

  std::vector<T> y(n);
  for (std::size_t i = n; i-- > 0;) {
    T s = b[i];
    for (std::size_t j = i + 1; j < n; ++j)
      s -= R(i, j) * y[j];
    y[i] = s / rdiag[i];
  }

  LeastSquaresResult<T> out;
  out.coefficients.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    out.coefficients[j] = y[j] / scale[j];

  out.residuals.resize(m);
  T rss{0};
  for (std::size_t i = 0; i < m; ++i) {
    T fit{0};
    for (std::size_t j = 0; j < n; ++j)
      fit += design[i][j] * out.coefficients[j];
    out.residuals[i] = observations[i] - fit;
    rss += out.residuals[i] * out.residuals[i];
  }
  const T variance = m > n ? rss / T(m - n) : T{0};

  // diag((R^T R)^{-1}) = squared row norms of R^{-1}.
  std::vector<std::vector<T>> rinv(n, std::vector<T>(n, T{0}));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = c + 1; i-- > 0;) {
      T s = i == c ? T{1} : T{0};
      for (std::size_t j = i + 1; j <= c; ++j)
        s -= R(i, j) * rinv[j][c];
      rinv[i][c] = s / rdiag[i];
    }
  }
  out.standard_errors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    T s{0};
    for (std::size_t c = i; c < n; ++c)
      s += rinv[i][c] * rinv[i][c];
    out.standard_errors[i] = sqrt(variance * s) / scale[i];
  }
  return out;
}

} // namespace tcd::numerics
