#pragma once

#include "tcd/numerics/scalar.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tcd::numerics {

template <Real T> struct GaussRule1D {
  std::vector<T> nodes;
  std::vector<T> weights;
};

/// Gauss-Jacobi rule on [-1,1] for the weight (1-x)^a (1+x)^b, integer a,b>=0.
/// Nodes are found by Newton's method with implicit deflation of the roots
/// already located, so no tabulated starting values are needed.
template <Real T> GaussRule1D<T> gauss_jacobi(int n, int a, int b) {
  using std::abs;
  using std::cos;
  if (n < 1)
    throw std::invalid_argument("gauss_jacobi: n must be >= 1");
  if (a < 0 || b < 0)
    throw std::invalid_argument("gauss_jacobi: negative exponent");

  const T A = T(a), B = T(b);
  // Returns (P_n(x), P_n'(x)).
  auto jacobi = [&](const T &x) {
    T p0 = T(1);
    T p1 = (A - B) / 2 + (A + B + 2) * x / 2;
    if (n == 1)
      return std::array<T, 2>{p1, (A + B + 2) / 2};
    T pk = p1, pkm1 = p0;
    for (int k = 2; k <= n; ++k) {
      const T kk = T(k);
      const T c = 2 * kk + A + B;
      const T a1 = 2 * kk * (kk + A + B) * (c - 2);
      const T a2 = (c - 1) * (A * A - B * B);
      const T a3 = (c - 2) * (c - 1) * c;
      const T a4 = 2 * (kk + A - 1) * (kk + B - 1) * c;
      const T next = ((a2 + a3 * x) * pk - a4 * pkm1) / a1;
      pkm1 = pk;
      pk = next;
    }
    const T nn = T(n);
    const T c = 2 * nn + A + B;
    const T dp = (nn * ((A - B) - c * x) * pk + 2 * (nn + A) * (nn + B) * pkm1) /
                 (c * (1 - x * x));
    return std::array<T, 2>{pk, dp};
  };

  GaussRule1D<T> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const T tol = 4 * ulp<T>();
  for (int k = 0; k < n; ++k) {
    // Chebyshev-like initial guess, descending order.
    T x = cos(pi<T>() * (T(k) + T(3) / 4) / (T(n) + T(1) / 2));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = jacobi(x);
      T defl = 0;
      for (int j = 0; j < k; ++j)
        defl += 1 / (x - rule.nodes[j]);
      const T dx = p / (dp - p * defl);
      x -= dx;
      if (abs(dx) <= tol * (1 + abs(x)))
        break;
    }
    rule.nodes[k] = x;
  }

  // C = 2^{a+b+1} (n+a)! (n+b)! / ((n+a+b)! n!)
  T C = T(1);
  for (int i = 0; i < a + b + 1; ++i)
    C *= 2;
  for (int i = 1; i <= a; ++i)
    C *= T(n + i);
  for (int i = 1; i <= b; ++i)
    C *= T(n + i);
  for (int i = 1; i <= a + b; ++i)
    C /= T(n + i);
  for (int k = 0; k < n; ++k) {
    const T x = rule.nodes[k];
    const T dp = jacobi(x)[1];
    rule.weights[k] = C / ((1 - x * x) * dp * dp);
  }
  return rule;
}

/// Quadrature rule on the reference triangle (0,0),(1,0),(0,1).
/// Nodes are barycentric (l0, l1, l2) with Cartesian (x, y) = (l1, l2).
template <Real T> struct QuadratureRule {
  std::vector<std::array<T, 3>> nodes;
  std::vector<T> weights;
  int exactness_degree = 0;

  std::size_t size() const { return weights.size(); }
};

inline constexpr int max_triangle_degree = 80;

/// Collapsed-coordinate (Duffy) Gauss product rule: Gauss-Legendre along the
/// collapsed direction, Gauss-Jacobi(1,0) across it. Exact for every
/// bivariate polynomial of total degree <= `degree`.
template <Real T> QuadratureRule<T> gauss_triangle_rule(int degree) {
  if (degree < 1)
    throw std::invalid_argument("gauss_triangle_rule: degree must be >= 1");
  if (degree > max_triangle_degree)
    throw std::invalid_argument("gauss_triangle_rule: degree too high (" +
                                std::to_string(degree) + " > " +
                                std::to_string(max_triangle_degree) + ")");
  const int n = (degree + 2) / 2;
  const auto gl = gauss_jacobi<T>(n, 0, 0);
  const auto gj = gauss_jacobi<T>(n, 1, 0);

  QuadratureRule<T> rule;
  rule.exactness_degree = 2 * n - 1;
  rule.nodes.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int j = 0; j < n; ++j) {
    const T v = gj.nodes[j];
    for (int i = 0; i < n; ++i) {
      const T u = gl.nodes[i];
      const T x = (1 + u) * (1 - v) / 4;
      const T y = (1 + v) / 2;
      rule.nodes.push_back({1 - x - y, x, y});
      rule.weights.push_back(gl.weights[i] * gj.weights[j] / 8);
    }
  }
  return rule;
}

} // namespace tcd::numerics
