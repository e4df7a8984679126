#pragma once

// The singular coordinate map (s,t) -> (xi,eta) that grades the square
// (s,t) grid toward the nuclei:
//
//   dxi/ds = D_n sinh^(2n+1)(s),   deta/dt = -D_n sin^(2n+1)(t),
//   D_n = (2n+1)! / (2^(2n) n!^2),  n = nu/2 - 1,  xi(0) = 1, eta(0) = 1.
//
// Integrated in closed form this is a polynomial of degree 2n+1 in
// X = sinh^2(s/2) (resp. Y = sin^2(t/2)) whose lowest power is X^(n+1):
//
//   xi - 1 = sum_j a_j X^(n+1+j),   1 - eta = sum_j (-1)^j a_j Y^(n+1+j),
//   a_j = 2 * 4^n * D_n * C(n,j) / (n+1+j),   j = 0..n.
//
// nu = 2 gives xi = cosh s, eta = cos t. The normalization of D_n is exactly
// the one that makes eta(pi) = -1, which is verified on construction.

#include "tcd/errors.hpp"
#include "tcd/numerics/scalar.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace tcd::geometry {

template <Real T> struct TransformParams {
  int nu = 6;
  int n = 2;
  T D{};
  std::vector<T> coeff; ///< a_j, j = 0..n

  static TransformParams make(int nu) {
    using std::abs;
    if (nu < 2 || nu > 10 || nu % 2 != 0)
      throw InvalidSetup("transform strength nu must be one of 2,4,6,8,10 (got " +
                         std::to_string(nu) + ")");
    TransformParams tp;
    tp.nu = nu;
    tp.n = nu / 2 - 1;
    tp.D = d_coefficient(tp.n);
    T pow4 = 1;
    for (int i = 0; i < tp.n; ++i)
      pow4 *= 4;
    std::int64_t binom = 1;
    for (int j = 0; j <= tp.n; ++j) {
      tp.coeff.push_back(2 * pow4 * tp.D * T(binom) / T(tp.n + 1 + j));
      binom = binom * (tp.n - j) / (j + 1);
    }
    T alt = 0;
    for (int j = 0; j <= tp.n; ++j)
      alt += (j % 2 ? -1 : 1) * tp.coeff[j];
    if (abs(alt - 2) > 64 * ulp<T>())
      throw NumericalError("transform self-check failed: eta(pi) != -1");
    return tp;
  }

  /// (2n+1)! / (2^(2n) n!^2)
  static T d_coefficient(int n) {
    // (2n+1)!/(n!^2) = (2n+1) * C(2n, n)
    T c = 1;
    for (int i = 1; i <= n; ++i)
      c = c * T(n + i) / T(i);
    T p = 1;
    for (int i = 0; i < 2 * n; ++i)
      p *= 2;
    return T(2 * n + 1) * c / p;
  }

  /// sum_j (+-1)^j a_j w^(n+1+j)
  T series(const T &w, bool alternate) const {
    T acc = 0;
    for (int j = n; j >= 0; --j)
      acc = acc * w + ((alternate && j % 2) ? -coeff[j] : coeff[j]);
    T lead = 1;
    for (int i = 0; i <= n; ++i)
      lead *= w;
    return acc * lead;
  }

  /// eta as an odd polynomial in cos t: D_n * int_0^cos t (1 - x^2)^n dx.
  T eta_from_cos(const T &c) const {
    T acc = 0;
    std::int64_t binom = 1;
    T c2 = c * c, ck = c;
    for (int k = 0; k <= n; ++k) {
      acc += (k % 2 ? -1 : 1) * T(binom) * ck / T(2 * k + 1);
      ck *= c2;
      binom = binom * (n - k) / (k + 1);
    }
    return D * acc;
  }
};

namespace detail {
template <Real T> void require_s(const T &s) {
  if (!(s >= 0) || !is_finite(s))
    throw std::domain_error("s must be finite and >= 0");
}
template <Real T> void require_t(const T &t) {
  if (!(t >= 0) || !(t <= pi<T>()))
    throw std::domain_error("t must lie in [0, pi]");
}
} // namespace detail

/// xi(s) - 1, free of cancellation near s = 0.
template <Real T> T xi_minus_one(const T &s, const TransformParams<T> &tp) {
  using std::sinh;
  detail::require_s(s);
  const T h = sinh(s / 2);
  return tp.series(h * h, false);
}

template <Real T> T xi_of_s(const T &s, const TransformParams<T> &tp) {
  return 1 + xi_minus_one(s, tp);
}

/// 1 - eta(t), accurate relative to itself near t = 0.
template <Real T> T one_minus_eta(const T &t, const TransformParams<T> &tp) {
  using std::cos;
  using std::sin;
  detail::require_t(t);
  const T h = sin(t / 2);
  const T Y = h * h;
  if (Y <= T(1) / 4)
    return tp.series(Y, true);
  return 1 - tp.eta_from_cos(cos(t));
}

/// 1 + eta(t), accurate relative to itself near t = pi.
template <Real T> T one_plus_eta(const T &t, const TransformParams<T> &tp) {
  using std::cos;
  detail::require_t(t);
  const T h = cos(t / 2);
  const T Y = h * h;
  if (Y <= T(1) / 4)
    return tp.series(Y, true);
  return 1 + tp.eta_from_cos(cos(t));
}

template <Real T> T eta_of_t(const T &t, const TransformParams<T> &tp) {
  using std::cos;
  detail::require_t(t);
  return tp.eta_from_cos(cos(t));
}

template <Real T> struct JacobianFactors {
  T dxi_ds;
  T deta_dt; ///< <= 0: eta decreases from 1 to -1
};

template <Real T>
JacobianFactors<T> jacobian_factors(const T &s, const T &t, const TransformParams<T> &tp) {
  using std::pow;
  using std::sin;
  using std::sinh;
  detail::require_s(s);
  detail::require_t(t);
  const int e = 2 * tp.n + 1;
  return {tp.D * pow(sinh(s), e), -tp.D * pow(sin(t), e)};
}

/// Semi-latus rectum geometry: D_max = (R/2)(xi^2 - 1)/xi solved for xi > 1.
template <Real T> T dmax_to_ximax(const T &dmax, const T &R) {
  using std::sqrt;
  if (!(dmax > 0))
    throw InvalidSetup("D_max must be > 0");
  if (!(R > 0))
    throw InvalidSetup("R must be > 0");
  const T d = dmax / R;
  return d + sqrt(d * d + 1);
}

/// The unique s with xi(s) = xi_max.
template <Real T> T s_of_xi(const T &xi_max, const TransformParams<T> &tp) {
  using std::abs;
  if (!(xi_max > 1))
    throw InvalidSetup("xi_max must be > 1");
  const T target = xi_max - 1;
  T hi = 1;
  while (xi_minus_one(hi, tp) < target)
    hi *= 2;
  auto f = [&](const T &s) { return xi_minus_one(s, tp) - target; };
  std::uintmax_t iters = 200;
  const int bits = std::numeric_limits<T>::digits - 2;
  auto r = boost::math::tools::toms748_solve(
      f, T(0), hi, f(T(0)), f(hi), boost::math::tools::eps_tolerance<T>(bits), iters);
  return (r.first + r.second) / 2;
}

template <Real T> struct DomainSpec {
  T D_max{};
  T xi_max{};
  T s_max{};

  static DomainSpec make(const T &dmax, const T &R, const TransformParams<T> &tp) {
    DomainSpec d;
    d.D_max = dmax;
    d.xi_max = dmax_to_ximax(dmax, R);
    d.s_max = s_of_xi(d.xi_max, tp);
    return d;
  }
};

} // namespace tcd::geometry
