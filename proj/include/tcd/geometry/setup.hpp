#pragma once

#include "tcd/errors.hpp"
#include "tcd/numerics/scalar.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace tcd::geometry {

/// c at or above this value switches to the nonrelativistic limit.
inline constexpr double nonrelativistic_c = 1e15;

/// CODATA 2018 inverse fine-structure constant.
inline constexpr const char *codata_alpha_inverse = "137.035999084";

template <Real T> struct PhysicalSetup {
  T Z1 = 1;
  T Z2 = 1;
  T R = 2;             ///< internuclear distance, bohr
  T alpha_inverse = 0; ///< c in atomic units
  int twice_jz = 1;    ///< 2*jz, odd
  int state_index = 1; ///< 1 = lowest state of the jz symmetry

  bool nonrelativistic_limit() const { return alpha_inverse >= T(nonrelativistic_c); }
  T alpha() const { return 1 / alpha_inverse; }
  T kappa() const { return T(std::abs(twice_jz)) / 2 + T(1) / 2; }
  /// Azimuthal quantum numbers of the two large-component entries.
  int m1() const { return (twice_jz - 1) / 2; }
  int m2() const { return (twice_jz + 1) / 2; }

  /// Throws InvalidSetup naming the first violated invariant.
  void validate() const {
    if (!(Z1 >= 0) || !(Z2 >= 0))
      throw InvalidSetup("nuclear charges must be >= 0");
    if (!(Z1 + Z2 > 0))
      throw InvalidSetup("Z1 + Z2 must be > 0 (no bound state otherwise)");
    if (!(R > 0) || !is_finite(R))
      throw InvalidSetup("internuclear distance R must be > 0");
    if (!(alpha_inverse > 0) || !is_finite(alpha_inverse))
      throw InvalidSetup("alpha_inverse (c) must be > 0");
    if (twice_jz % 2 == 0)
      throw InvalidSetup("jz must be a half-integer");
    if (state_index < 1)
      throw InvalidSetup("state_index must be >= 1");
    const T zmax = Z1 > Z2 ? Z1 : Z2;
    if (!nonrelativistic_limit() && !(zmax / alpha_inverse < kappa()))
      throw InvalidSetup("supercritical coupling: alpha*Z must be < kappa = |jz|+1/2");
  }
};

/// sqrt(kappa^2 - (alpha Z)^2); exactly kappa when alpha == 0.
template <Real T> T gamma_exponent(const T &Z, const T &kappa, const T &alpha) {
  using std::sqrt;
  const T az = alpha * Z;
  if (!(az < kappa))
    throw InvalidSetup("gamma exponent: alpha*Z >= kappa");
  if (az == 0)
    return kappa;
  return sqrt((kappa - az) * (kappa + az));
}

/// Exponents gamma_l - 1 of the r_l power factors; zero for a dummy centre
/// (Z_l = 0) and in the nonrelativistic limit.
template <Real T> struct SingularExponents {
  T e1{};
  T e2{};
};

template <Real T> SingularExponents<T> singular_exponents(const PhysicalSetup<T> &s) {
  if (s.nonrelativistic_limit())
    return {};
  const T k = s.kappa(), a = s.alpha();
  // gamma - 1 = (kappa - 1) - (alpha Z)^2 / (kappa + gamma), without cancellation.
  auto one = [&](const T &Z) {
    if (!(Z > 0))
      return T(0);
    const T g = gamma_exponent(Z, k, a);
    return (k - 1) - (a * Z) * (a * Z) / (k + g);
  };
  return {one(s.Z1), one(s.Z2)};
}

} // namespace tcd::geometry
