#pragma once

// Axially symmetric reduction of the large-component quadratic form.
//
// With phi_+ = (f e^{i m1 phi}, i g e^{i m2 phi}), m1 = jz - 1/2, m2 = jz + 1/2,
// the Pauli gradient in cylindrical coordinates gives
//
//   |sigma.p phi_+|^2 = (d_z f + (d_rho + m2/rho) g)^2
//                     + ((d_rho - m1/rho) f - d_z g)^2  =: Q(f, g),
//
// and the eigenvalue-dependent weak form of the reduced Dirac equation reads
//
//   int Q / (2 + alpha^2 (eps - V)) dV + int V (f^2 + g^2) dV = eps int (f^2 + g^2) dV.
//
// Both components carry global factors, f = u^|m1| G2 F, g = u^|m2| G2 G with
// u = rho/(R/2) and G2 = r1^(gamma1 - 1) r2^(gamma2 - 1); the rho powers are
// differentiated analytically so that only regular terms remain, e.g.
// (d_rho - m1/rho)(rho^|m1| h) = rho^|m1| (d_rho h + (|m1| - m1) h / rho).

#include "tcd/geometry/coordinates.hpp"

#include <cmath>
#include <cstdlib>

namespace tcd::assembly {

enum class Mode { relativistic, nonrelativistic };

inline const char *to_string(Mode m) {
  return m == Mode::relativistic ? "relativistic" : "nonrelativistic";
}

template <Real T> struct ReducedOperator {
  geometry::PhysicalSetup<T> setup;
  geometry::TransformParams<T> tp;
  int m1 = 0, m2 = 1;
  int abs_m1 = 0, abs_m2 = 1;
  T alpha2{};                            ///< alpha^2 (0 in the scalar mode)
  geometry::SingularExponents<T> exps;   ///< gamma_l - 1

  /// Everything the element integrator needs at one point.
  struct Point {
    geometry::PointGeometry<T> geo;
    T Gf, Gg;           ///< global factors of f and g
    T L_rho, L_z;       ///< d log G2 / d rho, d log G2 / d z
    T cf, cg;           ///< (|m1|-m1)/rho and (|m2|+m2)/rho
  };

  Point at(const T &s, const T &t) const {
    using std::pow;
    Point p;
    p.geo = geometry::point_geometry(s, t, setup, tp);
    const auto &g = p.geo;
    const T h = setup.R / 2;
    const T u = g.rho / h;
    T G2 = 1;
    p.L_rho = 0;
    p.L_z = 0;
    if (exps.e1 != 0) {
      G2 *= pow(g.r1, exps.e1);
      const T r2 = g.r1 * g.r1;
      p.L_rho += exps.e1 * g.rho / r2;
      p.L_z += exps.e1 * (g.z + h) / r2;
    }
    if (exps.e2 != 0) {
      G2 *= pow(g.r2, exps.e2);
      const T r2 = g.r2 * g.r2;
      p.L_rho += exps.e2 * g.rho / r2;
      p.L_z += exps.e2 * (g.z - h) / r2;
    }
    p.Gf = pow(u, abs_m1) * G2;
    p.Gg = pow(u, abs_m2) * G2;
    p.cf = T(abs_m1 - m1) / g.rho;
    p.cg = T(abs_m2 + m2) / g.rho;
    return p;
  }
};

/// The reduced operator for a setup. In the scalar nonrelativistic mode
/// (or for c >= 1e15) the r-power factors are dropped.
template <Real T>
ReducedOperator<T> derive_reduced_form(const geometry::PhysicalSetup<T> &setup,
                                       const geometry::TransformParams<T> &tp,
                                       Mode mode = Mode::relativistic) {
  setup.validate();
  ReducedOperator<T> op;
  op.setup = setup;
  op.tp = tp;
  op.m1 = setup.m1();
  op.m2 = setup.m2();
  op.abs_m1 = std::abs(op.m1);
  op.abs_m2 = std::abs(op.m2);
  if (mode == Mode::relativistic) {
    const T a = setup.alpha();
    op.alpha2 = a * a;
    op.exps = geometry::singular_exponents(setup);
  }
  return op;
}

} // namespace tcd::assembly
