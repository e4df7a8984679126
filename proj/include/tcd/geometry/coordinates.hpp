#pragma once

// Point quantities of the two-centre geometry. Nucleus 1 sits at
// z = -R/2 (eta = -1), nucleus 2 at z = +R/2 (eta = +1); with
// a = xi - 1, b = 1 + eta, c = 1 - eta every distance that can vanish is a
// product or sum of nonnegative terms, so nothing cancels near the nuclei.

#include "tcd/geometry/setup.hpp"
#include "tcd/geometry/transform.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace tcd::geometry {

/// (r1, r2) = ((xi+eta) R/2, (xi-eta) R/2)
template <Real T> std::pair<T, T> distances(const T &xi, const T &eta, const T &R) {
  if (!(xi >= 1) || !(eta >= -1 && eta <= 1))
    throw std::domain_error("distances: need xi >= 1 and |eta| <= 1");
  return {(xi + eta) * R / 2, (xi - eta) * R / 2};
}

/// -Z1/r1 - Z2/r2 (hartree).
template <Real T> T potential(const T &xi, const T &eta, const PhysicalSetup<T> &setup) {
  const auto [r1, r2] = distances(xi, eta, setup.R);
  if ((setup.Z1 != 0 && r1 == 0) || (setup.Z2 != 0 && r2 == 0))
    throw std::domain_error("potential evaluated at a charged nucleus");
  T v = 0;
  if (setup.Z1 != 0)
    v -= setup.Z1 / r1;
  if (setup.Z2 != 0)
    v -= setup.Z2 / r2;
  return v;
}

/// Everything the assembly needs at one (s,t) point.
template <Real T> struct PointGeometry {
  T s, t;
  T a, b, c;        ///< xi-1, 1+eta, 1-eta
  T xi, eta;
  T dxi_ds, deta_dt;
  T rho, z;
  T r1, r2;
  T V;              ///< potential energy
  T volume;         ///< 2 pi rho |d(rho,z)/d(s,t)|
  // Chain rule: d/drho = ds_drho d/ds + dt_drho d/dt, likewise for z.
  T ds_drho, dt_drho, ds_dz, dt_dz;
};

template <Real T>
PointGeometry<T> point_geometry(const T &s, const T &t, const PhysicalSetup<T> &setup,
                                const TransformParams<T> &tp) {
  using std::sqrt;
  PointGeometry<T> g;
  g.s = s;
  g.t = t;
  g.a = xi_minus_one(s, tp);
  g.b = one_plus_eta(t, tp);
  g.c = one_minus_eta(t, tp);
  g.xi = 1 + g.a;
  g.eta = (g.b - g.c) / 2;
  const auto jf = jacobian_factors(s, t, tp);
  g.dxi_ds = jf.dxi_ds;
  g.deta_dt = jf.deta_dt;
  const T h = setup.R / 2;
  const T xi2m1 = g.a * (2 + g.a);       // xi^2 - 1
  const T om_eta2 = g.b * g.c;           // 1 - eta^2
  const T u = sqrt(xi2m1 * om_eta2);
  const T diff = (g.a + g.b) * (g.a + g.c); // xi^2 - eta^2
  g.rho = h * u;
  g.z = h * g.xi * g.eta;
  g.r1 = h * (g.a + g.b);
  g.r2 = h * (g.a + g.c);
  g.V = 0;
  if (setup.Z1 != 0)
    g.V -= setup.Z1 / g.r1;
  if (setup.Z2 != 0)
    g.V -= setup.Z2 / g.r2;
  g.volume = 2 * pi<T>() * h * h * h * diff * g.dxi_ds * (-g.deta_dt);
  const T den = h * diff;
  g.ds_drho = g.xi * u / (den * g.dxi_ds);
  g.dt_drho = -g.eta * u / (den * g.deta_dt);
  g.ds_dz = g.eta * xi2m1 / (den * g.dxi_ds);
  g.dt_dz = g.xi * om_eta2 / (den * g.deta_dt);
  return g;
}

/// Global factors G_k = (rho/h)^|m_k| r1^(gamma1-1) r2^(gamma2-1) for the
/// four spinor components (m_1 = m_3 = jz-1/2, m_2 = m_4 = jz+1/2) and their
/// (s,t) gradients.
template <Real T> struct GlobalFactor {
  std::array<T, 4> value;
  std::array<std::array<T, 2>, 4> gradient;
};

template <Real T>
GlobalFactor<T> global_factor(const T &s, const T &t, const PhysicalSetup<T> &setup,
                              const TransformParams<T> &tp) {
  using std::pow;
  const auto g = point_geometry(s, t, setup, tp);
  const auto ex = singular_exponents(setup);
  const T h = setup.R / 2;
  const T G2 = pow(g.r1, ex.e1) * pow(g.r2, ex.e2);
  const T z1 = -h, z2 = h;
  const T dlog_drho = ex.e1 * g.rho / (g.r1 * g.r1) + ex.e2 * g.rho / (g.r2 * g.r2);
  const T dlog_dz = ex.e1 * (g.z - z1) / (g.r1 * g.r1) + ex.e2 * (g.z - z2) / (g.r2 * g.r2);
  // d(rho,z)/d(s,t) from the inverse of the chain-rule matrix.
  const T det = g.ds_drho * g.dt_dz - g.dt_drho * g.ds_dz;
  const T drho_ds = g.dt_dz / det, drho_dt = -g.ds_dz / det;
  const T dz_ds = -g.dt_drho / det, dz_dt = g.ds_drho / det;
  GlobalFactor<T> out;
  for (int k = 0; k < 4; ++k) {
    const int m = std::abs(k % 2 == 0 ? setup.m1() : setup.m2());
    const T val = pow(g.rho / h, m) * G2;
    const T dr = T(m) / g.rho + dlog_drho;
    out.value[k] = val;
    out.gradient[k] = {val * (dr * drho_ds + dlog_dz * dz_ds),
                       val * (dr * drho_dt + dlog_dz * dz_dt)};
  }
  return out;
}

} // namespace tcd::geometry
