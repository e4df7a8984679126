#pragma once

// Closed-form Dirac levels of a point nucleus and the FEM comparison against
// them with a dummy second centre.

#include "tcd/solver/solver.hpp"

#include <cmath>

namespace tcd::analysis {

template <Real T> struct HydrogenLevel {
  T energy{}; ///< a.u., rest mass excluded
  T shift{};  ///< energy + Z^2/(2 n^2)
};

/// Dirac level (n, j) of charge Z. Both values are evaluated without
/// subtracting nearly equal quantities, so the shift keeps full relative
/// precision as alpha -> 0 (where it vanishes like -alpha^2 Z^4 / 8n^3...).
template <Real T> HydrogenLevel<T> hydrogen_exact(const T &Z, const T &alpha, int n, const T &j) {
  using std::sqrt;
  const T kappa = j + T(1) / 2;
  if (!(Z > 0) || n < 1 || !(kappa >= 1) || !(kappa <= n))
    throw InvalidSetup("hydrogen_exact: need Z > 0 and 1/2 <= j <= n - 1/2");
  const T za = Z * alpha;
  if (!(za < kappa))
    throw InvalidSetup("hydrogen_exact: supercritical, alpha*Z >= j + 1/2");
  const T gamma = sqrt((kappa - za) * (kappa + za));
  const T delta = za * za / (kappa + gamma); // kappa - gamma
  const T nn(n);
  const T m = nn - delta;                    // n_r + gamma
  const T x2 = za * za / (m * m);
  const T s = sqrt(1 + x2);
  // c^2 (1/s - 1) = -Z^2 / (m^2 s (1 + s))
  HydrogenLevel<T> out;
  out.energy = -Z * Z / (m * m * s * (1 + s));
  // m^2 s(1+s) - 2n^2 = 2 delta (delta - 2n) + za^2 (s + 2) / (s + 1)
  const T gap = 2 * delta * (delta - 2 * nn) + za * za * (s + 2) / (s + 1);
  out.shift = Z * Z * gap / (2 * nn * nn * m * m * s * (1 + s));
  return out;
}

template <Real T> struct HydrogenicReport {
  T Z{};
  HydrogenLevel<T> exact;
  solver::ShiftResult<T> fem;

  /// Extrapolated FEM shift minus the exact one.
  T shift_error() const { return fem.shift_extrapolation.value - exact.shift; }
  /// Densest-grid FEM shift minus the exact one.
  T last_grid_shift_error() const { return fem.shift.back().energy - exact.shift; }
  T nonrelativistic_error() const {
    return fem.nonrelativistic.extrapolated() + Z * Z / 2;
  }
};

/// Ground state (1s1/2) of a single nucleus, modelled as the pair (Z, 0) so
/// the full two-centre machinery is exercised.
template <Real T>
HydrogenicReport<T> validate_hydrogenic(const geometry::PhysicalSetup<T> &setup,
                                        const std::vector<mesh::GridSpec<T>> &ladder,
                                        const solver::IterationPolicy<T> &policy) {
  if (setup.Z2 != 0)
    throw InvalidSetup("validate_hydrogenic: the second centre must be a dummy (Z2 = 0)");
  if (setup.twice_jz != 1 || setup.state_index != 1)
    throw InvalidSetup("validate_hydrogenic: only the jz = 1/2 ground state has a closed form here");
  setup.validate();
  HydrogenicReport<T> r;
  r.Z = setup.Z1;
  r.exact = hydrogen_exact(setup.Z1, setup.alpha(), 1, T(1) / 2);
  r.fem = solver::relativistic_shift(setup, ladder, policy);
  return r;
}

} // namespace tcd::analysis
