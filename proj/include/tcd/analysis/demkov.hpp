#pragma once

// The Demkov system Z1=3, Z2=2, R=sqrt(15): one excited state of the
// nonrelativistic two-centre problem is known exactly, E = -1/2.
//
// The state is the 21st of the jz=1/2 ladder. That ladder holds the sigma
// (m=0) and pi (m=1) states together, so it is computed with the
// two-component operator at c = 1e15, where both components obey the
// Schroedinger equation; the scalar mode only holds the sigma states.

#include "tcd/solver/solver.hpp"

#include <cmath>
#include <vector>

namespace tcd::analysis {

template <Real T> struct DemkovGrid {
  std::size_t N = 0;
  int n_div = 0;
  T ground{};
  T energy{};        ///< eigenvalue of rank `rank`
  T error{};         ///< energy + 1/2
  bool in_window = false;
};

template <Real T> struct DemkovResult {
  int rank = 21;
  T window_lo = T(-0.6), window_hi = T(-0.4);
  std::vector<DemkovGrid<T>> grids;
  solver::Extrapolation<T> extrapolation;

  /// The rank cross-check: the ranked state lies in the window on every grid.
  bool located() const {
    for (const auto &g : grids)
      if (!g.in_window)
        return false;
    return !grids.empty();
  }
  bool errors_decrease() const {
    for (std::size_t i = 1; i < grids.size(); ++i)
      if (!(grids[i].error < grids[i - 1].error) || !(grids[i].error > 0))
        return false;
    return !grids.empty() && grids.front().error > 0;
  }
};

template <Real T> geometry::PhysicalSetup<T> demkov_setup() {
  using std::sqrt;
  geometry::PhysicalSetup<T> s;
  s.Z1 = 3;
  s.Z2 = 2;
  s.R = sqrt(T(15));
  s.alpha_inverse = T(geometry::nonrelativistic_c);
  s.twice_jz = 1;
  s.state_index = 21;
  return s;
}

/// Runs the fixed scenario (nu=4, D_max=50, p=10) on the grids n_list.
template <Real T> DemkovResult<T> demkov_case(std::vector<int> n_list = {2, 4, 6, 8}) {
  const auto setup = demkov_setup<T>();
  setup.validate();
  const auto tp = geometry::TransformParams<T>::make(4);
  const auto dom = geometry::DomainSpec<T>::make(T(50), setup.R, tp);
  const auto ladder = mesh::grid_ladder(10, tp, dom, std::move(n_list));

  DemkovResult<T> out;
  out.rank = setup.state_index;
  std::vector<solver::SeriesEntry<T>> series;
  for (const auto &spec : ladder) {
    // In the limit the denominators are 2c^2 and M does not depend on eps.
    solver::GridProblem<T> g(spec, setup, assembly::Mode::relativistic, 1);
    const auto sys = g.assemble(T(-0.5));
    const auto M = assembly::effective_matrix(sys, T{0});
    const auto pairs = numerics::lowest_eigenpairs(M, sys.S, std::size_t(out.rank));
    DemkovGrid<T> row;
    row.N = spec.node_count();
    row.n_div = spec.n_div;
    row.ground = pairs.front().value;
    row.energy = pairs.back().value;
    row.error = row.energy + T(1) / 2;
    row.in_window = row.energy >= out.window_lo && row.energy <= out.window_hi;
    if (!row.in_window)
      throw NumericalError("Demkov state of rank " + std::to_string(out.rank) +
                           " at N=" + std::to_string(row.N) + " lies outside [" +
                           format(out.window_lo) + ", " + format(out.window_hi) +
                           "]: " + format(row.energy));
    out.grids.push_back(row);
    series.push_back({row.N, row.energy});
  }
  out.extrapolation = solver::extrapolate(series);
  return out;
}

} // namespace tcd::analysis
