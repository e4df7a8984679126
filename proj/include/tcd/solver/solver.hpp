#pragma once

// The nonlinear minmax iteration on one grid and its continuation over a
// ladder of grids.
//
// On a grid the denominators are frozen at eps0 and the fixed point of
//   eps -> eigenvalue of (M'(eps - eps0), S)
// is found by successive linear eigenproblems. The map contracts by a factor
// of order alpha^2, so after a few steps consecutive values differ only by
// the round-off of the Rayleigh quotient; the iteration stops when the change
// is below eps_stability or below a few times that round-off level.

#include "tcd/assembly/assemble.hpp"
#include "tcd/numerics/eigensolver.hpp"
#include "tcd/solver/extrapolation.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tcd::solver {

using assembly::AssembledSystem;
using assembly::Mode;
using numerics::SymmetricMatrix;

template <Real T> T default_stability() {
  if constexpr (std::numeric_limits<T>::digits <= 53)
    return T(1e-15);
  else if constexpr (std::numeric_limits<T>::digits <= 64)
    return T(1e-18);
  else
    return parse<T>("1e-27");
}

template <Real T> struct IterationPolicy {
  int k_max = 4;
  int j_max = 7;
  T eps_stability = default_stability<T>();

  void validate(Mode mode) const {
    if (mode == Mode::relativistic && k_max < 1)
      throw InvalidSetup("k_max must be >= 1 in relativistic mode");
    if (j_max < 1)
      throw InvalidSetup("j_max must be >= 1");
    if (!(eps_stability > 0))
      throw InvalidSetup("eps_stability must be > 0");
  }
};

template <Real T> struct EigenSolution {
  T epsilon{};
  std::vector<T> coefficients;
  int iterations_used = 0;
  T final_delta{};
  T noise{};               ///< round-off level of the final eigenvalue
  bool converged = false;  ///< false when j_max was reached
  int refreshes = 0;       ///< eps0 re-freezes
  std::vector<T> trace;    ///< eigenvalue after every iteration
};

/// Eigenpair of rank `state_index` of (M, S); lower ranks are computed and
/// deflated in order. `start` seeds the target state only.
template <Real T>
numerics::Eigenpair<T> ranked_state(const SymmetricMatrix<T> &M, const SymmetricMatrix<T> &S,
                                    int state_index, const T &guess,
                                    std::vector<T> start = {}) {
  using std::abs;
  numerics::Deflation<T> lower;
  T g = state_index == 1 ? guess : numerics::diagonal_estimate(M, S);
  for (int j = 1; j < state_index; ++j) {
    auto p = numerics::ranked_eigenpair(M, S, std::size_t(j), lower, g);
    g = p.value + 64 * numerics::factor_ulp<T>() * (1 + abs(p.value));
    lower.add(std::move(p.vector), S);
  }
  return numerics::ranked_eigenpair(M, S, std::size_t(state_index), lower, g, std::move(start));
}

/// Re-assembles the system with denominators frozen at a new eps0.
template <Real T> using Reassembler = std::function<AssembledSystem<T>(const T &)>;

/// Fixed point of the minmax iteration on one grid. In the scalar
/// nonrelativistic mode the problem is linear and one solve suffices. When
/// the shift leaves the expansion radius the denominators are re-frozen at
/// the current estimate once (if `reassemble` is given), then it is an error.
template <Real T>
EigenSolution<T> solve_on_grid(AssembledSystem<T> &sys, const IterationPolicy<T> &policy,
                               const T &start_eps, int state_index = 1,
                               const Reassembler<T> &reassemble = {},
                               std::vector<T> start = {}) {
  using std::abs;
  using std::max;
  policy.validate(sys.mode);
  if (state_index < 1)
    throw InvalidSetup("state_index must be >= 1");
  if (!is_finite(start_eps))
    throw InvalidSetup("start energy must be finite");

  EigenSolution<T> sol;
  const T margin = T(1) / 64 * (1 + abs(start_eps));
  if (sys.mode == Mode::nonrelativistic) {
    const auto M = assembly::effective_matrix(sys, T{0});
    auto p = ranked_state(M, sys.S, state_index, T(start_eps - margin), std::move(start));
    sol.epsilon = p.value;
    sol.coefficients = std::move(p.vector);
    sol.iterations_used = 1;
    sol.noise = p.noise;
    sol.converged = true;
    sol.trace.push_back(p.value);
    return sol;
  }

  T eps = start_eps;
  T prev_noise{0};
  for (int j = 1; j <= policy.j_max; ++j) {
    SymmetricMatrix<T> M;
    try {
      M = assembly::effective_matrix(sys, T(eps - sys.epsilon0));
    } catch (const ExpansionOutOfRadius &) {
      if (!reassemble || sol.refreshes > 0)
        throw;
      sys = reassemble(eps);
      ++sol.refreshes;
      M = assembly::effective_matrix(sys, T(eps - sys.epsilon0));
    }
    auto p = ranked_state(M, sys.S, state_index, T(eps - margin), std::move(start));
    const T delta = p.value - eps;
    sol.trace.push_back(p.value);
    sol.iterations_used = j;
    sol.final_delta = delta;
    sol.noise = p.noise;
    eps = p.value;
    start = p.vector;
    sol.coefficients = std::move(p.vector);
    // The first solve measures the distance to the start value, not a
    // fixed-point change.
    if (j > 1 && abs(delta) <= max(policy.eps_stability, T(4 * (sol.noise + prev_noise)))) {
      sol.converged = true;
      break;
    }
    prev_noise = sol.noise;
  }
  sol.epsilon = eps;
  return sol;
}

/// Everything needed to assemble one grid of a ladder.
template <Real T> struct GridProblem {
  mesh::Mesh<T> mesh;
  assembly::ReducedOperator<T> op;
  mesh::ShapeBasis<T> basis;
  numerics::QuadratureRule<T> rule;
  Mode mode;
  int k_max;

  GridProblem(const mesh::GridSpec<T> &spec, const geometry::PhysicalSetup<T> &setup, Mode m,
              int kmax, int quadrature_degree = 0)
      : mesh(mesh::build_mesh(spec)), op(assembly::derive_reduced_form(setup, spec.tp, m)),
        basis(spec.p),
        rule(numerics::gauss_triangle_rule<T>(
            quadrature_degree > 0 ? quadrature_degree
                                  : assembly::default_quadrature_degree(spec.p))),
        mode(m), k_max(kmax) {}

  AssembledSystem<T> assemble(const T &epsilon0) const {
    return assembly::assemble(mesh, op, basis, rule, epsilon0, k_max, mode);
  }
};

template <Real T> struct LadderEntry {
  std::size_t N = 0;
  int n_div = 0;
  T energy{};
  int iterations = 0;
  bool converged = true;
  T noise{};
};

template <Real T> struct ConvergenceSeries {
  Mode mode = Mode::relativistic;
  std::vector<LadderEntry<T>> entries;
  Extrapolation<T> extrapolation;

  std::vector<SeriesEntry<T>> points() const {
    std::vector<SeriesEntry<T>> out;
    for (const auto &e : entries)
      out.push_back({e.N, e.energy});
    return out;
  }
  T extrapolated() const { return extrapolation.value; }
  T uncertainty() const { return extrapolation.uncertainty; }
  double observed_order() const { return extrapolation.observed_order; }
};

/// Nonrelativistic estimate used to freeze the denominators on a first grid.
template <Real T>
T scalar_estimate(const mesh::GridSpec<T> &spec, const geometry::PhysicalSetup<T> &setup,
                  int state_index, const T &guess) {
  GridProblem<T> g(spec, setup, Mode::nonrelativistic, 0);
  auto sys = g.assemble(T{0});
  IterationPolicy<T> pol;
  return solve_on_grid(sys, pol, guess, state_index).epsilon;
}

/// Initial guess for the lowest energy: the united-atom hydrogenic level
/// -(Z1+Z2)^2/2 lies below every bound state of the pair.
template <Real T> T united_atom_bound(const geometry::PhysicalSetup<T> &s) {
  const T Z = s.Z1 + s.Z2;
  return -Z * Z / 2;
}

/// Solves every grid of the ladder in order, warm-starting each from the
/// previous energy; the first relativistic grid freezes its denominators at
/// the scalar nonrelativistic value of the same grid.
template <Real T>
ConvergenceSeries<T> run_ladder(const geometry::PhysicalSetup<T> &setup,
                                const std::vector<mesh::GridSpec<T>> &ladder,
                                const IterationPolicy<T> &policy, Mode mode,
                                std::optional<T> first_eps0 = std::nullopt) {
  if (ladder.empty())
    throw InvalidSetup("grid ladder is empty");
  setup.validate();
  policy.validate(mode);
  ConvergenceSeries<T> series;
  series.mode = mode;
  std::optional<T> eps = first_eps0;
  for (const auto &spec : ladder) {
    if (!series.entries.empty() && spec.node_count() <= series.entries.back().N)
      throw InvalidSetup("grid ladder must have increasing N");
    const int kmax = mode == Mode::relativistic ? policy.k_max : 0;
    GridProblem<T> g(spec, setup, mode, kmax);
    if (!eps)
      eps = mode == Mode::relativistic
                ? scalar_estimate(spec, setup, setup.state_index, united_atom_bound(setup))
                : united_atom_bound(setup);
    auto sys = g.assemble(*eps);
    Reassembler<T> re = [&g](const T &e0) { return g.assemble(e0); };
    const auto sol = solve_on_grid(sys, policy, *eps, setup.state_index, re);
    series.entries.push_back({spec.node_count(), spec.n_div, sol.epsilon, sol.iterations_used,
                              sol.converged, sol.noise});
    eps = sol.epsilon;
  }
  series.extrapolation = extrapolate(series.points());
  return series;
}

template <Real T> struct ShiftResult {
  ConvergenceSeries<T> relativistic;
  ConvergenceSeries<T> nonrelativistic;
  std::vector<SeriesEntry<T>> shift;  ///< E_rel(N) - E_nrel(N)
  Extrapolation<T> shift_extrapolation;
};

/// Both modes on identical grids; the shift is extrapolated from its own
/// per-grid series so that the common discretization error cancels. A
/// nonrelativistic series computed earlier on the same ladder (it does not
/// depend on c) may be passed in to skip that half.
template <Real T>
ShiftResult<T> relativistic_shift(const geometry::PhysicalSetup<T> &setup,
                                  const std::vector<mesh::GridSpec<T>> &ladder,
                                  const IterationPolicy<T> &policy,
                                  const ConvergenceSeries<T> *nonrelativistic = nullptr) {
  ShiftResult<T> out;
  if (nonrelativistic) {
    if (nonrelativistic->entries.size() != ladder.size())
      throw InvalidSetup("nonrelativistic series does not match the ladder");
    for (std::size_t i = 0; i < ladder.size(); ++i)
      if (nonrelativistic->entries[i].N != ladder[i].node_count())
        throw InvalidSetup("nonrelativistic series does not match the ladder");
    out.nonrelativistic = *nonrelativistic;
  } else {
    out.nonrelativistic = run_ladder(setup, ladder, policy, Mode::nonrelativistic);
  }
  out.relativistic = run_ladder(setup, ladder, policy, Mode::relativistic,
                                std::optional<T>(out.nonrelativistic.entries.front().energy));
  for (std::size_t i = 0; i < ladder.size(); ++i)
    out.shift.push_back({out.relativistic.entries[i].N,
                         out.relativistic.entries[i].energy -
                             out.nonrelativistic.entries[i].energy});
  out.shift_extrapolation = extrapolate(out.shift);
  return out;
}

} // namespace tcd::solver
