#pragma once

// Generalized symmetric eigenpairs A x = lambda B x (B positive definite) by
// shifted inverse vector iteration on an L D L^T factor of A - sigma B.
// Excited states are reached by B-orthogonal deflation against the lower
// eigenvectors; the inertia of the shifted factor is used to place the
// shift and to confirm the rank of the state being iterated.
//
// Iterates are updated in residual-correction form,
//   x <- x - K^{-1} (A x - lambda B x),
// which equals (lambda - sigma) K^{-1} B x for an exact factor but has the
// exact eigenvector of (A, B) as fixed point even when K is only an
// approximation. Wide scalar types therefore factor in double
// (factor_scalar_t) and keep their full accuracy in A, B and the residual.

#include "tcd/errors.hpp"
#include "tcd/numerics/factorization.hpp"
#include "tcd/numerics/symmetric_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <vector>

namespace tcd::numerics {

template <Real T> struct Eigenpair {
  T value{};
  std::vector<T> vector; ///< B-normalized
  int iterations = 0;    ///< inverse-iteration sweeps
  T residual{};          ///< ||A x - value B x|| / ||A x||
  int factorizations = 0;
  T noise{};             ///< round-off level of the eigenvalue
};

template <Real T> struct EigenOptions {
  int max_sweeps = 200;
  /// Relative eigenvalue change between sweeps that counts as converged.
  T tolerance = 10 * ulp<T>();
  /// Required relative residual at exit.
  T residual_tolerance = 100 * sqrt_ulp();

  static T sqrt_ulp() {
    using std::sqrt;
    return sqrt(ulp<T>());
  }
};

/// Set of B-orthonormal vectors projected out of every iterate.
template <Real T> class Deflation {
public:
  void add(std::vector<T> v, const SymmetricMatrix<T> &B) {
    Bv_.push_back(B.multiply(v));
    v_.push_back(std::move(v));
  }
  std::size_t size() const { return v_.size(); }
  const std::vector<T> &vector(std::size_t i) const { return v_[i]; }

  /// z <- z - sum_i (v_i^T B z) v_i, applied twice.
  void project(std::span<T> z) const {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < v_.size(); ++i) {
        const T c = dot<T>(Bv_[i], z);
        for (std::size_t k = 0; k < z.size(); ++k)
          z[k] -= c * v_[i][k];
      }
  }

private:
  std::vector<std::vector<T>> v_;
  std::vector<std::vector<T>> Bv_;
};

namespace detail {

/// A - sigma B rounded to the factorization scalar.
template <Real T, Real F = factor_scalar_t<T>>
SymmetricMatrix<F> shifted(const SymmetricMatrix<T> &A, const SymmetricMatrix<T> &B,
                           const T &sigma) {
  if (!A.same_envelope(B))
    throw std::invalid_argument("shifted pencil: envelope mismatch");
  SymmetricMatrix<F> K(A.envelope());
  const auto a = A.raw(), b = B.raw();
  auto k = K.raw();
  for (std::size_t i = 0; i < k.size(); ++i)
    k[i] = static_cast<F>(a[i] - sigma * b[i]);
  return K;
}

template <Real T> std::vector<T> default_start(std::size_t n) {
  // Smooth, deterministic and not orthogonal to low modes.
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = T(1) + T(i % 7) / T(16);
  return x;
}

template <Real T> T norm2(std::span<const T> v) {
  using std::sqrt;
  return sqrt(dot(v, v));
}

/// Rayleigh data for a B-normalized iterate.
template <Real T> struct Iterate {
  std::vector<T> x, Ax, Bx, r;
  T lambda{};
  T residual{};
};

template <Real T>
Iterate<T> normalize(std::vector<T> z, const SymmetricMatrix<T> &A,
                     const SymmetricMatrix<T> &B) {
  using std::sqrt;
  Iterate<T> it;
  it.Bx = B.multiply(z);
  const T nb = sqrt(dot<T>(z, it.Bx));
  if (!(nb > T{0}) || !is_finite(nb))
    throw NumericalError("inverse iteration: iterate collapsed to zero");
  for (auto &v : z)
    v /= nb;
  for (auto &v : it.Bx)
    v /= nb;
  it.x = std::move(z);
  it.Ax = A.multiply(it.x);
  it.lambda = dot<T>(it.x, it.Ax) / dot<T>(it.x, it.Bx);
  it.r.resize(it.x.size());
  for (std::size_t k = 0; k < it.r.size(); ++k)
    it.r[k] = it.Ax[k] - it.lambda * it.Bx[k];
  const T na = norm2<T>(it.Ax);
  it.residual = na > T{0} ? norm2<T>(it.r) / na : norm2<T>(it.r);
  return it;
}

} // namespace detail

/// Factor of A - sigma B; on an exactly singular pivot the shift is nudged
/// downward and the factorization retried a few times.
template <Real T> struct ShiftedFactor {
  using factor_type = factor_scalar_t<T>;
  T sigma;
  LdltFactor<factor_type> factor;

  /// z <- K^{-1} z through the factor scalar.
  void solve_in_place(std::span<T> z) const {
    if constexpr (std::same_as<factor_type, T>) {
      factor.solve_in_place(z);
    } else {
      std::vector<factor_type> w(z.size());
      for (std::size_t i = 0; i < z.size(); ++i)
        w[i] = static_cast<factor_type>(z[i]);
      factor.solve_in_place(w);
      for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = T(w[i]);
    }
  }
};

/// Rounding unit of the factorization, which bounds how finely the inertia
/// can resolve eigenvalues.
template <Real T> T factor_ulp() { return T(ulp<factor_scalar_t<T>>()); }

template <Real T>
ShiftedFactor<T> factor_shifted(const SymmetricMatrix<T> &A,
                                const SymmetricMatrix<T> &B, T sigma) {
  using std::abs;
  using std::sqrt;
  using F = factor_scalar_t<T>;
  T nudge = sqrt(factor_ulp<T>()) * (1 + abs(sigma));
  for (int attempt = 0;; ++attempt) {
    try {
      return {sigma, LdltFactor<F>(detail::shifted(A, B, sigma))};
    } catch (const SingularMatrix &) {
      if (attempt == 4)
        throw;
      sigma -= nudge;
      nudge *= 16;
    }
  }
}

namespace detail {

/// Round-off level of the Rayleigh quotient of a B-normalized iterate:
/// ulp * (|x|^T |A| |x| + |lambda| |x|^T |B| |x|).
template <Real T>
T rayleigh_noise(const SymmetricMatrix<T> &A, const SymmetricMatrix<T> &B,
                 const Iterate<T> &it) {
  using std::abs;
  return ulp<T>() * (A.abs_quadratic(it.x) + abs(it.lambda) * B.abs_quadratic(it.x));
}

/// Sweeps x <- x - K^{-1} r (projected) until the eigenvalue change is below
/// 10 ulp, or below the round-off level of the Rayleigh quotient itself.
/// `refresh` may replace the factor between sweeps.
template <Real T, class Refresh>
Eigenpair<T> sweep(const SymmetricMatrix<T> &A, const SymmetricMatrix<T> &B,
                   ShiftedFactor<T> &K, std::vector<T> start, const Deflation<T> &deflation,
                   const EigenOptions<T> &opt, Refresh &&refresh, const char *label) {
  using std::abs;
  if (start.size() != A.order())
    start = default_start<T>(A.order());
  deflation.project(start);
  auto it = normalize(std::move(start), A, B);
  T change{0}, prev_change{0};
  for (int n = 1; n <= opt.max_sweeps; ++n) {
    std::vector<T> z = it.r;
    K.solve_in_place(z);
    for (std::size_t k = 0; k < z.size(); ++k)
      z[k] = it.x[k] - z[k];
    deflation.project(z);
    auto next = normalize(std::move(z), A, B);
    prev_change = change;
    change = abs(next.lambda - it.lambda);
    it = std::move(next);
#ifdef TCD_TRACE_EIGEN
    std::fprintf(stderr, "sweep %d sigma %.17g lambda %.17g change %.3g res %.3g\n", n,
                 double(K.sigma), double(it.lambda), double(change), double(it.residual));
#endif
    // Remaining error of a linearly converging sequence.
    T remaining = change;
    if (n > 1 && change < prev_change)
      remaining = change * prev_change / (prev_change - change);
    if (it.residual <= opt.residual_tolerance) {
      const T scale = abs(it.lambda);
      bool done = remaining <= opt.tolerance * scale;
      T noise{0};
      if (!done && remaining <= 1e6 * ulp<T>() * (1 + scale)) {
        noise = rayleigh_noise(A, B, it);
        done = remaining <= noise;
      }
      if (done) {
        if (noise == T{0})
          noise = rayleigh_noise(A, B, it);
        Eigenpair<T> out{it.lambda, std::move(it.x), n, it.residual, 0};
        out.noise = noise;
        return out;
      }
    }
    refresh(K, it.lambda, change, prev_change);
  }
  throw NoConvergence(std::string(label) + " did not converge in " +
                          std::to_string(opt.max_sweeps) + " sweeps",
                      static_cast<double>(it.residual));
}

} // namespace detail

/// Inverse iteration with a fixed factor. Converges to the eigenpair of the
/// deflated pencil whose eigenvalue is nearest the factor's shift.
template <Real T>
Eigenpair<T> inverse_iteration(const SymmetricMatrix<T> &A, const SymmetricMatrix<T> &B,
                               ShiftedFactor<T> &K, std::vector<T> start,
                               const Deflation<T> &deflation, const EigenOptions<T> &opt) {
  return detail::sweep(A, B, K, std::move(start), deflation, opt,
                       [](auto &, const T &, const T &, const T &) {}, "inverse iteration");
}

/// Eigenpair of A x = lambda B x nearest `shift`, starting from `start`
/// (empty for a default start vector).
template <Real T>
Eigenpair<T> lowest_eigenpair(const SymmetricMatrix<T> &A, const SymmetricMatrix<T> &B,
                              const T &shift, std::vector<T> start = {},
                              const EigenOptions<T> &opt = {}) {
  if (A.order() != B.order())
    throw std::invalid_argument("lowest_eigenpair: order mismatch");
  auto K = factor_shifted(A, B, shift);
  auto pair = inverse_iteration(A, B, K, std::move(start), Deflation<T>{}, opt);
  pair.factorizations = 1;
  return pair;
}

/// Number of eigenvalues of (A, B) strictly below sigma.
template <Real T>
std::size_t count_below(const SymmetricMatrix<T> &A, const SymmetricMatrix<T> &B,
                        const T &sigma) {
  return factor_shifted(A, B, sigma).factor.negative_pivots();
}

/// The eigenpair of rank `rank` (1 = lowest) given the B-orthonormal
/// eigenvectors of all lower ranks in `lower`. The shift is first placed so
/// that exactly rank-1 eigenvalues lie below it, then moved up toward the
/// target, under the same inertia guard, while convergence is slow.
template <Real T>
Eigenpair<T> ranked_eigenpair(const SymmetricMatrix<T> &A, const SymmetricMatrix<T> &B,
                              std::size_t rank, const Deflation<T> &lower, T shift_guess,
                              std::vector<T> start = {}, const EigenOptions<T> &opt = {}) {
  using std::abs;
  using std::max;
  if (A.order() != B.order())
    throw std::invalid_argument("ranked_eigenpair: order mismatch");
  if (rank < 1 || rank > A.order())
    throw std::invalid_argument("ranked_eigenpair: rank out of range");
  if (lower.size() != rank - 1)
    throw std::invalid_argument("ranked_eigenpair: need rank-1 lower states");
  const std::size_t want = rank - 1;
  int factorizations = 0;

  // Bracket a shift with inertia exactly `want`.
  std::optional<T> above;
  auto K = factor_shifted(A, B, shift_guess);
  ++factorizations;
  {
    T step = T(1) / 1000 * (1 + abs(shift_guess));
    std::optional<T> lo, hi; // lo: too few below, hi: too many below
    for (int tries = 0; K.factor.negative_pivots() != want; ++tries) {
      if (tries > 80)
        throw NumericalError("could not place shift below eigenvalue of rank " +
                             std::to_string(rank));
      if (K.factor.negative_pivots() > want)
        hi = K.sigma;
      else
        lo = K.sigma;
      if (lo && hi && abs(*hi - *lo) <= 64 * factor_ulp<T>() * (1 + abs(*hi))) {
        // Cluster narrower than round-off: iterate from just below it.
        K = factor_shifted(A, B, *lo);
        ++factorizations;
        break;
      }
      T next;
      if (lo && hi)
        next = (*lo + *hi) / 2;
      else if (hi)
        next = *hi - step;
      else
        next = *lo + step;
      step *= 2;
      K = factor_shifted(A, B, next);
      ++factorizations;
    }
    above = hi;
  }

  // Shifts known to have more than `want` eigenvalues below them bound the
  // target from above; a rejected move tightens the bound and the next one
  // bisects toward it, so slow convergence always makes progress.
  int since_refresh = 0;
  auto refresh = [&](ShiftedFactor<T> &F, const T &lambda, const T &change,
                     const T &prev_change) {
    ++since_refresh;
    if (since_refresh < 2 || !(prev_change > T{0}) || change <= prev_change / 20 ||
        factorizations >= 80)
      return;
    const T ratio = change / prev_change;
    const T remaining = ratio < 1 ? change * ratio / (1 - ratio) : change;
    const T margin = max(T(10 * remaining), T(1000 * factor_ulp<T>() * (1 + abs(lambda))));
    const T ceiling = above ? std::min(lambda, *above) : lambda;
    T candidate = lambda - margin;
    if (above && !(candidate < *above))
      candidate = (F.sigma + *above) / 2;
    if (!(candidate > F.sigma))
      candidate = (F.sigma + ceiling) / 2;
    if (!(candidate > F.sigma) ||
        abs(ceiling - F.sigma) <= 64 * factor_ulp<T>() * (1 + abs(lambda)))
      return;
    auto trial = factor_shifted(A, B, candidate);
    ++factorizations;
    if (trial.factor.negative_pivots() == want) {
      F = std::move(trial);
      since_refresh = 0;
    } else if (trial.factor.negative_pivots() > want) {
      above = candidate;
      since_refresh = 1; // retry on the next sweep
    }
  };
  // A converged pair is accepted only if no eigenvalue was skipped below it;
  // inverse iteration cannot tell apart states much closer than the distance
  // to the shift. Otherwise the shift is bisected close to the missed state.
  for (int attempt = 0;; ++attempt) {
    auto pair = detail::sweep(A, B, K, start, lower, opt, refresh, "inverse iteration");
    const T lambda = pair.value;
    const T probe = lambda - 10000 * factor_ulp<T>() * (1 + abs(lambda));
    if (!(probe > K.sigma)) {
      pair.factorizations = factorizations;
      return pair;
    }
    auto check = factor_shifted(A, B, probe);
    ++factorizations;
    if (check.factor.negative_pivots() <= want || attempt == 3) {
      pair.factorizations = factorizations;
      return pair;
    }
    T lo = K.sigma, hi = probe;
    while (hi - lo > (lambda - hi) / 10) {
      const T mid = (lo + hi) / 2;
      auto trial = factor_shifted(A, B, mid);
      ++factorizations;
      if (trial.factor.negative_pivots() == want) {
        lo = mid;
        K = std::move(trial);
      } else {
        hi = mid;
      }
    }
    above = hi;
    since_refresh = 0;
    start.clear();
  }
}

/// A lower bound guess for the spectrum: min_i A_ii / B_ii is an upper
/// bound on the lowest eigenvalue, which is where the inertia search starts.
template <Real T>
T diagonal_estimate(const SymmetricMatrix<T> &A, const SymmetricMatrix<T> &B) {
  T best = A.diagonal(0) / B.diagonal(0);
  for (std::size_t i = 1; i < A.order(); ++i) {
    const T r = A.diagonal(i) / B.diagonal(i);
    if (r < best)
      best = r;
  }
  return best;
}

/// Eigenpairs of ranks 1..k, each B-orthonormal to all lower ones.
template <Real T>
std::vector<Eigenpair<T>> lowest_eigenpairs(const SymmetricMatrix<T> &A,
                                            const SymmetricMatrix<T> &B,
                                            std::size_t k,
                                            const EigenOptions<T> &opt = {}) {
  using std::abs;
  if (k < 1 || k > A.order())
    throw std::invalid_argument("lowest_eigenpairs: k out of range");
  std::vector<Eigenpair<T>> pairs;
  Deflation<T> lower;
  for (std::size_t j = 1; j <= k; ++j) {
    T guess;
    if (j == 1)
      guess = diagonal_estimate(A, B);
    else
      guess = pairs.back().value +
              64 * factor_ulp<T>() * (1 + abs(pairs.back().value));
    auto pair = ranked_eigenpair(A, B, j, lower, guess, {}, opt);
    lower.add(pair.vector, B);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

/// The k-th smallest generalized eigenpair (1-based).
template <Real T>
Eigenpair<T> kth_eigenpair(const SymmetricMatrix<T> &A,
                           const SymmetricMatrix<T> &B, std::size_t k,
                           const EigenOptions<T> &opt = {}) {
  auto pairs = lowest_eigenpairs(A, B, k, opt);
  return std::move(pairs.back());
}

} // namespace tcd::numerics
