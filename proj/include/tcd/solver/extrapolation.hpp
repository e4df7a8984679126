#pragma once

// Extrapolation of a grid sequence to infinite density with the power law
// E(N) = E_inf + a N^(-q) closed through the last three entries. The
// uncertainty is |E_inf - E(N_max)|.

#include "tcd/numerics/scalar.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcd::solver {

template <Real T> struct SeriesEntry {
  std::size_t N = 0; ///< grid points
  T energy{};
};

template <Real T> struct Extrapolation {
  T value{};
  T uncertainty{};
  double observed_order = std::numeric_limits<double>::quiet_NaN();
  /// Set when the tail is not monotone or has no power-law closure; value
  /// is then the last entry and uncertainty the last difference.
  bool irregular = false;
  std::string note;
};

namespace detail {

/// ((N2/N1)^q - 1) / (1 - (N2/N3)^q): the ratio (E1-E2)/(E2-E3) of the model.
inline double difference_ratio(double q, double N1, double N2, double N3) {
  const double up = std::expm1(q * std::log(N2 / N1));
  const double down = -std::expm1(q * std::log(N2 / N3));
  return up / down;
}

} // namespace detail

/// Three-point power-law closure. Fewer than three entries: one entry is
/// its own limit (uncertainty 0); two give the last value with the last
/// difference as uncertainty, flagged irregular.
template <Real T> Extrapolation<T> extrapolate(const std::vector<SeriesEntry<T>> &entries) {
  using std::abs;
  Extrapolation<T> out;
  if (entries.empty())
    throw std::invalid_argument("extrapolate: no entries");
  const auto &last = entries.back();
  if (entries.size() == 1) {
    out.value = last.energy;
    out.uncertainty = 0;
    out.note = "single grid";
    return out;
  }
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].N <= entries[i - 1].N)
      throw std::invalid_argument("extrapolate: grid sizes must increase");
  auto fallback = [&](std::string why) {
    const auto &prev = entries[entries.size() - 2];
    out.value = last.energy;
    out.uncertainty = abs(last.energy - prev.energy);
    out.observed_order = std::numeric_limits<double>::quiet_NaN();
    out.irregular = true;
    out.note = "irregular convergence: " + std::move(why);
    return out;
  };
  if (entries.size() == 2)
    return fallback("two grids only");

  const auto &e1 = entries[entries.size() - 3];
  const auto &e2 = entries[entries.size() - 2];
  const T d1 = e1.energy - e2.energy;
  const T d2 = e2.energy - last.energy;
  if (d2 == T{0})
    return fallback("last two values identical");
  if (!(d1 * d2 > T{0}) || !(abs(d1) > abs(d2)))
    return fallback("non-monotone tail");

  const double N1 = double(e1.N), N2 = double(e2.N), N3 = double(last.N);
  const double r = static_cast<double>(d1 / d2);
  auto f = [&](double q) { return detail::difference_ratio(q, N1, N2, N3) - r; };
  const double q_lo = 1e-6;
  double q_hi = 4;
  if (!(f(q_lo) < 0))
    return fallback("difference ratio below the q -> 0 limit");
  while (f(q_hi) < 0) {
    q_hi *= 2;
    if (q_hi > 512)
      return fallback("no power-law order below 512");
  }
  std::uintmax_t iters = 200;
  const auto br = boost::math::tools::toms748_solve(
      f, q_lo, q_hi, boost::math::tools::eps_tolerance<double>(52), iters);
  const double q = (br.first + br.second) / 2;
  // a N3^-q from the last difference, evaluated without forming N^-q.
  const T tail = d2 / T(std::expm1(q * std::log(N3 / N2)));
  out.value = last.energy - tail;
  out.uncertainty = abs(tail);
  out.observed_order = q;
  return out;
}

} // namespace tcd::solver
