#pragma once

// Least-squares fit of shift(alpha) = sum_{s=1}^{s_max} d_{2s} alpha^{2s}.

#include "tcd/errors.hpp"
#include "tcd/numerics/least_squares.hpp"

#include <algorithm>
#include <vector>

namespace tcd::analysis {

template <Real T> struct AlphaPoint {
  T alpha{};
  T shift{};
};

template <Real T> struct SeriesFit {
  std::vector<T> d;  ///< d[s-1] multiplies alpha^(2s)
  std::vector<T> se; ///< standard errors of d
  int s_max = 6;
  std::vector<T> residuals;

  T evaluate(const T &alpha) const {
    const T a2 = alpha * alpha;
    T sum{0};
    for (std::size_t s = d.size(); s-- > 0;)
      sum = (sum + d[s]) * a2;
    return sum;
  }
};

template <Real T> SeriesFit<T> fit_alpha_series(const std::vector<AlphaPoint<T>> &data, int s_max = 6) {
  if (s_max < 1)
    throw InvalidSetup("series fit: s_max must be >= 1");
  if (data.size() < std::size_t(s_max) + 1)
    throw InvalidSetup("series fit: need at least s_max + 1 = " + std::to_string(s_max + 1) +
                       " points, got " + std::to_string(data.size()));
  std::vector<T> alphas;
  for (const auto &p : data) {
    if (!(p.alpha > 0))
      throw InvalidSetup("series fit: alpha must be > 0");
    alphas.push_back(p.alpha);
  }
  std::sort(alphas.begin(), alphas.end());
  if (std::adjacent_find(alphas.begin(), alphas.end()) != alphas.end())
    throw InvalidSetup("series fit: alpha values must be distinct");

  std::vector<std::vector<T>> design;
  std::vector<T> obs;
  for (const auto &p : data) {
    const T a2 = p.alpha * p.alpha;
    std::vector<T> row(s_max);
    T pw = a2;
    for (int s = 0; s < s_max; ++s, pw *= a2)
      row[s] = pw;
    design.push_back(std::move(row));
    obs.push_back(p.shift);
  }
  auto ls = numerics::linear_least_squares(design, obs);
  SeriesFit<T> out;
  out.d = std::move(ls.coefficients);
  out.se = std::move(ls.standard_errors);
  out.s_max = s_max;
  out.residuals = std::move(ls.residuals);
  return out;
}

} // namespace tcd::analysis
