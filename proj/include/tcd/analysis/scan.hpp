#pragma once

// Scans of the relativistic shift over R and over c. Points are independent
// solver sessions; they run on a small worker pool and results are stored
// by input index, so the output does not depend on scheduling.

#include "tcd/analysis/averaging.hpp"
#include "tcd/solver/solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

namespace tcd::analysis {

/// Calls job(i) for i in [0, count) on up to `workers` threads (0 = hardware
/// concurrency). The first exception, by index, is rethrown after all
/// workers finish.
inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)> &job) {
  if (workers == 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = unsigned(std::min<std::size_t>(workers, count));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto &t : pool)
      t.join();
  }
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

/// Transform order and box size used for R below `R_upper`.
template <Real T> struct Band {
  T R_upper{};
  int nu = 6;
  T dmax{};
};

/// nu = 8, D_max = 35 for R <= 0.25; nu = 8, D_max = 40 up to R = 1.95;
/// nu = 6, D_max = 40 beyond.
template <Real T> std::vector<Band<T>> default_bands() {
  return {{T(0.275), 8, T(35)}, {T(1.975), 8, T(40)}, {std::numeric_limits<T>::infinity(), 6, T(40)}};
}

template <Real T> const Band<T> &band_for(const std::vector<Band<T>> &bands, const T &R) {
  for (const auto &b : bands)
    if (R < b.R_upper)
      return b;
  throw InvalidSetup("no band covers R = " + format(R));
}

template <Real T> struct ScanPoint {
  T R{};
  T c{};
  int nu = 0;
  T dmax{};
  solver::ShiftResult<T> result;

  T shift() const { return result.shift_extrapolation.value; }
  T uncertainty() const { return result.shift_extrapolation.uncertainty; }
  T energy() const { return result.relativistic.extrapolated(); }
};

template <Real T> struct ScanOptions {
  int p = 10;
  std::vector<int> n_list = {2, 4, 6, 8};
  unsigned workers = 0;
  std::vector<Band<T>> bands = default_bands<T>();
};

template <Real T> ShiftCurve<T> to_curve(const std::vector<ScanPoint<T>> &points) {
  std::vector<CurvePoint<T>> pts;
  for (const auto &p : points)
    pts.push_back({p.R, p.shift(), p.uncertainty()});
  return ShiftCurve<T>(std::move(pts));
}

/// Extrapolated shift for every R, with nu and D_max from the bands.
template <Real T>
std::vector<ScanPoint<T>> scan_R(const std::vector<T> &R_values,
                                 const geometry::PhysicalSetup<T> &setup_template,
                                 const solver::IterationPolicy<T> &policy,
                                 const ScanOptions<T> &opt = {}) {
  if (R_values.empty())
    throw InvalidSetup("scan_R: no R values");
  for (std::size_t i = 1; i < R_values.size(); ++i)
    if (!(R_values[i] > R_values[i - 1]))
      throw InvalidSetup("scan_R: R values must be strictly increasing");
  std::vector<ScanPoint<T>> out(R_values.size());
  for (std::size_t i = 0; i < R_values.size(); ++i) {
    auto s = setup_template;
    s.R = R_values[i];
    s.validate();
  }
  parallel_for(R_values.size(), opt.workers, [&](std::size_t i) {
    auto s = setup_template;
    s.R = R_values[i];
    const auto &band = band_for(opt.bands, s.R);
    const auto tp = geometry::TransformParams<T>::make(band.nu);
    const auto dom = geometry::DomainSpec<T>::make(band.dmax, s.R, tp);
    auto &pt = out[i];
    pt.R = s.R;
    pt.c = s.alpha_inverse;
    pt.nu = band.nu;
    pt.dmax = band.dmax;
    pt.result = solver::relativistic_shift(s, mesh::grid_ladder(opt.p, tp, dom, opt.n_list), policy);
  });
  return out;
}

/// Extrapolated energy and shift for every c at fixed geometry. The
/// nonrelativistic series is computed once and shared.
template <Real T>
std::vector<ScanPoint<T>> scan_c(const std::vector<T> &c_values,
                                 const geometry::PhysicalSetup<T> &setup_template,
                                 const std::vector<mesh::GridSpec<T>> &ladder,
                                 const solver::IterationPolicy<T> &policy, unsigned workers = 0) {
  if (c_values.empty())
    throw InvalidSetup("scan_c: no c values");
  for (const auto &c : c_values) {
    auto s = setup_template;
    s.alpha_inverse = c;
    s.validate();
  }
  const auto nrel = solver::run_ladder(setup_template, ladder, policy,
                                       assembly::Mode::nonrelativistic);
  std::vector<ScanPoint<T>> out(c_values.size());
  parallel_for(c_values.size(), workers, [&](std::size_t i) {
    auto s = setup_template;
    s.alpha_inverse = c_values[i];
    auto &pt = out[i];
    pt.R = s.R;
    pt.c = s.alpha_inverse;
    pt.nu = ladder.front().tp.nu;
    pt.dmax = ladder.front().dom.D_max;
    pt.result = solver::relativistic_shift(s, ladder, policy, &nrel);
  });
  return out;
}

} // namespace tcd::analysis
