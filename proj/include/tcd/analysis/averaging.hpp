#pragma once

// The shift curve Delta E(R), nuclear radial wavefunctions, and the
// rovibrational average  <Delta E> = int Delta E(R) psi(R)^2 R^2 dR.

#include "tcd/errors.hpp"
#include "tcd/numerics/quadrature.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tcd::analysis {

/// CODATA 2018 hartree frequency, Hz per atomic unit of energy.
inline constexpr double hartree_hz = 6.579683920502e15;

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
template <Real T> class NaturalSpline {
public:
  NaturalSpline() = default;
  NaturalSpline(std::vector<T> x, std::vector<T> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw InvalidSetup("spline: need at least two points with matching values");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw InvalidSetup("spline: abscissae must be strictly increasing");
    // Second derivatives from the tridiagonal system, m_0 = m_{n-1} = 0.
    m_.assign(n, T{0});
    if (n == 2)
      return;
    std::vector<T> diag(n), upper(n), rhs(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const T h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      diag[i] = 2 * (h0 + h1);
      upper[i] = h1;
      rhs[i] = 6 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const T f = (x_[i] - x_[i - 1]) / diag[i - 1];
      diag[i] -= f * upper[i - 1];
      rhs[i] -= f * rhs[i - 1];
    }
    for (std::size_t i = n - 1; i-- > 1;)
      m_[i] = (rhs[i] - (i + 2 < n ? upper[i] * m_[i + 1] : T{0})) / diag[i];
  }

  const std::vector<T> &x() const { return x_; }
  const std::vector<T> &y() const { return y_; }
  T front() const { return x_.front(); }
  T back() const { return x_.back(); }

  T operator()(const T &t) const {
    if (!(t >= x_.front() && t <= x_.back()))
      throw InvalidSetup("spline evaluated outside [" + format(x_.front()) + ", " +
                         format(x_.back()) + "]: " + format(t));
    return on_interval(interval(t), t);
  }

  /// Value on interval [x_i, x_{i+1}] (also used for the quadrature nodes).
  T on_interval(std::size_t i, const T &t) const {
    const T h = x_[i + 1] - x_[i];
    const T a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6;
  }

  std::size_t interval(const T &t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : std::size_t(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
  }

private:
  std::vector<T> x_, y_, m_;
};

template <Real T> struct CurvePoint {
  T R{};
  T shift{};
  T uncertainty{};
};

/// Shift as a function of R, interpolated by a natural cubic spline.
template <Real T> struct ShiftCurve {
  std::vector<CurvePoint<T>> points;
  NaturalSpline<T> interpolant;

  explicit ShiftCurve(std::vector<CurvePoint<T>> pts) : points(std::move(pts)) {
    std::vector<T> x, y;
    for (const auto &p : points) {
      x.push_back(p.R);
      y.push_back(p.shift);
    }
    interpolant = NaturalSpline<T>(std::move(x), std::move(y));
  }
  T operator()(const T &R) const { return interpolant(R); }
  T R_min() const { return points.front().R; }
  T R_max() const { return points.back().R; }
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

/// Two-column CSV with a fixed header; '#' lines are comments.
template <Real T>
std::vector<std::pair<T, T>> read_two_columns(std::istream &in, const std::string &header,
                                              const std::string &what) {
  std::vector<std::pair<T, T>> rows;
  std::string line;
  bool seen_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#')
      continue;
    if (!seen_header) {
      if (line != header)
        throw InvalidSetup(what + ": expected header \"" + header + "\", got \"" + line + "\"");
      seen_header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 2)
      throw InvalidSetup(what + ": line " + std::to_string(lineno) + " needs two columns");
    try {
      rows.emplace_back(parse<T>(trim(cells[0])), parse<T>(trim(cells[1])));
    } catch (const std::exception &) {
      throw InvalidSetup(what + ": line " + std::to_string(lineno) + " is not numeric");
    }
  }
  if (!seen_header)
    throw InvalidSetup(what + ": missing header \"" + header + "\"");
  return rows;
}

/// Composite Gauss-Legendre over the knots of `psi`: sum over intervals of
/// f(R) psi(R)^2 R^2 with psi the spline through the samples.
template <Real T, class F>
T weighted_integral(const NaturalSpline<T> &psi, F &&f, int points_per_interval = 8) {
  static thread_local std::optional<numerics::GaussRule1D<T>> rule;
  if (!rule || int(rule->nodes.size()) != points_per_interval)
    rule = numerics::gauss_jacobi<T>(points_per_interval, 0, 0);
  const auto &x = psi.x();
  T total{0};
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const T half = (x[i + 1] - x[i]) / 2, mid = (x[i + 1] + x[i]) / 2;
    T part{0};
    for (std::size_t q = 0; q < rule->nodes.size(); ++q) {
      const T R = mid + half * rule->nodes[q];
      const T p = psi.on_interval(i, R);
      part += rule->weights[q] * f(R) * p * p * R * R;
    }
    total += half * part;
  }
  return total;
}

} // namespace detail

template <Real T> ShiftCurve<T> read_shift_curve(std::istream &in) {
  std::vector<CurvePoint<T>> pts;
  for (const auto &[R, s] : detail::read_two_columns<T>(in, "R_au,shift_au", "shift curve"))
    pts.push_back({R, s, T{0}});
  return ShiftCurve<T>(std::move(pts));
}

/// Nuclear radial function psi_{v,L}(R) sampled on a grid.
template <Real T> struct RadialWavefunction {
  std::vector<T> R;
  std::vector<T> psi;
  int v = 0;
  int L = 0;
  NaturalSpline<T> spline;

  RadialWavefunction(std::vector<T> r, std::vector<T> p, int v_ = 0, int L_ = 0)
      : R(std::move(r)), psi(std::move(p)), v(v_), L(L_), spline(R, psi) {}

  T norm() const {
    return detail::weighted_integral(spline, [](const T &) { return T(1); });
  }
};

/// Reads "R_au,psi" CSV and checks int psi^2 R^2 dR = 1 within `tolerance`.
template <Real T>
RadialWavefunction<T> read_wavefunction(std::istream &in, int v = 0, int L = 0,
                                        double tolerance = 1e-6) {
  std::vector<T> r, p;
  for (const auto &[R, psi] : detail::read_two_columns<T>(in, "R_au,psi", "wavefunction")) {
    r.push_back(R);
    p.push_back(psi);
  }
  RadialWavefunction<T> wf(std::move(r), std::move(p), v, L);
  using std::abs;
  const T n = wf.norm();
  if (!(abs(n - 1) <= T(tolerance)))
    throw InvalidSetup("wavefunction (v=" + std::to_string(v) + ", L=" + std::to_string(L) +
                       ") is not normalized: integral psi^2 R^2 dR = " + format(n));
  return wf;
}

template <Real T> RadialWavefunction<T> load_wavefunction(const std::string &path, int v = 0,
                                                          int L = 0) {
  std::ifstream in(path);
  if (!in)
    throw InvalidSetup("cannot open wavefunction file " + path);
  return read_wavefunction<T>(in, v, L);
}

template <Real T> ShiftCurve<T> load_shift_curve(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InvalidSetup("cannot open shift curve file " + path);
  return read_shift_curve<T>(in);
}

/// <Delta E>_{v,L}. The integral is divided by the norm evaluated with the
/// same quadrature, so a constant curve is reproduced exactly.
template <Real T> T average_shift(const ShiftCurve<T> &curve, const RadialWavefunction<T> &wf) {
  if (wf.R.front() < curve.R_min() || wf.R.back() > curve.R_max()) {
    std::string msg = "wavefunction support [" + format(wf.R.front()) + ", " +
                      format(wf.R.back()) + "] exceeds shift curve range [" +
                      format(curve.R_min()) + ", " + format(curve.R_max()) + "]:";
    if (wf.R.front() < curve.R_min())
      msg += " below by " + format(T(curve.R_min() - wf.R.front()));
    if (wf.R.back() > curve.R_max())
      msg += " above by " + format(T(wf.R.back() - curve.R_max()));
    throw InvalidSetup(msg);
  }
  const T num = detail::weighted_integral(wf.spline, [&](const T &R) { return curve(R); });
  return num / wf.norm();
}

template <Real T> struct TransitionCorrection {
  T lower{};       ///< <shift> of the lower level, FEM curve
  T upper{};
  T transition{};  ///< upper - lower, a.u.
  std::optional<T> reference_transition;
  std::optional<T> correction; ///< transition - reference_transition, a.u.
  std::optional<double> correction_hz;
  double transition_hz = 0;
};

/// Difference of the level averages between two curves. Without a reference
/// curve only the absolute transition shift is available.
template <Real T>
TransitionCorrection<T> transition_correction(const ShiftCurve<T> &fem,
                                              const ShiftCurve<T> *reference,
                                              const RadialWavefunction<T> &lower,
                                              const RadialWavefunction<T> &upper) {
  TransitionCorrection<T> out;
  out.lower = average_shift(fem, lower);
  out.upper = average_shift(fem, upper);
  out.transition = out.upper - out.lower;
  out.transition_hz = static_cast<double>(out.transition) * hartree_hz;
  if (reference) {
    const T ref = average_shift(*reference, upper) - average_shift(*reference, lower);
    out.reference_transition = ref;
    out.correction = out.transition - ref;
    out.correction_hz = static_cast<double>(*out.correction) * hartree_hz;
  }
  return out;
}

} // namespace tcd::analysis
