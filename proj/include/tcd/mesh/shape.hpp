#pragma once

// Lagrange basis of complete degree-p polynomials on the reference triangle
// (0,0),(1,0),(0,1) over the equidistant lattice (i/p, j/p). Local order:
// the three vertices, then edge nodes counterclockwise (v0->v1, v1->v2,
// v2->v0), then interior nodes row by row in j.

#include "tcd/numerics/quadrature.hpp"
#include "tcd/numerics/scalar.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcd::mesh {

inline constexpr int max_order = 12;

/// Lattice position (i, j) of every local node, i along x, j along y.
inline std::vector<std::array<int, 2>> local_lattice(int p) {
  std::vector<std::array<int, 2>> L;
  if (p == 0) {
    L.push_back({0, 0});
    return L;
  }
  L.push_back({0, 0});
  L.push_back({p, 0});
  L.push_back({0, p});
  for (int k = 1; k < p; ++k)
    L.push_back({k, 0});
  for (int k = 1; k < p; ++k)
    L.push_back({p - k, k});
  for (int k = 1; k < p; ++k)
    L.push_back({0, p - k});
  for (int j = 1; j <= p - 2; ++j)
    for (int i = 1; i <= p - 1 - j; ++i)
      L.push_back({i, j});
  return L;
}

template <Real T> class ShapeBasis {
public:
  explicit ShapeBasis(int p) : p_(p), lattice_(local_lattice(p)) {
    if (p < 1 || p > max_order)
      throw std::invalid_argument("polynomial order must be in [1, " +
                                  std::to_string(max_order) + "]");
  }

  int order() const { return p_; }
  std::size_t size() const { return lattice_.size(); }
  const std::vector<std::array<int, 2>> &lattice() const { return lattice_; }

  /// Barycentric coordinates (l0, x, y) of local node j.
  std::array<T, 3> node(std::size_t j) const {
    const T x = T(lattice_[j][0]) / p_, y = T(lattice_[j][1]) / p_;
    return {T(p_ - lattice_[j][0] - lattice_[j][1]) / p_, x, y};
  }

  struct Values {
    std::vector<T> value;
    std::vector<std::array<T, 2>> gradient; ///< (d/dx, d/dy)
  };

  /// Values and reference gradients at barycentric point (l0, x, y).
  Values evaluate(const std::array<T, 3> &bary) const {
    const std::size_t n = size();
    Values out{std::vector<T>(n), std::vector<std::array<T, 2>>(n)};
    std::vector<T> r0(p_ + 1), d0(p_ + 1), r1(p_ + 1), d1(p_ + 1), r2(p_ + 1), d2(p_ + 1);
    silvester(bary[0], r0, d0);
    silvester(bary[1], r1, d1);
    silvester(bary[2], r2, d2);
    for (std::size_t a = 0; a < n; ++a) {
      const int i = lattice_[a][0], j = lattice_[a][1], k = p_ - i - j;
      out.value[a] = r1[i] * r2[j] * r0[k];
      // l0 = 1 - x - y
      out.gradient[a] = {d1[i] * r2[j] * r0[k] - r1[i] * r2[j] * d0[k],
                         r1[i] * d2[j] * r0[k] - r1[i] * r2[j] * d0[k]};
    }
    return out;
  }

  /// Basis tabulated at every node of a quadrature rule.
  struct Tabulation {
    std::vector<Values> at;
  };
  Tabulation tabulate(const numerics::QuadratureRule<T> &rule) const {
    Tabulation tab;
    tab.at.reserve(rule.size());
    for (const auto &x : rule.nodes)
      tab.at.push_back(evaluate(x));
    return tab;
  }

private:
  // R_m(z) = prod_{l<m} (p z - l)/(l + 1) and its derivative, m = 0..p.
  void silvester(const T &z, std::vector<T> &r, std::vector<T> &d) const {
    r[0] = 1;
    d[0] = 0;
    for (int m = 1; m <= p_; ++m) {
      const T f = (p_ * z - (m - 1)) / m;
      r[m] = r[m - 1] * f;
      d[m] = d[m - 1] * f + r[m - 1] * T(p_) / m;
    }
  }

  int p_;
  std::vector<std::array<int, 2>> lattice_;
};

} // namespace tcd::mesh
