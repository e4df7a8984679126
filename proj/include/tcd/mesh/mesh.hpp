#pragma once

// Uniform triangulation of [0, s_max] x [0, pi]: n x n squares, each split
// into two triangles along parallel diagonals. Global nodes form the
// (p n + 1)^2 lattice numbered t-row by t-row, so every element's node set
// is deduplicated by construction.

#include "tcd/geometry/transform.hpp"
#include "tcd/mesh/shape.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <span>
#include <vector>

namespace tcd::mesh {

enum class Diagonal {
  forward,  ///< splits each square along (I+1,J)-(I,J+1)
  backward, ///< splits along (I,J)-(I+1,J+1)
};

template <Real T> struct GridSpec {
  int n_div = 2;
  int p = 10;
  geometry::TransformParams<T> tp;
  geometry::DomainSpec<T> dom;
  Diagonal diagonal = Diagonal::forward;

  std::size_t element_count() const { return 2 * std::size_t(n_div) * n_div; }
  std::size_t node_count() const {
    const std::size_t P = std::size_t(p) * n_div + 1;
    return P * P;
  }
};

template <Real T> struct Mesh {
  int n_div = 0;
  int p = 0;
  std::size_t lattice = 0; ///< nodes per side, p n + 1
  std::vector<std::array<T, 2>> nodes;                   ///< (s, t)
  std::vector<std::array<std::array<T, 2>, 3>> vertices; ///< per element, counterclockwise
  std::vector<std::size_t> connectivity;
  std::size_t nodes_per_element = 0;

  std::size_t element_count() const { return vertices.size(); }
  std::size_t node_count() const { return nodes.size(); }
  std::span<const std::size_t> element(std::size_t e) const {
    return {connectivity.data() + e * nodes_per_element, nodes_per_element};
  }
};

template <Real T> Mesh<T> build_mesh(const GridSpec<T> &spec) {
  if (spec.n_div < 1)
    throw std::invalid_argument("n_div must be >= 1");
  const ShapeBasis<T> basis(spec.p); // validates p
  const int p = spec.p, n = spec.n_div;
  const std::size_t P = std::size_t(p) * n + 1;

  Mesh<T> m;
  m.n_div = n;
  m.p = p;
  m.lattice = P;
  m.nodes_per_element = basis.size();
  const T s_max = spec.dom.s_max;
  const T t_max = pi<T>();
  const T steps = T(p * n);
  auto coord = [&](std::size_t a, std::size_t b) -> std::array<T, 2> {
    return {s_max * T(a) / steps, t_max * T(b) / steps};
  };
  m.nodes.resize(P * P);
  for (std::size_t b = 0; b < P; ++b)
    for (std::size_t a = 0; a < P; ++a)
      m.nodes[b * P + a] = coord(a, b);

  const auto &local = basis.lattice();
  m.connectivity.reserve(spec.element_count() * local.size());
  m.vertices.reserve(spec.element_count());
  using V = std::array<long, 2>;
  auto add = [&](V v0, V v1, V v2) {
    for (const auto &ij : local) {
      const long a = p * v0[0] + ij[0] * (v1[0] - v0[0]) + ij[1] * (v2[0] - v0[0]);
      const long b = p * v0[1] + ij[0] * (v1[1] - v0[1]) + ij[1] * (v2[1] - v0[1]);
      m.connectivity.push_back(std::size_t(b) * P + std::size_t(a));
    }
    m.vertices.push_back({coord(p * v0[0], p * v0[1]), coord(p * v1[0], p * v1[1]),
                          coord(p * v2[0], p * v2[1])});
  };
  for (long J = 0; J < n; ++J)
    for (long I = 0; I < n; ++I) {
      if (spec.diagonal == Diagonal::forward) {
        add({I, J}, {I + 1, J}, {I, J + 1});
        add({I + 1, J + 1}, {I, J + 1}, {I + 1, J});
      } else {
        add({I + 1, J}, {I + 1, J + 1}, {I, J});
        add({I, J + 1}, {I, J}, {I + 1, J + 1});
      }
    }
  return m;
}

/// Maps reference (x, y) to (s, t) for element e.
template <Real T>
std::array<T, 2> to_physical(const Mesh<T> &m, std::size_t e, const std::array<T, 3> &bary) {
  const auto &v = m.vertices[e];
  return {bary[0] * v[0][0] + bary[1] * v[1][0] + bary[2] * v[2][0],
          bary[0] * v[0][1] + bary[1] * v[1][1] + bary[2] * v[2][1]};
}

inline const std::vector<int> &default_ladder() {
  static const std::vector<int> n{2, 4, 6, 8, 10, 12, 14, 16, 18};
  return n;
}

template <Real T>
std::vector<GridSpec<T>> grid_ladder(int p, const geometry::TransformParams<T> &tp,
                                     const geometry::DomainSpec<T> &dom,
                                     std::vector<int> n_list = default_ladder()) {
  if (n_list.empty())
    throw std::invalid_argument("grid ladder needs at least one entry");
  std::sort(n_list.begin(), n_list.end());
  if (std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
    throw std::invalid_argument("grid ladder entries must be distinct");
  std::vector<GridSpec<T>> out;
  for (int n : n_list)
    out.push_back(GridSpec<T>{n, p, tp, dom, Diagonal::forward});
  return out;
}

/// Debug dump: one "node" line per node, one "element" line per element.
template <Real T> void write_mesh_csv(std::ostream &os, const Mesh<T> &m) {
  os << "kind,index,s_or_nodes,t\n";
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    os << "node," << i << ',' << format(m.nodes[i][0]) << ',' << format(m.nodes[i][1]) << '\n';
  for (std::size_t e = 0; e < m.element_count(); ++e) {
    os << "element," << e << ',';
    const auto nodes = m.element(e);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      os << (k ? " " : "") << nodes[k];
    os << ",\n";
  }
}

} // namespace tcd::mesh
