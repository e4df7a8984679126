#pragma once

// Global matrices of the k-expanded weak form
//
//   A_k = int Q alpha^(2k) / w0^(k+1) dV,   w0 = 2 + alpha^2 (eps0 - V),
//   S   = int (f^2 + g^2) dV,              W  = int V (f^2 + g^2) dV,
//
// so that M'(d) = sum_k (-d)^k A_k + W with d = eps - eps0 reproduces the
// exact denominator 1/(w0 + alpha^2 d) up to the truncation order. In the
// scalar nonrelativistic mode only f is present and A_0 = int Q(f, 0) / 2.
//
// Relativistic unknowns are interleaved: dof = 2 node + component.

#include "tcd/assembly/reduced_form.hpp"
#include "tcd/errors.hpp"
#include "tcd/mesh/mesh.hpp"
#include "tcd/numerics/quadrature.hpp"
#include "tcd/numerics/symmetric_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tcd::assembly {

using numerics::SymmetricMatrix;

template <Real T> struct AssembledSystem {
  std::vector<SymmetricMatrix<T>> A; ///< A_0 .. A_kmax
  SymmetricMatrix<T> S;
  SymmetricMatrix<T> W;
  T epsilon0{};
  Mode mode = Mode::relativistic;
  std::vector<T> a_norm; ///< max-abs norm of each A_k

  std::size_t order() const { return S.order(); }
  int k_max() const { return int(A.size()) - 1; }
};

/// Dense lower-triangular local blocks of one element.
template <Real T> struct LocalBlocks {
  std::size_t size = 0;
  std::vector<std::size_t> dofs;
  std::vector<std::vector<T>> A; ///< per k, packed lower, (a,b) at a(a+1)/2+b
  std::vector<T> S, W;

  static std::size_t at(std::size_t a, std::size_t b) { return a * (a + 1) / 2 + b; }
};

template <Real T>
LocalBlocks<T> element_matrices(const mesh::Mesh<T> &m, std::size_t e,
                                const ReducedOperator<T> &op,
                                const typename mesh::ShapeBasis<T>::Tabulation &tab,
                                const numerics::QuadratureRule<T> &rule, const T &epsilon0,
                                int k_max, Mode mode) {
  using std::abs;
  using std::sqrt;
  const bool rel = mode == Mode::relativistic;
  const int nk = rel ? k_max + 1 : 1;
  const auto nodes = m.element(e);
  const std::size_t npe = nodes.size();
  const std::size_t L = rel ? 2 * npe : npe;

  LocalBlocks<T> out;
  out.size = L;
  out.dofs.resize(L);
  for (std::size_t a = 0; a < npe; ++a) {
    if (rel) {
      out.dofs[2 * a] = 2 * nodes[a];
      out.dofs[2 * a + 1] = 2 * nodes[a] + 1;
    } else {
      out.dofs[a] = nodes[a];
    }
  }
  const std::size_t packed = L * (L + 1) / 2;
  out.A.assign(nk, std::vector<T>(packed, T{0}));
  out.S.assign(packed, T{0});
  out.W.assign(packed, T{0});

  // Affine map of the reference triangle onto the (s,t) element.
  const auto &v = m.vertices[e];
  const T j11 = v[1][0] - v[0][0], j12 = v[2][0] - v[0][0];
  const T j21 = v[1][1] - v[0][1], j22 = v[2][1] - v[0][1];
  const T det = j11 * j22 - j12 * j21;
  const T area = abs(det);
  // grad_(s,t) = J^{-T} grad_(x,y)
  const T i11 = j22 / det, i12 = -j21 / det, i21 = -j12 / det, i22 = j11 / det;

  std::vector<T> Tv(L), Bv(L), Nv(L), P(packed);
  std::vector<T> coef(nk);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto st = mesh::to_physical(m, e, rule.nodes[q]);
    const auto pt = op.at(st[0], st[1]);
    const auto &g = pt.geo;
    const T dV = rule.weights[q] * area * g.volume;
    const T sw = sqrt(dV);

    if (rel) {
      const T w0 = 2 + op.alpha2 * (epsilon0 - g.V);
      if (!(w0 > 0))
        throw NumericalError("epsilon0 outside admissible gap: 2 + alpha^2 (eps0 - V) = " +
                             format(w0));
      T c = 1 / w0;
      for (int k = 0; k < nk; ++k) {
        coef[k] = c;
        c *= op.alpha2 / w0;
      }
    } else {
      coef[0] = T(1) / 2;
    }

    const auto &sh = tab.at[q];
    for (std::size_t a = 0; a < npe; ++a) {
      const auto &gr = sh.gradient[a];
      const T Ns = i11 * gr[0] + i12 * gr[1];
      const T Nt = i21 * gr[0] + i22 * gr[1];
      const T N = sh.value[a];
      const T d_rho = g.ds_drho * Ns + g.dt_drho * Nt;
      const T d_z = g.ds_dz * Ns + g.dt_dz * Nt;
      const T zf = d_z + N * pt.L_z;
      if (rel) {
        const std::size_t f = 2 * a, gi = 2 * a + 1;
        Tv[f] = sw * pt.Gf * zf;
        Bv[f] = sw * pt.Gf * (d_rho + N * (pt.L_rho + pt.cf));
        Tv[gi] = sw * pt.Gg * (d_rho + N * (pt.L_rho + pt.cg));
        Bv[gi] = -sw * pt.Gg * zf;
        Nv[f] = sw * pt.Gf * N;
        Nv[gi] = sw * pt.Gg * N;
      } else {
        Tv[a] = sw * pt.Gf * zf;
        Bv[a] = sw * pt.Gf * (d_rho + N * (pt.L_rho + pt.cf));
        Nv[a] = sw * pt.Gf * N;
      }
    }

    for (std::size_t a = 0, idx = 0; a < L; ++a)
      for (std::size_t b = 0; b <= a; ++b, ++idx)
        P[idx] = Tv[a] * Tv[b] + Bv[a] * Bv[b];
    for (int k = 0; k < nk; ++k) {
      auto &Ak = out.A[k];
      const T ck = coef[k];
      for (std::size_t idx = 0; idx < packed; ++idx)
        Ak[idx] += ck * P[idx];
    }
    // Overlap only couples equal components (even/odd local index).
    const std::size_t stride = rel ? 2 : 1;
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t b = a % stride; b <= a; b += stride) {
        const T nn = Nv[a] * Nv[b];
        out.S[LocalBlocks<T>::at(a, b)] += nn;
        out.W[LocalBlocks<T>::at(a, b)] += g.V * nn;
      }
  }
  return out;
}

/// Envelope of the global matrices: first coupled unknown of every row.
template <Real T> std::vector<std::size_t> envelope(const mesh::Mesh<T> &m, Mode mode) {
  std::vector<std::size_t> first(m.node_count());
  for (std::size_t i = 0; i < first.size(); ++i)
    first[i] = i;
  for (std::size_t e = 0; e < m.element_count(); ++e) {
    const auto nodes = m.element(e);
    const std::size_t lo = *std::min_element(nodes.begin(), nodes.end());
    for (auto n : nodes)
      first[n] = std::min(first[n], lo);
  }
  if (mode == Mode::nonrelativistic)
    return first;
  std::vector<std::size_t> rel(2 * first.size());
  for (std::size_t i = 0; i < first.size(); ++i)
    rel[2 * i] = rel[2 * i + 1] = 2 * first[i];
  return rel;
}

/// Default quadrature exactness for order p: 3p + 2 (32 at p = 10). The
/// integrands carry the transform's rapidly varying weights; 2p + 4 leaves
/// errors of 1e-5 on the coarsest grid and 1e-11 on the next.
inline int default_quadrature_degree(int p) { return 3 * p + 2; }

template <Real T>
AssembledSystem<T> assemble(const mesh::Mesh<T> &m, const ReducedOperator<T> &op,
                            const mesh::ShapeBasis<T> &basis,
                            const numerics::QuadratureRule<T> &rule, const T &epsilon0,
                            int k_max, Mode mode) {
  if (mode == Mode::relativistic && k_max < 0)
    throw std::invalid_argument("k_max must be >= 0");
  if (basis.order() != m.p)
    throw std::invalid_argument("shape basis order does not match the mesh");
  const int nk = mode == Mode::relativistic ? k_max + 1 : 1;
  const auto env = envelope(m, mode);
  AssembledSystem<T> sys;
  sys.epsilon0 = epsilon0;
  sys.mode = mode;
  sys.A.assign(nk, SymmetricMatrix<T>(env));
  sys.S = SymmetricMatrix<T>(env);
  sys.W = SymmetricMatrix<T>(env);

  const auto tab = basis.tabulate(rule);
  for (std::size_t e = 0; e < m.element_count(); ++e) {
    const auto blk = element_matrices(m, e, op, tab, rule, epsilon0, k_max, mode);
    for (std::size_t a = 0; a < blk.size; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const std::size_t I = blk.dofs[a], J = blk.dofs[b];
        const std::size_t idx = LocalBlocks<T>::at(a, b);
        for (int k = 0; k < nk; ++k)
          sys.A[k].add(I, J, blk.A[k][idx]);
        if (blk.S[idx] != T{0} || blk.W[idx] != T{0}) {
          sys.S.add(I, J, blk.S[idx]);
          sys.W.add(I, J, blk.W[idx]);
        }
      }
  }
  for (const auto &a : sys.A) {
    if (!a.all_finite())
      throw NumericalError("assembled kinetic matrix has non-finite entries");
    sys.a_norm.push_back(a.max_abs());
  }
  if (!sys.S.all_finite() || !sys.W.all_finite())
    throw NumericalError("assembled overlap/potential matrix has non-finite entries");
  return sys;
}

/// M'(d) = A_0 + sum_k (-d)^k A_k + W. Throws ExpansionOutOfRadius when the
/// term norms |d|^k ||A_k|| stop decreasing.
template <Real T>
SymmetricMatrix<T> effective_matrix(const AssembledSystem<T> &sys, const T &delta) {
  using std::abs;
  SymmetricMatrix<T> M = sys.A[0];
  M.axpy(T{1}, sys.W);
  if (delta == T{0})
    return M;
  T prev = sys.a_norm[0];
  T factor = 1;
  for (int k = 1; k <= sys.k_max(); ++k) {
    factor *= -delta;
    const T term = abs(factor) * sys.a_norm[k];
    if (!(term < prev))
      throw ExpansionOutOfRadius("expansion out of radius: term " + std::to_string(k) +
                                     " does not decrease (|d| = " + format(abs(delta)) + ")",
                                 static_cast<double>(sys.epsilon0 + delta));
    prev = term;
    M.axpy(factor, sys.A[k]);
  }
  return M;
}

} // namespace tcd::assembly
