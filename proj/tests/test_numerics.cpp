#include "tcd/numerics/eigensolver.hpp"
#include "tcd/numerics/factorization.hpp"
#include "tcd/numerics/least_squares.hpp"
#include "tcd/numerics/quadrature.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace tcd;
using namespace tcd::numerics;
using Catch::Approx;

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i)
    f *= i;
  return f;
}

// Exact integral of x^a y^b over the unit reference triangle.
double monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

template <class T> double integrate(const QuadratureRule<T> &rule, int a, int b) {
  T s = 0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    using std::pow;
    s += rule.weights[q] * pow(rule.nodes[q][1], a) * pow(rule.nodes[q][2], b);
  }
  return static_cast<double>(s);
}

SymmetricMatrix<double> from_eigen(const Eigen::MatrixXd &m) {
  SymmetricMatrix<double> a(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      a.ref(i, j) = m(i, j);
  return a;
}

SymmetricMatrix<double> diag(std::initializer_list<double> d) {
  SymmetricMatrix<double> a(d.size());
  std::size_t i = 0;
  for (double v : d) {
    a.ref(i, i) = v;
    ++i;
  }
  return a;
}

SymmetricMatrix<double> identity(std::size_t n) {
  SymmetricMatrix<double> a(n);
  for (std::size_t i = 0; i < n; ++i)
    a.ref(i, i) = 1;
  return a;
}

} // namespace

TEST_CASE("centroid rule", "[quadrature]") {
  const auto r = gauss_triangle_rule<double>(1);
  REQUIRE(r.size() == 1);
  CHECK(r.weights[0] == Approx(0.5).epsilon(1e-15));
  CHECK(r.nodes[0][1] == Approx(1.0 / 3).epsilon(1e-15));
  CHECK(r.nodes[0][2] == Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("rule weights sum to the triangle area", "[quadrature]") {
  for (int d = 1; d <= 40; ++d) {
    const auto r = gauss_triangle_rule<double>(d);
    double s = 0;
    for (double w : r.weights)
      s += w;
    CHECK(s == Approx(0.5).epsilon(1e-14));
    CHECK(r.exactness_degree >= d);
  }
}

TEST_CASE("x^10 y^10 to beta-integral accuracy", "[quadrature]") {
  const auto r = gauss_triangle_rule<double>(20);
  const double exact = monomial_integral(10, 10);
  CHECK(std::abs(integrate(r, 10, 10) - exact) <= 1e-14 * exact);
}

TEST_CASE("exact for all monomials up to the declared degree", "[quadrature]") {
  for (int d : {2, 5, 8, 13, 24}) {
    const auto r = gauss_triangle_rule<double>(d);
    for (int a = 0; a <= r.exactness_degree; ++a)
      for (int b = 0; a + b <= r.exactness_degree; ++b) {
        const double exact = monomial_integral(a, b);
        INFO("degree " << d << " monomial " << a << "," << b);
        CHECK(std::abs(integrate(r, a, b) - exact) <= 1e-13 * exact);
      }
  }
}

TEST_CASE("extended-precision rule", "[quadrature]") {
  const auto r = gauss_triangle_rule<extended>(20);
  extended s = 0;
  for (std::size_t q = 0; q < r.size(); ++q)
    s += r.weights[q] * pow(r.nodes[q][1], 10) * pow(r.nodes[q][2], 10);
  // 10!10!/22! evaluated in binary128
  extended exact = 1;
  for (int i = 11; i <= 22; ++i)
    exact /= i;
  for (int i = 2; i <= 10; ++i)
    exact *= i;
  CHECK(abs((s - exact) / exact) < extended("1e-30"));
}

TEST_CASE("degree limits", "[quadrature]") {
  CHECK_THROWS_AS(gauss_triangle_rule<double>(0), std::invalid_argument);
  CHECK_THROWS_WITH(gauss_triangle_rule<double>(max_triangle_degree + 1),
                    Catch::Matchers::ContainsSubstring("degree too high"));
}

TEST_CASE("cholesky of identity and a 2x2", "[factorization]") {
  const auto L = cholesky_factor(identity(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      CHECK(L(i, j) == (i == j ? 1.0 : 0.0));

  SymmetricMatrix<double> a(2);
  a.ref(0, 0) = 4;
  a.ref(1, 0) = 2;
  a.ref(1, 1) = 3;
  const auto l = cholesky_factor(a);
  CHECK(l(0, 0) == Approx(2));
  CHECK(l(1, 0) == Approx(1));
  CHECK(l(1, 1) == Approx(std::sqrt(2.0)));
}

TEST_CASE("cholesky residual of Hilbert-8", "[factorization]") {
  const int n = 8;
  SymmetricMatrix<double> h(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      h.ref(i, j) = 1.0 / (i + j + 1);
  const auto L = cholesky_factor(h);
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0;
      for (int k = 0; k <= j; ++k)
        s += L(i, k) * L(j, k);
      worst = std::max(worst, std::abs(s - h(i, j)));
    }
  CHECK(worst <= 1e-12 * h.max_abs());
}

TEST_CASE("cholesky rejects indefinite input with the pivot index", "[factorization]") {
  auto a = diag({1, 2, -1, 4});
  try {
    cholesky_factor(a);
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite &e) {
    CHECK(e.pivot() == 2);
    CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("not positive definite"));
  }
}

TEST_CASE("envelope factor matches dense factor", "[factorization]") {
  // Banded SPD matrix in envelope storage vs. the same in dense storage.
  const std::size_t n = 30;
  std::vector<std::size_t> first(n);
  for (std::size_t i = 0; i < n; ++i)
    first[i] = i >= 3 ? i - 3 : 0;
  SymmetricMatrix<double> env(first), dense(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = first[i]; j <= i; ++j) {
      const double v = i == j ? 10.0 + i : 1.0 / (1.0 + i + 2.0 * j);
      env.ref(i, j) = v;
      dense.ref(i, j) = v;
    }
  const auto Le = cholesky_factor(env);
  const auto Ld = cholesky_factor(dense);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      CHECK(Le(i, j) == Approx(Ld(i, j)).margin(1e-15));
  std::vector<double> b(n, 1.0);
  const auto x = cholesky_solve<double>(Le, b);
  const auto r = env.multiply(x);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(r[i] == Approx(1.0).epsilon(1e-13));
}

TEST_CASE("LDLt inertia", "[factorization]") {
  const auto a = diag({1, 2, 3, 4});
  auto k = a;
  k.axpy(-2.5, identity(4));
  LdltFactor<double> f(k);
  CHECK(f.negative_pivots() == 2);
  CHECK(count_below(a, identity(4), 0.5) == 0u);
  CHECK(count_below(a, identity(4), 10.0) == 4u);
}

TEST_CASE("nearest eigenpair of a diagonal pencil", "[eigen]") {
  const auto a = diag({1, 2, 3});
  const auto b = identity(3);
  CHECK(lowest_eigenpair(a, b, 0.0).value == Approx(1).epsilon(1e-14));
  CHECK(lowest_eigenpair(a, b, 2.1).value == Approx(2).epsilon(1e-14));
}

TEST_CASE("kth eigenpair by deflation", "[eigen]") {
  const auto a = diag({5, 1, 3});
  const auto b = identity(3);
  CHECK(kth_eigenpair(a, b, 2).value == Approx(3).epsilon(1e-14));
  CHECK(kth_eigenpair(a, b, 3).value == Approx(5).epsilon(1e-14));
  const double low = lowest_eigenpair(a, b, 0.0).value;
  CHECK(kth_eigenpair(a, b, 1).value == Approx(low).epsilon(1e-14));
  CHECK_THROWS_AS(kth_eigenpair(a, b, 4), std::invalid_argument);
}

TEST_CASE("random 20x20 pencil against a dense reference", "[eigen]") {
  std::mt19937_64 gen(20240917);
  std::normal_distribution<double> nd;
  const int n = 20;
  Eigen::MatrixXd M(n, n), S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      M(i, j) = nd(gen);
      S(i, j) = nd(gen);
    }
  const Eigen::MatrixXd A = (S + S.transpose()) / 2;
  const Eigen::MatrixXd B = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(A, B);
  const auto &lam = ref.eigenvalues();

  const auto a = from_eigen(A), b = from_eigen(B);
  const auto pairs = lowest_eigenpairs(a, b, 6);
  for (int k = 0; k < 6; ++k) {
    INFO("rank " << k + 1);
    CHECK(std::abs(pairs[k].value - lam(k)) <= 1e-12 * std::abs(lam(k)));
    CHECK(pairs[k].residual <= 1e-6);
  }
  // B-orthonormality across ranks
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const double g = b.bilinear(pairs[i].vector, pairs[j].vector);
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  // nearest-to-shift contract between two interior eigenvalues
  const double shift = 0.7 * lam(10) + 0.3 * lam(11);
  CHECK(lowest_eigenpair(a, b, shift).value == Approx(lam(10)).epsilon(1e-12));
}

TEST_CASE("ranked states inside tight clusters converge", "[eigen]") {
  // Eigenvalues in pairs 1e-5 apart: inverse iteration from a shift below a
  // pair converges at a rate close to 1 unless the shift is moved up.
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  const int n = 60;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      G(i, j) = nd(gen);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i)
    lam(i) = -1.0 + 0.05 * (i / 2) + (i % 2) * 1e-5;
  const Eigen::MatrixXd A = Q * lam.asDiagonal() * Q.transpose();
  const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  const auto pairs = lowest_eigenpairs(from_eigen(Eigen::MatrixXd((A + A.transpose()) / 2)),
                                       from_eigen(B), 12);
  for (int k = 0; k < 12; ++k) {
    INFO("rank " << k + 1);
    CHECK(std::abs(pairs[k].value - lam(k)) <= 1e-12);
    CHECK(pairs[k].iterations <= 60);
  }
}

TEST_CASE("eigen solve is bit-reproducible", "[eigen]") {
  const auto a = diag({4, 1, 3, 2, 7});
  SymmetricMatrix<double> b(5);
  for (std::size_t i = 0; i < 5; ++i) {
    b.ref(i, i) = 2;
    if (i)
      b.ref(i, i - 1) = 0.5;
  }
  const auto p1 = kth_eigenpair(a, b, 3);
  const auto p2 = kth_eigenpair(a, b, 3);
  CHECK(p1.value == p2.value);
  CHECK(p1.vector == p2.vector);
}

TEST_CASE("double and extended agree on a well-conditioned pencil", "[eigen]") {
  const int n = 12;
  SymmetricMatrix<double> a(n), b(n);
  SymmetricMatrix<extended> ax(n), bx(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double av = i == j ? 2.0 + i : 1.0 / (1 + i + j);
      const double bv = i == j ? 1.0 : (i - j == 1 ? 0.25 : 0.0);
      a.ref(i, j) = av;
      b.ref(i, j) = bv;
      ax.ref(i, j) = av;
      bx.ref(i, j) = bv;
    }
  const double ld = kth_eigenpair(a, b, 2).value;
  const extended lx = kth_eigenpair(ax, bx, 2).value;
  CHECK(std::abs(ld - static_cast<double>(lx)) <= 1e-14 * std::abs(ld));
}

TEST_CASE("least squares", "[lsq]") {
  SECTION("y = 2x through two points") {
    const auto r = linear_least_squares<double>({{1}, {2}}, {2, 4});
    CHECK(r.coefficients[0] == Approx(2).epsilon(1e-15));
    CHECK(std::abs(r.residuals[0]) < 1e-14);
    CHECK(std::abs(r.residuals[1]) < 1e-14);
  }
  SECTION("exact quadratic") {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 7; ++i) {
      const double x = 0.5 * i - 1;
      X.push_back({1, x, x * x});
      y.push_back(3 - 2 * x + 0.25 * x * x);
    }
    const auto r = linear_least_squares(X, y);
    CHECK(r.coefficients[0] == Approx(3).epsilon(1e-12));
    CHECK(r.coefficients[1] == Approx(-2).epsilon(1e-12));
    CHECK(r.coefficients[2] == Approx(0.25).epsilon(1e-12));
    for (double se : r.standard_errors)
      CHECK(se < 1e-12);
  }
  SECTION("standard errors of a straight-line fit") {
    // Compare with the closed-form simple-regression formulas.
    const std::vector<double> xs{0, 1, 2, 3, 4, 5}, ys{1.1, 2.9, 5.2, 6.8, 9.1, 11.0};
    std::vector<std::vector<double>> X;
    for (double x : xs)
      X.push_back({1, x});
    const auto r = linear_least_squares(X, ys);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i] / 6;
      my += ys[i] / 6;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx, icpt = my - slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      rss += std::pow(ys[i] - icpt - slope * xs[i], 2);
    const double s2 = rss / 4;
    CHECK(r.coefficients[1] == Approx(slope).epsilon(1e-13));
    CHECK(r.standard_errors[1] == Approx(std::sqrt(s2 / sxx)).epsilon(1e-10));
    CHECK(r.standard_errors[0] ==
          Approx(std::sqrt(s2 * (1.0 / 6 + mx * mx / sxx))).epsilon(1e-10));
  }
  SECTION("rank deficiency") {
    CHECK_THROWS_AS(linear_least_squares<double>({{1, 2}, {2, 4}, {3, 6}}, {1, 2, 3}),
                    RankDeficient);
    CHECK_THROWS_AS(linear_least_squares<double>({{1, 2}}, {1}), std::invalid_argument);
  }
}
