#include "tcd/analysis/averaging.hpp"
#include "tcd/analysis/demkov.hpp"
#include "tcd/analysis/hydrogen.hpp"
#include "tcd/analysis/scan.hpp"
#include "tcd/analysis/series_fit.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace tcd;
using namespace tcd::analysis;
using Catch::Approx;

namespace {

using Q = extended;

/// Nuclear-like radial function: a Gaussian in R of width w around R0,
/// normalized numerically on its own grid.
RadialWavefunction<double> gaussian_wf(double R0, double w, double lo, double hi, int n = 401) {
  std::vector<double> r(n), p(n);
  for (int i = 0; i < n; ++i) {
    r[i] = lo + (hi - lo) * i / (n - 1);
    p[i] = std::exp(-0.5 * (r[i] - R0) * (r[i] - R0) / (w * w));
  }
  RadialWavefunction<double> wf(r, p);
  const double s = 1 / std::sqrt(wf.norm());
  for (auto &x : p)
    x *= s;
  return RadialWavefunction<double>(r, p);
}

ShiftCurve<double> curve_of(double (*f)(double), double lo, double hi, int n) {
  std::vector<CurvePoint<double>> pts;
  for (int i = 0; i < n; ++i) {
    const double R = lo + (hi - lo) * i / (n - 1);
    pts.push_back({R, f(R), 0.0});
  }
  return ShiftCurve<double>(pts);
}

double smooth_shift(double R) { return -7.3665376307e-6 * (1 + 0.1 * (R - 2) + 0.05 * (R - 2) * (R - 2)); }

} // namespace

TEST_CASE("hydrogenic Dirac levels", "[hydrogen]") {
  const Q c1 = parse<Q>("137.0359895"), c2 = parse<Q>("137.035999084");
  const auto h1 = hydrogen_exact<Q>(1, 1 / c1, 1, Q(0.5));
  CHECK(abs(h1.shift / parse<Q>("-6.65659748374605054203e-6") - 1) < Q(1e-20));
  const auto h30 = hydrogen_exact<Q>(30, 1 / c2, 1, Q(0.5));
  CHECK(abs(h30.energy - parse<Q>("-455.52490631834368512")) < Q(1e-17));
  const auto h2 = hydrogen_exact<Q>(2, 1 / c2, 1, Q(0.5));
  CHECK(abs(h2.shift / parse<Q>("-1.0651405337817627608e-4") - 1) < Q(1e-19));

  // ground state: c^2 (sqrt(1 - (Z alpha)^2) - 1) evaluated directly
  for (int Z : {1, 10, 50, 90}) {
    const Q a = 1 / c2, za = Z * a;
    const Q direct = (sqrt(1 - za * za) - 1) / (a * a);
    const auto h = hydrogen_exact<Q>(Q(Z), a, 1, Q(0.5));
    INFO("Z = " << Z);
    CHECK(abs(h.energy - direct) <= Q(1e-28) * Z * Z);
  }
  // excited level n = 2, j = 3/2: n_r = 0, gamma = sqrt(4 - (Z alpha)^2)
  {
    const Q a = 1 / c1, g = sqrt(4 - a * a);
    const Q direct = (1 / sqrt(1 + a * a / (g * g)) - 1) / (a * a);
    const auto h = hydrogen_exact<Q>(1, a, 2, Q(1.5));
    CHECK(abs(h.energy - direct) < Q(1e-28));
    CHECK(abs(h.shift - (direct + Q(1) / 8)) < Q(1e-28));
  }
  // small alpha: -Z^4 a^2/8 - Z^6 a^4/16 - 5 Z^8 a^6/128
  {
    const Q a("1e-9");
    const auto h = hydrogen_exact<Q>(2, a, 1, Q(0.5));
    const Q series = -Q(16) * a * a / 8 - Q(64) * pow(a, 4) / 16 - 5 * Q(256) * pow(a, 6) / 128;
    CHECK(abs(h.shift / series - 1) < Q(1e-25));
    CHECK(hydrogen_exact<double>(1, 1e-300, 1, 0.5).shift == Approx(0).margin(1e-300));
  }
  // more negative with Z
  double prev = 0;
  for (int Z = 1; Z <= 100; ++Z) {
    const double s = hydrogen_exact<double>(Z, 1 / 137.035999084, 1, 0.5).shift;
    CHECK(s < prev);
    prev = s;
  }
  CHECK_THROWS_AS(hydrogen_exact<double>(138, 1 / 137.035999084, 1, 0.5), InvalidSetup);
  CHECK_THROWS_AS(hydrogen_exact<double>(1, 0.01, 1, 1.5), InvalidSetup);
  CHECK_THROWS_AS(hydrogen_exact<double>(0, 0.01, 1, 0.5), InvalidSetup);
}

TEST_CASE("hydrogenic validation with a dummy centre", "[hydrogen]") {
  geometry::PhysicalSetup<double> s;
  s.Z1 = 1;
  s.Z2 = 0;
  s.alpha_inverse = 137.0359895;
  const auto tp = geometry::TransformParams<double>::make(4);
  const auto lad = mesh::grid_ladder(10, tp, geometry::DomainSpec<double>::make(50, 2, tp), {2, 4});
  const auto r = validate_hydrogenic(s, lad, solver::IterationPolicy<double>{});
  CHECK(std::abs(r.last_grid_shift_error()) < 1e-11);
  CHECK(std::abs(r.exact.shift - -6.65659748374605e-6) < 1e-19);
  CHECK(std::abs(r.fem.nonrelativistic.entries.back().energy + 0.5) < 1e-10);

  auto bad = s;
  bad.Z2 = 1;
  CHECK_THROWS_AS(validate_hydrogenic(bad, lad, solver::IterationPolicy<double>{}), InvalidSetup);
  bad = s;
  bad.Z1 = 0;
  CHECK_THROWS_AS(validate_hydrogenic(bad, lad, solver::IterationPolicy<double>{}), InvalidSetup);
}

TEST_CASE("alpha series fit", "[fit]") {
  // Exact hydrogen shifts; the Taylor coefficients are -1/8 and -1/16.
  std::vector<AlphaPoint<double>> data;
  for (int c = 50; c <= 1200; c += 50) {
    const double a = 1.0 / c;
    data.push_back({a, double(hydrogen_exact<Q>(1, 1 / Q(c), 1, Q(0.5)).shift)});
  }
  const auto fit = fit_alpha_series(data, 6);
  REQUIRE(fit.d.size() == 6);
  CHECK(std::abs(fit.d[0] + 0.125) < 1e-6);
  CHECK(std::abs(fit.d[1] + 0.0625) < 1e-3);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(std::abs(fit.evaluate(data[i].alpha) + fit.residuals[i] - data[i].shift) <= 1e-20);

  // quadratic-only truth
  std::vector<AlphaPoint<double>> quad;
  for (double a : {0.001, 0.002, 0.005})
    quad.push_back({a, -0.3 * a * a});
  const auto q = fit_alpha_series(quad, 1);
  CHECK(q.d[0] == Approx(-0.3).epsilon(1e-14));
  for (double r : q.residuals)
    CHECK(std::abs(r) < 1e-20);

  // noisy model data: generating coefficients within 3 standard errors
  std::mt19937_64 gen(11);
  std::normal_distribution<double> noise(0, 1e-12);
  const double d2 = -0.14, d4 = -0.2, d6 = 0.5;
  std::vector<AlphaPoint<double>> noisy;
  for (int c = 20; c <= 400; c += 10) {
    const double a = 1.0 / c, a2 = a * a;
    noisy.push_back({a, d2 * a2 + d4 * a2 * a2 + d6 * a2 * a2 * a2 + noise(gen)});
  }
  const auto nf = fit_alpha_series(noisy, 3);
  CHECK(std::abs(nf.d[0] - d2) <= 3 * nf.se[0]);
  CHECK(std::abs(nf.d[1] - d4) <= 3 * nf.se[1]);
  CHECK(std::abs(nf.d[2] - d6) <= 3 * nf.se[2]);

  CHECK_THROWS_AS(fit_alpha_series(quad, 3), InvalidSetup);
  CHECK_THROWS_AS(fit_alpha_series<double>({{0.1, 1}, {0.1, 2}, {0.2, 3}}, 1), InvalidSetup);
  CHECK_THROWS_AS(fit_alpha_series(quad, 0), InvalidSetup);
}

TEST_CASE("natural cubic spline", "[curve]") {
  // through the knots, exact on straight lines, zero end curvature
  const NaturalSpline<double> line({0, 0.5, 2, 3}, {1, 2, 5, 7});
  for (double x : {0.0, 0.25, 1.0, 2.5, 3.0})
    CHECK(line(x) == Approx(1 + 2 * x).epsilon(1e-14));
  const NaturalSpline<double> s({0, 1, 2}, {0, 1, 0});
  // Closed form for three equidistant knots: m_1 = -3, so
  // S(x) = 3x/2 - x^3/2 on [0, 1].
  CHECK(s(0.5) == Approx(0.75 - 0.0625).epsilon(1e-14));
  CHECK(s(1.0) == 1.0);
  // smooth data converges at fourth order away from the ends
  std::vector<double> x, y;
  for (int i = 0; i <= 200; ++i) {
    x.push_back(i * 0.05);
    y.push_back(std::sin(x.back()));
  }
  const NaturalSpline<double> sn(x, y);
  for (double t = 2; t < 8; t += 0.0137)
    CHECK(std::abs(sn(t) - std::sin(t)) < 1e-7);
  CHECK_THROWS_AS(sn(-0.1), InvalidSetup);
  CHECK_THROWS_AS(NaturalSpline<double>({0, 0}, {1, 2}), InvalidSetup);
  CHECK_THROWS_AS(ShiftCurve<double>({{1, 0, 0}, {0.5, 0, 0}}), InvalidSetup);
}

TEST_CASE("rovibrational average identities", "[average]") {
  const auto wf = gaussian_wf(2.0, 0.2, 0.8, 3.2);
  CHECK(wf.norm() == Approx(1).epsilon(1e-12));

  // constant curve
  const auto flat = curve_of([](double) { return -7.3665376307e-6; }, 0.5, 5, 10);
  CHECK(std::abs(average_shift(flat, wf) / -7.3665376307e-6 - 1) < 1e-10);

  // narrow bump -> value at the centre; error shrinks like w^2
  const auto curve = curve_of(smooth_shift, 0.5, 5, 91);
  double prev = 1;
  for (double w : {0.02, 0.002, 1e-5}) {
    const auto bump = gaussian_wf(2.0, w, 2 - 8 * w, 2 + 8 * w);
    const double err = std::abs(average_shift(curve, bump) / curve(2.0) - 1);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-10);

  // flat psi^2 R^2 on [1.9, 2.1] with a straight curve: the midpoint value
  {
    std::vector<double> r, p;
    for (int i = 0; i <= 400; ++i) {
      r.push_back(1.9 + 0.2 * i / 400);
      p.push_back(1 / (r.back() * std::sqrt(0.2)));
    }
    const RadialWavefunction<double> box(r, p);
    CHECK(box.norm() == Approx(1).epsilon(1e-9));
    const auto lin = curve_of([](double R) { return 1e-6 * (3 - R); }, 1, 3, 5);
    CHECK(average_shift(lin, box) == Approx(1e-6).epsilon(1e-10));
  }

  // linear in the curve, blind to the sign of psi
  const auto c2 = curve_of([](double R) { return 2 * smooth_shift(R) + 1e-7 * R; }, 0.5, 5, 91);
  const auto lin = curve_of([](double R) { return 1e-7 * R; }, 0.5, 5, 91);
  CHECK(average_shift(c2, wf) ==
        Approx(2 * average_shift(curve, wf) + average_shift(lin, wf)).epsilon(1e-12));
  std::vector<double> neg = wf.psi;
  for (auto &v : neg)
    v = -v;
  CHECK(average_shift(curve, RadialWavefunction<double>(wf.R, neg)) == average_shift(curve, wf));

  // support beyond the curve
  const auto wide = gaussian_wf(2.0, 0.5, 0.1, 6);
  try {
    average_shift(curve, wide);
    FAIL("expected an error");
  } catch (const InvalidSetup &e) {
    const std::string m = e.what();
    CHECK(m.find("below by") != std::string::npos);
    CHECK(m.find("above by") != std::string::npos);
  }
}

TEST_CASE("wavefunction and curve files", "[average]") {
  const auto wf = gaussian_wf(2.0, 0.2, 0.8, 3.2);
  std::ostringstream os;
  os << "# v=0 L=0\nR_au,psi\n";
  os.precision(17);
  for (std::size_t i = 0; i < wf.R.size(); ++i)
    os << wf.R[i] << "," << wf.psi[i] << "\n";
  std::istringstream in(os.str());
  const auto back = read_wavefunction<double>(in, 0, 0);
  CHECK(back.R.size() == wf.R.size());
  CHECK(back.norm() == Approx(1).epsilon(1e-12));

  std::istringstream unnormalized("R_au,psi\n1,1\n2,1\n3,1\n");
  CHECK_THROWS_AS(read_wavefunction<double>(unnormalized), InvalidSetup);
  std::istringstream wrong_header("R,psi\n1,1\n");
  CHECK_THROWS_AS(read_wavefunction<double>(wrong_header), InvalidSetup);
  std::istringstream junk("R_au,psi\n1,x\n");
  CHECK_THROWS_AS(read_wavefunction<double>(junk), InvalidSetup);

  std::istringstream curve("R_au,shift_au\n1,-1e-6\n2,-2e-6\n3,-3e-6\n");
  const auto c = read_shift_curve<double>(curve);
  CHECK(c(2.5) == Approx(-2.5e-6).epsilon(1e-14));
}

TEST_CASE("transition corrections", "[average]") {
  const auto lower = gaussian_wf(2.0, 0.15, 1.0, 3.0);
  const auto upper = gaussian_wf(2.4, 0.3, 0.9, 4.2);
  const auto fem = curve_of(smooth_shift, 0.5, 5, 91);
  const auto same = transition_correction(fem, &fem, lower, upper);
  CHECK(*same.correction == 0.0);
  CHECK(same.transition != 0.0);
  const auto offset = curve_of([](double R) { return smooth_shift(R) + 3e-9; }, 0.5, 5, 91);
  const auto off = transition_correction(fem, &offset, lower, upper);
  CHECK(std::abs(*off.correction) <= 1e-12 * std::abs(off.transition));
  const auto alone = transition_correction<double>(fem, nullptr, lower, upper);
  CHECK(!alone.correction);
  CHECK(alone.transition_hz == Approx(alone.transition * 6.579683920502e15));
  CHECK(1e-14 * hartree_hz == Approx(65.8).epsilon(1e-3));
}

TEST_CASE("worker pool", "[scan]") {
  std::vector<int> out(50, -1);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = int(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK(out[i] == int(i * i));
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7)
                                   throw InvalidSetup("seven");
                               }),
                  InvalidSetup);
  const auto bands = default_bands<double>();
  CHECK(band_for(bands, 0.05).dmax == 35);
  CHECK(band_for(bands, 0.25).nu == 8);
  CHECK(band_for(bands, 0.30).dmax == 40);
  CHECK(band_for(bands, 1.95).nu == 8);
  CHECK(band_for(bands, 2.0).nu == 6);
  CHECK(band_for(bands, 5.0).dmax == 40);
}

TEST_CASE("scans are independent of the worker count", "[scan]") {
  geometry::PhysicalSetup<double> s;
  s.alpha_inverse = 137.035999084;
  const auto tp = geometry::TransformParams<double>::make(6);
  const auto lad = mesh::grid_ladder(10, tp, geometry::DomainSpec<double>::make(50, 2, tp), {4});
  const std::vector<double> cs{500, 1000};
  const auto a = scan_c(cs, s, lad, solver::IterationPolicy<double>{}, 1);
  const auto b = scan_c(cs, s, lad, solver::IterationPolicy<double>{}, 2);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a[i].c == cs[i]);
    CHECK(a[i].shift() == b[i].shift());
    CHECK(a[i].energy() == b[i].energy());
  }
  // alpha^2 scaling between c = 500 and c = 1000
  CHECK(a[1].shift() / a[0].shift() == Approx(0.25).epsilon(1e-3));

  ScanOptions<double> opt;
  opt.n_list = {2};
  opt.workers = 2;
  const auto r = scan_R<double>({1.0, 2.0}, s, solver::IterationPolicy<double>{}, opt);
  CHECK(r[0].nu == 8);
  CHECK(r[1].nu == 6);
  CHECK(r[0].shift() < r[1].shift()); // larger shift at shorter distance
  const auto curve = to_curve(r);
  CHECK(curve(2.0) == r[1].shift());
  CHECK_THROWS_AS(scan_R<double>({2.0, 1.0}, s, solver::IterationPolicy<double>{}, opt),
                  InvalidSetup);
  auto bad = s;
  CHECK_THROWS_AS(scan_c<double>({0.5}, bad, lad, solver::IterationPolicy<double>{}),
                  InvalidSetup);
}

TEST_CASE("Demkov state on a coarse grid", "[demkov]") {
  const auto d = demkov_case<double>({2});
  REQUIRE(d.grids.size() == 1);
  CHECK(d.located());
  CHECK(d.grids[0].N == 441);
  CHECK(d.grids[0].error > 0);
  CHECK(d.grids[0].error < 0.01);
  CHECK(d.grids[0].ground == Approx(-5.0169).margin(1e-3));

  // The sigma states of the scalar mode interleave with the pi states of the
  // two-component ladder: rank 13 of the scalar spectrum is the same level.
  auto s = demkov_setup<double>();
  const auto tp = geometry::TransformParams<double>::make(4);
  const auto spec = mesh::grid_ladder(10, tp, geometry::DomainSpec<double>::make(50, s.R, tp), {2}).front();
  solver::GridProblem<double> g(spec, s, assembly::Mode::nonrelativistic, 0);
  auto sys = g.assemble(0.0);
  const auto scalar = solver::solve_on_grid(sys, solver::IterationPolicy<double>{}, -5.0, 13);
  CHECK(scalar.epsilon == Approx(d.grids[0].energy).margin(1e-6));
}
