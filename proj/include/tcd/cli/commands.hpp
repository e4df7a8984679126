#pragma once

// The batch commands behind the command-line tool. Each takes a validated
// configuration and returns result tables; nothing here depends on the
// order in which scan workers finish, so reruns give identical files.

#include "tcd/analysis/averaging.hpp"
#include "tcd/analysis/demkov.hpp"
#include "tcd/analysis/hydrogen.hpp"
#include "tcd/analysis/scan.hpp"
#include "tcd/analysis/series_fit.hpp"
#include "tcd/io/config.hpp"
#include "tcd/io/table.hpp"

#include <map>
#include <string>

namespace tcd::cli {

using io::ResultTable;
using io::RunConfig;
using io::sci;

/// Named output tables of one command, written as <name>.csv.
using Outputs = std::map<std::string, ResultTable>;

/// Calls f.template operator()<T>() for the configured precision.
template <class F> decltype(auto) with_precision(Precision p, F &&f) {
  switch (p) {
  case Precision::standard:
    return f.template operator()<double>();
  case Precision::long_double:
    return f.template operator()<long double>();
  case Precision::extended:
    break;
  }
  return f.template operator()<extended>();
}

inline void stamp(ResultTable &t, const RunConfig &c, const std::string &command) {
  t.set_meta_front("precision", std::string(tcd::to_string(c.precision)));
  t.set_meta_front("config_hash", c.hash_hex());
  t.set_meta_front("tcd result", command);
}

namespace detail {

template <Real T> std::string order(double q) {
  return std::isnan(q) ? std::string("nan") : sci(q, 6);
}

/// (mode, N, energy) in long form; the input of cmd_report.
template <Real T>
void add_series(ResultTable &t, const std::string &mode, const std::vector<solver::SeriesEntry<T>> &s) {
  for (const auto &e : s)
    t.add_row({mode, std::to_string(e.N), sci(e.energy)});
}

template <Real T> Outputs solve_shift(const RunConfig &c) {
  const auto setup = c.setup<T>();
  const auto ladder = c.ladder<T>(setup.R);
  const auto pol = c.policy<T>();
  const bool hydrogenic = c.task == io::Task::hydrogen;
  std::optional<analysis::HydrogenicReport<T>> h;
  solver::ShiftResult<T> r;
  if (hydrogenic) {
    h = analysis::validate_hydrogenic(setup, ladder, pol);
    r = h->fem;
  } else {
    r = solver::relativistic_shift(setup, ladder, pol);
  }
  ResultTable t({"row", "N", "n", "E_rel", "E_nrel", "shift", "iterations", "converged"});
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto &e = r.relativistic.entries[i];
    t.add_row({"grid", std::to_string(e.N), std::to_string(e.n_div), sci(e.energy),
               sci(r.nonrelativistic.entries[i].energy), sci(r.shift[i].energy),
               std::to_string(e.iterations), e.converged ? "yes" : "no"});
  }
  t.add_row({"extrapolated", "", "", sci(r.relativistic.extrapolated()),
             sci(r.nonrelativistic.extrapolated()), sci(r.shift_extrapolation.value), "", ""});
  t.add_row({"uncertainty", "", "", sci(r.relativistic.uncertainty()),
             sci(r.nonrelativistic.uncertainty()), sci(r.shift_extrapolation.uncertainty), "",
             ""});
  t.add_row({"order", "", "", order<T>(r.relativistic.observed_order()),
             order<T>(r.nonrelativistic.observed_order()),
             order<T>(r.shift_extrapolation.observed_order), "", ""});
  if (h) {
    const T nrel = -setup.Z1 * setup.Z1 / 2;
    t.add_row({"exact", "", "", sci(h->exact.energy), sci(nrel), sci(h->exact.shift), "", ""});
    t.add_row({"error", "", "", sci(T(r.relativistic.extrapolated() - h->exact.energy)),
               sci(T(r.nonrelativistic.extrapolated() - nrel)), sci(h->shift_error()), "", ""});
  }
  auto note = [](const solver::Extrapolation<T> &e) { return e.note.empty() ? "regular" : e.note; };
  t.set_meta("extrapolation_rel", note(r.relativistic.extrapolation));
  t.set_meta("extrapolation_nrel", note(r.nonrelativistic.extrapolation));
  t.set_meta("extrapolation_shift", note(r.shift_extrapolation));

  ResultTable s({"mode", "N", "energy"});
  add_series(s, "rel", r.relativistic.points());
  add_series(s, "nrel", r.nonrelativistic.points());
  add_series(s, "shift", r.shift);
  return {{"solve", t}, {"series", s}};
}

template <Real T> Outputs solve_demkov(const RunConfig &c) {
  const auto d = analysis::demkov_case<T>(c.n_list);
  ResultTable t({"row", "N", "n", "energy", "error", "ground"});
  ResultTable s({"mode", "N", "energy"});
  for (const auto &g : d.grids) {
    t.add_row({"grid", std::to_string(g.N), std::to_string(g.n_div), sci(g.energy), sci(g.error),
               sci(g.ground)});
    s.add_row({"demkov", std::to_string(g.N), sci(g.energy)});
  }
  t.add_row({"extrapolated", "", "", sci(d.extrapolation.value),
             sci(T(d.extrapolation.value + T(1) / 2)), ""});
  t.set_meta("rank", std::to_string(d.rank));
  t.set_meta("window", sci(d.window_lo, 3) + " .. " + sci(d.window_hi, 3));
  return {{"solve", t}, {"series", s}};
}

} // namespace detail

/// Per-grid E_rel, E_nrel and shift, then extrapolated,
/// uncertainty and observed-order rows (plus exact/error rows for a
/// hydrogenic run).
inline Outputs cmd_solve(const RunConfig &c) {
  auto out = with_precision(c.precision, [&]<class T>() {
    c.validate<T>();
    return c.task == io::Task::demkov ? detail::solve_demkov<T>(c) : detail::solve_shift<T>(c);
  });
  for (auto &[name, t] : out) {
    stamp(t, c, "solve");
    t.set_meta("task", io::to_string(c.task));
  }
  return out;
}

/// One row per R or c value: extrapolated energies, shift, uncertainty and
/// order; the per-point series go to a companion table, and an R scan also
/// yields the shift curve in the "R_au,shift_au" format.
inline Outputs cmd_scan(const RunConfig &c) {
  if (c.scan_axis != "R" && c.scan_axis != "c")
    throw InvalidSetup("scan.axis must be R or c");
  if (c.scan_values.empty())
    throw InvalidSetup("scan.values is empty");
  auto out = with_precision(c.precision, [&]<class T>() {
    c.validate<T>();
    std::vector<T> values;
    for (const auto &v : c.scan_values)
      values.push_back(RunConfig::number<T>(v, "scan.values"));
    const auto setup = c.setup<T>();
    const auto pol = c.policy<T>();
    std::vector<analysis::ScanPoint<T>> pts;
    if (c.scan_axis == "R") {
      analysis::ScanOptions<T> opt;
      opt.p = c.p;
      opt.n_list = c.n_list;
      opt.workers = c.workers;
      pts = analysis::scan_R(values, setup, pol, opt);
    } else {
      pts = analysis::scan_c(values, setup, c.ladder<T>(setup.R), pol, c.workers);
    }
    ResultTable t({c.scan_axis, "nu", "D_max", "E_rel", "E_nrel", "shift", "uncertainty", "order"});
    ResultTable s({"point", c.scan_axis, "mode", "N", "energy"});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto &p = pts[i];
      const T axis = c.scan_axis == "R" ? p.R : p.c;
      t.add_row({sci(axis), std::to_string(p.nu), sci(p.dmax, 6), sci(p.energy()),
                 sci(p.result.nonrelativistic.extrapolated()), sci(p.shift()), sci(p.uncertainty()),
                 detail::order<T>(p.result.shift_extrapolation.observed_order)});
      auto add = [&](const std::string &mode, const auto &series) {
        for (const auto &e : series)
          s.add_row({std::to_string(i), sci(axis), mode, std::to_string(e.N), sci(e.energy)});
      };
      add("rel", p.result.relativistic.points());
      add("nrel", p.result.nonrelativistic.points());
      add("shift", p.result.shift);
    }
    Outputs o{{"scan", t}, {"scan_series", s}};
    if (c.scan_axis == "R") {
      ResultTable curve({"R_au", "shift_au"});
      for (const auto &p : pts)
        curve.add_row({sci(p.R), sci(p.shift())});
      o.emplace("shift_curve", curve);
    }
    return o;
  });
  for (auto &[name, t] : out) {
    stamp(t, c, "scan");
    t.set_meta("axis", c.scan_axis);
  }
  return out;
}

/// Least-squares alpha series from a c-scan table (columns "c", "shift").
/// Rows in the nonrelativistic limit are skipped.
inline Outputs cmd_fit(const RunConfig &c, const ResultTable &input) {
  auto out = with_precision(c.precision, [&]<class T>() {
    std::vector<analysis::AlphaPoint<T>> data;
    for (std::size_t i = 0; i < input.size(); ++i) {
      const T cval = input.number<T>(i, "c");
      if (cval >= T(geometry::nonrelativistic_c))
        continue;
      data.push_back({1 / cval, input.number<T>(i, "shift")});
    }
    if (data.size() < std::size_t(c.s_max) + 1)
      throw InvalidSetup("fit: s_max = " + std::to_string(c.s_max) + " needs at least " +
                         std::to_string(c.s_max + 1) + " points, the input has " +
                         std::to_string(data.size()));
    const auto fit = analysis::fit_alpha_series(data, c.s_max);
    ResultTable coef({"term", "d", "standard_error"});
    for (int s = 1; s <= c.s_max; ++s)
      coef.add_row({"alpha^" + std::to_string(2 * s), sci(fit.d[s - 1]), sci(fit.se[s - 1])});
    ResultTable res({"c", "alpha", "shift", "residual"});
    for (std::size_t i = 0; i < data.size(); ++i)
      res.add_row({sci(T(1 / data[i].alpha)), sci(data[i].alpha), sci(data[i].shift),
                   sci(fit.residuals[i])});
    return Outputs{{"fit", coef}, {"fit_residuals", res}};
  });
  for (auto &[name, t] : out) {
    stamp(t, c, "fit");
    t.set_meta("s_max", std::to_string(c.s_max));
  }
  return out;
}

/// Level averages of the shift curve, the transition shift and, with a
/// reference curve, the correction, in a.u. and Hz.
inline Outputs cmd_average(const RunConfig &c) {
  if (c.curve.empty() || c.lower_wf.empty() || c.upper_wf.empty())
    throw InvalidSetup("average needs average.curve, average.lower and average.upper");
  auto out = with_precision(c.precision, [&]<class T>() {
    const auto curve = analysis::load_shift_curve<T>(c.curve);
    const auto lower = analysis::load_wavefunction<T>(c.lower_wf, c.lower_v, c.lower_L);
    const auto upper = analysis::load_wavefunction<T>(c.upper_wf, c.upper_v, c.upper_L);
    std::optional<analysis::ShiftCurve<T>> ref;
    if (!c.reference.empty())
      ref = analysis::load_shift_curve<T>(c.reference);
    const auto tc = analysis::transition_correction(curve, ref ? &*ref : nullptr, lower, upper);
    ResultTable t({"quantity", "au", "Hz"});
    auto hz = [](const T &x) { return sci(double(x) * analysis::hartree_hz, 12); };
    t.add_row({"level_lower", sci(tc.lower), hz(tc.lower)});
    t.add_row({"level_upper", sci(tc.upper), hz(tc.upper)});
    t.add_row({"transition", sci(tc.transition), hz(tc.transition)});
    if (tc.correction) {
      t.add_row({"reference_transition", sci(*tc.reference_transition), hz(*tc.reference_transition)});
      t.add_row({"correction", sci(*tc.correction), hz(*tc.correction)});
    }
    t.set_meta("reference", ref ? "yes" : "none (absolute transition shift only)");
    return Outputs{{"average", t}};
  });
  for (auto &[name, t] : out)
    stamp(t, c, "average");
  return out;
}

/// Plot-ready convergence data from a series table: |E(N) - E_inf| per mode
/// and the observed order.
inline Outputs cmd_report(const ResultTable &series, Precision precision) {
  return with_precision(precision, [&]<class T>() {
    std::map<std::string, std::vector<solver::SeriesEntry<T>>> modes;
    std::vector<std::string> order_seen;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto &m = series.cell(i, "mode");
      if (!modes.count(m))
        order_seen.push_back(m);
      modes[m].push_back({std::stoul(series.cell(i, "N")), series.number<T>(i, "energy")});
    }
    ResultTable t({"mode", "N", "abs_error"});
    ResultTable q({"mode", "extrapolated", "uncertainty", "order", "note"});
    for (const auto &m : order_seen) {
      const auto &pts = modes[m];
      const auto e = solver::extrapolate(pts);
      for (const auto &p : pts) {
        using std::abs;
        t.add_row({m, std::to_string(p.N), sci(T(abs(p.energy - e.value)), 6)});
      }
      q.add_row({m, sci(e.value), sci(e.uncertainty), detail::order<T>(e.observed_order), e.note});
    }
    for (auto *x : {&t, &q}) {
      x->set_meta("tcd result", "report");
      x->set_meta("config_hash", series.meta("config_hash"));
      x->set_meta("precision", series.meta("precision"));
    }
    return Outputs{{"report", t}, {"report_order", q}};
  });
}

} // namespace tcd::cli
