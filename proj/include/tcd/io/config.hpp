#pragma once

// Run configuration: an INI file (sections, key = value, ';' or '#'
// comments) read with boost::property_tree. Numbers are kept as decimal
// text and parsed at the working precision of the run, so that e.g.
// alpha_inverse keeps all its digits in float128.

#include "tcd/errors.hpp"
#include "tcd/geometry/setup.hpp"
#include "tcd/geometry/transform.hpp"
#include "tcd/mesh/mesh.hpp"
#include "tcd/numerics/scalar.hpp"
#include "tcd/solver/solver.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tcd::io {

enum class Task { shift, hydrogen, demkov };

inline std::string to_string(Task t) {
  switch (t) {
  case Task::shift:
    return "shift";
  case Task::hydrogen:
    return "hydrogen";
  case Task::demkov:
    return "demkov";
  }
  return "?";
}

struct RunConfig {
  // [system]
  std::string Z1 = "1", Z2 = "1", R = "2";
  std::string alpha_inverse = geometry::codata_alpha_inverse;
  int twice_jz = 1;
  int state_index = 1;
  // [grid]
  int p = 10;
  int nu = 6;
  std::string D_max = "50";
  std::vector<int> n_list = {2, 4, 6, 8};
  // [policy]
  int k_max = 4;
  int j_max = 7;
  std::string eps_stability; ///< empty: precision default
  // [run]
  Precision precision = Precision::standard;
  Task task = Task::shift;
  unsigned workers = 0;
  // [scan]
  std::string scan_axis; ///< "R" or "c"
  std::vector<std::string> scan_values;
  // [fit]
  int s_max = 6;
  std::string fit_input;
  // [average]
  std::string curve, reference, lower_wf, upper_wf;
  int lower_v = 0, lower_L = 0, upper_v = 0, upper_L = 0;

  /// Canonical text of every effective setting; the config hash is taken
  /// over this, so formatting and comments of the file do not matter.
  std::string canonical() const {
    std::ostringstream os;
    os << "system.Z1=" << Z1 << "\nsystem.Z2=" << Z2 << "\nsystem.R=" << R
       << "\nsystem.alpha_inverse=" << alpha_inverse << "\nsystem.twice_jz=" << twice_jz
       << "\nsystem.state_index=" << state_index << "\ngrid.p=" << p << "\ngrid.nu=" << nu
       << "\ngrid.D_max=" << D_max << "\ngrid.n=";
    for (int n : n_list)
      os << n << ' ';
    os << "\npolicy.k_max=" << k_max << "\npolicy.j_max=" << j_max
       << "\npolicy.eps_stability=" << eps_stability << "\nrun.precision="
       << tcd::to_string(precision) << "\nrun.task=" << to_string(task)
       << "\nscan.axis=" << scan_axis << "\nscan.values=";
    for (const auto &v : scan_values)
      os << v << ' ';
    os << "\nfit.s_max=" << s_max << "\nfit.input=" << fit_input << "\naverage.curve=" << curve
       << "\naverage.reference=" << reference << "\naverage.lower=" << lower_wf << ','
       << lower_v << ',' << lower_L << "\naverage.upper=" << upper_wf << ',' << upper_v << ','
       << upper_L << "\n";
    return os.str();
  }

  /// 64-bit FNV-1a of canonical(); worker count is excluded as it does not
  /// change results.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canonical()) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  std::string hash_hex() const {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << hash();
    return os.str();
  }

  template <Real T> geometry::PhysicalSetup<T> setup() const {
    geometry::PhysicalSetup<T> s;
    s.Z1 = number<T>(Z1, "system.Z1");
    s.Z2 = number<T>(Z2, "system.Z2");
    s.R = number<T>(R, "system.R");
    s.alpha_inverse = alpha_inverse == "nonrelativistic"
                          ? T(geometry::nonrelativistic_c)
                          : number<T>(alpha_inverse, "system.alpha_inverse");
    s.twice_jz = twice_jz;
    s.state_index = state_index;
    return s;
  }

  template <Real T> std::vector<mesh::GridSpec<T>> ladder(const T &R) const {
    const auto tp = geometry::TransformParams<T>::make(nu);
    const auto dom = geometry::DomainSpec<T>::make(number<T>(D_max, "grid.D_max"), R, tp);
    return mesh::grid_ladder(p, tp, dom, n_list);
  }

  template <Real T> solver::IterationPolicy<T> policy() const {
    solver::IterationPolicy<T> pol;
    pol.k_max = k_max;
    pol.j_max = j_max;
    if (!eps_stability.empty())
      pol.eps_stability = number<T>(eps_stability, "policy.eps_stability");
    return pol;
  }

  /// Checks every precondition that does not need a computation, so a bad
  /// file fails before any work is done.
  template <Real T> void validate() const {
    setup<T>().validate();
    if (p < 1 || p > 16)
      throw InvalidSetup("grid.p must be in 1..16");
    if (n_list.empty())
      throw InvalidSetup("grid.n must list at least one subdivision count");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      if (n_list[i] < 1)
        throw InvalidSetup("grid.n entries must be >= 1");
      if (i && n_list[i] <= n_list[i - 1])
        throw InvalidSetup("grid.n must be strictly increasing");
    }
    geometry::TransformParams<T>::make(nu);
    if (!(number<T>(D_max, "grid.D_max") > 0))
      throw InvalidSetup("grid.D_max must be > 0");
    policy<T>().validate(solver::Mode::relativistic);
    if (s_max < 1)
      throw InvalidSetup("fit.s_max must be >= 1");
    if (!scan_axis.empty() && scan_axis != "R" && scan_axis != "c")
      throw InvalidSetup("scan.axis must be R or c");
    for (const auto &v : scan_values)
      number<T>(v, "scan.values");
  }

  template <Real T> static T number(const std::string &text, const std::string &key) {
    try {
      const T v = parse<T>(text);
      if (!is_finite(v))
        throw std::invalid_argument("not finite");
      return v;
    } catch (const std::exception &) {
      throw InvalidSetup(key + ": not a number: \"" + text + "\"");
    }
  }
};

namespace detail {

inline std::vector<std::string> words(const std::string &s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) {
    // allow commas as separators too
    std::stringstream parts(w);
    for (std::string p; std::getline(parts, p, ',');)
      if (!p.empty())
        out.push_back(p);
  }
  return out;
}

inline int integer(const std::string &text, const std::string &key) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size())
      throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception &) {
    throw InvalidSetup(key + ": not an integer: \"" + text + "\"");
  }
}

/// "1/2", "-3/2" or "0.5" -> 2*jz.
inline int twice_jz(const std::string &text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    if (text.substr(slash + 1) != "2")
      throw InvalidSetup("system.jz: expected a half-integer like 1/2, got \"" + text + "\"");
    return integer(text.substr(0, slash), "system.jz");
  }
  double tw = 0.5;
  try {
    std::size_t used = 0;
    tw = 2 * std::stod(text, &used);
    if (used != text.size())
      tw = 0.5;
  } catch (const std::exception &) {
  }
  if (tw != std::floor(tw))
    throw InvalidSetup("system.jz: not a half-integer: \"" + text + "\"");
  return int(tw);
}

} // namespace detail

/// Parses an INI stream. Unknown sections or keys are errors, so typos do
/// not silently fall back to defaults.
inline RunConfig parse_config(std::istream &in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw InvalidSetup(std::string("config: ") + e.what());
  }
  RunConfig c;
  const std::set<std::string> known = {
      "system.Z1", "system.Z2", "system.R", "system.alpha_inverse", "system.jz",
      "system.state_index", "grid.p", "grid.nu", "grid.D_max", "grid.n", "policy.k_max",
      "policy.j_max", "policy.eps_stability", "run.precision", "run.task", "run.workers",
      "scan.axis", "scan.values", "fit.s_max", "fit.input", "average.curve",
      "average.reference", "average.lower", "average.upper", "average.lower_v",
      "average.lower_L", "average.upper_v", "average.upper_L"};
  for (const auto &[section, body] : tree) {
    if (body.empty())
      throw InvalidSetup("config: key \"" + section + "\" outside a section");
    for (const auto &[key, value] : body) {
      const std::string full = section + "." + key;
      if (!known.count(full))
        throw InvalidSetup("config: unknown setting " + full);
    }
  }
  auto get = [&](const std::string &key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.')))
      return *v;
    return std::nullopt;
  };
  using detail::integer;
  if (auto v = get("system.Z1")) c.Z1 = *v;
  if (auto v = get("system.Z2")) c.Z2 = *v;
  if (auto v = get("system.R")) c.R = *v;
  if (auto v = get("system.alpha_inverse")) c.alpha_inverse = *v;
  if (auto v = get("system.jz")) c.twice_jz = detail::twice_jz(*v);
  if (auto v = get("system.state_index")) c.state_index = integer(*v, "system.state_index");
  if (auto v = get("grid.p")) c.p = integer(*v, "grid.p");
  if (auto v = get("grid.nu")) c.nu = integer(*v, "grid.nu");
  if (auto v = get("grid.D_max")) c.D_max = *v;
  if (auto v = get("grid.n")) {
    c.n_list.clear();
    for (const auto &w : detail::words(*v))
      c.n_list.push_back(integer(w, "grid.n"));
  }
  if (auto v = get("policy.k_max")) c.k_max = integer(*v, "policy.k_max");
  if (auto v = get("policy.j_max")) c.j_max = integer(*v, "policy.j_max");
  if (auto v = get("policy.eps_stability")) c.eps_stability = *v == "default" ? "" : *v;
  if (auto v = get("run.precision")) {
    try {
      c.precision = parse_precision(*v);
    } catch (const std::exception &e) {
      throw InvalidSetup(std::string("run.precision: ") + e.what());
    }
  }
  if (auto v = get("run.task")) {
    if (*v == "shift")
      c.task = Task::shift;
    else if (*v == "hydrogen")
      c.task = Task::hydrogen;
    else if (*v == "demkov")
      c.task = Task::demkov;
    else
      throw InvalidSetup("run.task must be shift, hydrogen or demkov");
  }
  if (auto v = get("run.workers")) c.workers = unsigned(integer(*v, "run.workers"));
  if (auto v = get("scan.axis")) c.scan_axis = *v;
  if (auto v = get("scan.values")) c.scan_values = detail::words(*v);
  if (auto v = get("fit.s_max")) c.s_max = integer(*v, "fit.s_max");
  if (auto v = get("fit.input")) c.fit_input = *v;
  if (auto v = get("average.curve")) c.curve = *v;
  if (auto v = get("average.reference")) c.reference = *v;
  if (auto v = get("average.lower")) c.lower_wf = *v;
  if (auto v = get("average.upper")) c.upper_wf = *v;
  if (auto v = get("average.lower_v")) c.lower_v = integer(*v, "average.lower_v");
  if (auto v = get("average.lower_L")) c.lower_L = integer(*v, "average.lower_L");
  if (auto v = get("average.upper_v")) c.upper_v = integer(*v, "average.upper_v");
  if (auto v = get("average.upper_L")) c.upper_L = integer(*v, "average.upper_L");
  return c;
}

inline RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InvalidSetup("cannot open config file " + path);
  return parse_config(in);
}

} // namespace tcd::io
