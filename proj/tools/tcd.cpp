// tcd: batch front end for the two-centre Dirac solver.
//
//   tcd solve   --config run.ini [--precision long] [--out dir]
//   tcd scan    --config scan.ini [--workers 4]
//   tcd fit     --config fit.ini [--input scan.csv]
//   tcd average --config avg.ini
//   tcd report  --run dir
//
// Exit status: 0 success, 2 invalid configuration or usage, 3 numerical
// failure.

#include "tcd/cli/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace tcd;

namespace {

struct Common {
  std::string config;
  std::string precision;
  unsigned workers = 0;
  bool workers_set = false;
  std::string out = ".";
};

io::RunConfig configure(const Common &o) {
  auto c = io::load_config(o.config);
  if (!o.precision.empty())
    c.precision = parse_precision(o.precision);
  if (o.workers_set)
    c.workers = o.workers;
  return c;
}

void write(const cli::Outputs &out, const std::string &dir) {
  fs::create_directories(dir);
  for (const auto &[name, table] : out) {
    const auto path = (fs::path(dir) / (name + ".csv")).string();
    table.save(path);
    std::cout << "wrote " << path << " (" << table.size() << " rows)\n";
  }
}

void add_common(CLI::App *cmd, Common &o, bool needs_config = true) {
  auto *cfg = cmd->add_option("--config", o.config, "INI run configuration")->check(CLI::ExistingFile);
  if (needs_config)
    cfg->required();
  cmd->add_option("--precision", o.precision, "override run.precision")
      ->check(CLI::IsMember({"double", "long", "extended"}));
  cmd->add_option_function<unsigned>(
      "--workers", [&o](unsigned w) { o.workers = w, o.workers_set = true; },
      "parallel scan points (0: hardware threads)");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Finite-element minmax Dirac solver for one- and two-centre problems"};
  app.require_subcommand(1);

  Common o;
  auto *solve = app.add_subcommand("solve", "converged energies and shift on a grid ladder");
  add_common(solve, o);
  auto *scan = app.add_subcommand("scan", "shift along R or c (scan.axis, scan.values)");
  add_common(scan, o);
  auto *fit = app.add_subcommand("fit", "alpha-series fit of a c-scan table");
  add_common(fit, o);
  std::string input;
  fit->add_option("--input", input, "c-scan table (default: fit.input)");
  auto *average = app.add_subcommand("average", "rovibrational averages of a shift curve");
  add_common(average, o);
  auto *report = app.add_subcommand("report", "convergence data from a solve or scan directory");
  std::string run_dir;
  report->add_option("--run", run_dir, "directory holding series.csv")->required();
  report->add_option("--out", o.out, "output directory (default: the run directory)");
  report->add_option("--precision", o.precision, "parsing precision")
      ->check(CLI::IsMember({"double", "long", "extended"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) {
      write(cli::cmd_solve(configure(o)), o.out);
    } else if (*scan) {
      write(cli::cmd_scan(configure(o)), o.out);
    } else if (*fit) {
      const auto c = configure(o);
      const auto path = input.empty() ? c.fit_input : input;
      if (path.empty())
        throw InvalidSetup("fit needs --input or fit.input");
      write(cli::cmd_fit(c, io::ResultTable::load(path)), o.out);
    } else if (*average) {
      write(cli::cmd_average(configure(o)), o.out);
    } else if (*report) {
      const auto series = io::ResultTable::load((fs::path(run_dir) / "series.csv").string());
      auto p = Precision::long_double;
      if (!o.precision.empty())
        p = parse_precision(o.precision);
      else if (!series.meta("precision").empty())
        p = parse_precision(series.meta("precision"));
      write(cli::cmd_report(series, p), report->count("--out") ? o.out : run_dir);
    }
  } catch (const std::invalid_argument &e) { // InvalidSetup and malformed inputs
    std::cerr << "tcd: invalid setup: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError &e) {
    std::cerr << "tcd: numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "tcd: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
