// dwsim: run Dirac-Wigner scenarios from config files.
//   dwsim run --config <path> [--out <dir>] [--grid NxM] [--dt v] [--t-end v] [--snapshot-every k]
//   dwsim sweep --config <path> --param D --values 0,0.005,0.01 [--jobs n]
//   dwsim check
// Exit codes: 0 ok, 1 config error, 2 numerical abort, 3 I/O error.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dw/checks.hpp"
#include "dw/errors.hpp"
#include "dw/runner.hpp"

namespace {

struct Overrides {
  std::string out, grid;
  std::optional<double> dt, t_end;
  std::optional<long> snapshot_every;
};

void apply(dw::ScenarioConfig& c, const Overrides& o) {
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.grid.empty()) {
    const auto x = o.grid.find_first_of("xX");
    if (x == std::string::npos) throw dw::ConfigError("--grid expects NxM, got '" + o.grid + "'");
    dw::set_parameter(c, "n_x", o.grid.substr(0, x));
    dw::set_parameter(c, "n_p", o.grid.substr(x + 1));
  }
  if (o.dt) c.dt = *o.dt;
  if (o.t_end) c.t_end = *o.t_end;
  if (o.snapshot_every) c.snapshot_every = *o.snapshot_every;
  dw::validate(c);
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac-Wigner phase-space simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, param, values;
  Overrides ov;
  int jobs = 1;
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario config file")->required();
    sub->add_option("--out", ov.out, "output directory");
    sub->add_option("--grid", ov.grid, "grid size NxM");
    sub->add_option("--dt", ov.dt, "time step");
    sub->add_option("--t-end", ov.t_end, "final time");
    sub->add_option("--snapshot-every", ov.snapshot_every, "steps between snapshots (0 = none)");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario");
  add_common(run_cmd);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a scenario for several parameter values");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--param", param, "parameter: D, p_tilde or height")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->required();
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  CLI::App* check_cmd = app.add_subcommand("check", "run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const int threads = dw::apply_thread_env();
    dw::RunOptions opts;
    if (!quiet) opts.log = &std::cerr;
    if (*check_cmd) return dw::report_checks(dw::run_checks(), std::cout) ? 0 : 2;

    dw::ScenarioConfig cfg = dw::parse_config(config_path);
    apply(cfg, ov);
    if (!quiet) std::cerr << "dwsim: " << cfg.name << " (" << dw::to_string(cfg.kind) << "), " << threads << " thread(s)\n";
    if (*run_cmd) {
      const dw::RunResult r = dw::run(cfg, opts);
      std::cout << "wrote " << (r.output_dir / "series.csv").string() << " (" << r.steps << " steps)\n";
      return 0;
    }
    const dw::SweepResult s = dw::sweep(cfg, param, split_values(values), jobs, opts);
    for (const auto& r : s.runs)
      std::cout << param << "=" << r.value << ": " << (r.ok ? "ok" : "FAILED: " + r.error) << "\n";
    return s.worst_error_kind();
  } catch (const dw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const dw::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const dw::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  }
}
