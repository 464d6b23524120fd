#include "dw/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dw/errors.hpp"
#include "dw/heatmap.hpp"
#include "dw/snapshot.hpp"

namespace dw {

namespace fs = std::filesystem;

namespace {

std::string step_name(long step) {
  std::ostringstream os;
  os << "step_" << std::setw(8) << std::setfill('0') << step;
  return os.str();
}

void make_dirs(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  f << std::setprecision(17);
  return f;
}

void write_row(std::ostream& os, double t, const ObservableRecord& r) {
  os << t << ',' << r.norm << ',' << r.negativity << ',' << r.abs_negativity << ',' << r.transmission << ',' << r.antiparticle_fraction << ','
     << r.energy << ',' << r.p_mean << ',' << r.p2_mean << ',' << r.x_mean;
}

constexpr const char* kSeriesHeader = "t,norm,negativity,abs_negativity,transmission,antiparticle_fraction,energy,p_mean,p2_mean,x_mean";

}  // namespace

void write_series_csv(const fs::path& path, const ObservableSeries& series) {
  std::ofstream f = open_out(path);
  f << kSeriesHeader << '\n';
  for (std::size_t k = 0; k < series.size(); ++k) {
    write_row(f, series.times()[k], series.records()[k]);
    f << '\n';
  }
  if (!f) throw IoError("write failed for " + path.string());
}

RunResult run(const ScenarioConfig& config, const RunOptions& options) {
  validate(config);
  const PhaseGrid grid = make_grid(config);
  const Potential potential = make_potential(config);
  PropagatorConfig pc;
  pc.dt = config.dt;
  pc.D = config.D;
  pc.splitting = config.splitting;
  pc.causality_check = config.causality_check;

  RunResult result;
  result.output_dir = config.output_dir;
  const auto regions = potential_regions(config, grid);
  if (options.write_files) {
    make_dirs(config.output_dir);
    if (config.snapshot_every > 0) {
      make_dirs(config.output_dir / "snapshots");
      if (config.heatmaps) make_dirs(config.output_dir / "heatmaps");
    }
    std::ofstream cfg = open_out(config.output_dir / "config.txt");
    cfg << to_config_text(config);
  }

  const double p_reach = std::abs(config.packet.p_tilde) + 1.5 / config.packet.width;
  if (options.log && (p_reach > std::numbers::pi / grid.dx || p_reach > std::min(-grid.p_min, grid.p_max)))
    *options.log << config.name << " warning: packet momenta up to " << p_reach
                 << " exceed the grid resolution (pi/dx = " << std::numbers::pi / grid.dx << ")\n";

  MatrixPhaseField q = initial_state(config, grid);
  to_representation(q, Representation::LAMBDA_P);

  const long total_steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
  auto record = [&](long step, double t, const MatrixPhaseField& f) {
    const MatrixPhaseField xp = converted(f, Representation::X_P);
    const bool row = step % config.series_every == 0 || step == total_steps;
    if (row) result.series.append(t, measure(xp, config.packet.mass, config.transmission_threshold));
    if (options.write_files && config.snapshot_every > 0 && (step % config.snapshot_every == 0 || step == total_steps)) {
      const std::string name = step_name(step);
      write_snapshot(config.output_dir / "snapshots" / (name + ".dwps"), xp, t, config.snapshot_payload);
      if (config.heatmaps)
        write_heatmap(config.output_dir / "heatmaps" / (name + ".png"), w0(xp).values, grid, t, regions);
    }
    if (row && options.log) {
      const ObservableRecord& r = result.series.records().back();
      *options.log << config.name << " t=" << std::fixed << std::setprecision(3) << t << " norm=" << std::setprecision(9)
                   << r.norm << " N=" << r.negativity << " x=" << r.x_mean << '\n';
    }
  };

  EvolveOptions eo;
  long every = config.series_every;
  if (config.snapshot_every > 0) every = std::gcd(every, config.snapshot_every);
  eo.observers.push_back({every, record});
  EvolveResult er = evolve(std::move(q), 0.0, config.t_end, pc, potential, eo);
  result.steps = er.steps;
  result.warnings = std::move(er.warnings);

  if (options.write_files) {
    write_series_csv(config.output_dir / "series.csv", result.series);
    if (!result.warnings.empty()) {
      std::ofstream w = open_out(config.output_dir / "warnings.csv");
      w << "t,boundary,weight\n";
      for (const auto& x : result.warnings) w << x.t << ',' << x.boundary << ',' << x.weight << '\n';
    }
  }
  if (options.log)
    for (const auto& x : result.warnings)
      *options.log << config.name << " warning: weight " << x.weight << " near " << x.boundary << " at t=" << x.t << '\n';
  return result;
}

bool SweepResult::ok() const {
  for (const auto& r : runs)
    if (!r.ok) return false;
  return true;
}

int SweepResult::worst_error_kind() const {
  int k = 0;
  for (const auto& r : runs) k = std::max(k, r.error_kind);
  return k;
}

SweepResult sweep(const ScenarioConfig& config, const std::string& parameter, const std::vector<std::string>& values,
                  int jobs, const RunOptions& options) {
  static const char* sweepable[] = {"D", "p_tilde", "height"};
  if (std::find(std::begin(sweepable), std::end(sweepable), parameter) == std::end(sweepable))
    throw ConfigError("sweep: parameter '" + parameter + "' is not sweepable (use D, p_tilde or height)");
  if (values.empty()) throw ConfigError("sweep: empty value list");

  SweepResult out;
  out.parameter = parameter;
  std::vector<ScenarioConfig> configs;
  std::vector<std::string> errors;
  for (const auto& v : values) {
    ScenarioConfig c = config;
    try {
      set_parameter(c, parameter, v);
      c.output_dir = config.output_dir / (parameter + "=" + v);
      c.name = config.name + " " + parameter + "=" + v;
      validate(c);
    } catch (const ConfigError& e) {
      errors.push_back(parameter + "=" + v + ": " + e.what());
    }
    configs.push_back(c);
    SweepRun r;
    r.value = v;
    r.output_dir = c.output_dir;
    out.runs.push_back(std::move(r));
  }
  if (!errors.empty()) {
    std::string msg = "sweep: invalid values";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  std::mutex log_mutex;
  std::ostringstream dummy;
  auto work = [&](std::size_t k, bool single_thread) {
#ifdef _OPENMP
    if (single_thread) omp_set_num_threads(1);
#else
    (void)single_thread;
#endif
    SweepRun& r = out.runs[k];
    std::ostringstream local;
    RunOptions o = options;
    if (options.log) o.log = &local;
    try {
      r.result = run(configs[k], o);
      r.ok = true;
    } catch (const ConfigError& e) {
      r.error_kind = 1, r.error = e.what();
    } catch (const NumericalError& e) {
      r.error_kind = 2, r.error = e.what();
    } catch (const IoError& e) {
      r.error_kind = 3, r.error = e.what();
    } catch (const std::exception& e) {
      r.error_kind = 3, r.error = e.what();
    }
    if (options.log) {
      std::lock_guard lock(log_mutex);
      *options.log << local.str();
    }
  };

  const int n = static_cast<int>(configs.size());
  jobs = std::clamp(jobs, 1, n);
  if (jobs == 1) {
    for (int k = 0; k < n; ++k) work(k, false);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (int k = next++; k < n; k = next++) work(k, true);
      });
    for (auto& t : pool) t.join();
  }

  if (options.write_files) {
    make_dirs(config.output_dir);
    std::ofstream f = open_out(config.output_dir / "sweep.csv");
    f << "parameter,value," << kSeriesHeader << '\n';
    std::vector<LineSeries> trans, anti, neg;
    for (const auto& r : out.runs) {
      if (!r.ok) continue;
      const auto& s = r.result.series;
      LineSeries lt{parameter + "=" + r.value, {}, {}}, la = lt, ln = lt;
      for (std::size_t k = 0; k < s.size(); ++k) {
        f << parameter << ',' << r.value << ',';
        write_row(f, s.times()[k], s.records()[k]);
        f << '\n';
        lt.x.push_back(s.times()[k]);
        lt.y.push_back(s.records()[k].transmission);
        la.x.push_back(s.times()[k]);
        la.y.push_back(s.records()[k].antiparticle_fraction);
        ln.x.push_back(s.times()[k]);
        ln.y.push_back(s.records()[k].abs_negativity);
      }
      trans.push_back(lt);
      anti.push_back(la);
      neg.push_back(ln);
    }
    if (!f) throw IoError("write failed for sweep.csv");
    if (config.transmission_threshold) write_line_plot(config.output_dir / "transmission.png", trans, "transmission");
    write_line_plot(config.output_dir / "antiparticle_fraction.png", anti, "antiparticle_fraction");
    write_line_plot(config.output_dir / "negativity.png", neg, "|negativity|");
  }
  return out;
}

int apply_thread_env() {
#ifdef _OPENMP
  if (const char* v = std::getenv("DW_NUM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1 || n > 4096)
      throw ConfigError(std::string("DW_NUM_THREADS must be a positive integer, got '") + v + "'");
    omp_set_num_threads(static_cast<int>(n));
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace dw
