#pragma once
// Scenario runs and parameter sweeps.  A run writes into its output
// directory:
//   config.txt            the effective configuration
//   series.csv            t,norm,negativity,abs_negativity,transmission,
//                         antiparticle_fraction,energy,p_mean,p2_mean,x_mean
//   warnings.csv          boundary warnings (only when any fired)
//   snapshots/step_NNNNNNNN.dwps, heatmaps/step_NNNNNNNN.png(.json)

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dw/observables.hpp"
#include "dw/propagator.hpp"
#include "dw/scenario.hpp"

namespace dw {

struct RunResult {
  ObservableSeries series;
  std::vector<BoundaryWarning> warnings;
  long steps = 0;
  std::filesystem::path output_dir;
};

struct RunOptions {
  bool write_files = true;
  std::ostream* log = nullptr;  // progress lines, optional
};

/// Throws ConfigError, NumericalError or IoError.
RunResult run(const ScenarioConfig& config, const RunOptions& options = {});

void write_series_csv(const std::filesystem::path& path, const ObservableSeries& series);

struct SweepRun {
  std::string value;
  std::filesystem::path output_dir;
  bool ok = false;
  int error_kind = 0;  // 0 ok, 1 config, 2 numerical, 3 I/O
  std::string error;
  RunResult result;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRun> runs;
  bool ok() const;
  int worst_error_kind() const;
};

/// Sweepable parameters: D, p_tilde, height.  Runs go to
/// <output_dir>/<parameter>=<value>; sweep.csv and overlay plots go to
/// <output_dir>.  jobs > 1 runs scenarios concurrently.
SweepResult sweep(const ScenarioConfig& config, const std::string& parameter, const std::vector<std::string>& values,
                  int jobs = 1, const RunOptions& options = {});

/// Applies the thread-count environment override (DW_NUM_THREADS);
/// returns the count in effect.
int apply_thread_env();

}  // namespace dw
