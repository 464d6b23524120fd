#pragma once
// Scenario configuration: plain-text key = value files with optional
// [section] headers, and the potentials and initial states they describe.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dw/propagator.hpp"
#include "dw/states.hpp"

namespace dw {

enum class ScenarioKind { MAJORANA_FREE, MAJORANA_MASS, CAT_FREE, KLEIN_STEP, KLEIN_BARRIER, CUSTOM };

std::string_view to_string(ScenarioKind k);
std::string_view to_string(Splitting s);

/// Potential shapes available to CUSTOM scenarios.
enum class PotentialShape { NONE, STEP, BARRIER };

/// Initial states available to CUSTOM scenarios.
enum class InitialState { GAUSSIAN, MAJORANA, CAT, PARTICLE_CAT };

enum class SnapshotPayload { W0_REAL = 0, FULL_MATRIX = 1 };

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::CUSTOM;

  int n_x = 512, n_p = 512;
  double x_min = -20, x_max = 20, p_min = -20, p_max = 20;

  WavepacketSpec packet{5.0, 1.0, 0.0, 1.0};
  InitialState initial = InitialState::GAUSSIAN;
  int majorana_sign = +1;

  // A0 = height (1 + tanh[s (x - center)]) / 2               (STEP)
  // A0 = height (tanh[s (x + half_width)] + tanh[s (half_width - x)])  (BARRIER)
  PotentialShape shape = PotentialShape::NONE;
  double height = 0.0;
  double center = 0.0;
  double half_width = 0.0;
  double steepness = 4.0;
  double mass_curvature = 0.0;  // m(x) = m + c x^2

  double D = 0.0;
  double dt = 0.01;
  double t_end = 12.0;
  Splitting splitting = Splitting::FIRST_ORDER;
  bool causality_check = false;

  long series_every = 10;      // steps between series rows
  long snapshot_every = 0;     // 0 = no snapshots
  SnapshotPayload snapshot_payload = SnapshotPayload::W0_REAL;
  bool heatmaps = true;
  std::optional<double> transmission_threshold;
  std::filesystem::path output_dir = "out";
};

/// Defaults for a built-in kind (CUSTOM: generic defaults).
ScenarioConfig default_config(ScenarioKind kind);

/// Parses a config file.  Throws ConfigError (with line numbers) or IoError.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(std::string_view text, const std::string& origin = "<config>");

/// Throws ConfigError listing every violated constraint.
void validate(const ScenarioConfig& config);

/// Sets one key as it would appear in a config file.
void set_parameter(ScenarioConfig& config, const std::string& key, const std::string& value);

PhaseGrid make_grid(const ScenarioConfig& config);
Potential make_potential(const ScenarioConfig& config);

/// Initial spinor or, for pure states, the lifted Q in X_P.
SpinorField initial_spinor(const ScenarioConfig& config, const PhaseGrid& grid);
MatrixPhaseField initial_state(const ScenarioConfig& config, const PhaseGrid& grid);

/// Spans [x_lo, x_hi] where A0 exceeds half its maximum (empty for NONE).
std::vector<std::pair<double, double>> potential_regions(const ScenarioConfig& config, const PhaseGrid& grid);

/// key = value text that parses back to the same config.
std::string to_config_text(const ScenarioConfig& config);

}  // namespace dw
