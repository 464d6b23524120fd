#include "dw/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "dw/errors.hpp"

namespace dw {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long l = to_long(key, v);
  if (l < -(1L << 30) || l > (1L << 30)) throw ConfigError(key + ": integer out of range");
  return static_cast<int>(l);
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string u = upper(v);
  if (u == "TRUE" || u == "YES" || u == "1" || u == "ON") return true;
  if (u == "FALSE" || u == "NO" || u == "0" || u == "OFF") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

ScenarioKind to_kind(const std::string& v) {
  const std::string u = upper(v);
  for (ScenarioKind k : {ScenarioKind::MAJORANA_FREE, ScenarioKind::MAJORANA_MASS, ScenarioKind::CAT_FREE,
                         ScenarioKind::KLEIN_STEP, ScenarioKind::KLEIN_BARRIER, ScenarioKind::CUSTOM})
    if (u == to_string(k)) return k;
  throw ConfigError("kind: unknown scenario kind '" + v + "'");
}

struct Key {
  std::string section;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

#define DW_DOUBLE(sec, name, field)                                                                     \
  {                                                                                                     \
    name, {                                                                                             \
      sec, [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.field = to_double(k, v); }, \
          [](const ScenarioConfig& c) { return num(c.field); }                                          \
    }                                                                                                   \
  }

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> table = {
      {"name", {"scenario", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.name = v; },
                [](const ScenarioConfig& c) { return c.name; }}},
      {"output_dir", {"scenario", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
                      [](const ScenarioConfig& c) { return c.output_dir.string(); }}},
      {"n_x", {"grid", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.n_x = to_int(k, v); },
               [](const ScenarioConfig& c) { return std::to_string(c.n_x); }}},
      {"n_p", {"grid", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.n_p = to_int(k, v); },
               [](const ScenarioConfig& c) { return std::to_string(c.n_p); }}},
      DW_DOUBLE("grid", "x_min", x_min),
      DW_DOUBLE("grid", "x_max", x_max),
      DW_DOUBLE("grid", "p_min", p_min),
      DW_DOUBLE("grid", "p_max", p_max),
      DW_DOUBLE("packet", "p_tilde", packet.p_tilde),
      DW_DOUBLE("packet", "mass", packet.mass),
      DW_DOUBLE("packet", "x0", packet.x0),
      DW_DOUBLE("packet", "width", packet.width),
      {"initial", {"packet",
                   [](ScenarioConfig& c, const std::string&, const std::string& v) {
                     const std::string u = upper(v);
                     if (u == "GAUSSIAN") c.initial = InitialState::GAUSSIAN;
                     else if (u == "MAJORANA") c.initial = InitialState::MAJORANA;
                     else if (u == "CAT") c.initial = InitialState::CAT;
                     else if (u == "PARTICLE_CAT") c.initial = InitialState::PARTICLE_CAT;
                     else throw ConfigError("initial: expected gaussian, majorana, cat or particle_cat, got '" + v + "'");
                   },
                   [](const ScenarioConfig& c) -> std::string {
                     switch (c.initial) {
                       case InitialState::MAJORANA: return "majorana";
                       case InitialState::CAT: return "cat";
                       case InitialState::PARTICLE_CAT: return "particle_cat";
                       default: return "gaussian";
                     }
                   }}},
      {"majorana_sign", {"packet",
                         [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                           c.majorana_sign = to_int(k, v);
                         },
                         [](const ScenarioConfig& c) { return std::to_string(c.majorana_sign); }}},
      {"shape", {"potential",
                 [](ScenarioConfig& c, const std::string&, const std::string& v) {
                   const std::string u = upper(v);
                   if (u == "NONE") c.shape = PotentialShape::NONE;
                   else if (u == "STEP") c.shape = PotentialShape::STEP;
                   else if (u == "BARRIER") c.shape = PotentialShape::BARRIER;
                   else throw ConfigError("shape: expected none, step or barrier, got '" + v + "'");
                 },
                 [](const ScenarioConfig& c) -> std::string {
                   switch (c.shape) {
                     case PotentialShape::STEP: return "step";
                     case PotentialShape::BARRIER: return "barrier";
                     default: return "none";
                   }
                 }}},
      DW_DOUBLE("potential", "height", height),
      DW_DOUBLE("potential", "center", center),
      DW_DOUBLE("potential", "half_width", half_width),
      DW_DOUBLE("potential", "steepness", steepness),
      DW_DOUBLE("potential", "mass_curvature", mass_curvature),
      DW_DOUBLE("dynamics", "D", D),
      DW_DOUBLE("dynamics", "dt", dt),
      DW_DOUBLE("dynamics", "t_end", t_end),
      {"splitting", {"dynamics",
                     [](ScenarioConfig& c, const std::string&, const std::string& v) {
                       const std::string u = upper(v);
                       if (u == "FIRST_ORDER") c.splitting = Splitting::FIRST_ORDER;
                       else if (u == "STRANG") c.splitting = Splitting::STRANG;
                       else throw ConfigError("splitting: expected first_order or strang, got '" + v + "'");
                     },
                     [](const ScenarioConfig& c) { return std::string(to_string(c.splitting)); }}},
      {"causality_check", {"dynamics",
                           [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                             c.causality_check = to_bool(k, v);
                           },
                           [](const ScenarioConfig& c) -> std::string { return c.causality_check ? "true" : "false"; }}},
      {"series_every", {"output",
                        [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                          c.series_every = to_long(k, v);
                        },
                        [](const ScenarioConfig& c) { return std::to_string(c.series_every); }}},
      {"snapshot_every", {"output",
                          [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                            c.snapshot_every = to_long(k, v);
                          },
                          [](const ScenarioConfig& c) { return std::to_string(c.snapshot_every); }}},
      {"snapshot_payload", {"output",
                            [](ScenarioConfig& c, const std::string&, const std::string& v) {
                              const std::string u = upper(v);
                              if (u == "W0" || u == "W0_REAL") c.snapshot_payload = SnapshotPayload::W0_REAL;
                              else if (u == "FULL" || u == "FULL_MATRIX") c.snapshot_payload = SnapshotPayload::FULL_MATRIX;
                              else throw ConfigError("snapshot_payload: expected w0 or full, got '" + v + "'");
                            },
                            [](const ScenarioConfig& c) -> std::string {
                              return c.snapshot_payload == SnapshotPayload::W0_REAL ? "w0" : "full";
                            }}},
      {"heatmaps", {"output",
                    [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.heatmaps = to_bool(k, v); },
                    [](const ScenarioConfig& c) -> std::string { return c.heatmaps ? "true" : "false"; }}},
      {"transmission_threshold", {"output",
                                  [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                                    if (upper(v) == "NONE") c.transmission_threshold.reset();
                                    else c.transmission_threshold = to_double(k, v);
                                  },
                                  [](const ScenarioConfig& c) {
                                    return c.transmission_threshold ? num(*c.transmission_threshold) : std::string("none");
                                  }}},
  };
  return table;
}

#undef DW_DOUBLE

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> a = {{"m", "mass"}, {"p", "p_tilde"}, {"d", "D"}};
  return a;
}

std::string canonical(const std::string& key) {
  if (keys().count(key)) return key;
  const auto it = aliases().find(key);
  return it != aliases().end() ? it->second : key;
}

}  // namespace

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::MAJORANA_FREE: return "MAJORANA_FREE";
    case ScenarioKind::MAJORANA_MASS: return "MAJORANA_MASS";
    case ScenarioKind::CAT_FREE: return "CAT_FREE";
    case ScenarioKind::KLEIN_STEP: return "KLEIN_STEP";
    case ScenarioKind::KLEIN_BARRIER: return "KLEIN_BARRIER";
    case ScenarioKind::CUSTOM: return "CUSTOM";
  }
  return "?";
}

std::string_view to_string(Splitting s) { return s == Splitting::STRANG ? "STRANG" : "FIRST_ORDER"; }

ScenarioConfig default_config(ScenarioKind kind) {
  ScenarioConfig c;
  c.kind = kind;
  c.name = upper(std::string(to_string(kind)));
  for (char& ch : c.name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  switch (kind) {
    case ScenarioKind::MAJORANA_FREE:
      c.initial = InitialState::MAJORANA;
      break;
    case ScenarioKind::MAJORANA_MASS:
      c.initial = InitialState::MAJORANA;
      c.mass_curvature = 0.05;
      break;
    case ScenarioKind::CAT_FREE:
      c.initial = InitialState::CAT;
      break;
    case ScenarioKind::KLEIN_STEP:
      c.shape = PotentialShape::STEP;
      c.height = 10.0;
      c.center = 5.0;
      c.packet.x0 = -5.0;
      c.transmission_threshold = 5.0;
      break;
    case ScenarioKind::KLEIN_BARRIER:
      c.shape = PotentialShape::BARRIER;
      c.height = 5.0;
      c.half_width = 4.0;
      c.packet.x0 = -10.0;
      c.t_end = 24.0;
      c.transmission_threshold = 4.0;
      break;
    case ScenarioKind::CUSTOM:
      break;
  }
  return c;
}

void set_parameter(ScenarioConfig& config, const std::string& key, const std::string& value) {
  const std::string k = canonical(key);
  if (k == "kind") throw ConfigError("kind: must be the first setting of a config");
  const auto it = keys().find(k);
  if (it == keys().end()) throw ConfigError("unknown key '" + key + "'");
  it->second.set(config, k, value);
}

ScenarioConfig parse_config_text(std::string_view text, const std::string& origin) {
  struct Entry {
    int line;
    std::string section, key, value;
  };
  std::vector<Entry> entries;
  std::vector<std::string> errors;
  std::optional<ScenarioKind> kind;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto where = [&](int n) { return origin + ":" + std::to_string(n) + ": "; };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find_first_of("#;")));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where(line_no) + "malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"scenario", "grid", "packet", "potential", "dynamics", "output"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        errors.push_back(where(line_no) + "unknown section [" + section + "]");
      continue;
    }
    // several key=value pairs may share a line
    std::istringstream words(line);
    std::string word;
    std::vector<std::string> tokens;
    if (line.find(' ') != std::string::npos && line.find(" = ") == std::string::npos) {
      while (words >> word) tokens.push_back(word);
    } else {
      tokens.push_back(line);
    }
    for (const std::string& tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        errors.push_back(where(line_no) + "expected key = value, got '" + tok + "'");
        continue;
      }
      const std::string key = trim(tok.substr(0, eq)), value = trim(tok.substr(eq + 1));
      if (key.empty() || value.empty()) {
        errors.push_back(where(line_no) + "empty key or value in '" + tok + "'");
        continue;
      }
      if (key == "kind") {
        if (!section.empty() && section != "scenario")
          errors.push_back(where(line_no) + "kind belongs in [scenario], found in [" + section + "]");
        try {
          kind = to_kind(value);
        } catch (const ConfigError& e) {
          errors.push_back(where(line_no) + e.what());
        }
        continue;
      }
      entries.push_back({line_no, section, key, value});
    }
  }
  if (!kind) errors.push_back(origin + ": missing required key 'kind'");
  ScenarioConfig c = default_config(kind.value_or(ScenarioKind::CUSTOM));
  for (const Entry& e : entries) {
    const std::string k = canonical(e.key);
    const auto it = keys().find(k);
    if (it == keys().end()) {
      errors.push_back(where(e.line) + "unknown key '" + e.key + "'");
      continue;
    }
    if (!e.section.empty() && e.section != it->second.section) {
      errors.push_back(where(e.line) + "key '" + e.key + "' belongs in [" + it->second.section + "], found in [" +
                       e.section + "]");
      continue;
    }
    try {
      it->second.set(c, k, e.value);
    } catch (const ConfigError& err) {
      errors.push_back(where(e.line) + err.what());
    }
  }
  if (errors.empty()) {
    try {
      validate(c);
    } catch (const ConfigError& err) {
      errors.push_back(origin + ": " + err.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid config";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

void validate(const ScenarioConfig& c) {
  std::vector<std::string> errs;
  auto pow2 = [](int n) { return n >= 8 && (n & (n - 1)) == 0; };
  if (!pow2(c.n_x)) errs.push_back("n_x must be a power of two >= 8, got " + std::to_string(c.n_x));
  if (!pow2(c.n_p)) errs.push_back("n_p must be a power of two >= 8, got " + std::to_string(c.n_p));
  if (!(c.x_max > c.x_min)) errs.push_back("x_max must exceed x_min");
  if (!(c.p_max > c.p_min)) errs.push_back("p_max must exceed p_min");
  if (!(c.packet.mass >= 0.0)) errs.push_back("mass must be non-negative");
  if (!(c.packet.width > 0.0)) errs.push_back("width must be positive");
  if (c.majorana_sign != 1 && c.majorana_sign != -1) errs.push_back("majorana_sign must be +1 or -1");
  if (!(c.steepness > 0.0)) errs.push_back("steepness must be positive");
  if (c.shape == PotentialShape::BARRIER && !(c.half_width > 0.0)) errs.push_back("barrier half_width must be positive");
  if (!(c.mass_curvature >= 0.0)) errs.push_back("mass_curvature must be non-negative");
  if (!(c.t_end >= 0.0)) errs.push_back("t_end must be non-negative");
  if (c.series_every < 1) errs.push_back("series_every must be >= 1");
  if (c.snapshot_every < 0) errs.push_back("snapshot_every must be >= 0");
  if (c.transmission_threshold && !(*c.transmission_threshold >= c.x_min && *c.transmission_threshold <= c.x_max))
    errs.push_back("transmission_threshold must lie inside [x_min, x_max]");
  if (c.kind != ScenarioKind::CUSTOM) {
    // height stays free: it is a sweep axis
    const ScenarioConfig d = default_config(c.kind);
    const std::string k(to_string(c.kind));
    if (c.shape != d.shape) errs.push_back("shape is fixed by kind " + k + "; use kind = CUSTOM");
    if (c.center != d.center || c.half_width != d.half_width || c.steepness != d.steepness)
      errs.push_back("potential geometry is fixed by kind " + k + "; use kind = CUSTOM");
    if (c.mass_curvature != d.mass_curvature) errs.push_back("mass_curvature is fixed by kind " + k + "; use kind = CUSTOM");
  }
  if (c.packet.x0 < c.x_min || c.packet.x0 > c.x_max) errs.push_back("x0 must lie inside [x_min, x_max]");
  if (c.packet.p_tilde < c.p_min || c.packet.p_tilde > c.p_max) errs.push_back("p_tilde must lie inside [p_min, p_max]");
  PropagatorConfig pc;
  pc.dt = c.dt;
  pc.D = c.D;
  pc.splitting = c.splitting;
  pc.causality_check = c.causality_check;
  try {
    validate(pc, c.packet.mass);
  } catch (const ConfigError& e) {
    errs.push_back(e.what());
  }
  if (!errs.empty()) {
    std::string msg = std::to_string(errs.size()) + " constraint violation(s):";
    for (const auto& e : errs) msg += "\n    " + e;
    throw ConfigError(msg);
  }
}

PhaseGrid make_grid(const ScenarioConfig& c) { return make_grid(c.n_x, c.n_p, c.x_min, c.x_max, c.p_min, c.p_max); }

Potential make_potential(const ScenarioConfig& c) {
  Potential v;
  v.mass = c.packet.mass;
  const double h = c.height, x0 = c.center, w = c.half_width, s = c.steepness;
  auto sech2 = [](double y) {
    const double ch = std::cosh(y);
    return 1.0 / (ch * ch);
  };
  switch (c.shape) {
    case PotentialShape::NONE:
      break;
    case PotentialShape::STEP:
      v.a0 = [=](double, double x) { return h * (1.0 + std::tanh(s * (x - x0))) / 2.0; };
      v.da0_dx = [=](double, double x) { return h * s * sech2(s * (x - x0)) / 2.0; };
      break;
    case PotentialShape::BARRIER:
      v.a0 = [=](double, double x) { return h * (std::tanh(s * (x - x0 + w)) + std::tanh(s * (w - x + x0))); };
      v.da0_dx = [=](double, double x) { return h * s * (sech2(s * (x - x0 + w)) - sech2(s * (w - x + x0))); };
      break;
  }
  if (c.mass_curvature > 0.0) {
    const double m = c.packet.mass, k = c.mass_curvature;
    v.mass_profile = [=](double x) { return m + k * x * x; };
    v.dmass_dx = [=](double x) { return 2.0 * k * x; };
  }
  return v;
}

SpinorField initial_spinor(const ScenarioConfig& c, const PhaseGrid& grid) {
  switch (c.initial) {
    case InitialState::GAUSSIAN:
      return gaussian_wavepacket(c.packet, grid);
    case InitialState::MAJORANA: {
      const auto [plus, minus] = majorana_pair(gaussian_wavepacket(c.packet, grid));
      return c.majorana_sign > 0 ? plus : minus;
    }
    case InitialState::CAT:
      return cat_state(c.packet, grid);
    case InitialState::PARTICLE_CAT:
      return particle_cat_state(c.packet, grid);
  }
  throw ConfigError("initial_spinor: unknown initial state");
}

MatrixPhaseField initial_state(const ScenarioConfig& c, const PhaseGrid& grid) {
  return wigner_from_spinor(initial_spinor(c, grid), grid);
}

std::vector<std::pair<double, double>> potential_regions(const ScenarioConfig& c, const PhaseGrid& grid) {
  std::vector<std::pair<double, double>> out;
  if (c.shape == PotentialShape::NONE || c.height == 0.0) return out;
  const Potential v = make_potential(c);
  double vmax = 0.0;
  for (int i = 0; i < grid.n_x; ++i) vmax = std::max(vmax, std::abs(v.a0_at(0, grid.x(i))));
  bool inside = false;
  for (int i = 0; i < grid.n_x; ++i) {
    const bool in = std::abs(v.a0_at(0, grid.x(i))) > 0.5 * vmax;
    if (in && !inside) out.push_back({grid.x(i), grid.x(i)});
    if (in) out.back().second = grid.x(i);
    inside = in;
  }
  return out;
}

std::string to_config_text(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "[scenario]\nkind = " << to_string(c.kind) << "\n";
  for (const char* sec : {"scenario", "grid", "packet", "potential", "dynamics", "output"}) {
    if (std::string(sec) != "scenario") os << "\n[" << sec << "]\n";
    for (const auto& [k, key] : keys())
      if (key.section == sec) os << k << " = " << key.get(c) << "\n";
  }
  return os.str();
}

}  // namespace dw
