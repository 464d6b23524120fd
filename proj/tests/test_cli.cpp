#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "dw/errors.hpp"
#include "dw/heatmap.hpp"
#include "dw/runner.hpp"
#include "dw/snapshot.hpp"

using namespace dw;
namespace fs = std::filesystem;

namespace {

const fs::path kScratchRoot = fs::temp_directory_path() / ("dw_test_cli_" + std::to_string(::getpid()));

struct ScratchCleanup {
  ~ScratchCleanup() {
    std::error_code ec;
    fs::remove_all(kScratchRoot, ec);
  }
} cleanup;

fs::path scratch(const std::string& name) {
  const fs::path p = kScratchRoot / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ScenarioConfig small(ScenarioKind kind) {
  ScenarioConfig c = default_config(kind);
  c.n_x = c.n_p = 64;
  c.t_end = 0.2;
  c.dt = 0.02;
  c.series_every = 2;
  return c;
}

}  // namespace

TEST_CASE("parse_config: minimal file gets defaults") {
  const ScenarioConfig c = parse_config_text("kind=KLEIN_STEP\n");
  CHECK(c.kind == ScenarioKind::KLEIN_STEP);
  CHECK(c.packet.p_tilde == 5.0);
  CHECK(c.packet.mass == 1.0);
  CHECK(c.packet.x0 == -5.0);
  CHECK(c.n_x == 512);
  CHECK(c.n_p == 512);
  CHECK(c.x_min == -20.0);
  CHECK(c.p_max == 20.0);
  CHECK(c.dt == 0.01);
  CHECK(c.D == 0.0);
  CHECK(c.splitting == Splitting::FIRST_ORDER);
  CHECK(c.shape == PotentialShape::STEP);
  CHECK(c.height == 10.0);
  CHECK(*c.transmission_threshold == 5.0);

  const ScenarioConfig b = parse_config_text("kind = KLEIN_BARRIER");
  CHECK(b.packet.x0 == -10.0);
  CHECK(b.t_end == 24.0);
  CHECK(parse_config_text("kind = MAJORANA_MASS").mass_curvature == 0.05);
  CHECK(parse_config_text("kind = CAT_FREE").initial == InitialState::CAT);
}

TEST_CASE("parse_config: errors") {
  CHECK_THROWS_AS(parse_config_text("D = 0.1\n"), ConfigError);
  try {
    parse_config_text("kind=MAJORANA_FREE\nD=0.3 m=1 causality_check=true\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("0.3") != std::string::npos);
  }
  try {
    parse_config_text("[scenario]\nkind = KLEIN_STEP\nbogus = 1\n[grid]\nn_x = 100\ndt = 0.1\n", "f.conf");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("f.conf:3: unknown key 'bogus'") != std::string::npos);
    CHECK(msg.find("f.conf:6: key 'dt' belongs in [dynamics]") != std::string::npos);
  }
  try {
    parse_config_text("kind = KLEIN_STEP\nn_x = 100\nwidth = -1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("n_x") != std::string::npos);
    CHECK(msg.find("width") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("kind = KLEIN_STEP\ndt = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("kind = NOPE\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("kind = KLEIN_STEP\n[weird]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(fs::path("/nonexistent/x.conf")), IoError);
  // built-in kinds fix the potential except its height
  CHECK_THROWS_AS(parse_config_text("kind = KLEIN_STEP\nshape = barrier\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("kind = KLEIN_BARRIER\nhalf_width = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("kind = MAJORANA_FREE\nmass_curvature = 0.1\n"), ConfigError);
  CHECK(parse_config_text("kind = KLEIN_BARRIER\nheight = 7\n").height == 7.0);
  CHECK(parse_config_text("kind = CUSTOM\nshape = barrier\nhalf_width = 2\n").half_width == 2.0);
}

TEST_CASE("config text round trip") {
  ScenarioConfig c = default_config(ScenarioKind::CUSTOM);
  c.name = "my run";
  c.shape = PotentialShape::BARRIER;
  c.half_width = 2.5;
  c.height = 0.1 + 0.2;
  c.initial = InitialState::MAJORANA;
  c.splitting = Splitting::STRANG;
  c.transmission_threshold = 1.25;
  const ScenarioConfig d = parse_config_text(to_config_text(c));
  CHECK(to_config_text(d) == to_config_text(c));
  CHECK(d.height == c.height);
  CHECK(d.name == "my run");
}

TEST_CASE("built-in potentials") {
  const ScenarioConfig s = default_config(ScenarioKind::KLEIN_STEP);
  const Potential v = make_potential(s);
  CHECK(v.a0_at(0, 5.0) == doctest::Approx(5.0));
  CHECK(v.a0_at(0, 20.0) == doctest::Approx(10.0));
  CHECK(v.da0_dx(0, 5.0) == doctest::Approx(20.0));
  const Potential b = make_potential(default_config(ScenarioKind::KLEIN_BARRIER));
  CHECK(b.a0_at(0, 0.0) == doctest::Approx(10 * std::tanh(16.0)));
  CHECK(b.a0_at(0, 4.0) == doctest::Approx(5 * std::tanh(32.0)));
  const double h = 1e-6;
  CHECK(b.da0_dx(0, 3.9) == doctest::Approx((b.a0_at(0, 3.9 + h) - b.a0_at(0, 3.9 - h)) / (2 * h)).epsilon(1e-6));
  const Potential m = make_potential(default_config(ScenarioKind::MAJORANA_MASS));
  CHECK(m.mass_at(2.0) == doctest::Approx(1.2));
  CHECK(m.mass == 1.0);

  const PhaseGrid g = make_grid(s);
  const auto regions = potential_regions(s, g);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].first == doctest::Approx(5.0).epsilon(0.02));
  CHECK(regions[0].second == doctest::Approx(g.x(g.n_x - 1)));
}

TEST_CASE("snapshot round trip and corruption") {
  ScenarioConfig c = small(ScenarioKind::MAJORANA_FREE);
  const PhaseGrid g = make_grid(c);
  const MatrixPhaseField q = initial_state(c, g);
  const fs::path dir = scratch("snap");
  fs::create_directories(dir);

  write_snapshot(dir / "w.dwps", q, 1.5, SnapshotPayload::W0_REAL);
  const Snapshot w = read_snapshot(dir / "w.dwps");
  CHECK(w.header.n_x == 64);
  CHECK(w.header.time == 1.5);
  CHECK(w.payload == w0(q).values);
  double sum = 0.0;
  for (double v : w.payload) sum += v;
  CHECK(std::abs(sum * g.dx * g.dp - 1.0) < 1e-9);

  write_snapshot(dir / "f.dwps", q, 0.0, SnapshotPayload::FULL_MATRIX);
  const Snapshot f = read_snapshot(dir / "f.dwps");
  CHECK(f.payload.size() == 32 * g.points());
  const MatrixPhaseField back = snapshot_field(f);
  bool same = true;
  for (int c2 = 0; c2 < 16; ++c2)
    for (std::size_t k = 0; k < g.points(); ++k) {
      const cplx a = q.active(c2) ? q.plane(c2)[k] : cplx(0);
      const cplx b = back.active(c2) ? back.plane(c2)[k] : cplx(0);
      same = same && std::memcmp(&a, &b, sizeof a) == 0;
    }
  CHECK(same);
  write_snapshot(dir / "f2.dwps", f);
  CHECK(slurp(dir / "f.dwps") == slurp(dir / "f2.dwps"));

  std::string bytes = slurp(dir / "w.dwps");
  bytes[0] = 'X';
  std::ofstream(dir / "bad.dwps", std::ios::binary) << bytes;
  CHECK_THROWS_AS(read_snapshot(dir / "bad.dwps"), IoError);
  bytes = slurp(dir / "w.dwps");
  std::ofstream(dir / "short.dwps", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_THROWS_AS(read_snapshot(dir / "short.dwps"), IoError);
  bytes[4] = 9;
  std::ofstream(dir / "ver.dwps", std::ios::binary) << bytes;
  CHECK_THROWS_AS(read_snapshot(dir / "ver.dwps"), IoError);
}

TEST_CASE("heatmap colours, percentile and files") {
  CHECK(diverging_color(0.0) == Rgb{247, 247, 247});
  CHECK(diverging_color(-1.0) == Rgb{5, 48, 97});
  CHECK(diverging_color(5.0) == Rgb{103, 0, 31});
  CHECK(diverging_color(0.5)[0] > diverging_color(0.5)[2]);
  std::vector<double> v(1000);
  for (int k = 0; k < 1000; ++k) v[k] = (k % 2 ? -1.0 : 1.0) * (k + 1);
  CHECK(abs_percentile(v, 99.5) == 995.0);
  CHECK(abs_percentile(v, 100) == 1000.0);

  const ScenarioConfig c = small(ScenarioKind::KLEIN_STEP);
  const PhaseGrid g = make_grid(c);
  const MatrixPhaseField q = initial_state(c, g);
  const std::vector<double> w = w0(q).values;
  const std::vector<double> before = w;
  const fs::path dir = scratch("heat");
  fs::create_directories(dir);
  const HeatmapInfo info = write_heatmap(dir / "h.png", w, g, 0.0, potential_regions(c, g));
  CHECK(w == before);
  CHECK(info.width == 64);
  CHECK(info.scale == abs_percentile(w, kHeatmapPercentile));
  CHECK(slurp(dir / "h.png").substr(1, 3) == "PNG");
  CHECK(slurp(dir / "h.png.json").find("\"gray_regions\"") != std::string::npos);
  CHECK_THROWS_AS(write_heatmap(dir / "x.png", std::vector<double>(3), g, 0.0), ConfigError);
  CHECK_THROWS_AS(write_heatmap("/nonexistent/dir/x.png", w, g, 0.0), IoError);
}

TEST_CASE("run writes series, snapshots and heatmaps deterministically") {
  ScenarioConfig c = small(ScenarioKind::KLEIN_STEP);
  c.snapshot_every = 5;
  c.output_dir = scratch("run_a");
  const RunResult a = run(c);
  CHECK(a.steps == 10);
  CHECK(a.series.size() == 6);
  const std::string csv = slurp(c.output_dir / "series.csv");
  CHECK(csv.rfind("t,norm,negativity,abs_negativity,transmission,antiparticle_fraction,energy,p_mean,p2_mean,x_mean\n", 0) == 0);
  CHECK(fs::exists(c.output_dir / "snapshots" / "step_00000005.dwps"));
  CHECK(fs::exists(c.output_dir / "heatmaps" / "step_00000010.png"));
  CHECK(fs::exists(c.output_dir / "heatmaps" / "step_00000010.png.json"));
  CHECK(parse_config(c.output_dir / "config.txt").n_x == 64);

  c.output_dir = scratch("run_b");
  run(c);
  CHECK(slurp(c.output_dir / "series.csv") == csv);

  // 17 significant digits
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  std::getline(rows, line);
  CHECK(line.rfind("0.040000000000000001,", 0) == 0);
}

TEST_CASE("sweep") {
  ScenarioConfig c = small(ScenarioKind::KLEIN_BARRIER);
  c.packet.x0 = -5;
  c.output_dir = scratch("sweep");
  CHECK_THROWS_AS(sweep(c, "D", {}), ConfigError);
  CHECK_THROWS_AS(sweep(c, "dt", {"0.1"}), ConfigError);
  CHECK_THROWS_AS(sweep(c, "D", {"0", "x"}), ConfigError);

  const SweepResult one = sweep(c, "D", {"0"});
  REQUIRE(one.ok());
  RunOptions quiet;
  quiet.write_files = false;
  const RunResult direct = run(c, quiet);
  CHECK(one.runs[0].result.series.records().back().x_mean == direct.series.records().back().x_mean);

  const SweepResult par = sweep(c, "D", {"0", "0.005", "0.01"}, 3);
  REQUIRE(par.ok());
  CHECK(par.runs.size() == 3);
  CHECK(fs::exists(c.output_dir / "D=0.005" / "series.csv"));
  CHECK(fs::exists(c.output_dir / "sweep.csv"));
  CHECK(fs::exists(c.output_dir / "transmission.png"));
  const SweepResult seq = sweep(c, "D", {"0", "0.005", "0.01"}, 1, quiet);
  for (int k = 0; k < 3; ++k)
    CHECK(seq.runs[k].result.series.records().back().transmission ==
          par.runs[k].result.series.records().back().transmission);
}

TEST_CASE("run reports numerical and I/O failures") {
  ScenarioConfig c = small(ScenarioKind::KLEIN_STEP);
  c.output_dir = "/proc/forbidden/run";
  CHECK_THROWS_AS(run(c), IoError);
  c.dt = -1;
  CHECK_THROWS_AS(run(c), ConfigError);
}
