#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "dw/errors.hpp"
#include "dw/observables.hpp"
#include "dw/states.hpp"

using namespace dw;

namespace {

const PhaseGrid kGrid = make_grid(256, 256, -20, 20, -20, 20);

MatrixPhaseField lift(const WavepacketSpec& s) { return wigner_from_spinor(gaussian_wavepacket(s, kGrid), kGrid); }

}  // namespace

TEST_CASE("pairwise_sum") {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(pairwise_sum(v) == 500500.0);
  CHECK(pairwise_sum(nullptr, 0) == 0.0);
}

TEST_CASE("w0 and marginals") {
  WavepacketSpec s;
  s.p_tilde = 5;
  const MatrixPhaseField q = lift(s);
  const W0Field w = w0(q);
  CHECK(w.max_imag < 1e-10);
  double lo = 0.0;
  for (double v : w.values) lo = std::min(lo, v);
  CHECK(lo >= -1e-10);
  CHECK(std::abs(norm(q) - 1.0) < 1e-10);
  CHECK(pairwise_sum(marginal_p(q)) * kGrid.dp == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(w0(converted(q, Representation::LAMBDA_P)), ConfigError);
  CHECK_THROWS_AS(marginal_x(converted(q, Representation::X_THETA)), ConfigError);
}

TEST_CASE("negativity") {
  MatrixPhaseField pos(kGrid, Representation::X_P, ComponentMask().set(0));
  for (std::size_t k = 0; k < kGrid.points(); ++k) pos.plane(0)[k] = 0.5;
  CHECK(negativity(pos).value == 0.0);
  CHECK(negativity(pos).most_negative == 0.0);

  WavepacketSpec s;
  s.p_tilde = 5;
  CHECK(negativity(lift(s)).magnitude() < 1e-6);

  // lobe amplitudes of psi^M+ differ slightly, so its fringe contrast (and
  // negativity) stays just below that of the equal-weight cat state
  const SpinorField psi = gaussian_wavepacket(s, kGrid);
  const Negativity nm = negativity(wigner_from_spinor(majorana_state(psi, +1), kGrid));
  const Negativity nc = negativity(wigner_from_spinor(cat_state(s, kGrid), kGrid));
  MESSAGE("N_majorana = " << nm.value << ", N_cat = " << nc.value);
  CHECK(nm.value <= 0.0);
  CHECK(nm.magnitude() < nc.magnitude());
  CHECK(nm.magnitude() > 0.9 * nc.magnitude());
  // with an eigenspinor per branch the fringe contrast drops to m/E
  const Negativity np = negativity(wigner_from_spinor(particle_cat_state(s, kGrid), kGrid));
  MESSAGE("N_particle_cat = " << np.value);
  CHECK(np.magnitude() < 0.5 * nm.magnitude());
  CHECK(nm.most_negative < 0.0);
}

TEST_CASE("transmission") {
  WavepacketSpec s;
  s.x0 = -10;
  s.p_tilde = 5;
  const MatrixPhaseField q = lift(s);
  CHECK(transmission(q, 0.0) < 1e-6);
  CHECK(transmission(q, kGrid.x_min) > 1 - 1e-12);
  CHECK(transmission(q, 0.0) + (1 - transmission(q, 0.0)) == 1.0);
  CHECK_THROWS_AS(transmission(q, 25.0), ConfigError);
}

TEST_CASE("energy projectors") {
  for (int j = 0; j < kGrid.n_p; ++j) {
    const double p = kGrid.p(j);
    const Matrix4 lp = energy_projector(p, 1.0, +1);
    const Matrix4 lm = energy_projector(p, 1.0, -1);
    CHECK(norm_inf(lp + lm - Matrix4::Identity()) < 1e-12);
    CHECK(norm_inf(lp * lp - lp) < 1e-12);
    CHECK(norm_inf(lm * lm - lm) < 1e-12);
  }
}

TEST_CASE("antiparticle fraction") {
  WavepacketSpec s;
  s.p_tilde = 5;
  s.width = 4;
  CHECK(antiparticle_fraction(lift(s), 1.0) < 0.01);

  WavepacketSpec m;
  m.p_tilde = 5;
  const SpinorField psi = gaussian_wavepacket(m, kGrid);
  const double f = antiparticle_fraction(wigner_from_spinor(majorana_state(psi, +1), kGrid), 1.0);
  MESSAGE("Majorana antiparticle fraction = " << f);
  CHECK(std::abs(f - 0.5) < 0.02);
}

TEST_CASE("moments and energy") {
  WavepacketSpec s;
  s.p_tilde = 0;
  s.x0 = 2;
  const MatrixPhaseField rest = lift(s);
  CHECK(std::abs(momentum_moments(rest).p_mean) < 1e-10);
  CHECK(x_mean(rest) == doctest::Approx(2.0).epsilon(1e-10));
  // Gaussian exp(-x^2/2): <p^2> = 1/2
  CHECK(momentum_moments(rest).p2_mean == doctest::Approx(0.5).epsilon(1e-8));

  s.p_tilde = 5;
  s.width = 4;
  const double e = energy_free(lift(s), 1.0);
  CHECK(e == doctest::Approx(std::sqrt(26.0)).epsilon(2e-3));
}

TEST_CASE("measure and ObservableSeries") {
  WavepacketSpec s;
  s.p_tilde = 5;
  s.x0 = -5;
  const MatrixPhaseField q = lift(s);
  const ObservableRecord r = measure(converted(q, Representation::LAMBDA_P), 1.0, 5.0);
  CHECK(r.norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.x_mean == doctest::Approx(x_mean(q)).epsilon(1e-10));
  CHECK(r.abs_negativity == -r.negativity);
  CHECK(std::isnan(measure(q, 1.0, std::nullopt).transmission));

  ObservableSeries series;
  series.append(0.0, r);
  series.append(0.1, r);
  CHECK_THROWS_AS(series.append(0.1, r), ConfigError);
  CHECK(series.size() == 2);
}
