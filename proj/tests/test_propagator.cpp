#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dw/errors.hpp"
#include "dw/observables.hpp"
#include "dw/propagator.hpp"
#include "dw/states.hpp"

using namespace dw;

namespace {

const cplx I(0.0, 1.0);

Matrix4 dense_kinetic(double p1, double p2, double m, double dt, int sign) {
  const Matrix4 k = p1 * alpha(1) + p2 * alpha(2) + 0.5 * m * beta();
  return expm(-I * double(sign) * dt * k);
}

Matrix4 dense_potential(double a0, const std::array<double, 3>& a, double m_half, double dt, int sign) {
  Matrix4 v = a0 * Matrix4::Identity() + m_half * beta();
  for (int k = 0; k < 3; ++k) v -= a[k] * alpha(k + 1);
  return expm(-I * double(sign) * dt * v);
}

double unitarity_error(const Matrix4& u) { return norm_inf(u * u.adjoint() - Matrix4::Identity()); }

Potential klein_step() {
  Potential v;
  v.mass = 1.0;
  v.a0 = [](double, double x) { return 10.0 * (1.0 + std::tanh(4.0 * (x - 5.0))) / 2.0; };
  return v;
}

MatrixPhaseField packet(const PhaseGrid& g, double p, double x0) {
  WavepacketSpec s;
  s.p_tilde = p;
  s.x0 = x0;
  MatrixPhaseField q = wigner_from_spinor(gaussian_wavepacket(s, g), g);
  to_representation(q, Representation::LAMBDA_P);
  return q;
}

double max_diff(const MatrixPhaseField& a, const MatrixPhaseField& b) {
  double m = 0.0;
  for (int c = 0; c < 16; ++c)
    for (std::size_t k = 0; k < a.grid().points(); ++k) {
      const cplx va = a.active(c) ? a.plane(c)[k] : cplx(0);
      const cplx vb = b.active(c) ? b.plane(c)[k] : cplx(0);
      m = std::max(m, std::abs(va - vb));
    }
  return m;
}

}  // namespace

TEST_CASE("kinetic_exponential closed form") {
  const Matrix4 e = kinetic_exponential(0, 0, 1, 0.01, +1);
  CHECK(std::abs(e(0, 0) - std::exp(cplx(0, -0.005))) < 1e-16);
  CHECK(std::abs(e(1, 1) - std::exp(cplx(0, -0.005))) < 1e-16);
  CHECK(std::abs(e(2, 2) - std::exp(cplx(0, 0.005))) < 1e-16);
  CHECK(std::abs(e(3, 3) - std::exp(cplx(0, 0.005))) < 1e-16);
  CHECK(norm_inf(e - e.diagonal().asDiagonal().toDenseMatrix()) == 0.0);

  CHECK(norm_inf(kinetic_exponential(1.3, -0.4, 1, 0.0, +1) - Matrix4::Identity()) == 0.0);
  CHECK(norm_inf(kinetic_exponential(1.3, -0.4, 1, 0.01, +1) - dense_kinetic(1.3, -0.4, 1, 0.01, +1)) < 1e-12);

  // entry relations of the documented closed form
  const Matrix4 k = kinetic_exponential(0.7, 0.2, 1.0, 0.3, +1);
  CHECK(std::abs(k(1, 2) + std::conj(k(0, 3))) < 1e-15);
  CHECK(std::abs(k(3, 0) + std::conj(k(0, 3))) < 1e-15);
  CHECK(k(2, 1) == k(0, 3));
  CHECK(std::abs(k(2, 2) - std::conj(k(0, 0))) < 1e-15);
}

TEST_CASE("potential_exponential closed form") {
  const std::array<double, 3> zero{};
  CHECK(norm_inf(potential_exponential(0, zero, 0.5, 0.01, +1) - kinetic_exponential(0, 0, 1, 0.01, +1)) < 1e-16);
  const Matrix4 e = potential_exponential(10, zero, 0.5, 0.01, +1);
  CHECK(norm_inf(e - std::exp(cplx(0, -0.1)) * kinetic_exponential(0, 0, 1, 0.01, +1)) < 1e-15);
  CHECK(norm_inf(e - dense_potential(10, zero, 0.5, 0.01, +1)) < 1e-12);
}

TEST_CASE("analytic exponentials match the dense oracle on 1000 random inputs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_real_distribution<double> step(0, 0.5);
  double worst_k = 0, worst_v = 0, worst_unit = 0;
  for (int s = 0; s < 1000; ++s) {
    const double p1 = u(rng), p2 = u(rng), m = std::abs(u(rng)) / 5, dt = step(rng);
    const int sign = (s % 2) ? 1 : -1;
    const Matrix4 k = kinetic_exponential(p1, p2, m, dt, sign);
    worst_k = std::max(worst_k, norm_inf(k - dense_kinetic(p1, p2, m, dt, sign)));
    const std::array<double, 3> a{u(rng), u(rng), u(rng)};
    const double a0 = u(rng), mh = u(rng) / 10;
    const Matrix4 v = potential_exponential(a0, a, mh, dt, sign);
    worst_v = std::max(worst_v, norm_inf(v - dense_potential(a0, a, mh, dt, sign)));
    worst_unit = std::max({worst_unit, unitarity_error(k), unitarity_error(v)});
    // sign -1 is the adjoint of sign +1
    CHECK(norm_inf(kinetic_exponential(p1, p2, m, dt, -sign) - k.adjoint()) < 1e-14);
  }
  CHECK(worst_k < 1e-12);
  CHECK(worst_v < 1e-12);
  CHECK(worst_unit < 1e-13);
}

TEST_CASE("config validation") {
  PropagatorConfig c;
  c.D = 0.3;
  c.causality_check = true;
  CHECK_THROWS_AS(validate(c, 1.0), ConfigError);
  c.D = 0.02;
  CHECK_NOTHROW(validate(c, 1.0));
  c.causality_check = false;
  c.D = 0.3;
  CHECK_NOTHROW(validate(c, 1.0));

  PropagatorConfig bad;
  bad.dt = -1;
  bad.D = -0.1;
  try {
    validate(bad, 1.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("dt") != std::string::npos);
    CHECK(msg.find("D must") != std::string::npos);
  }
}

TEST_CASE("steps reject the wrong representation") {
  const PhaseGrid g = make_grid(32, 32, -8, 8, -8, 8);
  MatrixPhaseField q(g, Representation::X_P);
  Propagator prop(g, PropagatorConfig{}, free_potential(1.0));
  CHECK_THROWS_AS(prop.kinetic_step(q, 0.01), ConfigError);
  CHECK_THROWS_AS(prop.potential_step(q, 0.0, 0.01), ConfigError);
}

TEST_CASE("component closure keeps (a,0,0,b) states on four planes") {
  const PhaseGrid g = make_grid(32, 32, -8, 8, -8, 8);
  Propagator prop(g, PropagatorConfig{}, klein_step());
  ComponentMask m;
  for (int a : {0, 3})
    for (int b : {0, 3}) m.set(component(a, b));
  CHECK(prop.closure(m) == m);
  CHECK(prop.closure(ComponentMask().set(component(1, 1))).count() == 4);
  Potential full = klein_step();
  full.a_vec[2] = [](double, double) { return 0.1; };
  CHECK(Propagator(g, PropagatorConfig{}, full).closure(m).count() == 16);
}

TEST_CASE("potential step: half-mass rotation leaves w0 unchanged, dephasing is a Gaussian in theta") {
  const PhaseGrid g = make_grid(64, 64, -10, 10, -10, 10);
  MatrixPhaseField q = converted(packet(g, 2.0, 0.0), Representation::X_THETA);

  const MatrixPhaseField rotated = potential_step(q, 0.0, 0.01, 0.0, free_potential(1.0));
  const W0Field before = w0(converted(q, Representation::X_P));
  const W0Field after = w0(converted(rotated, Representation::X_P));
  double d = 0.0;
  for (std::size_t k = 0; k < before.values.size(); ++k) d = std::max(d, std::abs(before.values[k] - after.values[k]));
  CHECK(d < 1e-15);

  const MatrixPhaseField damped = potential_step(q, 0.0, 0.01, 0.01, free_potential(0.0));
  double worst = 0.0;
  for (int c = 0; c < 16; ++c) {
    if (!q.active(c)) continue;
    for (int i = 0; i < g.n_x; ++i)
      for (int k = 0; k < g.n_p; ++k) {
        const double th = g.theta(k);
        const cplx expect = q.plane(c)[q.index(i, k)] * std::exp(-0.0001 * th * th);
        worst = std::max(worst, std::abs(damped.plane(c)[q.index(i, k)] - expect));
      }
  }
  CHECK(worst < 1e-16);

  // theta = 0 column untouched by dephasing: x-marginal unchanged within a step
  const MatrixPhaseField damped_m = potential_step(q, 0.0, 0.01, 0.5, free_potential(1.0));
  const auto mx0 = marginal_x(converted(q, Representation::X_P));
  const auto mx1 = marginal_x(converted(damped_m, Representation::X_P));
  for (int i = 0; i < g.n_x; ++i) CHECK(std::abs(mx0[i] - mx1[i]) < 1e-14);
}

TEST_CASE("kinetic step keeps the lambda = 0 row Hermitian; free step equals kinetic step") {
  const PhaseGrid g = make_grid(64, 64, -10, 10, -10, 10);
  const MatrixPhaseField q = packet(g, 2.0, -1.0);
  const MatrixPhaseField k = kinetic_step(q, 0.05, free_potential(1.0));
  double herm = 0.0, herm_in = 0.0, scale = 0.0;
  for (int j = 0; j < g.n_p; ++j) {
    herm = std::max(herm, norm_inf(k.at(g.n_x / 2, j) - k.at(g.n_x / 2, j).adjoint()));
    herm_in = std::max(herm_in, norm_inf(q.at(g.n_x / 2, j) - q.at(g.n_x / 2, j).adjoint()));
    scale = std::max(scale, norm_inf(q.at(g.n_x / 2, j)));
  }
  CHECK(herm <= herm_in + 1e-15 * scale);

  PropagatorConfig c;
  c.dt = 0.05;
  const MatrixPhaseField s = step(q, 0.0, c, free_potential(0.0));
  const MatrixPhaseField k0 = kinetic_step(q, 0.05, free_potential(0.0));
  CHECK(max_diff(s, k0) < 1e-12);
}

TEST_CASE("one dephasing step keeps Q Hermitian pointwise in X_P") {
  const PhaseGrid g = make_grid(64, 64, -10, 10, -10, 10);
  PropagatorConfig c;
  c.D = 0.2;
  c.dt = 0.05;
  const MatrixPhaseField q = step(packet(g, 2.0, 0.0), 0.0, c, klein_step());
  const MatrixPhaseField w = converted(q, Representation::X_P);
  double herm = 0.0;
  for (int i = 0; i < g.n_x; ++i)
    for (int j = 0; j < g.n_p; ++j) herm = std::max(herm, norm_inf(w.at(i, j) - w.at(i, j).adjoint()));
  CHECK(herm < 1e-10);
}

TEST_CASE("evolve: zero span, norm conservation, observers, NaN abort") {
  const PhaseGrid g = make_grid(128, 128, -20, 20, -20, 20);
  const MatrixPhaseField q0 = packet(g, 5.0, -5.0);
  PropagatorConfig c;
  const EvolveResult same = evolve(q0, 1.0, 1.0, c, free_potential(1.0));
  CHECK(same.steps == 0);
  CHECK(max_diff(same.q, q0) == 0.0);
  CHECK_THROWS_AS(evolve(q0, 1.0, 0.5, c, free_potential(1.0)), ConfigError);

  EvolveOptions opts;
  std::vector<long> seen;
  opts.observers.push_back({25, [&](long s, double, const MatrixPhaseField&) { seen.push_back(s); }});
  const EvolveResult r = evolve(q0, 0.0, 1.0, c, free_potential(1.0), opts);
  CHECK(r.steps == 100);
  CHECK(seen == std::vector<long>{0, 25, 50, 75, 100});
  CHECK(std::abs(norm(converted(r.q, Representation::X_P)) - 1.0) < 1e-10);

  // shortened uniform step when the span is not a multiple of dt
  const EvolveResult odd = evolve(q0, 0.0, 0.105, c, free_potential(1.0));
  CHECK(odd.steps == 11);

  Potential broken = free_potential(1.0);
  broken.a0 = [](double, double x) { return x > 3.0 ? std::nan("") : 0.0; };
  try {
    evolve(q0, 0.0, 0.05, c, broken);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("boundary warnings fire when the packet reaches the edge") {
  const PhaseGrid g = make_grid(64, 64, -10, 10, -10, 10);
  const MatrixPhaseField centred = converted(packet(g, 0.0, 0.0), Representation::X_P);
  CHECK(boundary_check(centred, 0.0).empty());
  const MatrixPhaseField edge = converted(packet(g, 0.0, 9.2), Representation::X_P);
  const auto w = boundary_check(edge, 0.0);
  REQUIRE(!w.empty());
  const auto top = std::max_element(w.begin(), w.end(), [](const auto& a, const auto& b) { return a.weight < b.weight; });
  CHECK(top->boundary == "x_max");
  CHECK(top->weight > 0.5);
}

TEST_CASE("free run: centroid moves at the group velocity, d<x>/dt = <alpha>") {
  const PhaseGrid g = make_grid(256, 256, -20, 20, -20, 20);
  WavepacketSpec s;
  s.p_tilde = 5;
  s.x0 = -5;
  s.width = 4;  // narrow momentum spread
  MatrixPhaseField q = wigner_from_spinor(gaussian_wavepacket(s, g), g);
  const double x0 = x_mean(q);
  to_representation(q, Representation::LAMBDA_P);
  PropagatorConfig c;
  EvolveOptions opts;
  std::vector<double> v;
  opts.observers.push_back(
      {1, [&](long, double, const MatrixPhaseField& f) { v.push_back(velocity_mean(converted(f, Representation::X_P))); }});
  const EvolveResult r = evolve(q, 0.0, 1.0, c, free_potential(1.0), opts);
  const MatrixPhaseField w = converted(r.q, Representation::X_P);
  const double moved = x_mean(w) - x0;
  CHECK(moved == doctest::Approx(5.0 / std::sqrt(26.0)).epsilon(0.01));
  // trapezoid integral of <alpha>
  REQUIRE(v.size() == 101);
  double integral = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) integral += 0.5 * (v[k] + v[k - 1]) * c.dt;
  CHECK(moved == doctest::Approx(integral).epsilon(1e-4));
}

TEST_CASE("free dephasing: trace and energy conserved, <p^2> grows as 2 D t") {
  const PhaseGrid g = make_grid(256, 256, -20, 20, -20, 20);
  MatrixPhaseField q = packet(g, 5.0, -3.0);
  const MatrixPhaseField w_start = converted(q, Representation::X_P);
  const double e0 = energy_free(w_start, 1.0);
  const MomentumMoments m0 = momentum_moments(w_start);
  PropagatorConfig c;
  c.D = 0.01;
  const double t = 3.0;
  const EvolveResult r = evolve(q, 0.0, t, c, free_potential(1.0));
  const MatrixPhaseField w = converted(r.q, Representation::X_P);
  CHECK(std::abs(norm(w) - 1.0) < 1e-9);
  // the energy shift is a splitting error: Strang, second order in dt, with
  // or without dephasing
  auto shift = [&](double dt, double D) {
    PropagatorConfig cs;
    cs.splitting = Splitting::STRANG;
    cs.dt = dt;
    cs.D = D;
    return energy_free(converted(evolve(q, 0.0, t, cs, free_potential(1.0)).q, Representation::X_P), 1.0) - e0;
  };
  const double coarse = shift(0.02, c.D) - shift(0.02, 0.0);
  const double fine = shift(0.01, c.D) - shift(0.01, 0.0);
  MESSAGE("first-order drift " << energy_free(w, 1.0) - e0 << ", dephasing part " << coarse << " -> " << fine);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
  const MomentumMoments m1 = momentum_moments(w);
  CHECK((m1.p2_mean - m0.p2_mean) == doctest::Approx(2 * c.D * t).epsilon(0.01));
  CHECK(std::abs(m1.p_mean - m0.p_mean) < 1e-9);
}

TEST_CASE("lifting the spinor solution equals evolving the lifted state (Klein step, D = 0)") {
  const PhaseGrid g = make_grid(256, 256, -20, 20, -20, 20);
  WavepacketSpec s;
  s.p_tilde = 5;
  s.x0 = -5;
  const SpinorField psi0 = gaussian_wavepacket(s, g);
  PropagatorConfig c;
  const double t_end = 4.0;
  const long n = std::lround(t_end / c.dt);

  SpinorPropagator sp(g, c, klein_step());
  std::vector<Vector4> psi = psi0.values;
  for (long k = 0; k < n; ++k) sp.step(psi, k * c.dt);
  SpinorField psi_t = psi0;
  psi_t.values = psi;

  MatrixPhaseField q = wigner_from_spinor(psi0, g);
  to_representation(q, Representation::LAMBDA_P);
  const EvolveResult r = evolve(q, 0.0, t_end, c, klein_step());
  const W0Field evolved = w0(converted(r.q, Representation::X_P));
  const W0Field lifted = w0(wigner_from_spinor(psi_t, g));
  double worst = 0.0;
  for (std::size_t k = 0; k < evolved.values.size(); ++k)
    worst = std::max(worst, std::abs(evolved.values[k] - lifted.values[k]));
  MESSAGE("max |w0 difference| = " << worst);
  CHECK(worst < 1e-6);
}
