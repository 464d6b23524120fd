#include "dw/classical.hpp"

#include <cmath>
#include <sstream>

#include "dw/errors.hpp"

namespace dw {

namespace {

double kinetic_energy(const std::array<double, 3>& pi, double m) {
  return std::sqrt(pi[0] * pi[0] + pi[1] * pi[1] + pi[2] * pi[2] + m * m);
}

double derivative(const std::function<double(double)>& f, double x) {
  const double h = 1e-3;
  return (8.0 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12.0 * h);
}

struct Rates {
  double xdot, pdot;
};

Rates rates(const Potential& pot, int sign, double t, double x, double p) {
  const double pi = p - pot.a_at(0, t, x);
  const double m = pot.mass_at(x);
  const double e = std::sqrt(pi * pi + m * m);
  const double da0 = pot.da0_dx ? pot.da0_dx(t, x) : derivative([&](double y) { return pot.a0_at(t, y); }, x);
  const double da1 = pot.da1_dx ? pot.da1_dx(t, x) : derivative([&](double y) { return pot.a_at(0, t, y); }, x);
  const double dm = pot.dmass_dx ? pot.dmass_dx(x) : derivative([&](double y) { return pot.mass_at(y); }, x);
  return {sign * pi / e, -da0 + sign * (pi * da1 - m * dm) / e};
}

}  // namespace

Matrix4 foldy_unitary(const std::array<double, 3>& p, const std::array<double, 3>& a_vec, double m) {
  const std::array<double, 3> pi{p[0] - a_vec[0], p[1] - a_vec[1], p[2] - a_vec[2]};
  const double e = kinetic_energy(pi, m);
  if (!(e + m > 1e-300)) throw NumericalError("foldy_unitary: E + m vanishes (massless at zero kinetic momentum)");
  Matrix4 apm = Matrix4::Zero();
  for (int k = 0; k < 3; ++k) apm += pi[k] * alpha(k + 1);
  return std::sqrt((e + m) / (2 * e)) * (Matrix4::Identity() + beta() * apm / (e + m));
}

Matrix4 dirac_symbol(const std::array<double, 3>& p, const std::array<double, 3>& a_vec, double a0, double m) {
  Matrix4 h = m * beta() + a0 * Matrix4::Identity();
  for (int k = 0; k < 3; ++k) h += (p[k] - a_vec[k]) * alpha(k + 1);
  return h;
}

std::pair<double, double> classical_hamiltonians(double x, double p, const Potential& potential, double t) {
  const double pi = p - potential.a_at(0, t, x);
  const double m = potential.mass_at(x);
  const double a0 = potential.a0_at(t, x);
  const double e = std::sqrt(pi * pi + m * m);
  return {a0 + e, a0 - e};
}

DiagonalizationResidue diagonalization_check(const std::array<double, 3>& p, const std::array<double, 3>& a_vec,
                                             double a0, double m) {
  const Matrix4 u = foldy_unitary(p, a_vec, m);
  const Matrix4 d = u * dirac_symbol(p, a_vec, a0, m) * u.adjoint();
  const double e = kinetic_energy({p[0] - a_vec[0], p[1] - a_vec[1], p[2] - a_vec[2]}, m);
  const double expected[4] = {a0 + e, a0 + e, a0 - e, a0 - e};
  DiagonalizationResidue r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j)
        r.diagonal = std::max(r.diagonal, std::abs(d(i, i) - expected[i]));
      else
        r.off_diagonal = std::max(r.off_diagonal, std::abs(d(i, j)));
    }
  return r;
}

Trajectory integrate_trajectory(const ClassicalPoint& start, const Potential& potential, double dt, long n_steps,
                                double t0, std::optional<std::pair<double, double>> x_domain) {
  if (!(dt > 0.0)) throw ConfigError("integrate_trajectory: dt must be positive");
  if (n_steps < 0) throw ConfigError("integrate_trajectory: n_steps must be non-negative");
  if (!std::isfinite(start.x) || !std::isfinite(start.p) || (start.sign != 1 && start.sign != -1))
    throw ConfigError("integrate_trajectory: start point must be finite with sign +1 or -1");

  auto energy = [&](double t, double x, double p) {
    const auto [ep, em] = classical_hamiltonians(x, p, potential, t);
    return start.sign > 0 ? ep : em;
  };
  Trajectory out;
  out.t.reserve(n_steps + 1);
  out.points.reserve(n_steps + 1);
  double t = t0, x = start.x, p = start.p;
  const double e0 = energy(t, x, p);
  out.t.push_back(t);
  out.points.push_back(start);
  const int s = start.sign;
  for (long n = 0; n < n_steps; ++n) {
    const Rates k1 = rates(potential, s, t, x, p);
    const Rates k2 = rates(potential, s, t + dt / 2, x + dt / 2 * k1.xdot, p + dt / 2 * k1.pdot);
    const Rates k3 = rates(potential, s, t + dt / 2, x + dt / 2 * k2.xdot, p + dt / 2 * k2.pdot);
    const Rates k4 = rates(potential, s, t + dt, x + dt * k3.xdot, p + dt * k3.pdot);
    x += dt / 6 * (k1.xdot + 2 * k2.xdot + 2 * k3.xdot + k4.xdot);
    p += dt / 6 * (k1.pdot + 2 * k2.pdot + 2 * k3.pdot + k4.pdot);
    t = t0 + static_cast<double>(n + 1) * dt;
    if (!std::isfinite(x) || !std::isfinite(p)) {
      std::ostringstream os;
      os << "integrate_trajectory: non-finite state after step " << n + 1;
      throw NumericalError(os.str());
    }
    out.t.push_back(t);
    out.points.push_back({x, p, s});
    if (!potential.time_dependent) out.energy_drift = std::max(out.energy_drift, std::abs(energy(t, x, p) - e0));
    if (x_domain && !out.left_domain && (x < x_domain->first || x > x_domain->second)) out.left_domain = out.points.size() - 1;
  }
  return out;
}

}  // namespace dw
