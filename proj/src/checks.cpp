#include "dw/checks.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>

#include "dw/classical.hpp"
#include "dw/clifford.hpp"
#include "dw/phase_grid.hpp"
#include "dw/propagator.hpp"

namespace dw {

namespace {

template <class F>
CheckResult timed(std::string name, double tol, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r{std::move(name), body(), tol, 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

MatrixPhaseField random_field(const PhaseGrid& g, Representation r, unsigned seed) {
  MatrixPhaseField f(g, r);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int c = 0; c < 16; ++c)
    for (std::size_t k = 0; k < g.points(); ++k) f.plane(c)[k] = cplx(n(rng), n(rng));
  return f;
}

double rel_diff(const MatrixPhaseField& a, const MatrixPhaseField& b) {
  double diff = 0.0, scale = 0.0;
  for (int c = 0; c < 16; ++c)
    for (std::size_t k = 0; k < a.grid().points(); ++k) {
      const cplx va = a.active(c) ? a.plane(c)[k] : cplx(0);
      const cplx vb = b.active(c) ? b.plane(c)[k] : cplx(0);
      diff = std::max(diff, std::abs(va - vb));
      scale = std::max({scale, std::abs(va), std::abs(vb)});
    }
  return diff / scale;
}

Matrix4 dense_exponential(const Matrix4& generator, double dt, int sign) {
  return expm(cplx(0, -sign * dt) * generator);
}

}  // namespace

CheckResult check_clifford() {
  return timed("clifford relations (exact)", 0.0, [] {
    double worst = 0.0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const Matrix4 lhs = gamma(mu) * gamma(nu) + gamma(nu) * gamma(mu);
        worst = std::max(worst, norm_inf(lhs - 2.0 * metric(mu, nu) * Matrix4::Identity()));
      }
    for (int k = 1; k <= 3; ++k) {
      worst = std::max(worst, norm_inf(alpha(k) - gamma(0) * gamma(k)));
      worst = std::max(worst, norm_inf(alpha(k) - alpha(k).adjoint()));
    }
    return worst;
  });
}

CheckResult check_rotors(int samples) {
  return timed("rotor membership and inverse", 1e-10, [samples] {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      RotorParams p;
      for (int i = 0; i < 3; ++i) {
        p.eta[i] = u(rng);
        p.theta_rot[i] = u(rng);
      }
      const Matrix4 L = lorentz_rotor(p);
      worst = std::max({worst, rotor_membership_residue(L), norm_inf(L * rotor_inverse(L) - Matrix4::Identity())});
    }
    return worst;
  });
}

CheckResult check_diagonalization(int samples) {
  return timed("classical diagonalization residue", 1e-10, [samples] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s)
      worst = std::max(worst,
                       diagonalization_check({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, u(rng), 1.0).max());
    return worst;
  });
}

CheckResult check_round_trips(int n) {
  return timed("Fourier-diagram round trips", 1e-12, [n] {
    const PhaseGrid g = make_grid(n, n, -7, 9, -11, 5);
    const Representation all[] = {Representation::X_THETA, Representation::X_P, Representation::LAMBDA_P,
                                  Representation::LAMBDA_THETA};
    double worst = 0.0;
    unsigned seed = 1;
    for (auto from : all) {
      const MatrixPhaseField start = random_field(g, from, seed++);
      for (auto to : all) {
        MatrixPhaseField f = converted(start, to);
        to_representation(f, from);
        worst = std::max(worst, rel_diff(f, start));
      }
    }
    const MatrixPhaseField b = random_field(g, Representation::X_THETA, 99);
    worst = std::max(worst, rel_diff(ft_lambda_to_x(ft_p_to_theta(ft_x_to_lambda(ft_theta_to_p(b)))), b));
    worst = std::max(worst, rel_diff(ft_p_to_theta(ft_x_to_lambda(ft_theta_to_p(ft_lambda_to_x(
                                         converted(b, Representation::LAMBDA_THETA))))),
                                     converted(b, Representation::LAMBDA_THETA)));
    return worst;
  });
}

CheckResult check_exponentials(int samples) {
  return timed("analytic exponentials vs dense expm", 1e-12, [samples] {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-10, 10);
    std::uniform_real_distribution<double> step(0, 0.5);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double p1 = u(rng), p2 = u(rng), m = std::abs(u(rng)) / 5, dt = step(rng);
      const int sign = (s % 2) ? 1 : -1;
      const Matrix4 k = p1 * alpha(1) + p2 * alpha(2) + 0.5 * m * beta();
      worst = std::max(worst, norm_inf(kinetic_exponential(p1, p2, m, dt, sign) - dense_exponential(k, dt, sign)));
      const std::array<double, 3> a{u(rng), u(rng), u(rng)};
      const double a0 = u(rng), mh = u(rng) / 10;
      Matrix4 v = a0 * Matrix4::Identity() + mh * beta();
      for (int j = 0; j < 3; ++j) v -= a[j] * alpha(j + 1);
      worst = std::max(worst, norm_inf(potential_exponential(a0, a, mh, dt, sign) - dense_exponential(v, dt, sign)));
    }
    return worst;
  });
}

std::vector<CheckResult> run_checks() {
  return {check_clifford(), check_rotors(), check_round_trips(), check_exponentials(), check_diagonalization()};
}

bool report_checks(const std::vector<CheckResult>& results, std::ostream& os) {
  bool ok = true;
  for (const auto& r : results) {
    os << (r.passed() ? "PASS " : "FAIL ") << std::left << std::setw(38) << r.name << " worst " << std::scientific
       << std::setprecision(3) << r.value << " (tol " << r.tolerance << ", " << std::fixed << std::setprecision(3)
       << r.seconds << " s)\n";
    ok = ok && r.passed();
  }
  return ok;
}

}  // namespace dw
