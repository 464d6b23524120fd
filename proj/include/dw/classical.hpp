#pragma once
// Classical limit of the Dirac generator: the Foldy-type unitary that
// block-diagonalizes alpha.(p - A) + beta m + A0, the resulting branch
// Hamiltonians E+/- and an RK4 integrator for their trajectories.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "dw/clifford.hpp"
#include "dw/propagator.hpp"

namespace dw {

struct ClassicalPoint {
  double x = 0.0;
  double p = 0.0;
  int sign = +1;  // branch: +1 particle, -1 antiparticle
};

/// U = sqrt((E+m)/(2E)) (1 + beta alpha.(p - A)/(E + m)),  E = sqrt((p - A)^2 + m^2).
/// Throws NumericalError when E + m vanishes.
Matrix4 foldy_unitary(const std::array<double, 3>& p, const std::array<double, 3>& a_vec, double m);

/// Dirac Hamiltonian symbol alpha.(p - A) + beta m + a0 at commuting (x, p).
Matrix4 dirac_symbol(const std::array<double, 3>& p, const std::array<double, 3>& a_vec, double a0, double m);

/// (E+, E-) = A0(x) +/- sqrt((p - A^1(x))^2 + m(x)^2).
std::pair<double, double> classical_hamiltonians(double x, double p, const Potential& potential, double t = 0.0);

struct DiagonalizationResidue {
  double off_diagonal = 0.0;  // max |(U H U^dag)_ij|, i != j
  double diagonal = 0.0;      // max |diag - (E+, E+, E-, E-)|
  double max() const { return off_diagonal > diagonal ? off_diagonal : diagonal; }
};

DiagonalizationResidue diagonalization_check(const std::array<double, 3>& p, const std::array<double, 3>& a_vec,
                                             double a0, double m);

struct Trajectory {
  std::vector<double> t;
  std::vector<ClassicalPoint> points;
  double energy_drift = 0.0;          // max |E(t) - E(0)|, static potentials only
  std::optional<std::size_t> left_domain;  // first index outside the x-domain
};

/// Classical RK4 on xdot = dE/dp, pdot = -dE/dx for the chosen branch.
/// Uses the analytic derivatives in the potential when given, otherwise
/// fourth-order central differences.
Trajectory integrate_trajectory(const ClassicalPoint& start, const Potential& potential, double dt, long n_steps,
                                double t0 = 0.0, std::optional<std::pair<double, double>> x_domain = std::nullopt);

}  // namespace dw
