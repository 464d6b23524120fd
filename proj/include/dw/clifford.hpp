#pragma once
// Dirac gamma matrices (standard Dirac representation), alpha matrices and
// Lorentz rotors in Spin+(1,3).

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace dw {

using cplx = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

/// Minkowski metric diag(1,-1,-1,-1).
constexpr double metric(int mu, int nu) {
  return mu != nu ? 0.0 : (mu == 0 ? 1.0 : -1.0);
}

/// Contravariant gamma^mu, mu in 0..3.  Throws std::out_of_range otherwise.
const Matrix4& gamma(int mu);

/// Covariant gamma_mu = g_{mu nu} gamma^nu.
Matrix4 gamma_lower(int mu);

/// alpha^k = gamma^0 gamma^k, k in 1..3.
const Matrix4& alpha(int k);

/// gamma^0, also called beta.
inline const Matrix4& beta() { return gamma(0); }

/// Dense matrix exponential (scaling and squaring with Pade approximants).
Matrix4 expm(const Matrix4& a);

/// Infinity norm (max row sum of moduli).
double norm_inf(const Matrix4& a);

struct RotorParams {
  std::array<double, 3> eta{};        // boost rapidities
  std::array<double, 3> theta_rot{};  // rotation angles [rad]
};

/// L = exp(1/2 eta_k g0 g^k) exp(1/4 eps_jkl theta^j g^k g^l).
Matrix4 lorentz_rotor(const RotorParams& params);

/// Residue ||L g0 L^dagger g0 - 1||_inf of the Spin+(1,3) membership test.
double rotor_membership_residue(const Matrix4& L);

/// L^{-1} = g0 L^dagger g0.  Throws NumericalError when L is not a rotor.
Matrix4 rotor_inverse(const Matrix4& L, double tol = 1e-10);

using FourVector = std::array<double, 4>;

/// Active transform of u^mu through L (u^mu gamma_mu) L^{-1}.
FourVector transform_vector(const Matrix4& L, const FourVector& u, double tol = 1e-10);

/// u.u with the metric above.
double minkowski_square(const FourVector& u);

}  // namespace dw
