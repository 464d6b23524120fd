#include "dw/clifford.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <string>

#include "dw/errors.hpp"

namespace dw {

namespace {

std::array<Matrix4, 4> make_gammas() {
  const cplx I{0.0, 1.0};
  Eigen::Matrix2cd s1, s2, s3, id2;
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  s3 << 1, 0, 0, -1;
  id2.setIdentity();

  std::array<Matrix4, 4> g;
  for (auto& m : g) m.setZero();
  g[0].topLeftCorner<2, 2>() = id2;
  g[0].bottomRightCorner<2, 2>() = -id2;
  const Eigen::Matrix2cd* sig[3] = {&s1, &s2, &s3};
  for (int k = 0; k < 3; ++k) {
    g[k + 1].topRightCorner<2, 2>() = *sig[k];
    g[k + 1].bottomLeftCorner<2, 2>() = -*sig[k];
  }
  return g;
}

const std::array<Matrix4, 4>& gammas() {
  static const std::array<Matrix4, 4> g = make_gammas();
  return g;
}

const std::array<Matrix4, 3>& alphas() {
  static const std::array<Matrix4, 3> a = [] {
    std::array<Matrix4, 3> out;
    for (int k = 0; k < 3; ++k) out[k] = gammas()[0] * gammas()[k + 1];
    return out;
  }();
  return a;
}

}  // namespace

const Matrix4& gamma(int mu) {
  if (mu < 0 || mu > 3) throw std::out_of_range("gamma index must be in 0..3, got " + std::to_string(mu));
  return gammas()[mu];
}

Matrix4 gamma_lower(int mu) { return metric(mu, mu) * gamma(mu); }

const Matrix4& alpha(int k) {
  if (k < 1 || k > 3) throw std::out_of_range("alpha index must be in 1..3, got " + std::to_string(k));
  return alphas()[k - 1];
}

Matrix4 expm(const Matrix4& a) { return a.exp(); }

double norm_inf(const Matrix4& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

Matrix4 lorentz_rotor(const RotorParams& params) {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(params.eta[i]) || !std::isfinite(params.theta_rot[i]))
      throw ConfigError("lorentz_rotor: non-finite parameter");
  }
  Matrix4 boost = Matrix4::Zero();
  for (int k = 1; k <= 3; ++k) boost += 0.5 * params.eta[k - 1] * gamma(0) * gamma(k);

  // eps_jkl theta^j g^k g^l, summed over all permutations
  Matrix4 rot = Matrix4::Zero();
  for (int j = 1; j <= 3; ++j) {
    const int k = j % 3 + 1;
    const int l = k % 3 + 1;
    rot += 0.25 * params.theta_rot[j - 1] * (gamma(k) * gamma(l) - gamma(l) * gamma(k));
  }
  return expm(boost) * expm(rot);
}

double rotor_membership_residue(const Matrix4& L) {
  const Matrix4 m = L * gamma(0) * L.adjoint() * gamma(0) - Matrix4::Identity();
  return norm_inf(m);
}

Matrix4 rotor_inverse(const Matrix4& L, double tol) {
  const double res = rotor_membership_residue(L);
  if (!(res <= tol * std::max(1.0, norm_inf(L) * norm_inf(L))))
    throw NumericalError("rotor_inverse: matrix is not in Spin+(1,3), residue " + std::to_string(res));
  return gamma(0) * L.adjoint() * gamma(0);
}

FourVector transform_vector(const Matrix4& L, const FourVector& u, double tol) {
  const Matrix4 Linv = rotor_inverse(L, tol);
  Matrix4 slash = Matrix4::Zero();
  for (int mu = 0; mu < 4; ++mu) slash += u[mu] * gamma_lower(mu);
  const Matrix4 out = L * slash * Linv;

  // Tr[g^nu g_mu] = 4 delta^nu_mu
  FourVector v{};
  Matrix4 rebuilt = Matrix4::Zero();
  double scale = 1.0;
  for (int nu = 0; nu < 4; ++nu) {
    const cplx c = (gamma(nu) * out).trace() / 4.0;
    scale = std::max(scale, std::abs(c));
    if (std::abs(c.imag()) > tol * scale)
      throw NumericalError("transform_vector: complex component, input is not a rotor");
    v[nu] = c.real();
    rebuilt += v[nu] * gamma_lower(nu);
  }
  if (norm_inf(rebuilt - out) > tol * 4.0 * scale)
    throw NumericalError("transform_vector: result is not a four-vector");
  return v;
}

double minkowski_square(const FourVector& u) {
  return u[0] * u[0] - u[1] * u[1] - u[2] * u[2] - u[3] * u[3];
}

}  // namespace dw
