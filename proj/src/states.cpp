#include "dw/states.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "dw/errors.hpp"
#include "fft1d.hpp"

namespace dw {

namespace {

void check_spec(const WavepacketSpec& s) {
  std::vector<std::string> errors;
  if (!(s.width > 0.0) || !std::isfinite(s.width)) errors.push_back("width must be positive");
  if (!(s.mass >= 0.0) || !std::isfinite(s.mass)) errors.push_back("mass must be non-negative");
  if (!std::isfinite(s.p_tilde)) errors.push_back("p_tilde must be finite");
  if (!std::isfinite(s.x0)) errors.push_back("x0 must be finite");
  if (errors.empty()) return;
  std::string msg = "invalid wavepacket:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ConfigError(msg);
}

Vector4 spinor_direction(const WavepacketSpec& s) {
  const double p0 = std::sqrt(s.p_tilde * s.p_tilde + s.mass * s.mass);
  return Vector4(p0 + s.mass, 0.0, 0.0, s.p_tilde);
}

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

SpinorField make_spinor_field(const PhaseGrid& grid) {
  SpinorField f;
  f.x_min = grid.x_min;
  f.dx = grid.dx;
  f.values.assign(grid.n_x, Vector4::Zero());
  return f;
}

double norm(const SpinorField& psi) {
  double s = 0.0;
  for (const auto& v : psi.values) s += v.squaredNorm();
  return s * psi.dx;
}

SpinorField normalize(const SpinorField& psi) {
  const double n = norm(psi);
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("normalize: field has zero or non-finite norm");
  SpinorField out = psi;
  const double scale = 1.0 / std::sqrt(n);
  for (auto& v : out.values) v *= scale;
  return out;
}

SpinorField gaussian_wavepacket(const WavepacketSpec& spec, const PhaseGrid& grid) {
  check_spec(spec);
  SpinorField f = make_spinor_field(grid);
  const Vector4 u = spinor_direction(spec);
  for (int i = 0; i < f.size(); ++i) {
    const double x = f.x(i);
    const double d = (x - spec.x0) / spec.width;
    f.values[i] = u * std::exp(cplx(-0.5 * d * d, spec.p_tilde * x));
  }
  return normalize(f);
}

SpinorField conjugate(const SpinorField& psi) {
  SpinorField out = psi;
  for (auto& v : out.values) {
    const Vector4 s = v;
    v = Vector4(-std::conj(s(3)), std::conj(s(2)), std::conj(s(1)), -std::conj(s(0)));
  }
  return out;
}

SpinorField majorana_state(const SpinorField& psi, int sign) {
  const SpinorField c = conjugate(psi);
  SpinorField out = psi;
  const double s = sign >= 0 ? 1.0 : -1.0;
  for (int i = 0; i < out.size(); ++i) out.values[i] += s * c.values[i];
  if (!(norm(out) > 0.0))
    throw NumericalError(std::string("majorana_state: input is ") + (s > 0 ? "anti-invariant" : "invariant") +
                         " under charge conjugation, superposition vanishes");
  return normalize(out);
}

std::pair<SpinorField, SpinorField> majorana_pair(const SpinorField& psi) {
  return {majorana_state(psi, +1), majorana_state(psi, -1)};
}

SpinorField cat_state(const WavepacketSpec& spec, const PhaseGrid& grid) {
  check_spec(spec);
  SpinorField f = make_spinor_field(grid);
  const Vector4 u = spinor_direction(spec);
  for (int i = 0; i < f.size(); ++i) {
    const double x = f.x(i);
    const double d = (x - spec.x0) / spec.width;
    f.values[i] = u * (std::exp(-0.5 * d * d) * 2.0 * std::cos(spec.p_tilde * x));
  }
  return normalize(f);
}

SpinorField particle_cat_state(const WavepacketSpec& spec, const PhaseGrid& grid) {
  check_spec(spec);
  SpinorField f = make_spinor_field(grid);
  const Vector4 up = spinor_direction(spec);
  WavepacketSpec mirrored = spec;
  mirrored.p_tilde = -spec.p_tilde;
  const Vector4 um = spinor_direction(mirrored);
  for (int i = 0; i < f.size(); ++i) {
    const double x = f.x(i);
    const double d = (x - spec.x0) / spec.width;
    const double env = std::exp(-0.5 * d * d);
    f.values[i] = env * (std::exp(cplx(0.0, spec.p_tilde * x)) * up + std::exp(cplx(0.0, -spec.p_tilde * x)) * um);
  }
  return normalize(f);
}

MatrixPhaseField wigner_from_spinor(const SpinorField& psi, const PhaseGrid& grid) {
  if (psi.size() != grid.n_x || std::abs(psi.dx - grid.dx) > 1e-12 * grid.dx ||
      std::abs(psi.x_min - grid.x_min) > 1e-9 * grid.dx)
    throw ConfigError("wigner_from_spinor: spinor is not sampled on the grid's x axis");
  const double length = grid.x_max - grid.x_min;
  const double theta_half = 0.5 * grid.n_p * grid.dtheta;
  if (theta_half > 2.0 * length) {
    std::ostringstream os;
    os << "wigner_from_spinor: theta half-extent " << theta_half << " exceeds twice the x extent " << length;
    throw ConfigError(os.str());
  }
  const double n2 = norm(psi);
  if (!(n2 > 0.0)) throw NumericalError("wigner_from_spinor: zero spinor");

  // Zero padding keeps shifted copies from wrapping back onto the support.
  const int n = grid.n_x;
  const int pad = static_cast<int>(std::ceil(theta_half / grid.dx)) + 16;
  const int n_pad = next_power_of_two(n + pad);
  const int offset = (n_pad - n) / 2;
  const auto kappa = detail::fft_wavenumbers(n_pad, grid.dx);

  std::array<bool, 4> nonzero{};
  std::array<std::vector<cplx>, 4> spectrum;
  for (int a = 0; a < 4; ++a) {
    std::vector<cplx> buf(n_pad, cplx(0.0));
    for (int i = 0; i < n; ++i) {
      buf[offset + i] = psi.values[i](a);
      if (buf[offset + i] != cplx(0.0)) nonzero[a] = true;
    }
    if (!nonzero[a]) continue;
    detail::fft1d(buf, -1);
    spectrum[a] = std::move(buf);
  }

  ComponentMask mask;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (nonzero[a] && nonzero[b]) mask.set(component(a, b));
  MatrixPhaseField field(grid, Representation::X_THETA, mask);

  const double scale = 1.0 / (double(n_pad) * n_pad * n2);  // two inverse FFTs and the norm
  std::array<std::vector<cplx>, 4> minus, plus;
  for (int k = 0; k < grid.n_p; ++k) {
    const double shift = 0.5 * grid.theta(k);
    for (int a = 0; a < 4; ++a) {
      if (!nonzero[a]) continue;
      minus[a].resize(n_pad);
      plus[a].resize(n_pad);
      for (int m = 0; m < n_pad; ++m) {
        const cplx ph = std::polar(1.0, -kappa[m] * shift);
        minus[a][m] = spectrum[a][m] * ph;        // psi(x - th/2)
        plus[a][m] = spectrum[a][m] * std::conj(ph);  // psi(x + th/2)
      }
      detail::fft1d(minus[a], +1);
      detail::fft1d(plus[a], +1);
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (!mask[component(a, b)]) continue;
        cplx* plane = field.plane(component(a, b));
        for (int i = 0; i < n; ++i)
          plane[field.index(i, k)] = minus[a][offset + i] * std::conj(plus[b][offset + i]) * scale;
      }
  }
  return ft_theta_to_p(field);
}

MatrixPhaseField wigner_from_mixture(const std::vector<SpinorField>& states, const std::vector<double>& weights,
                                     const PhaseGrid& grid) {
  if (states.empty() || states.size() != weights.size())
    throw ConfigError("wigner_from_mixture: need one weight per state");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("wigner_from_mixture: weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("wigner_from_mixture: weights sum to zero");
  MatrixPhaseField sum(grid, Representation::X_P, ComponentMask());
  for (std::size_t s = 0; s < states.size(); ++s) {
    const MatrixPhaseField q = wigner_from_spinor(states[s], grid);
    for (int c = 0; c < 16; ++c) {
      if (!q.active(c)) continue;
      sum.activate(c);
      for (std::size_t k = 0; k < grid.points(); ++k) sum.plane(c)[k] += (weights[s] / total) * q.plane(c)[k];
    }
  }
  return sum;
}

}  // namespace dw
