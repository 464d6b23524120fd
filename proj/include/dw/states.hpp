#pragma once
// Initial spinor wavefunctions and their lift to phase space.

#include <utility>
#include <vector>

#include "dw/phase_grid.hpp"

namespace dw {

/// Four-component wavefunction sampled on the x axis of a grid.
struct SpinorField {
  double x_min = 0.0;
  double dx = 0.0;
  std::vector<Vector4> values;

  int size() const { return static_cast<int>(values.size()); }
  double x(int i) const { return x_min + i * dx; }
};

SpinorField make_spinor_field(const PhaseGrid& grid);

struct WavepacketSpec {
  double p_tilde = 1.0;  // momentum of the positive-energy spinor
  double mass = 1.0;
  double x0 = 0.0;
  double width = 1.0;
};

/// sum |psi_a|^2 dx
double norm(const SpinorField& psi);

/// Returns psi / sqrt(norm); throws NumericalError for a zero field.
SpinorField normalize(const SpinorField& psi);

/// exp(-(x-x0)^2/(2 w^2) + i p x) (p0 + m, 0, 0, p)^T, p0 = sqrt(p^2 + m^2), normalized.
SpinorField gaussian_wavepacket(const WavepacketSpec& spec, const PhaseGrid& grid);

/// psi -> (-psi4*, psi3*, psi2*, -psi1*), unnormalized.
SpinorField conjugate(const SpinorField& psi);

/// (psi + sign conjugate(psi)) normalized; throws NumericalError when it vanishes.
SpinorField majorana_state(const SpinorField& psi, int sign);

/// {psi^M+, psi^M-}.
std::pair<SpinorField, SpinorField> majorana_pair(const SpinorField& psi);

/// exp(-(x-x0)^2/(2 w^2)) [e^{i p x} + e^{-i p x}] (p0 + m, 0, 0, p)^T, normalized.
SpinorField cat_state(const WavepacketSpec& spec, const PhaseGrid& grid);

/// Cat of two positive-energy packets: each branch e^{+/- i p x} carries its
/// own eigenspinor (p0 + m, 0, 0, +/- p), normalized.
SpinorField particle_cat_state(const WavepacketSpec& spec, const PhaseGrid& grid);

/// Q(x,p) = 1/(2pi) int psi(x - th/2) psi^dagger(x + th/2) e^{i p th} dth in X_P.
/// Half-shifts are spectral on a zero-padded copy of the x axis, so psi is
/// treated as vanishing outside the grid.  Throws ConfigError when psi does
/// not sit on the grid's x axis or when the theta half-extent exceeds 2 L.
MatrixPhaseField wigner_from_spinor(const SpinorField& psi, const PhaseGrid& grid);

/// Lift of a mixture sum_k w_k |psi_k><psi_k|.
MatrixPhaseField wigner_from_mixture(const std::vector<SpinorField>& states, const std::vector<double>& weights,
                                     const PhaseGrid& grid);

}  // namespace dw
