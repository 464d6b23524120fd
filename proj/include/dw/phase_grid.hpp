#pragma once
// Discretized phase space and the matrix-valued fields living on it.
//
// Axis conventions (hbar = 1):
//   x_i      = x_min + i dx,            dx = (x_max - x_min) / n_x
//   p_j      = p_min + j dp,            dp = (p_max - p_min) / n_p
//   lambda_k = (k - n_x/2) dlambda,     dlambda = 2 pi / (n_x dx)
//   theta_k  = (k - n_p/2) dtheta,      dtheta  = 2 pi / (n_p dp)
//
// Transforms (applied to each of the 16 matrix components independently):
//   W(x,p)       = 1/(2pi) sum_theta B(x,theta) e^{+i p theta} dtheta
//   B(x,theta)   =         sum_p     W(x,p)     e^{-i p theta} dp
//   Z(lambda,p)  =         sum_x     W(x,p)     e^{-i x lambda} dx
//   W(x,p)       = 1/(2pi) sum_lambda Z(lambda,p) e^{+i x lambda} dlambda
// Each pair is an exact inverse on the grid, and transforms on different
// axes commute, so every loop through the four corners is the identity.
// Parseval: sum |B|^2 dx dtheta = 2 pi sum |W|^2 dx dp.

#include <bitset>
#include <memory>
#include <string_view>
#include <vector>

#include "dw/clifford.hpp"

namespace dw {

struct PhaseGrid {
  int n_x = 0;
  int n_p = 0;
  double x_min = 0, x_max = 0, p_min = 0, p_max = 0;
  double dx = 0, dp = 0, dlambda = 0, dtheta = 0;

  double x(int i) const { return x_min + i * dx; }
  double p(int j) const { return p_min + j * dp; }
  double lambda(int k) const { return (k - n_x / 2) * dlambda; }
  double theta(int k) const { return (k - n_p / 2) * dtheta; }
  std::size_t points() const { return static_cast<std::size_t>(n_x) * n_p; }
};

/// Throws ConfigError on non-power-of-two sizes, sizes below 8 or empty ranges.
PhaseGrid make_grid(int n_x, int n_p, double x_min, double x_max, double p_min, double p_max);

enum class Representation { X_THETA, X_P, LAMBDA_P, LAMBDA_THETA };

std::string_view to_string(Representation r);

/// Which of the 16 matrix components (row-major index 4*a+b) carry data.
using ComponentMask = std::bitset<16>;

inline constexpr int component(int row, int col) { return 4 * row + col; }

/// 4x4 complex matrix per grid point, stored as 16 planes of n_x*n_p values
/// (axis1 = x or lambda outer, axis2 = p or theta inner).  Components outside
/// the active mask are identically zero and not stored.
class MatrixPhaseField {
 public:
  MatrixPhaseField(const PhaseGrid& grid, Representation repr,
                   ComponentMask active = ComponentMask().set());
  MatrixPhaseField(const MatrixPhaseField& other);
  MatrixPhaseField& operator=(const MatrixPhaseField& other);
  MatrixPhaseField(MatrixPhaseField&&) noexcept = default;
  MatrixPhaseField& operator=(MatrixPhaseField&&) noexcept = default;
  ~MatrixPhaseField() = default;

  const PhaseGrid& grid() const { return grid_; }
  Representation repr() const { return repr_; }
  void set_repr(Representation r) { repr_ = r; }

  ComponentMask mask() const;
  bool active(int c) const { return static_cast<bool>(planes_[c]); }
  /// Allocates a zero plane for component c if it is not active yet.
  void activate(int c);
  /// Drops planes that are exactly zero.
  void prune();

  cplx* plane(int c) { return planes_[c].get(); }
  const cplx* plane(int c) const { return planes_[c].get(); }

  std::size_t index(int i1, int i2) const { return static_cast<std::size_t>(i1) * grid_.n_p + i2; }

  Matrix4 at(int i1, int i2) const;
  /// Writes all 16 entries; nonzero entries in inactive components activate them.
  void set(int i1, int i2, const Matrix4& m);

  /// Total number of stored complex values (16 * points when fully active).
  std::size_t stored_values() const;

 private:
  struct PlaneDeleter {
    void operator()(cplx* p) const;
  };
  using Plane = std::unique_ptr<cplx[], PlaneDeleter>;
  static Plane allocate_plane(std::size_t n);

  PhaseGrid grid_;
  Representation repr_;
  std::array<Plane, 16> planes_;
};

// Single-axis transforms.  Each throws ConfigError when the source
// representation lacks the axis being transformed.
MatrixPhaseField ft_theta_to_p(const MatrixPhaseField& field);
MatrixPhaseField ft_p_to_theta(const MatrixPhaseField& field);
MatrixPhaseField ft_x_to_lambda(const MatrixPhaseField& field);
MatrixPhaseField ft_lambda_to_x(const MatrixPhaseField& field);

/// Moves the field to any representation (at most one transform per axis).
void to_representation(MatrixPhaseField& field, Representation target);
MatrixPhaseField converted(const MatrixPhaseField& field, Representation target);

}  // namespace dw
