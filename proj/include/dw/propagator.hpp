#pragma once
// Split-operator propagation of Q (the Wigner transform of the density
// matrix) through the (lambda,p) and (x,theta) representations, including
// position dephasing.
//
//   kinetic   K(p)  = alpha^1 p^1 + alpha^2 p^2 + (m/2) beta
//   potential V(x)  = A0(x) - alpha^k A^k(x) + (m(x) - m/2) beta
//
// The constant rest mass is split half/half between K and V; any
// x-dependent excess m(x) - m is carried by V alone.
//
// Closed forms.  With M^2 = G^2 for M = K or the matrix part of V,
//   exp(-i s dt M) = cos(dt G) - i s sin(dt G)/G M.
// For K (Dirac representation, mu = m/2, F = sqrt(p1^2 + p2^2 + mu^2)):
//   E00 = E11 = cos(dt F) - i s mu sin(dt F)/F,  E22 = E33 = conj(E00)
//   E03 = E21 = -i s (p1 - i p2) sin(dt F)/F
//   E12 = E30 = -i s (p1 + i p2) sin(dt F)/F
// all other entries vanish.  For s = +1, E12 = E30 = -conj(E03).

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dw/phase_grid.hpp"

namespace dw {

using FieldFn = std::function<double(double t, double x)>;

struct Potential {
  FieldFn a0;                        // scalar potential energy e A^0 (empty = 0)
  std::array<FieldFn, 3> a_vec;      // e A^k (empty = 0)
  std::function<double(double x)> mass_profile;  // m(x) (empty = constant mass)
  double mass = 1.0;                 // baseline rest mass m
  bool time_dependent = false;

  // Optional analytic x-derivatives used by the classical integrator.
  FieldFn da0_dx;
  FieldFn da1_dx;
  std::function<double(double x)> dmass_dx;

  double a0_at(double t, double x) const { return a0 ? a0(t, x) : 0.0; }
  double a_at(int k, double t, double x) const { return a_vec[k] ? a_vec[k](t, x) : 0.0; }
  double mass_at(double x) const { return mass_profile ? mass_profile(x) : mass; }
};

Potential free_potential(double mass);

enum class Splitting { FIRST_ORDER, STRANG };

struct PropagatorConfig {
  double dt = 0.01;
  double D = 0.0;
  Splitting splitting = Splitting::FIRST_ORDER;
  bool causality_check = false;
};

/// Safety factor in D < safety / (4 m).
inline constexpr double kCausalitySafety = 0.1;

/// Throws ConfigError listing every violated constraint.
void validate(const PropagatorConfig& config, double mass);

/// exp(-i sign dt (alpha^1 p1 + alpha^2 p2 + (m/2) beta)); m is the full rest mass.
Matrix4 kinetic_exponential(double p1, double p2, double m, double dt, int sign);

/// exp(-i sign dt (a0 - alpha.A + m_half beta)).
Matrix4 potential_exponential(double a0, const std::array<double, 3>& a_vec, double m_half, double dt,
                              int sign);

struct BoundaryWarning {
  double t = 0.0;
  std::string boundary;  // "x_min", "x_max", "p_min", "p_max"
  double weight = 0.0;   // probability within the guard band
};

/// Number of guard cells at each grid edge.
inline constexpr int kBoundaryGuardCells = 5;
/// Probability inside the guard band above which a warning is recorded.
inline constexpr double kBoundaryWeightThreshold = 1e-6;

/// Probability within kBoundaryGuardCells of each edge (X_P field).
std::vector<BoundaryWarning> boundary_check(const MatrixPhaseField& q_xp, double t);

struct EvolveOptions;
struct EvolveResult;

class Propagator {
 public:
  Propagator(const PhaseGrid& grid, const PropagatorConfig& config, Potential potential);
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) noexcept;

  const PropagatorConfig& config() const { return config_; }
  const Potential& potential() const { return potential_; }
  const PhaseGrid& grid() const { return grid_; }

  /// Q <- E(p + lambda/2) Q E(p - lambda/2)^dagger, Q in LAMBDA_P.
  void kinetic_step(MatrixPhaseField& q, double dt) const;
  /// Q <- e^{-D dt th^2/2} V_L(x - th/2) Q V_R(x + th/2) e^{-D dt th^2/2}, Q in X_THETA.
  void potential_step(MatrixPhaseField& q, double t, double dt) const;
  /// One full step from t to t + dt, Q in LAMBDA_P on entry and exit.
  void step(MatrixPhaseField& q, double t) const;

  /// Components the evolution can populate starting from `initial`.
  ComponentMask closure(ComponentMask initial) const;

 private:
  friend EvolveResult evolve(MatrixPhaseField, double, double, const Propagator&, const EvolveOptions&);
  struct Table;
  struct Phases;
  struct CacheEntry {
    int variant;
    double dt;
    std::shared_ptr<const Table> table;
  };
  // Table variants.  Fused tables absorb the transform phases so a step
  // needs only raw in-place FFTs.
  static constexpr int kPlain = 0, kFromProper = 1, kFromRaw = 2, kRawToProper = 3, kFused = 4;

  template <class Gen>
  std::shared_ptr<const Table> build_table(Gen&& gen) const;
  std::shared_ptr<const Table> cached(int variant, double dt,
                                      const std::function<std::shared_ptr<const Table>()>& make,
                                      bool cacheable) const;
  std::shared_ptr<const Table> kinetic_table(double dt, int variant) const;
  std::shared_ptr<const Table> potential_table(double t, double dt, int variant) const;
  const Phases& phases() const;
  void apply(MatrixPhaseField& q, const Table& table) const;
  void raw_fft(MatrixPhaseField& q, int sign) const;
  void finish_raw(MatrixPhaseField& q) const;
  /// One step; returns true when the result still lacks the final phase.
  bool advance(MatrixPhaseField& q, double t, bool raw_in) const;

  PhaseGrid grid_;
  PropagatorConfig config_;
  Potential potential_;
  std::array<bool, 16> pattern_{};  // structural nonzeros of every exponential
  bool block_form_ = true;
  mutable std::vector<CacheEntry> cache_;
  mutable std::shared_ptr<const Phases> phases_;
};

// Value-semantics forms of the propagation operations.
MatrixPhaseField kinetic_step(const MatrixPhaseField& q, double dt, const Potential& potential);
MatrixPhaseField potential_step(const MatrixPhaseField& q, double t, double dt, double D,
                                const Potential& potential);
MatrixPhaseField step(const MatrixPhaseField& q, double t, const PropagatorConfig& config,
                      const Potential& potential);

struct Observer {
  long every = 1;  // call after every `every` steps (and at the start)
  std::function<void(long step, double t, const MatrixPhaseField& q)> fn;
};

struct EvolveOptions {
  std::vector<Observer> observers;
  int boundary_check_every = 10;  // 0 disables
};

struct EvolveResult {
  MatrixPhaseField q;
  long steps = 0;
  std::vector<BoundaryWarning> warnings;
};

/// Steps from t0 to t1 (Q in LAMBDA_P).  When t1 - t0 is not a multiple of
/// dt the step is shortened uniformly.  Throws NumericalError on NaN/Inf.
EvolveResult evolve(MatrixPhaseField q, double t0, double t1, const Propagator& propagator,
                    const EvolveOptions& options = {});
EvolveResult evolve(MatrixPhaseField q, double t0, double t1, const PropagatorConfig& config,
                    const Potential& potential, const EvolveOptions& options = {});

/// Pure-state split-operator solver on the x axis of a grid: the same
/// exponentials applied from one side, periodic in x.
class SpinorPropagator {
 public:
  SpinorPropagator(const PhaseGrid& grid, const PropagatorConfig& config, Potential potential);
  void step(std::vector<Vector4>& psi, double t) const;

 private:
  void kinetic(std::vector<Vector4>& psi, double dt) const;
  void potential_part(std::vector<Vector4>& psi, double t, double dt) const;

  PhaseGrid grid_;
  PropagatorConfig config_;
  Potential potential_;
};

}  // namespace dw
