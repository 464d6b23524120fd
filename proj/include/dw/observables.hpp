#pragma once
// Diagnostics on a state Q in the X_P representation.
//
// Q is the Wigner transform of the density matrix, so w0 = Tr Q and
// sum w0 dx dp = 1 for a normalized state.  Averages are divided by that norm.

#include <optional>
#include <vector>

#include "dw/phase_grid.hpp"

namespace dw {

/// Deterministic pairwise (cascade) summation.
double pairwise_sum(const double* values, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

struct W0Field {
  std::vector<double> values;  // n_x * n_p, x outer
  double max_imag = 0.0;       // largest |Im Tr Q|
};

W0Field w0(const MatrixPhaseField& q);

std::vector<double> marginal_x(const MatrixPhaseField& q);
std::vector<double> marginal_p(const MatrixPhaseField& q);

/// sum w0 dx dp
double norm(const MatrixPhaseField& q);

struct Negativity {
  double value = 0.0;       // sum of strictly negative w0 times dx dp (<= 0)
  double most_negative = 0.0;  // min w0 (0 if none negative)
  double magnitude() const { return -value; }
};

Negativity negativity(const MatrixPhaseField& q);

/// Weight with x > x_threshold over the total weight.  ConfigError when the
/// threshold lies outside the grid.
double transmission(const MatrixPhaseField& q, double x_threshold);

/// Free energy-sign projectors (1 +- (alpha^1 p + beta m)/E_p)/2.
Matrix4 energy_projector(double p, double m, int sign);

/// sum_p Tr[Lambda_-(p) M(p)] dp / norm with M(p) = sum_x Q(x,p) dx.
double antiparticle_fraction(const MatrixPhaseField& q, double mass);

/// <alpha^1 p + beta m> computed from the momentum marginal matrix.
double energy_free(const MatrixPhaseField& q, double mass);

struct MomentumMoments {
  double p_mean = 0.0;
  double p2_mean = 0.0;
};

MomentumMoments momentum_moments(const MatrixPhaseField& q);
double x_mean(const MatrixPhaseField& q);

/// <alpha^1>, the velocity operator: d<x>/dt = <alpha^1>.
double velocity_mean(const MatrixPhaseField& q);

struct ObservableRecord {
  double norm = 0.0;
  double negativity = 0.0;
  double transmission = 0.0;
  double antiparticle_fraction = 0.0;
  double energy = 0.0;
  double p_mean = 0.0;
  double p2_mean = 0.0;
  double x_mean = 0.0;
  double abs_negativity = 0.0;
  double min_w0 = 0.0;
};

/// All diagnostics at once.  Accepts any representation.  The transmission
/// column is NaN when no threshold is given.
ObservableRecord measure(const MatrixPhaseField& q, double mass, std::optional<double> x_threshold);

class ObservableSeries {
 public:
  /// Throws ConfigError unless t is strictly greater than the last time.
  void append(double t, const ObservableRecord& r);
  const std::vector<double>& times() const { return times_; }
  const std::vector<ObservableRecord>& records() const { return records_; }
  std::size_t size() const { return times_.size(); }

 private:
  std::vector<double> times_;
  std::vector<ObservableRecord> records_;
};

}  // namespace dw
