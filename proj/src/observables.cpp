#include "dw/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dw/errors.hpp"

namespace dw {

namespace {

void require_xp(const MatrixPhaseField& q, const char* what) {
  if (q.repr() != Representation::X_P)
    throw ConfigError(std::string(what) + ": field must be in X_P, got " + std::string(to_string(q.repr())));
}

// Re Tr Q per point, row by row.
std::vector<double> trace_real(const MatrixPhaseField& q) {
  const std::size_t n = q.grid().points();
  std::vector<double> out(n, 0.0);
  for (int a = 0; a < 4; ++a) {
    const int c = component(a, a);
    if (!q.active(c)) continue;
    const cplx* d = q.plane(c);
    for (std::size_t k = 0; k < n; ++k) out[k] += d[k].real();
  }
  return out;
}

// sum_x Q(x,p) dx as a 4x4 matrix per p
std::vector<Matrix4> p_marginal_matrix(const MatrixPhaseField& q) {
  const PhaseGrid& g = q.grid();
  std::vector<Matrix4> m(g.n_p, Matrix4::Zero());
  std::vector<double> re(g.n_x), im(g.n_x);
  for (int c = 0; c < 16; ++c) {
    if (!q.active(c)) continue;
    const cplx* d = q.plane(c);
    for (int j = 0; j < g.n_p; ++j) {
      for (int i = 0; i < g.n_x; ++i) {
        re[i] = d[q.index(i, j)].real();
        im[i] = d[q.index(i, j)].imag();
      }
      m[j](c / 4, c % 4) = cplx(pairwise_sum(re), pairwise_sum(im)) * g.dx;
    }
  }
  return m;
}

double weighted_mean(const std::vector<double>& density, const std::vector<double>& coord, double step,
                     double total) {
  std::vector<double> v(density.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = density[k] * coord[k];
  return pairwise_sum(v) * step / total;
}

}  // namespace

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 64) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += values[k];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

W0Field w0(const MatrixPhaseField& q) {
  require_xp(q, "w0");
  W0Field f;
  const std::size_t n = q.grid().points();
  f.values.assign(n, 0.0);
  std::vector<double> imag(n, 0.0);
  for (int a = 0; a < 4; ++a) {
    const int c = component(a, a);
    if (!q.active(c)) continue;
    const cplx* d = q.plane(c);
    for (std::size_t k = 0; k < n; ++k) {
      f.values[k] += d[k].real();
      imag[k] += d[k].imag();
    }
  }
  for (double v : imag) f.max_imag = std::max(f.max_imag, std::abs(v));
  return f;
}

std::vector<double> marginal_x(const MatrixPhaseField& q) {
  require_xp(q, "marginal_x");
  const PhaseGrid& g = q.grid();
  const std::vector<double> tr = trace_real(q);
  std::vector<double> out(g.n_x);
  for (int i = 0; i < g.n_x; ++i) out[i] = pairwise_sum(tr.data() + static_cast<std::size_t>(i) * g.n_p, g.n_p) * g.dp;
  return out;
}

std::vector<double> marginal_p(const MatrixPhaseField& q) {
  require_xp(q, "marginal_p");
  const PhaseGrid& g = q.grid();
  const std::vector<double> tr = trace_real(q);
  std::vector<double> out(g.n_p), col(g.n_x);
  for (int j = 0; j < g.n_p; ++j) {
    for (int i = 0; i < g.n_x; ++i) col[i] = tr[q.index(i, j)];
    out[j] = pairwise_sum(col) * g.dx;
  }
  return out;
}

double norm(const MatrixPhaseField& q) {
  return pairwise_sum(marginal_x(q)) * q.grid().dx;
}

Negativity negativity(const MatrixPhaseField& q) {
  require_xp(q, "negativity");
  const PhaseGrid& g = q.grid();
  std::vector<double> tr = trace_real(q);
  Negativity n;
  for (double& v : tr) {
    n.most_negative = std::min(n.most_negative, v);
    if (!(v < 0.0)) v = 0.0;
  }
  n.value = pairwise_sum(tr) * g.dx * g.dp;
  return n;
}

double transmission(const MatrixPhaseField& q, double x_threshold) {
  require_xp(q, "transmission");
  const PhaseGrid& g = q.grid();
  if (!(x_threshold >= g.x_min && x_threshold <= g.x_max)) {
    std::ostringstream os;
    os << "transmission: threshold " << x_threshold << " outside [" << g.x_min << ", " << g.x_max << "]";
    throw ConfigError(os.str());
  }
  const std::vector<double> mx = marginal_x(q);
  std::vector<double> right(mx.size(), 0.0);
  for (int i = 0; i < g.n_x; ++i)
    if (g.x(i) > x_threshold) right[i] = mx[i];
  return pairwise_sum(right) / pairwise_sum(mx);
}

Matrix4 energy_projector(double p, double m, int sign) {
  const double e = std::sqrt(p * p + m * m);
  if (!(e > 0.0)) throw ConfigError("energy_projector: undefined at p = m = 0");
  const Matrix4 h = p * alpha(1) + m * beta();
  return 0.5 * (Matrix4::Identity() + (sign >= 0 ? 1.0 : -1.0) / e * h);
}

double antiparticle_fraction(const MatrixPhaseField& q, double mass) {
  require_xp(q, "antiparticle_fraction");
  const PhaseGrid& g = q.grid();
  const std::vector<Matrix4> m = p_marginal_matrix(q);
  std::vector<double> anti(g.n_p), total(g.n_p);
  for (int j = 0; j < g.n_p; ++j) {
    anti[j] = (energy_projector(g.p(j), mass, -1) * m[j]).trace().real();
    total[j] = m[j].trace().real();
  }
  return pairwise_sum(anti) / pairwise_sum(total);
}

double energy_free(const MatrixPhaseField& q, double mass) {
  require_xp(q, "energy_free");
  const PhaseGrid& g = q.grid();
  const std::vector<Matrix4> m = p_marginal_matrix(q);
  std::vector<double> e(g.n_p), total(g.n_p);
  for (int j = 0; j < g.n_p; ++j) {
    e[j] = ((g.p(j) * alpha(1) + mass * beta()) * m[j]).trace().real();
    total[j] = m[j].trace().real();
  }
  return pairwise_sum(e) / pairwise_sum(total);
}

MomentumMoments momentum_moments(const MatrixPhaseField& q) {
  const PhaseGrid& g = q.grid();
  const std::vector<double> mp = marginal_p(q);
  std::vector<double> p(g.n_p), p2(g.n_p);
  for (int j = 0; j < g.n_p; ++j) {
    p[j] = g.p(j);
    p2[j] = g.p(j) * g.p(j);
  }
  const double total = pairwise_sum(mp) * g.dp;
  return {weighted_mean(mp, p, g.dp, total), weighted_mean(mp, p2, g.dp, total)};
}

double x_mean(const MatrixPhaseField& q) {
  const PhaseGrid& g = q.grid();
  const std::vector<double> mx = marginal_x(q);
  std::vector<double> x(g.n_x);
  for (int i = 0; i < g.n_x; ++i) x[i] = g.x(i);
  return weighted_mean(mx, x, g.dx, pairwise_sum(mx) * g.dx);
}

double velocity_mean(const MatrixPhaseField& q) {
  require_xp(q, "velocity_mean");
  const PhaseGrid& g = q.grid();
  const std::vector<Matrix4> m = p_marginal_matrix(q);
  std::vector<double> v(g.n_p), total(g.n_p);
  for (int j = 0; j < g.n_p; ++j) {
    v[j] = (alpha(1) * m[j]).trace().real();
    total[j] = m[j].trace().real();
  }
  return pairwise_sum(v) / pairwise_sum(total);
}

ObservableRecord measure(const MatrixPhaseField& q_any, double mass, std::optional<double> x_threshold) {
  const MatrixPhaseField* q = &q_any;
  std::optional<MatrixPhaseField> tmp;
  if (q_any.repr() != Representation::X_P) {
    tmp.emplace(converted(q_any, Representation::X_P));
    q = &*tmp;
  }
  ObservableRecord r;
  r.norm = norm(*q);
  const Negativity n = negativity(*q);
  r.negativity = n.value;
  r.abs_negativity = n.magnitude();
  r.min_w0 = n.most_negative;
  r.transmission = x_threshold ? transmission(*q, *x_threshold) : std::numeric_limits<double>::quiet_NaN();
  r.antiparticle_fraction = antiparticle_fraction(*q, mass);
  r.energy = energy_free(*q, mass);
  const MomentumMoments mm = momentum_moments(*q);
  r.p_mean = mm.p_mean;
  r.p2_mean = mm.p2_mean;
  r.x_mean = x_mean(*q);
  return r;
}

void ObservableSeries::append(double t, const ObservableRecord& r) {
  if (!times_.empty() && !(t > times_.back()))
    throw ConfigError("ObservableSeries: times must be strictly increasing");
  times_.push_back(t);
  records_.push_back(r);
}

}  // namespace dw
