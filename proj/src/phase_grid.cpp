#include "dw/phase_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "dw/errors.hpp"
#include "transform_detail.hpp"

namespace dw {

namespace {

using detail::AxisOp;
using detail::AxisPhases;
using detail::make_phases;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

enum class PlanKind { Both, Axis1, Axis2, BothInPlace };

// FFTW plan creation is not thread safe; plans are built once under a lock
// and executed afterwards with the new-array interface.  Planning runs on
// scratch arrays so FFTW_MEASURE never touches field data.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n1, int n2, PlanKind kind, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(n1, n2, static_cast<int>(kind), sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    const std::size_t n = static_cast<std::size_t>(n1) * n2;
    auto* in = fftw_alloc_complex(n);
    auto* out = kind == PlanKind::BothInPlace ? in : fftw_alloc_complex(n);
    fftw_plan plan = nullptr;
    const unsigned flags = FFTW_MEASURE;
    switch (kind) {
      case PlanKind::Both:
      case PlanKind::BothInPlace:
        plan = fftw_plan_dft_2d(n1, n2, in, out, sign, flags);
        break;
      case PlanKind::Axis2: {
        int len[] = {n2};
        plan = fftw_plan_many_dft(1, len, n1, in, nullptr, 1, n2, out, nullptr, 1, n2, sign, flags);
        break;
      }
      case PlanKind::Axis1: {
        int len[] = {n1};
        plan = fftw_plan_many_dft(1, len, n2, in, nullptr, n2, 1, out, nullptr, n2, 1, sign, flags);
        break;
      }
    }
    fftw_free(in);
    if (out != in) fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

// pre/post factors of a both-axes transform as full n1 x n2 tables
struct PhaseTables {
  std::vector<cplx> pre;
  std::vector<cplx> post;
};

std::shared_ptr<const PhaseTables> phase_tables(const PhaseGrid& g, AxisOp op1, AxisOp op2, const AxisPhases& a1,
                                                const AxisPhases& a2, bool reverse2) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double, double, double, double, int, int>, std::shared_ptr<const PhaseTables>>
      cache;
  const auto key = std::make_tuple(g.n_x, g.n_p, g.x_min, g.dx, g.p_min, g.dp, static_cast<int>(op1),
                                   static_cast<int>(op2));
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto t = std::make_shared<PhaseTables>();
  const int n1 = g.n_x, n2 = g.n_p;
  t->pre.resize(g.points());
  t->post.resize(g.points());
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n2 + j;
      t->pre[k] = a1.pre[i] * a2.pre[j];
      // with reverse2 the table is indexed by the source column
      const int jj = reverse2 ? (n2 - j) % n2 : j;
      t->post[static_cast<std::size_t>(i) * n2 + jj] = a1.post[i] * a2.post[j];
    }
  if (cache.size() > 32) cache.clear();
  cache.emplace(key, t);
  return t;
}

struct ScratchDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

void apply_axis_ops(MatrixPhaseField& field, AxisOp op1, AxisOp op2) {
  if (op1 == AxisOp::None && op2 == AxisOp::None) return;
  const PhaseGrid& g = field.grid();
  const int n1 = g.n_x;
  const int n2 = g.n_p;
  const std::size_t n = g.points();

  const AxisPhases a1 = make_phases(g, op1);
  const AxisPhases a2 = make_phases(g, op2);
  const bool both = op1 != AxisOp::None && op2 != AxisOp::None;

  fftw_plan plan = nullptr;
  if (both) {
    plan = PlanCache::instance().get(n1, n2, PlanKind::Both, a1.sign);
  } else if (op1 != AxisOp::None) {
    plan = PlanCache::instance().get(n1, n2, PlanKind::Axis1, a1.sign);
  } else {
    plan = PlanCache::instance().get(n1, n2, PlanKind::Axis2, a2.sign);
  }
  // A 2D plan applies sign a1 on both axes; a sign flip on axis 2 is an index reversal.
  const bool reverse2 = both && a2.sign != a1.sign;

  std::vector<int> active;
  for (int c = 0; c < 16; ++c)
    if (field.active(c)) active.push_back(c);
  const std::shared_ptr<const PhaseTables> tables = both ? phase_tables(g, op1, op2, a1, a2, reverse2) : nullptr;

#pragma omp parallel
  {
    std::unique_ptr<fftw_complex, ScratchDeleter> scratch(fftw_alloc_complex(n));
    auto* tmp = reinterpret_cast<cplx*>(scratch.get());
#pragma omp for schedule(static)
    for (int idx = 0; idx < static_cast<int>(active.size()); ++idx) {
      cplx* data = field.plane(active[idx]);
      if (both) {
        const cplx* pre = tables->pre.data();
        for (std::size_t k = 0; k < n; ++k) data[k] *= pre[k];
      } else {
        for (int i = 0; i < n1; ++i) {
          cplx* row = data + static_cast<std::size_t>(i) * n2;
          if (op1 != AxisOp::None) {
            const cplx f1 = a1.pre[i];
            for (int j = 0; j < n2; ++j) row[j] *= f1;
          } else {
            for (int j = 0; j < n2; ++j) row[j] *= a2.pre[j];
          }
        }
      }
      fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data), scratch.get());
      if (both) {
        const cplx* post = tables->post.data();
        if (reverse2) {
          for (int i = 0; i < n1; ++i) {
            cplx* row = data + static_cast<std::size_t>(i) * n2;
            const cplx* src = tmp + static_cast<std::size_t>(i) * n2;
            const cplx* f = post + static_cast<std::size_t>(i) * n2;
            row[0] = f[0] * src[0];
            for (int j = 1; j < n2; ++j) row[j] = f[n2 - j] * src[n2 - j];
          }
        } else {
          for (std::size_t k = 0; k < n; ++k) data[k] = post[k] * tmp[k];
        }
      } else {
        for (int i = 0; i < n1; ++i) {
          cplx* row = data + static_cast<std::size_t>(i) * n2;
          const cplx* src = tmp + static_cast<std::size_t>(i) * n2;
          if (op1 != AxisOp::None) {
            const cplx f1 = a1.post[i];
            for (int j = 0; j < n2; ++j) row[j] = f1 * src[j];
          } else {
            for (int j = 0; j < n2; ++j) row[j] = a2.post[j] * src[j];
          }
        }
      }
    }
  }
}

bool has_x(Representation r) { return r == Representation::X_P || r == Representation::X_THETA; }
bool has_p(Representation r) { return r == Representation::X_P || r == Representation::LAMBDA_P; }

Representation make_repr(bool x_axis, bool p_axis) {
  if (x_axis) return p_axis ? Representation::X_P : Representation::X_THETA;
  return p_axis ? Representation::LAMBDA_P : Representation::LAMBDA_THETA;
}

MatrixPhaseField single_axis(const MatrixPhaseField& field, AxisOp op, const char* name) {
  const Representation r = field.repr();
  bool ok = false;
  switch (op) {
    case AxisOp::ThetaToP: ok = !has_p(r); break;
    case AxisOp::PToTheta: ok = has_p(r); break;
    case AxisOp::XToLambda: ok = has_x(r); break;
    case AxisOp::LambdaToX: ok = !has_x(r); break;
    case AxisOp::None: break;
  }
  if (!ok)
    throw ConfigError(std::string(name) + ": wrong source representation " + std::string(to_string(r)));
  MatrixPhaseField out(field);
  const bool on_axis1 = op == AxisOp::XToLambda || op == AxisOp::LambdaToX;
  apply_axis_ops(out, on_axis1 ? op : AxisOp::None, on_axis1 ? AxisOp::None : op);
  const bool x_axis = on_axis1 ? op == AxisOp::LambdaToX : has_x(r);
  const bool p_axis = on_axis1 ? has_p(r) : op == AxisOp::ThetaToP;
  out.set_repr(make_repr(x_axis, p_axis));
  return out;
}

}  // namespace

namespace detail {

AxisPhases make_phases(const PhaseGrid& g, AxisOp op) {
  AxisPhases a;
  const double two_pi = 2.0 * std::numbers::pi;
  auto alternating = [](int i) { return (i % 2 == 0) ? 1.0 : -1.0; };
  auto phase = [](double arg) { return std::polar(1.0, arg); };
  switch (op) {
    case AxisOp::XToLambda:
      a.sign = FFTW_FORWARD;
      for (int i = 0; i < g.n_x; ++i) a.pre.emplace_back(alternating(i));
      for (int k = 0; k < g.n_x; ++k) a.post.push_back(g.dx * phase(-g.x_min * g.lambda(k)));
      break;
    case AxisOp::LambdaToX:
      a.sign = FFTW_BACKWARD;
      for (int k = 0; k < g.n_x; ++k) a.pre.push_back(phase(g.x_min * g.lambda(k)));
      for (int i = 0; i < g.n_x; ++i) a.post.emplace_back(g.dlambda / two_pi * alternating(i));
      break;
    case AxisOp::ThetaToP:
      a.sign = FFTW_BACKWARD;
      for (int k = 0; k < g.n_p; ++k) a.pre.push_back(phase(g.p_min * g.theta(k)));
      for (int j = 0; j < g.n_p; ++j) a.post.emplace_back(g.dtheta / two_pi * alternating(j));
      break;
    case AxisOp::PToTheta:
      a.sign = FFTW_FORWARD;
      for (int j = 0; j < g.n_p; ++j) a.pre.emplace_back(alternating(j));
      for (int k = 0; k < g.n_p; ++k) a.post.push_back(g.dp * phase(-g.p_min * g.theta(k)));
      break;
    case AxisOp::None:
      break;
  }
  return a;
}

void fft2_inplace(cplx* data, int n1, int n2, int sign) {
  fftw_plan plan = PlanCache::instance().get(n1, n2, PlanKind::BothInPlace, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, d, d);
}

}  // namespace detail

PhaseGrid make_grid(int n_x, int n_p, double x_min, double x_max, double p_min, double p_max) {
  if (!is_power_of_two(n_x) || !is_power_of_two(n_p) || n_x < 8 || n_p < 8)
    throw ConfigError("grid sizes must be powers of two >= 8, got " + std::to_string(n_x) + "x" +
                      std::to_string(n_p));
  if (!(x_max > x_min) || !(p_max > p_min) || !std::isfinite(x_max - x_min) || !std::isfinite(p_max - p_min))
    throw ConfigError("grid ranges must be finite and non-empty");
  PhaseGrid g;
  g.n_x = n_x;
  g.n_p = n_p;
  g.x_min = x_min;
  g.x_max = x_max;
  g.p_min = p_min;
  g.p_max = p_max;
  g.dx = (x_max - x_min) / n_x;
  g.dp = (p_max - p_min) / n_p;
  g.dlambda = 2.0 * std::numbers::pi / (n_x * g.dx);
  g.dtheta = 2.0 * std::numbers::pi / (n_p * g.dp);
  return g;
}

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::X_THETA: return "X_THETA";
    case Representation::X_P: return "X_P";
    case Representation::LAMBDA_P: return "LAMBDA_P";
    case Representation::LAMBDA_THETA: return "LAMBDA_THETA";
  }
  return "?";
}

void MatrixPhaseField::PlaneDeleter::operator()(cplx* p) const { fftw_free(p); }

MatrixPhaseField::Plane MatrixPhaseField::allocate_plane(std::size_t n) {
  auto* raw = reinterpret_cast<cplx*>(fftw_alloc_complex(n));
  if (!raw) throw std::bad_alloc();
  std::fill(raw, raw + n, cplx(0.0));
  return Plane(raw);
}

MatrixPhaseField::MatrixPhaseField(const PhaseGrid& grid, Representation repr, ComponentMask active)
    : grid_(grid), repr_(repr) {
  for (int c = 0; c < 16; ++c)
    if (active[c]) planes_[c] = allocate_plane(grid_.points());
}

MatrixPhaseField::MatrixPhaseField(const MatrixPhaseField& other)
    : grid_(other.grid_), repr_(other.repr_) {
  const std::size_t n = grid_.points();
  for (int c = 0; c < 16; ++c) {
    if (!other.planes_[c]) continue;
    planes_[c] = allocate_plane(n);
    std::copy(other.planes_[c].get(), other.planes_[c].get() + n, planes_[c].get());
  }
}

MatrixPhaseField& MatrixPhaseField::operator=(const MatrixPhaseField& other) {
  if (this != &other) {
    MatrixPhaseField tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

ComponentMask MatrixPhaseField::mask() const {
  ComponentMask m;
  for (int c = 0; c < 16; ++c) m[c] = static_cast<bool>(planes_[c]);
  return m;
}

void MatrixPhaseField::activate(int c) {
  if (!planes_[c]) planes_[c] = allocate_plane(grid_.points());
}

void MatrixPhaseField::prune() {
  const std::size_t n = grid_.points();
  for (auto& plane : planes_) {
    if (!plane) continue;
    if (std::all_of(plane.get(), plane.get() + n, [](const cplx& v) { return v == cplx(0.0); }))
      plane.reset();
  }
}

Matrix4 MatrixPhaseField::at(int i1, int i2) const {
  Matrix4 m = Matrix4::Zero();
  const std::size_t idx = index(i1, i2);
  for (int c = 0; c < 16; ++c)
    if (planes_[c]) m(c / 4, c % 4) = planes_[c][idx];
  return m;
}

void MatrixPhaseField::set(int i1, int i2, const Matrix4& m) {
  const std::size_t idx = index(i1, i2);
  for (int c = 0; c < 16; ++c) {
    const cplx v = m(c / 4, c % 4);
    if (!planes_[c]) {
      if (v == cplx(0.0)) continue;
      activate(c);
    }
    planes_[c][idx] = v;
  }
}

std::size_t MatrixPhaseField::stored_values() const { return mask().count() * grid_.points(); }

MatrixPhaseField ft_theta_to_p(const MatrixPhaseField& field) {
  return single_axis(field, AxisOp::ThetaToP, "ft_theta_to_p");
}
MatrixPhaseField ft_p_to_theta(const MatrixPhaseField& field) {
  return single_axis(field, AxisOp::PToTheta, "ft_p_to_theta");
}
MatrixPhaseField ft_x_to_lambda(const MatrixPhaseField& field) {
  return single_axis(field, AxisOp::XToLambda, "ft_x_to_lambda");
}
MatrixPhaseField ft_lambda_to_x(const MatrixPhaseField& field) {
  return single_axis(field, AxisOp::LambdaToX, "ft_lambda_to_x");
}

void to_representation(MatrixPhaseField& field, Representation target) {
  const Representation r = field.repr();
  AxisOp op1 = AxisOp::None;
  AxisOp op2 = AxisOp::None;
  if (has_x(r) != has_x(target)) op1 = has_x(r) ? AxisOp::XToLambda : AxisOp::LambdaToX;
  if (has_p(r) != has_p(target)) op2 = has_p(r) ? AxisOp::PToTheta : AxisOp::ThetaToP;
  apply_axis_ops(field, op1, op2);
  field.set_repr(target);
}

MatrixPhaseField converted(const MatrixPhaseField& field, Representation target) {
  MatrixPhaseField out(field);
  to_representation(out, target);
  return out;
}

}  // namespace dw
