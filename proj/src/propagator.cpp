#include "dw/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dw/errors.hpp"
#include "fft1d.hpp"
#include "transform_detail.hpp"

namespace dw {

namespace {

// exp(-i s dt M) for M^2 = g^2: c - i s (sin(dt g)/g) M.
struct CosSinc {
  double c, sg;  // cos(dt g), sin(dt g)/g
};

CosSinc cos_sinc(double g, double dt) {
  if (g * dt < 1e-8) return {std::cos(g * dt), dt * (1.0 - (g * dt) * (g * dt) / 6.0)};
  return {std::cos(g * dt), std::sin(g * dt) / g};
}

constexpr std::array<std::array<int, 2>, 4> kAlphaPattern[3] = {
    {{{0, 3}, {1, 2}, {2, 1}, {3, 0}}},
    {{{0, 3}, {1, 2}, {2, 1}, {3, 0}}},
    {{{0, 2}, {1, 3}, {2, 0}, {3, 1}}},
};

using Pattern = std::array<bool, 16>;

ComponentMask multiply_masks(const Pattern& a, const ComponentMask& b) {
  ComponentMask out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        if (a[component(i, k)] && b[component(k, j)]) out.set(component(i, j));
  return out;
}

ComponentMask multiply_masks(const ComponentMask& a, const Pattern& b) {
  ComponentMask out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        if (a[component(i, k)] && b[component(k, j)]) out.set(component(i, j));
  return out;
}

double max_abs_active(const MatrixPhaseField& q, bool& finite) {
  const std::size_t n = q.grid().points();
  double m = 0.0;
  finite = true;
  for (int c = 0; c < 16; ++c) {
    if (!q.active(c)) continue;
    const cplx* d = q.plane(c);
    for (std::size_t k = 0; k < n; ++k) {
      const double a = std::abs(d[k]);
      if (!std::isfinite(a)) {
        finite = false;
      } else {
        m = std::max(m, a);
      }
    }
  }
  return m;
}

bool all_finite(const MatrixPhaseField& q) {
  const std::size_t n = q.grid().points();
  for (int c = 0; c < 16; ++c) {
    if (!q.active(c)) continue;
    const double* d = reinterpret_cast<const double*>(q.plane(c));
    double acc = 0.0;
    for (std::size_t k = 0; k < 2 * n; ++k) acc += d[k] * 0.0;
    if (acc != 0.0 || std::isnan(acc)) return false;
  }
  return true;
}

}  // namespace

Potential free_potential(double mass) {
  Potential p;
  p.mass = mass;
  return p;
}

void validate(const PropagatorConfig& config, double mass) {
  std::vector<std::string> errors;
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) errors.push_back("dt must be positive and finite");
  if (!(config.D >= 0.0) || !std::isfinite(config.D)) errors.push_back("D must be non-negative and finite");
  if (!(mass >= 0.0) || !std::isfinite(mass)) errors.push_back("mass must be non-negative and finite");
  if (config.causality_check && mass > 0.0 && config.D >= kCausalitySafety / (4.0 * mass)) {
    std::ostringstream os;
    os << "D = " << config.D << " violates the causality bound D < " << kCausalitySafety / (4.0 * mass)
       << " for m = " << mass;
    errors.push_back(os.str());
  }
  if (errors.empty()) return;
  std::string msg = "invalid propagator configuration:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ConfigError(msg);
}

Matrix4 kinetic_exponential(double p1, double p2, double m, double dt, int sign) {
  const double mu = 0.5 * m;
  const auto [c, sg] = cos_sinc(std::sqrt(p1 * p1 + p2 * p2 + mu * mu), dt);
  const double s = sign >= 0 ? 1.0 : -1.0;
  const cplx mi(0.0, -s);  // -i s
  const cplx diag = c + mi * mu * sg;
  const cplx lo = mi * cplx(p1, -p2) * sg;
  const cplx hi = mi * cplx(p1, p2) * sg;
  Matrix4 e = Matrix4::Zero();
  e(0, 0) = e(1, 1) = diag;
  e(2, 2) = e(3, 3) = c - mi * mu * sg;
  e(0, 3) = e(2, 1) = lo;
  e(1, 2) = e(3, 0) = hi;
  return e;
}

Matrix4 potential_exponential(double a0, const std::array<double, 3>& a_vec, double m_half, double dt,
                              int sign) {
  const double g = std::sqrt(a_vec[0] * a_vec[0] + a_vec[1] * a_vec[1] + a_vec[2] * a_vec[2] + m_half * m_half);
  const auto [c, sg] = cos_sinc(g, dt);
  const double s = sign >= 0 ? 1.0 : -1.0;
  Matrix4 mat = m_half * beta();
  for (int k = 0; k < 3; ++k)
    if (a_vec[k] != 0.0) mat -= a_vec[k] * alpha(k + 1);
  Matrix4 e = cplx(0.0, -s * sg) * mat;
  e.diagonal().array() += c;
  return std::polar(1.0, -s * dt * a0) * e;
}

std::vector<BoundaryWarning> boundary_check(const MatrixPhaseField& q, double t) {
  if (q.repr() != Representation::X_P) throw ConfigError("boundary_check: field must be in X_P");
  const PhaseGrid& g = q.grid();
  const int guard = kBoundaryGuardCells;
  std::array<double, 4> w{};  // x_min, x_max, p_min, p_max
  for (int i = 0; i < g.n_x; ++i) {
    for (int j = 0; j < g.n_p; ++j) {
      const std::size_t idx = q.index(i, j);
      double tr = 0.0;
      for (int a = 0; a < 4; ++a)
        if (q.active(component(a, a))) tr += q.plane(component(a, a))[idx].real();
      const double v = std::abs(tr) * g.dx * g.dp;
      if (i < guard) w[0] += v;
      if (i >= g.n_x - guard) w[1] += v;
      if (j < guard) w[2] += v;
      if (j >= g.n_p - guard) w[3] += v;
    }
  }
  static const char* names[] = {"x_min", "x_max", "p_min", "p_max"};
  std::vector<BoundaryWarning> out;
  for (int b = 0; b < 4; ++b)
    if (w[b] > kBoundaryWeightThreshold) out.push_back({t, names[b], w[b]});
  return out;
}

// Per-point left/right factors.  In 1D (no A^2, A^3) every factor has the
// form [[u,0,0,o],[0,u,o,0],[0,o,d,0],[o,0,0,d]] and is stored as (u,d,o);
// otherwise the entries on the structural pattern are stored.
struct Propagator::Table {
  bool block = false;
  int nnz = 0;                 // values per factor
  std::vector<cplx> left;
  std::vector<cplx> right;
};

Propagator::Propagator(const PhaseGrid& grid, const PropagatorConfig& config, Potential potential)
    : grid_(grid), config_(config), potential_(std::move(potential)) {
  validate(config_, potential_.mass);
  for (int a = 0; a < 4; ++a) pattern_[component(a, a)] = true;
  for (const auto& [r, c] : kAlphaPattern[0]) pattern_[component(r, c)] = true;
  for (int k = 1; k < 3; ++k)
    if (potential_.a_vec[k])
      for (const auto& [r, c] : kAlphaPattern[k]) pattern_[component(r, c)] = true;
  block_form_ = !potential_.a_vec[1] && !potential_.a_vec[2];
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

ComponentMask Propagator::closure(ComponentMask m) const {
  for (;;) {
    const ComponentMask next = m | multiply_masks(multiply_masks(pattern_, m), pattern_);
    if (next == m) return m;
    m = next;
  }
}

template <class Gen>
std::shared_ptr<const Propagator::Table> Propagator::build_table(Gen&& gen) const {
  auto table = std::make_shared<Table>();
  std::vector<int> entries;
  for (int c = 0; c < 16; ++c)
    if (pattern_[c]) entries.push_back(c);
  table->block = block_form_;
  const int nnz = block_form_ ? 3 : static_cast<int>(entries.size());
  table->nnz = nnz;
  table->left.resize(grid_.points() * nnz);
  table->right.resize(grid_.points() * nnz);
#pragma omp parallel for schedule(static)
  for (int i1 = 0; i1 < grid_.n_x; ++i1) {
    for (int i2 = 0; i2 < grid_.n_p; ++i2) {
      const auto [l, r] = gen(i1, i2);
      const std::size_t base = (static_cast<std::size_t>(i1) * grid_.n_p + i2) * nnz;
      if (block_form_) {
        table->left[base] = l(0, 0);
        table->left[base + 1] = l(3, 3);
        table->left[base + 2] = l(0, 3);
        table->right[base] = r(0, 0);
        table->right[base + 1] = r(3, 3);
        table->right[base + 2] = r(0, 3);
      } else {
        for (int e = 0; e < nnz; ++e) {
          table->left[base + e] = l(entries[e] / 4, entries[e] % 4);
          table->right[base + e] = r(entries[e] / 4, entries[e] % 4);
        }
      }
    }
  }
  return table;
}

std::shared_ptr<const Propagator::Table> Propagator::cached(int variant, double dt,
                                                            const std::function<std::shared_ptr<const Table>()>& make,
                                                            bool cacheable) const {
  if (cacheable)
    for (const auto& e : cache_)
      if (e.variant == variant && e.dt == dt) return e.table;
  auto table = make();
  if (cacheable) {
    if (cache_.size() >= 8) cache_.erase(cache_.begin());
    cache_.push_back({variant, dt, table});
  }
  return table;
}

// Scalars folded into fused tables, indexed like the field (axis1 outer).
struct Propagator::Phases {
  std::vector<cplx> to_theta_pre;   // s: lambda,p  (before the +sign FFT)
  std::vector<cplx> potential;      // P1 P2 at x,theta
  std::vector<cplx> from_theta_post;  // c: lambda,p (after the -sign FFT)
};

const Propagator::Phases& Propagator::phases() const {
  if (phases_) return *phases_;
  using detail::AxisOp;
  const auto a1 = detail::make_phases(grid_, AxisOp::LambdaToX);
  const auto a2 = detail::make_phases(grid_, AxisOp::PToTheta);
  const auto b1 = detail::make_phases(grid_, AxisOp::XToLambda);
  const auto b2 = detail::make_phases(grid_, AxisOp::ThetaToP);
  auto ph = std::make_shared<Phases>();
  const std::size_t n = grid_.points();
  ph->to_theta_pre.resize(n);
  ph->potential.resize(n);
  ph->from_theta_post.resize(n);
  for (int i = 0; i < grid_.n_x; ++i)
    for (int j = 0; j < grid_.n_p; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * grid_.n_p + j;
      ph->to_theta_pre[k] = a1.pre[i] * a2.pre[j];
      ph->potential[k] = a1.post[i] * a2.post[j] * b1.pre[i] * b2.pre[j];
      ph->from_theta_post[k] = b1.post[i] * b2.post[j];
    }
  phases_ = ph;
  return *phases_;
}

std::shared_ptr<const Propagator::Table> Propagator::kinetic_table(double dt, int variant) const {
  return cached(variant, dt, [&] {
    const Phases* ph = variant == kPlain ? nullptr : &phases();
    const double m = potential_.mass;
    return build_table([&](int k, int j) {
      const double lam = grid_.lambda(k), p = grid_.p(j);
      Matrix4 l = kinetic_exponential(p + lam / 2, 0.0, m, dt, +1);
      if (ph) {
        const std::size_t idx = static_cast<std::size_t>(k) * grid_.n_p + j;
        cplx f = 1.0;
        if (variant == kFromProper || variant == kFromRaw) f *= ph->to_theta_pre[idx];
        if (variant == kFromRaw || variant == kRawToProper) f *= ph->from_theta_post[idx];
        l *= f;
      }
      return std::make_pair(l, kinetic_exponential(p - lam / 2, 0.0, m, dt, -1));
    });
  }, true);
}

std::shared_ptr<const Propagator::Table> Propagator::potential_table(double t, double dt, int variant) const {
  return cached(variant + 16, dt, [&] {
    const Phases* ph = variant == kPlain ? nullptr : &phases();
    const Potential& pot = potential_;
    const double D = config_.D;
    auto vexp = [&](double y, int sign) {
      const std::array<double, 3> a{pot.a_at(0, t, y), pot.a_at(1, t, y), pot.a_at(2, t, y)};
      const double m_half = 0.5 * pot.mass + (pot.mass_at(y) - pot.mass);
      return potential_exponential(pot.a0_at(t, y), a, m_half, dt, sign);
    };
    const int n2 = grid_.n_p;
    return build_table([&](int i, int j) {
      // fused tables live on the raw FFT layout, whose theta axis is reversed
      const int k = ph ? (n2 - j) % n2 : j;
      const double x = grid_.x(i), th = grid_.theta(k);
      const double damp = std::exp(-0.5 * D * th * th * dt);
      Matrix4 l = damp * vexp(x - th / 2, +1);
      if (ph) l *= ph->potential[static_cast<std::size_t>(i) * n2 + k];
      return std::make_pair(l, Matrix4(damp * vexp(x + th / 2, -1)));
    });
  }, !potential_.time_dependent);
}

void Propagator::apply(MatrixPhaseField& q, const Table& table) const {
  const ComponentMask m = closure(q.mask());
  for (int c = 0; c < 16; ++c)
    if (m[c]) q.activate(c);
  const long n = static_cast<long>(grid_.points());

  if (table.block) {
    // 2x2 blocks over the spinor index pairs {0,3} and {1,2}
    static constexpr int pair[2][2] = {{0, 3}, {1, 2}};
    for (const auto& rs : pair)
      for (const auto& cs : pair) {
        cplx* q00 = q.plane(component(rs[0], cs[0]));
        cplx* q01 = q.plane(component(rs[0], cs[1]));
        cplx* q10 = q.plane(component(rs[1], cs[0]));
        cplx* q11 = q.plane(component(rs[1], cs[1]));
        if (!q00 || !q01 || !q10 || !q11) continue;
        const cplx* lf = table.left.data();
        const cplx* rf = table.right.data();
#pragma omp parallel for schedule(static)
        for (long pt = 0; pt < n; ++pt) {
          const cplx lu = lf[3 * pt], ld = lf[3 * pt + 1], lo = lf[3 * pt + 2];
          const cplx ru = rf[3 * pt], rd = rf[3 * pt + 1], ro = rf[3 * pt + 2];
          const cplx a = q00[pt], b = q01[pt], c = q10[pt], d = q11[pt];
          const cplx t00 = lu * a + lo * c, t01 = lu * b + lo * d;
          const cplx t10 = lo * a + ld * c, t11 = lo * b + ld * d;
          q00[pt] = t00 * ru + t01 * ro;
          q01[pt] = t00 * ro + t01 * rd;
          q10[pt] = t10 * ru + t11 * ro;
          q11[pt] = t10 * ro + t11 * rd;
        }
      }
    return;
  }

  std::array<int, 16> slot{};
  slot.fill(-1);
  for (int c = 0, e = 0; c < 16; ++c)
    if (pattern_[c]) slot[c] = e++;

  struct Term {
    int out, lhs, factor;
  };
  // T = L Q
  const ComponentMask tmask = multiply_masks(pattern_, m);
  std::vector<Term> first, second;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (!tmask[component(i, j)]) continue;
      for (int k = 0; k < 4; ++k)
        if (pattern_[component(i, k)] && m[component(k, j)])
          first.push_back({component(i, j), component(k, j), slot[component(i, k)]});
    }
  // Q' = T R
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (!m[component(i, j)]) continue;
      for (int l = 0; l < 4; ++l)
        if (tmask[component(i, l)] && pattern_[component(l, j)])
          second.push_back({component(i, j), component(i, l), slot[component(l, j)]});
    }

  std::vector<int> active;
  for (int c = 0; c < 16; ++c)
    if (m[c]) active.push_back(c);
  std::array<cplx*, 16> planes{};
  for (int c : active) planes[c] = q.plane(c);
  const int nnz = table.nnz;

#pragma omp parallel for schedule(static)
  for (long pt = 0; pt < n; ++pt) {
    cplx in[16], tmp[16], out[16];
    for (int c : active) {
      in[c] = planes[c][pt];
      out[c] = 0.0;
    }
    for (int c = 0; c < 16; ++c)
      if (tmask[c]) tmp[c] = 0.0;
    const cplx* lf = table.left.data() + pt * nnz;
    const cplx* rf = table.right.data() + pt * nnz;
    for (const Term& t : first) tmp[t.out] += lf[t.factor] * in[t.lhs];
    for (const Term& t : second) out[t.out] += tmp[t.lhs] * rf[t.factor];
    for (int c : active) planes[c][pt] = out[c];
  }
}

void Propagator::kinetic_step(MatrixPhaseField& q, double dt) const {
  if (q.repr() != Representation::LAMBDA_P) throw ConfigError("kinetic_step: field must be in LAMBDA_P");
  apply(q, *kinetic_table(dt, kPlain));
}

void Propagator::potential_step(MatrixPhaseField& q, double t, double dt) const {
  if (q.repr() != Representation::X_THETA) throw ConfigError("potential_step: field must be in X_THETA");
  apply(q, *potential_table(t, dt, kPlain));
}

void Propagator::raw_fft(MatrixPhaseField& q, int sign) const {
  std::vector<int> active;
  for (int c = 0; c < 16; ++c)
    if (q.active(c)) active.push_back(c);
#pragma omp parallel for schedule(static)
  for (int idx = 0; idx < static_cast<int>(active.size()); ++idx)
    detail::fft2_inplace(q.plane(active[idx]), grid_.n_x, grid_.n_p, sign);
}

void Propagator::finish_raw(MatrixPhaseField& q) const {
  const cplx* c = phases().from_theta_post.data();
  const long n = static_cast<long>(grid_.points());
  for (int comp = 0; comp < 16; ++comp) {
    if (!q.active(comp)) continue;
    cplx* d = q.plane(comp);
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) d[k] *= c[k];
  }
}

bool Propagator::advance(MatrixPhaseField& q, double t, bool raw_in) const {
  const double dt = config_.dt;
  const int first = raw_in ? kFromRaw : kFromProper;
  if (config_.splitting == Splitting::FIRST_ORDER) {
    apply(q, *kinetic_table(dt, first));
    raw_fft(q, +1);
    apply(q, *potential_table(t, dt, kFused));
    raw_fft(q, -1);
    return true;
  }
  apply(q, *kinetic_table(dt / 2, first));
  raw_fft(q, +1);
  apply(q, *potential_table(t + dt / 2, dt, kFused));
  raw_fft(q, -1);
  apply(q, *kinetic_table(dt / 2, kRawToProper));
  return false;
}

void Propagator::step(MatrixPhaseField& q, double t) const {
  if (q.repr() != Representation::LAMBDA_P) to_representation(q, Representation::LAMBDA_P);
  if (advance(q, t, false)) finish_raw(q);
}

MatrixPhaseField kinetic_step(const MatrixPhaseField& q, double dt, const Potential& potential) {
  PropagatorConfig cfg;
  cfg.dt = dt;
  Propagator prop(q.grid(), cfg, potential);
  MatrixPhaseField out(q);
  prop.kinetic_step(out, dt);
  return out;
}

MatrixPhaseField potential_step(const MatrixPhaseField& q, double t, double dt, double D,
                                const Potential& potential) {
  PropagatorConfig cfg;
  cfg.dt = dt;
  cfg.D = D;
  Propagator prop(q.grid(), cfg, potential);
  MatrixPhaseField out(q);
  prop.potential_step(out, t, dt);
  return out;
}

MatrixPhaseField step(const MatrixPhaseField& q, double t, const PropagatorConfig& config,
                      const Potential& potential) {
  Propagator prop(q.grid(), config, potential);
  MatrixPhaseField out(q);
  prop.step(out, t);
  return out;
}

EvolveResult evolve(MatrixPhaseField q, double t0, double t1, const Propagator& propagator,
                    const EvolveOptions& options) {
  if (!(t1 >= t0)) throw ConfigError("evolve: t1 must not precede t0");
  const double span = t1 - t0;
  const double dt0 = propagator.config().dt;
  long steps = std::lround(span / dt0);
  const Propagator* prop = &propagator;
  std::unique_ptr<Propagator> adjusted;
  if (std::abs(steps * dt0 - span) > 1e-9 * std::max(1.0, span)) {
    steps = static_cast<long>(std::ceil(span / dt0));
    PropagatorConfig cfg = propagator.config();
    cfg.dt = span / static_cast<double>(steps);
    adjusted = std::make_unique<Propagator>(propagator.grid(), cfg, propagator.potential());
    prop = adjusted.get();
  }
  const double dt = prop->config().dt;
  if (q.repr() != Representation::LAMBDA_P) to_representation(q, Representation::LAMBDA_P);

  EvolveResult result{std::move(q), 0, {}};
  MatrixPhaseField& field = result.q;
  auto notify = [&](long s, double t) {
    for (const auto& obs : options.observers)
      if (obs.fn && obs.every > 0 && (s % obs.every == 0 || s == steps)) obs.fn(s, t, field);
  };
  auto check_boundaries = [&](double t) {
    const MatrixPhaseField xp = converted(field, Representation::X_P);
    for (auto& w : boundary_check(xp, t)) result.warnings.push_back(std::move(w));
  };

  notify(0, t0);
  bool raw = false;
  for (long s = 1; s <= steps; ++s) {
    const double t = t0 + static_cast<double>(s - 1) * dt;
    raw = prop->advance(field, t, raw);
    if (!all_finite(field)) {
      bool finite = true;
      const double mag = max_abs_active(field, finite);
      std::ostringstream os;
      os << "non-finite values after step " << s << " (t = " << t + dt << "), max finite |Q| = " << mag;
      throw NumericalError(os.str());
    }
    result.steps = s;
    const double tn = (s == steps) ? t1 : t0 + static_cast<double>(s) * dt;
    const bool check = options.boundary_check_every > 0 && (s % options.boundary_check_every == 0 || s == steps);
    bool observe = s == steps;
    for (const auto& obs : options.observers) observe = observe || (obs.every > 0 && s % obs.every == 0);
    if (raw && (check || observe)) {
      prop->finish_raw(field);
      raw = false;
    }
    if (check) check_boundaries(tn);
    notify(s, tn);
  }
  if (raw) prop->finish_raw(field);
  return result;
}

EvolveResult evolve(MatrixPhaseField q, double t0, double t1, const PropagatorConfig& config,
                    const Potential& potential, const EvolveOptions& options) {
  Propagator prop(q.grid(), config, potential);
  return evolve(std::move(q), t0, t1, prop, options);
}

SpinorPropagator::SpinorPropagator(const PhaseGrid& grid, const PropagatorConfig& config, Potential potential)
    : grid_(grid), config_(config), potential_(std::move(potential)) {
  validate(config_, potential_.mass);
  if (config_.D != 0.0) throw ConfigError("SpinorPropagator: dephasing has no pure-state form (D must be 0)");
}

void SpinorPropagator::kinetic(std::vector<Vector4>& psi, double dt) const {
  const int n = grid_.n_x;
  const auto k = detail::fft_wavenumbers(n, grid_.dx);
  std::array<std::vector<cplx>, 4> comp;
  for (int a = 0; a < 4; ++a) {
    comp[a].resize(n);
    for (int i = 0; i < n; ++i) comp[a][i] = psi[i](a);
    detail::fft1d(comp[a], -1);
  }
  for (int m = 0; m < n; ++m) {
    const Matrix4 e = kinetic_exponential(k[m], 0.0, potential_.mass, dt, +1);
    Vector4 v(comp[0][m], comp[1][m], comp[2][m], comp[3][m]);
    v = e * v;
    for (int a = 0; a < 4; ++a) comp[a][m] = v(a);
  }
  for (int a = 0; a < 4; ++a) {
    detail::fft1d(comp[a], +1);
    for (int i = 0; i < n; ++i) psi[i](a) = comp[a][i] / static_cast<double>(n);
  }
}

void SpinorPropagator::potential_part(std::vector<Vector4>& psi, double t, double dt) const {
  for (int i = 0; i < grid_.n_x; ++i) {
    const double y = grid_.x(i);
    const std::array<double, 3> a{potential_.a_at(0, t, y), potential_.a_at(1, t, y), potential_.a_at(2, t, y)};
    const double m_half = 0.5 * potential_.mass + (potential_.mass_at(y) - potential_.mass);
    psi[i] = potential_exponential(potential_.a0_at(t, y), a, m_half, dt, +1) * psi[i];
  }
}

void SpinorPropagator::step(std::vector<Vector4>& psi, double t) const {
  if (static_cast<int>(psi.size()) != grid_.n_x) throw ConfigError("SpinorPropagator: size mismatch");
  const double dt = config_.dt;
  if (config_.splitting == Splitting::FIRST_ORDER) {
    kinetic(psi, dt);
    potential_part(psi, t, dt);
  } else {
    kinetic(psi, dt / 2);
    potential_part(psi, t + dt / 2, dt);
    kinetic(psi, dt / 2);
  }
}

}  // namespace dw
