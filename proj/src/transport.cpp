#include "er/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <utility>

#include "er/error.hpp"
#include "er/field_ops.hpp"
#include "er/quadrature.hpp"

namespace er {

// ---------------------------------------------------------------------------
// Sparse mode compression and point evaluation
// ---------------------------------------------------------------------------

SparseModes SparseModes::from(const Field& f) {
  SparseModes s;
  if (f.empty()) return s;
  const int S = std::min(f.support(), f.grid().K);
  for (int kx = -S; kx <= S; ++kx)
    for (int ky = -S; ky <= S; ++ky)
      for (int kz = -S; kz <= S; ++kz) {
        const std::complex<double> c = f.get(kx, ky, kz);
        if (c.real() != 0.0 || c.imag() != 0.0) {
          s.k.push_back({kx, ky, kz});
          s.c.push_back(c);
          s.max_abs = std::max(
              {s.max_abs, std::abs(kx), std::abs(ky), std::abs(kz)});
        }
      }
  return s;
}

SparseVec SparseVec::from(const VectorField& v) {
  return {SparseModes::from(v[0]), SparseModes::from(v[1]),
          SparseModes::from(v[2])};
}
int SparseVec::max_abs() const {
  return std::max({comp[0].max_abs, comp[1].max_abs, comp[2].max_abs});
}

SparseTensor SparseTensor::from(const SymTensorField& t) {
  SparseTensor s;
  for (int i = 0; i < 6; ++i) s.comp[static_cast<size_t>(i)] = SparseModes::from(t.c[static_cast<size_t>(i)]);
  return s;
}
int SparseTensor::max_abs() const {
  int m = 0;
  for (const SparseModes& s : comp) m = std::max(m, s.max_abs);
  return m;
}

PointEvaluator::PointEvaluator(int max_abs_k) : maxk_(std::max(1, max_abs_k)) {
  for (auto& p : pow_) p.resize(static_cast<size_t>(2 * maxk_ + 1));
}

void PointEvaluator::load(const Vec3& x) {
  x_ = x;
  tables_ready_ = false;
}

void PointEvaluator::build_tables() {
  for (int d = 0; d < 3; ++d) {
    auto& p = pow_[static_cast<size_t>(d)];
    const std::complex<double> u(std::cos(x_[static_cast<size_t>(d)]),
                                 std::sin(x_[static_cast<size_t>(d)]));
    p[static_cast<size_t>(maxk_)] = 1.0;
    for (int m = 1; m <= maxk_; ++m) {
      p[static_cast<size_t>(maxk_ + m)] = p[static_cast<size_t>(maxk_ + m - 1)] * u;
      p[static_cast<size_t>(maxk_ - m)] = std::conj(p[static_cast<size_t>(maxk_ + m)]);
    }
  }
  tables_ready_ = true;
}

std::complex<double> PointEvaluator::accumulate(const SparseModes& f) const {
  std::complex<double> acc = 0.0;
  if (f.k.size() < 10) {  // few modes: direct phases beat table building
    for (size_t n = 0; n < f.k.size(); ++n) {
      const double ph = f.k[n][0] * x_[0] + f.k[n][1] * x_[1] + f.k[n][2] * x_[2];
      acc += f.c[n] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return acc;
  }
  if (!tables_ready_) const_cast<PointEvaluator*>(this)->build_tables();
  const auto& p0 = pow_[0];
  const auto& p1 = pow_[1];
  const auto& p2 = pow_[2];
  for (size_t n = 0; n < f.k.size(); ++n) {
    acc += f.c[n] * p0[static_cast<size_t>(maxk_ + f.k[n][0])] *
           p1[static_cast<size_t>(maxk_ + f.k[n][1])] *
           p2[static_cast<size_t>(maxk_ + f.k[n][2])];
  }
  return acc;
}

double PointEvaluator::eval(const SparseModes& f) const {
  return accumulate(f).real();
}

Vec3 PointEvaluator::eval(const SparseVec& f) const {
  return {accumulate(f.comp[0]).real(), accumulate(f.comp[1]).real(),
          accumulate(f.comp[2]).real()};
}

std::array<double, 6> PointEvaluator::eval(const SparseTensor& f) const {
  std::array<double, 6> out;
  for (int i = 0; i < 6; ++i)
    out[static_cast<size_t>(i)] = accumulate(f.comp[static_cast<size_t>(i)]).real();
  return out;
}

// ---------------------------------------------------------------------------
// Flow integration
// ---------------------------------------------------------------------------

namespace {

double clamp01(double t) { return std::min(1.0, std::max(0.0, t)); }

// Caches provider evaluations (compressed) by exact stage time.
struct VelocityCache {
  const VectorProvider& vl;
  std::map<double, SparseVec> cache;

  explicit VelocityCache(const VectorProvider& v) : vl(v) {}

  const SparseVec& at(double t) {
    const double tc = clamp01(t);
    auto it = cache.find(tc);
    if (it == cache.end())
      it = cache.emplace(tc, SparseVec::from(vl(tc))).first;
    return it->second;
  }
};

void eval_stage(const SparseVec& v, const std::vector<Vec3>& pos,
                std::vector<Vec3>& out, PointEvaluator& pe) {
  out.resize(pos.size());
  for (size_t i = 0; i < pos.size(); ++i) {
    pe.load(pos[i]);
    out[i] = pe.eval(v);
  }
}

// One RK4 leg from t0 to t1 (signed), n substeps, positions updated in place.
void rk4_advance(std::vector<Vec3>& pos, double t0, double t1, int n,
                 VelocityCache& vc, PointEvaluator& pe) {
  if (n <= 0 || t0 == t1) return;
  const double h = (t1 - t0) / n;
  std::vector<Vec3> k1, k2, k3, k4;
  std::vector<Vec3> tmp(pos.size());
  for (int m = 0; m < n; ++m) {
    const double tm = t0 + m * h;
    const SparseVec& va = vc.at(tm);
    const SparseVec& vb = vc.at(tm + 0.5 * h);
    const SparseVec& vc2 = vc.at(tm + h);
    eval_stage(va, pos, k1, pe);
    for (size_t i = 0; i < pos.size(); ++i)
      for (int d = 0; d < 3; ++d)
        tmp[i][static_cast<size_t>(d)] =
            pos[i][static_cast<size_t>(d)] + 0.5 * h * k1[i][static_cast<size_t>(d)];
    eval_stage(vb, tmp, k2, pe);
    for (size_t i = 0; i < pos.size(); ++i)
      for (int d = 0; d < 3; ++d)
        tmp[i][static_cast<size_t>(d)] =
            pos[i][static_cast<size_t>(d)] + 0.5 * h * k2[i][static_cast<size_t>(d)];
    eval_stage(vb, tmp, k3, pe);
    for (size_t i = 0; i < pos.size(); ++i)
      for (int d = 0; d < 3; ++d)
        tmp[i][static_cast<size_t>(d)] =
            pos[i][static_cast<size_t>(d)] + h * k3[i][static_cast<size_t>(d)];
    eval_stage(vc2, tmp, k4, pe);
    for (size_t i = 0; i < pos.size(); ++i)
      for (int d = 0; d < 3; ++d)
        pos[i][static_cast<size_t>(d)] +=
            h / 6.0 *
            (k1[i][static_cast<size_t>(d)] + 2.0 * k2[i][static_cast<size_t>(d)] +
             2.0 * k3[i][static_cast<size_t>(d)] + k4[i][static_cast<size_t>(d)]);
  }
}

std::vector<Vec3> grid_points(Grid3 g) {
  std::vector<Vec3> pos;
  pos.reserve(static_cast<size_t>(g.n_phys()));
  const double h = g.h();
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy)
      for (int iz = 0; iz < g.N; ++iz)
        pos.push_back({ix * h, iy * h, iz * h});
  return pos;
}

// sup cnorm(v,1) and sup seminorm(v,1) probed at the window ends and middle.
struct WindowNorms {
  double c1 = 0.0;   // max ||v||_1
  double grad = 0.0; // max [v]_1 = sup ||Dv||_0
};

WindowNorms probe_norms(const VectorProvider& vl, double a, double b) {
  WindowNorms n;
  for (double t : {a, 0.5 * (a + b), b}) {
    const VectorField v = vl(clamp01(t));
    const double s1 = seminorm(v, 1);
    n.grad = std::max(n.grad, s1);
    n.c1 = std::max(n.c1, s1 + seminorm(v, 0));
  }
  return n;
}

int substeps_for(double window, const WindowNorms& n, const FlowOptions& o) {
  const double dt_max = n.c1 > 0.0 ? o.c_flow / n.c1 : window;
  int k = static_cast<int>(std::ceil(std::abs(window) / std::max(dt_max, 1e-12)));
  return std::max(o.min_substeps, k);
}

void check_cfl(double window, const WindowNorms& n, const FlowOptions& o,
               std::vector<std::string>& warnings) {
  const double cfl = std::abs(window) * n.grad;
  if (cfl > 1.0 + 1e-12) {
    const std::string msg =
        "flow window violates the CFL condition |t-s| sup||Dv||_0 <= 1 "
        "(measured " + std::to_string(cfl) + ")";
    if (!o.toy_mode) throw Error(msg);
    warnings.push_back(msg);
  }
}

}  // namespace

Vec3 FlowMap::apply_grid(int ix, int iy, int iz) const {
  const double h = grid.h();
  return {ix * h + disp[0].at(ix, iy, iz), iy * h + disp[1].at(ix, iy, iz),
          iz * h + disp[2].at(ix, iy, iz)};
}

Vec3 FlowMap::apply(const Vec3& x) const {
  return {x[0] + interp3(disp[0], x[0], x[1], x[2]),
          x[1] + interp3(disp[1], x[0], x[1], x[2]),
          x[2] + interp3(disp[2], x[0], x[1], x[2])};
}

FlowMap integrate_flow(const VectorProvider& vl, Grid3 g, double anchor,
                       double t, const FlowOptions& opt) {
  FlowMap f;
  f.grid = g;
  f.anchor = anchor;
  f.time = t;

  const WindowNorms norms = probe_norms(vl, anchor, t);
  check_cfl(t - anchor, norms, opt, f.warnings);
  f.cfl = std::abs(t - anchor) * norms.grad;
  const int n = substeps_for(t - anchor, norms, opt);
  f.substeps = n;

  std::vector<Vec3> pos = grid_points(g);
  VelocityCache vc(vl);
  PointEvaluator pe(std::max(1, g.K));
  rk4_advance(pos, anchor, t, n, vc, pe);

  const double h = g.h();
  for (int d = 0; d < 3; ++d) {
    f.disp[static_cast<size_t>(d)].g = g;
    f.disp[static_cast<size_t>(d)].v.resize(static_cast<size_t>(g.n_phys()));
  }
  size_t i = 0;
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy)
      for (int iz = 0; iz < g.N; ++iz, ++i) {
        f.disp[0].at(ix, iy, iz) = pos[i][0] - ix * h;
        f.disp[1].at(ix, iy, iz) = pos[i][1] - iy * h;
        f.disp[2].at(ix, iy, iz) = pos[i][2] - iz * h;
      }
  return f;
}

FlowMap inverse_flow(const VectorProvider& vl, Grid3 g, double anchor,
                     double t, const FlowOptions& opt) {
  FlowMap f = integrate_flow(vl, g, t, anchor, opt);
  f.anchor = anchor;
  f.time = t;
  f.inverse = true;
  return f;
}

FlowJacobian flow_jacobian(const FlowMap& f) {
  FlowJacobian j;
  j.grid = f.grid;
  for (int i = 0; i < 3; ++i) {
    const Field fi = from_phys(f.disp[static_cast<size_t>(i)]);
    const VectorField gi = grad(fi);
    for (int d = 0; d < 3; ++d)
      j.d[static_cast<size_t>(i)][static_cast<size_t>(d)] = to_phys(gi[static_cast<size_t>(d)]);
  }
  for (int i = 0; i < 3; ++i)
    for (auto& x : j.d[static_cast<size_t>(i)][static_cast<size_t>(i)].v) x += 1.0;
  return j;
}

double max_abs_det_minus_one(const FlowJacobian& j) {
  double worst = 0.0;
  const size_t n = j.d[0][0].v.size();
  for (size_t i = 0; i < n; ++i) {
    const double a = j.d[0][0].v[i], b = j.d[0][1].v[i], c = j.d[0][2].v[i];
    const double d = j.d[1][0].v[i], e = j.d[1][1].v[i], f = j.d[1][2].v[i];
    const double g = j.d[2][0].v[i], h = j.d[2][1].v[i], k = j.d[2][2].v[i];
    const double det = a * (e * k - f * h) - b * (d * k - f * g) + c * (d * h - e * g);
    worst = std::max(worst, std::abs(det - 1.0));
  }
  return worst;
}

double sup_distance_from_id(const FlowJacobian& j) {
  double worst = 0.0;
  const size_t n = j.d[0][0].v.size();
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double e = j.d[static_cast<size_t>(a)][static_cast<size_t>(b)].v[i] - (a == b ? 1.0 : 0.0);
        s += e * e;
      }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

double composition_error(const FlowMap& fwd, const FlowMap& inv) {
  if (fwd.grid != inv.grid) throw Error("composition_error: grid mismatch");
  double worst = 0.0;
  const Grid3 g = fwd.grid;
  const double h = g.h();
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy)
      for (int iz = 0; iz < g.N; ++iz) {
        const Vec3 y = fwd.apply_grid(ix, iy, iz);
        const Vec3 z = inv.apply(y);
        const Vec3 x = {ix * h, iy * h, iz * h};
        for (int d = 0; d < 3; ++d) {
          double e = z[static_cast<size_t>(d)] - x[static_cast<size_t>(d)];
          e -= kTwoPi * std::round(e / kTwoPi);
          worst = std::max(worst, std::abs(e));
        }
      }
  return worst;
}

namespace {

double report_tail(const PhysicalField& raw, const Field& projected) {
  const PhysicalField back = to_phys(projected);
  double acc = 0.0;
  for (size_t i = 0; i < raw.v.size(); ++i) {
    const double d = raw.v[i] - back.v[i];
    acc += d * d;
  }
  const double vol = kTwoPi * kTwoPi * kTwoPi;
  return std::sqrt(vol * acc / double(raw.v.size()));
}

}  // namespace

Field compose(const Field& f, const FlowMap& map, double* tail_l2) {
  const Grid3 g = map.grid;
  const SparseModes sf = SparseModes::from(f);
  PointEvaluator pe(std::max(1, sf.max_abs));
  PhysicalField raw;
  raw.g = g;
  raw.v.resize(static_cast<size_t>(g.n_phys()));
  size_t i = 0;
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy)
      for (int iz = 0; iz < g.N; ++iz, ++i) {
        pe.load(map.apply_grid(ix, iy, iz));
        raw.v[i] = pe.eval(sf);
      }
  Field out = from_phys(raw);
  if (tail_l2) *tail_l2 = report_tail(raw, out);
  return out;
}

SymTensorField compose(const SymTensorField& f, const FlowMap& map,
                       double* tail_l2) {
  const Grid3 g = map.grid;
  const SparseTensor sf = SparseTensor::from(f);
  PointEvaluator pe(std::max(1, sf.max_abs()));
  std::array<PhysicalField, 6> raw;
  for (auto& r : raw) {
    r.g = g;
    r.v.resize(static_cast<size_t>(g.n_phys()));
  }
  size_t i = 0;
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy)
      for (int iz = 0; iz < g.N; ++iz, ++i) {
        pe.load(map.apply_grid(ix, iy, iz));
        const std::array<double, 6> vals = pe.eval(sf);
        for (int c = 0; c < 6; ++c) raw[static_cast<size_t>(c)].v[i] = vals[static_cast<size_t>(c)];
      }
  SymTensorField out;
  double tail = 0.0;
  // component multiplicity: xx,yy,zz once, xy,xz,yz twice (full tensor L2)
  const double mult[6] = {1.0, 2.0, 2.0, 1.0, 2.0, 1.0};
  for (int c = 0; c < 6; ++c) {
    out.c[static_cast<size_t>(c)] = from_phys(raw[static_cast<size_t>(c)]);
    if (tail_l2) {
      const double t = report_tail(raw[static_cast<size_t>(c)], out.c[static_cast<size_t>(c)]);
      tail += mult[c] * t * t;
    }
  }
  if (tail_l2) *tail_l2 = std::sqrt(tail);
  return out;
}

// ---------------------------------------------------------------------------
// Material derivative
// ---------------------------------------------------------------------------

namespace {

// 4th-order central derivative of provider samples: coefficients of
// f(t-2h), f(t-h), f(t+h), f(t+2h).
constexpr double kC2 = 1.0 / 12.0, kC1 = 8.0 / 12.0;

Field advect_scalar(const VectorField& v, const Field& f) {
  const VectorField gf = grad(f);
  Field out = multiply(v[0], gf[0]);
  out += multiply(v[1], gf[1]);
  out += multiply(v[2], gf[2]);
  return out;
}

}  // namespace

Field material_derivative(const ScalarProvider& f, const VectorProvider& vl,
                          double t, double dt) {
  if (dt <= 0.0) throw Error("material_derivative: dt must be positive");
  Field ddt = f(t - 2 * dt) * kC2 - f(t - dt) * kC1 + f(t + dt) * kC1 -
              f(t + 2 * dt) * kC2;
  ddt *= 1.0 / dt;
  ddt += advect_scalar(vl(t), f(t));
  return ddt;
}

VectorField material_derivative(const VectorProvider& f,
                                const VectorProvider& vl, double t,
                                double dt) {
  if (dt <= 0.0) throw Error("material_derivative: dt must be positive");
  const VectorField fm2 = f(t - 2 * dt), fm1 = f(t - dt), fp1 = f(t + dt),
                    fp2 = f(t + 2 * dt);
  const VectorField v = vl(t);
  VectorField adv = advect(v, f(t));
  VectorField out;
  for (int d = 0; d < 3; ++d) {
    out[static_cast<size_t>(d)] = fm2[static_cast<size_t>(d)] * kC2 - fm1[static_cast<size_t>(d)] * kC1 +
                                  fp1[static_cast<size_t>(d)] * kC1 - fp2[static_cast<size_t>(d)] * kC2;
    out[static_cast<size_t>(d)] *= 1.0 / dt;
    out[static_cast<size_t>(d)] += adv[static_cast<size_t>(d)];
  }
  return out;
}

SymTensorField material_derivative(const TensorProvider& f,
                                   const VectorProvider& vl, double t,
                                   double dt) {
  if (dt <= 0.0) throw Error("material_derivative: dt must be positive");
  const SymTensorField fm2 = f(t - 2 * dt), fm1 = f(t - dt), fp1 = f(t + dt),
                       fp2 = f(t + 2 * dt), f0 = f(t);
  const VectorField v = vl(t);
  SymTensorField out;
  for (int c = 0; c < 6; ++c) {
    out.c[static_cast<size_t>(c)] = fm2.c[static_cast<size_t>(c)] * kC2 - fm1.c[static_cast<size_t>(c)] * kC1 +
                                    fp1.c[static_cast<size_t>(c)] * kC1 - fp2.c[static_cast<size_t>(c)] * kC2;
    out.c[static_cast<size_t>(c)] *= 1.0 / dt;
    out.c[static_cast<size_t>(c)] += advect_scalar(v, f0.c[static_cast<size_t>(c)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time kernel and Reynolds smoothing
// ---------------------------------------------------------------------------

namespace {

double bump1(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double bump1_mass() {
  static const double Z = [] {
    const GaussLegendre q = gauss_legendre(96);
    double acc = 0.0;
    for (size_t n = 0; n < q.x.size(); ++n) acc += q.w[n] * bump1(q.x[n]);
    return acc;
  }();
  return Z;
}

}  // namespace

double time_kernel(double s) { return bump1(s) / bump1_mass(); }

double time_kernel_d1(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double d = 1.0 - s * s;
  return bump1(s) * (-2.0 * s / (d * d)) / bump1_mass();
}

SymTensorField smooth_reynolds_average(const TensorProvider& Rl,
                                       const VectorProvider& vl, Grid3 g,
                                       double t, double tau,
                                       const SmoothOptions& opt) {
  if (tau <= 0.0) throw Error("smooth_reynolds_average: tau must be positive");
  if (opt.quad_nodes < 9)
    throw Error("smooth_reynolds_average: need at least 9 quadrature nodes");

  std::vector<std::string> warnings;
  const WindowNorms norms = probe_norms(vl, t - tau, t + tau);
  check_cfl(2.0 * tau, norms, opt.flow, warnings);
  if (opt.warn_sink)
    opt.warn_sink->insert(opt.warn_sink->end(), warnings.begin(),
                          warnings.end());

  const GaussLegendre q = gauss_legendre(opt.quad_nodes);
  // node s_n = tau*x_n; effective weight w_n rho_tau(s_n) tau = w_n rho(x_n).
  // The weights are normalized by their full sum so the discrete kernel is a
  // probability measure: a stress constant in time is reproduced exactly.
  // (Clipping at [0,1] below still drops whole nodes, keeping the
  // zero-extension semantics.)
  std::vector<double> node(q.x.size()), weight(q.x.size());
  double mass = 0.0;
  for (size_t n = 0; n < q.x.size(); ++n) {
    node[n] = tau * q.x[n];
    weight[n] = q.w[n] * time_kernel(q.x[n]);
    mass += weight[n];
  }
  for (double& w : weight) w /= mass;

  std::array<std::vector<double>, 6> acc;
  for (auto& a : acc) a.assign(static_cast<size_t>(g.n_phys()), 0.0);

  VelocityCache vc(vl);
  PointEvaluator pe(std::max(1, g.K));

  auto accumulate_branch = [&](bool forward) {
    std::vector<Vec3> pos = grid_points(g);
    double cur = 0.0;  // offset from t along this branch
    // nodes ordered away from 0 on this side
    std::vector<size_t> order;
    for (size_t n = 0; n < node.size(); ++n)
      if (forward ? node[n] >= 0.0 : node[n] < 0.0) order.push_back(n);
    if (forward) std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return node[a] < node[b];
    });
    else std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return node[a] > node[b];
    });

    for (size_t nn : order) {
      const double target = node[nn];
      const double leg = std::abs(target - cur);
      const double dt_max =
          norms.c1 > 0.0 ? opt.flow.c_flow / norms.c1 : leg;
      const int steps =
          std::max(1, static_cast<int>(std::ceil(leg / std::max(dt_max, 1e-12))));
      rk4_advance(pos, t + cur, t + target, steps, vc, pe);
      cur = target;
      const double ts = t + target;
      if (ts < 0.0 || ts > 1.0) continue;  // stress extended by zero
      const SparseTensor st = SparseTensor::from(Rl(ts));
      PointEvaluator per(std::max(1, st.max_abs()));
      for (size_t i = 0; i < pos.size(); ++i) {
        per.load(pos[i]);
        const std::array<double, 6> vals = per.eval(st);
        for (int c = 0; c < 6; ++c) acc[static_cast<size_t>(c)][i] += weight[nn] * vals[static_cast<size_t>(c)];
      }
    }
  };
  accumulate_branch(true);
  accumulate_branch(false);

  SymTensorField out;
  PhysicalField tmp;
  tmp.g = g;
  for (int c = 0; c < 6; ++c) {
    tmp.v = acc[static_cast<size_t>(c)];
    out.c[static_cast<size_t>(c)] = from_phys(tmp);
  }
  return out;
}

SymTensorField smooth_reynolds_transport(const SymTensorField& Rl_anchor,
                                         const FlowMap& phi, double* tail_l2) {
  return compose(Rl_anchor, phi, tail_l2);
}

VectorProvider sampled_vector_provider(double t0, double dt,
                                       std::vector<VectorField> samples) {
  if (samples.size() < 2 || dt <= 0.0)
    throw Error("sampled_vector_provider: need >= 2 uniform samples");
  auto data = std::make_shared<std::vector<VectorField>>(std::move(samples));
  return [t0, dt, data](double t) -> VectorField {
    const int n = static_cast<int>(data->size());
    double u = (t - t0) / dt;
    u = std::min(std::max(u, 0.0), double(n - 1));
    int i = std::min(static_cast<int>(std::floor(u)), n - 2);
    const double s = u - i;
    const int i0 = std::max(i - 1, 0), i1 = i, i2 = i + 1,
              i3 = std::min(i + 2, n - 1);
    const double w0 = 0.5 * (-s * s * s + 2 * s * s - s);
    const double w1 = 0.5 * (3 * s * s * s - 5 * s * s + 2);
    const double w2 = 0.5 * (-3 * s * s * s + 4 * s * s + s);
    const double w3 = 0.5 * (s * s * s - s * s);
    VectorField out;
    for (int d = 0; d < 3; ++d) {
      out[static_cast<size_t>(d)] = (*data)[static_cast<size_t>(i0)][static_cast<size_t>(d)] * w0 +
                                    (*data)[static_cast<size_t>(i1)][static_cast<size_t>(d)] * w1 +
                                    (*data)[static_cast<size_t>(i2)][static_cast<size_t>(d)] * w2 +
                                    (*data)[static_cast<size_t>(i3)][static_cast<size_t>(d)] * w3;
    }
    return out;
  };
}

}  // namespace er
