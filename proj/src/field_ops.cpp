#include "er/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "er/error.hpp"
#include "er/quadrature.hpp"

namespace er {

namespace {

void require_same_grid(const Grid3& a, const Grid3& b, const char* op) {
  if (a != b)
    throw Error(std::string(op) + ": grids differ (N=" + std::to_string(a.N) +
                " vs N=" + std::to_string(b.N) + ")");
}

// Apply the multiplier (i kx)^bx (i ky)^by (i kz)^bz mode by mode.
Field multi_derivative(const Field& f, int bx, int by, int bz) {
  const Grid3& g = f.grid();
  Field out(g);
  const int K = g.K;
  const std::complex<double>* src = f.data();
  std::complex<double>* dst = out.data();
  const std::complex<double> I(0.0, 1.0);
  std::int64_t m = 0;
  for (int kx = -K; kx <= K; ++kx) {
    const std::complex<double> fx = std::pow(I * double(kx), bx);
    for (int ky = -K; ky <= K; ++ky) {
      const std::complex<double> fxy = fx * std::pow(I * double(ky), by);
      for (int kz = -K; kz <= K; ++kz, ++m) {
        dst[m] = src[m] * fxy * std::pow(I * double(kz), bz);
      }
    }
  }
  out.set_support(f.support());
  return out;
}

std::vector<std::array<int, 3>> multi_indices(int m) {
  std::vector<std::array<int, 3>> out;
  for (int bx = 0; bx <= m; ++bx)
    for (int by = 0; by + bx <= m; ++by) out.push_back({bx, by, m - bx - by});
  return out;
}

}  // namespace

Field derivative(const Field& f, int axis) {
  if (axis < 0 || axis > 2) throw Error("derivative: axis out of range");
  return multi_derivative(f, axis == 0 ? 1 : 0, axis == 1 ? 1 : 0,
                          axis == 2 ? 1 : 0);
}

VectorField grad(const Field& f) {
  return {derivative(f, 0), derivative(f, 1), derivative(f, 2)};
}

Field divergence(const VectorField& v) {
  Field out = derivative(v[0], 0);
  out += derivative(v[1], 1);
  out += derivative(v[2], 2);
  return out;
}

VectorField divergence(const SymTensorField& t) {
  VectorField out;
  for (int j = 0; j < 3; ++j) {
    Field s = derivative(t.comp(0, j), 0);
    s += derivative(t.comp(1, j), 1);
    s += derivative(t.comp(2, j), 2);
    out[static_cast<size_t>(j)] = std::move(s);
  }
  return out;
}

VectorField curl(const VectorField& v) {
  return {derivative(v[2], 1) - derivative(v[1], 2),
          derivative(v[0], 2) - derivative(v[2], 0),
          derivative(v[1], 0) - derivative(v[0], 1)};
}

VectorField leray(const VectorField& v) {
  const Grid3& g = v[0].grid();
  require_same_grid(g, v[1].grid(), "leray");
  require_same_grid(g, v[2].grid(), "leray");
  VectorField out = make_vector(g);
  const int K = g.K;
  std::int64_t m = 0;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      for (int kz = -K; kz <= K; ++kz, ++m) {
        const std::complex<double> vx = v[0].data()[m];
        const std::complex<double> vy = v[1].data()[m];
        const std::complex<double> vz = v[2].data()[m];
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) {
          out[0].data()[m] = vx;
          out[1].data()[m] = vy;
          out[2].data()[m] = vz;
          continue;
        }
        const std::complex<double> kv =
            (double(kx) * vx + double(ky) * vy + double(kz) * vz) / k2;
        out[0].data()[m] = vx - double(kx) * kv;
        out[1].data()[m] = vy - double(ky) * kv;
        out[2].data()[m] = vz - double(kz) * kv;
      }
  const int s = std::max({v[0].support(), v[1].support(), v[2].support()});
  for (auto& f : out) f.set_support(s);
  return out;
}

SymTensorField inverse_divergence(const VectorField& v) {
  const Grid3& g = v[0].grid();
  require_same_grid(g, v[1].grid(), "inverse_divergence");
  require_same_grid(g, v[2].grid(), "inverse_divergence");
  SymTensorField T = make_tensor(g);
  const int K = g.K;
  const std::complex<double> I(0.0, 1.0);
  std::int64_t m = 0;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      for (int kz = -K; kz <= K; ++kz, ++m) {
        const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) continue;  // mean removed; tensor mean stays zero
        const double kk[3] = {double(kx), double(ky), double(kz)};
        std::complex<double> u[3], Pu[3];
        for (int j = 0; j < 3; ++j)
          u[j] = -v[static_cast<size_t>(j)].data()[m] / k2;
        const std::complex<double> ku =
            (kk[0] * u[0] + kk[1] * u[1] + kk[2] * u[2]) / k2;
        for (int j = 0; j < 3; ++j) Pu[j] = u[j] - kk[j] * ku;
        const std::complex<double> divu =
            I * (kk[0] * u[0] + kk[1] * u[1] + kk[2] * u[2]);
        for (int i = 0; i < 3; ++i)
          for (int j = i; j < 3; ++j) {
            std::complex<double> val =
                0.25 * I * (kk[i] * Pu[j] + kk[j] * Pu[i]) +
                0.75 * I * (kk[i] * u[j] + kk[j] * u[i]);
            if (i == j) val -= 0.5 * divu;
            T.comp(i, j).data()[m] = val;
          }
      }
  const int s = std::max({v[0].support(), v[1].support(), v[2].support()});
  for (auto& f : T.c) f.set_support(s);
  return T;
}

// ---------------------------------------------------------------------------
// Mollifier
// ---------------------------------------------------------------------------

namespace {

double psi_raw(double r) {
  return (r >= 1.0) ? 0.0 : std::exp(-1.0 / (1.0 - r * r));
}

const GaussLegendre& psi_quad() {
  static const GaussLegendre q = gauss_legendre(160, 0.0, 1.0);
  return q;
}

double psi_mass() {  // 4 pi int_0^1 r^2 psi_raw(r) dr
  static const double mass = [] {
    const GaussLegendre& q = psi_quad();
    double s = 0.0;
    for (size_t i = 0; i < q.x.size(); ++i)
      s += q.w[i] * q.x[i] * q.x[i] * psi_raw(q.x[i]);
    return 4.0 * M_PI * s;
  }();
  return mass;
}

}  // namespace

double mollifier_hat(double kappa) {
  const GaussLegendre& q = psi_quad();
  double s = 0.0;
  for (size_t i = 0; i < q.x.size(); ++i) {
    const double r = q.x[i], kr = kappa * r;
    const double sinc =
        (std::abs(kr) < 1e-6) ? 1.0 - kr * kr / 6.0 : std::sin(kr) / kr;
    s += q.w[i] * r * r * psi_raw(r) * sinc;
  }
  return 4.0 * M_PI * s / psi_mass();
}

Field mollify(const Field& f, double ell) {
  if (!(ell > 0.0)) throw Error("mollify: ell must be positive");
  const Grid3& g = f.grid();
  Field out(g);
  const int K = g.K;
  std::unordered_map<int, double> memo;
  const std::complex<double>* src = f.data();
  std::complex<double>* dst = out.data();
  std::int64_t m = 0;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      for (int kz = -K; kz <= K; ++kz, ++m) {
        const int k2 = kx * kx + ky * ky + kz * kz;
        auto it = memo.find(k2);
        double h;
        if (it == memo.end()) {
          h = mollifier_hat(ell * std::sqrt(double(k2)));
          memo.emplace(k2, h);
        } else {
          h = it->second;
        }
        dst[m] = src[m] * h;
      }
  out.set_support(f.support());
  return out;
}

Field lowpass(const Field& f, double radius) {
  const Grid3& g = f.grid();
  Field out(g);
  const int K = g.K;
  const double r2 = radius * radius;
  const std::complex<double>* src = f.data();
  std::complex<double>* dst = out.data();
  std::int64_t m = 0;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      for (int kz = -K; kz <= K; ++kz, ++m) {
        const int k2 = kx * kx + ky * ky + kz * kz;
        dst[m] = (double(k2) < r2) ? src[m] : 0.0;
      }
  const int cap = radius <= 0.0 ? 0 : static_cast<int>(std::ceil(radius));
  out.set_support(std::min(f.support(), cap));
  return out;
}

SymTensorField lowpass(const SymTensorField& t, double radius) {
  SymTensorField out = t;
  for (Field& c : out.c) c = lowpass(c, radius);
  return out;
}

VectorField mollify(const VectorField& v, double ell) {
  return {mollify(v[0], ell), mollify(v[1], ell), mollify(v[2], ell)};
}

SymTensorField mollify(const SymTensorField& t, double ell) {
  SymTensorField out;
  for (size_t i = 0; i < 6; ++i) out.c[i] = mollify(t.c[i], ell);
  return out;
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

namespace {

void check_alias(const Grid3& g, int s1, int s2, const char* op) {
  if (s1 + s2 > g.N - g.K - 1)
    throw Error(std::string(op) + ": aliasing risk, supports " +
                std::to_string(s1) + "+" + std::to_string(s2) + " exceed N-K-1=" +
                std::to_string(g.N - g.K - 1));
}

int vec_support(const VectorField& v) {
  return std::max({v[0].support(), v[1].support(), v[2].support()});
}

}  // namespace

Field multiply(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  check_alias(a.grid(), a.support(), b.support(), "multiply");
  PhysicalField pa = to_phys(a), pb = to_phys(b);
  for (size_t i = 0; i < pa.v.size(); ++i) pa.v[i] *= pb.v[i];
  Field out = from_phys(pa);
  out.set_support(std::min(a.grid().K, a.support() + b.support()));
  return out;
}

Field dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a[0].grid(), b[0].grid(), "dot");
  check_alias(a[0].grid(), vec_support(a), vec_support(b), "dot");
  PhysicalField acc, tmp;
  acc.g = a[0].grid();
  acc.v.assign(static_cast<size_t>(acc.g.n_phys()), 0.0);
  PhysicalField pa;
  for (int i = 0; i < 3; ++i) {
    to_phys_into(a[static_cast<size_t>(i)], pa);
    to_phys_into(b[static_cast<size_t>(i)], tmp);
    for (size_t n = 0; n < acc.v.size(); ++n) acc.v[n] += pa.v[n] * tmp.v[n];
  }
  Field out = from_phys(acc);
  out.set_support(std::min(acc.g.K, vec_support(a) + vec_support(b)));
  return out;
}

SymTensorField sym_outer(const VectorField& a, const VectorField& b) {
  require_same_grid(a[0].grid(), b[0].grid(), "sym_outer");
  const Grid3& g = a[0].grid();
  check_alias(g, vec_support(a), vec_support(b), "sym_outer");
  const bool same = (&a == &b);
  std::array<PhysicalField, 3> pa, pb;
  for (int i = 0; i < 3; ++i) {
    to_phys_into(a[static_cast<size_t>(i)], pa[static_cast<size_t>(i)]);
    if (!same) to_phys_into(b[static_cast<size_t>(i)], pb[static_cast<size_t>(i)]);
  }
  const std::array<PhysicalField, 3>& qb = same ? pa : pb;
  SymTensorField T;
  PhysicalField prod;
  prod.g = g;
  prod.v.resize(static_cast<size_t>(g.n_phys()));
  const int sup = std::min(g.K, vec_support(a) + vec_support(b));
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const auto& x = pa[static_cast<size_t>(i)].v;
      const auto& y = qb[static_cast<size_t>(j)].v;
      const auto& xr = pa[static_cast<size_t>(j)].v;
      const auto& yr = qb[static_cast<size_t>(i)].v;
      for (size_t n = 0; n < prod.v.size(); ++n)
        prod.v[n] = 0.5 * (x[n] * y[n] + xr[n] * yr[n]);
      T.comp(i, j) = from_phys(prod);
      T.comp(i, j).set_support(sup);
    }
  return T;
}

VectorField advect(const VectorField& v, const VectorField& w) {
  require_same_grid(v[0].grid(), w[0].grid(), "advect");
  const Grid3& g = v[0].grid();
  check_alias(g, vec_support(v), vec_support(w), "advect");
  std::array<PhysicalField, 3> pv;
  for (int i = 0; i < 3; ++i) to_phys_into(v[static_cast<size_t>(i)], pv[static_cast<size_t>(i)]);
  VectorField out;
  PhysicalField acc, tmp;
  acc.g = g;
  const int sup = std::min(g.K, vec_support(v) + vec_support(w));
  for (int j = 0; j < 3; ++j) {
    acc.v.assign(static_cast<size_t>(g.n_phys()), 0.0);
    for (int i = 0; i < 3; ++i) {
      to_phys_into(derivative(w[static_cast<size_t>(j)], i), tmp);
      const auto& x = pv[static_cast<size_t>(i)].v;
      for (size_t n = 0; n < acc.v.size(); ++n) acc.v[n] += x[n] * tmp.v[n];
    }
    out[static_cast<size_t>(j)] = from_phys(acc);
    out[static_cast<size_t>(j)].set_support(sup);
  }
  return out;
}

Field trace(const SymTensorField& t) {
  Field out = t.comp(0, 0);
  out += t.comp(1, 1);
  out += t.comp(2, 2);
  return out;
}

SymTensorField deviatoric(const SymTensorField& t) {
  SymTensorField out = t;
  Field tr = trace(t);
  tr *= (1.0 / 3.0);
  out.comp(0, 0) -= tr;
  out.comp(1, 1) -= tr;
  out.comp(2, 2) -= tr;
  return out;
}

SymTensorField add_isotropic(SymTensorField t, const Field& s) {
  t.comp(0, 0) += s;
  t.comp(1, 1) += s;
  t.comp(2, 2) += s;
  return t;
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

namespace {

double sup_of(const std::vector<const Field*>& comps) {
  PhysicalField tmp;
  std::vector<double> sq;
  bool first = true;
  for (const Field* f : comps) {
    to_phys_into(*f, tmp);
    if (first) {
      sq.assign(tmp.v.size(), 0.0);
      first = false;
    }
    for (size_t n = 0; n < tmp.v.size(); ++n) sq[n] += tmp.v[n] * tmp.v[n];
  }
  double mx = 0.0;
  for (double s : sq) mx = std::max(mx, s);
  return std::sqrt(mx);
}

}  // namespace

double sup_norm(const Field& f) { return sup_of({&f}); }

double sup_norm(const VectorField& v) { return sup_of({&v[0], &v[1], &v[2]}); }

double sup_norm(const SymTensorField& t) {
  // Frobenius: off-diagonal components appear twice.
  PhysicalField tmp;
  std::vector<double> sq(static_cast<size_t>(t.c[0].grid().n_phys()), 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      to_phys_into(t.comp(i, j), tmp);
      const double w = (i == j) ? 1.0 : 2.0;
      for (size_t n = 0; n < sq.size(); ++n) sq[n] += w * tmp.v[n] * tmp.v[n];
    }
  double mx = 0.0;
  for (double s : sq) mx = std::max(mx, s);
  return std::sqrt(mx);
}

namespace {

template <typename Apply>
double seminorm_impl(int m, const Apply& sup_of_derivative) {
  double mx = 0.0;
  for (const auto& b : multi_indices(m))
    mx = std::max(mx, sup_of_derivative(b[0], b[1], b[2]));
  return mx;
}

}  // namespace

double seminorm(const Field& f, int m) {
  return seminorm_impl(m, [&](int bx, int by, int bz) {
    return sup_norm(multi_derivative(f, bx, by, bz));
  });
}

double seminorm(const VectorField& v, int m) {
  return seminorm_impl(m, [&](int bx, int by, int bz) {
    VectorField d = {multi_derivative(v[0], bx, by, bz),
                     multi_derivative(v[1], bx, by, bz),
                     multi_derivative(v[2], bx, by, bz)};
    return sup_norm(d);
  });
}

double seminorm(const SymTensorField& t, int m) {
  return seminorm_impl(m, [&](int bx, int by, int bz) {
    SymTensorField d;
    for (size_t i = 0; i < 6; ++i)
      d.c[i] = multi_derivative(t.c[i], bx, by, bz);
    return sup_norm(d);
  });
}

double cnorm(const Field& f, int m) {
  double s = 0.0;
  for (int j = 0; j <= m; ++j) s += seminorm(f, j);
  return s;
}

double cnorm(const VectorField& v, int m) {
  double s = 0.0;
  for (int j = 0; j <= m; ++j) s += seminorm(v, j);
  return s;
}

double cnorm(const SymTensorField& t, int m) {
  double s = 0.0;
  for (int j = 0; j <= m; ++j) s += seminorm(t, j);
  return s;
}

// ---------------------------------------------------------------------------
// Hoelder seminorm estimator
// ---------------------------------------------------------------------------

namespace {

const int kDirs[13][3] = {{1, 0, 0},  {0, 1, 0},  {0, 0, 1},  {1, 1, 0},
                          {1, -1, 0}, {1, 0, 1},  {1, 0, -1}, {0, 1, 1},
                          {0, 1, -1}, {1, 1, 1},  {1, 1, -1}, {1, -1, 1},
                          {1, -1, -1}};

std::vector<int> separation_ladder(int N) {
  // 1, 2, 3, 4, 6, 8, 12, 16, ... : ratio <= 1.5 between consecutive rungs
  // keeps the worst-case undershoot of the sampled sup small.
  std::vector<int> s = {1, 2, 3};
  for (int v = 4; v <= N / 4; v = v * 3 / 2) s.push_back(v);
  while (!s.empty() && s.back() > N / 4) s.pop_back();
  return s;
}

double holder_of_phys(const std::vector<PhysicalField>& comps, double alpha) {
  const Grid3& g = comps.front().g;
  const int N = g.N;
  const std::vector<int> seps = separation_ladder(N);
  double best = 0.0;
  for (const auto& dir : kDirs) {
    const double dlen =
        std::sqrt(double(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]));
    for (int s : seps) {
      const int dx = ((dir[0] * s) % N + N) % N;
      const int dy = ((dir[1] * s) % N + N) % N;
      const int dz = ((dir[2] * s) % N + N) % N;
      const double h = std::pow(g.h() * s * dlen, alpha);
      double mx = 0.0;
      for (int ix = 0; ix < N; ++ix) {
        const int jx = (ix + dx) % N;
        for (int iy = 0; iy < N; ++iy) {
          const int jy = (iy + dy) % N;
          for (int iz = 0; iz < N; ++iz) {
            const int jz = (iz + dz) % N;
            double sq = 0.0;
            for (const auto& p : comps) {
              const double d = p.at(jx, jy, jz) - p.at(ix, iy, iz);
              sq += d * d;
            }
            if (sq > mx) mx = sq;
          }
        }
      }
      best = std::max(best, std::sqrt(mx) / h);
    }
  }
  return best;
}

}  // namespace

double holder_seminorm(const Field& f, int m, double alpha) {
  double best = 0.0;
  for (const auto& b : multi_indices(m)) {
    std::vector<PhysicalField> comps(1);
    to_phys_into(multi_derivative(f, b[0], b[1], b[2]), comps[0]);
    best = std::max(best, holder_of_phys(comps, alpha));
  }
  return best;
}

double holder_seminorm(const VectorField& v, int m, double alpha) {
  double best = 0.0;
  for (const auto& b : multi_indices(m)) {
    std::vector<PhysicalField> comps(3);
    for (int i = 0; i < 3; ++i)
      to_phys_into(multi_derivative(v[static_cast<size_t>(i)], b[0], b[1], b[2]),
                   comps[static_cast<size_t>(i)]);
    best = std::max(best, holder_of_phys(comps, alpha));
  }
  return best;
}

double integral(const Field& f) {
  const std::complex<double> m = f.mean();
  return kTwoPi * kTwoPi * kTwoPi * m.real();
}

double l2_squared(const VectorField& v) {
  double s = 0.0;
  for (const auto& f : v) {
    const std::complex<double>* c = f.data();
    const std::int64_t n = f.grid().n_ball();
    for (std::int64_t i = 0; i < n; ++i) s += std::norm(c[i]);
  }
  return kTwoPi * kTwoPi * kTwoPi * s;
}

// ---------------------------------------------------------------------------
// Tricubic interpolation
// ---------------------------------------------------------------------------

namespace {

inline void catmull_rom(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

}  // namespace

double interp3(const PhysicalField& p, double x, double y, double z) {
  const int N = p.g.N;
  const double scale = N / kTwoPi;
  const double u[3] = {x * scale, y * scale, z * scale};
  int base[3];
  double w[3][4];
  for (int d = 0; d < 3; ++d) {
    const double fl = std::floor(u[d]);
    base[d] = static_cast<int>(fl);
    double t = u[d] - fl;
    catmull_rom(t, w[d]);
    base[d] %= N;
    if (base[d] < 0) base[d] += N;
  }
  int ix[4], iy[4], iz[4];
  for (int a = 0; a < 4; ++a) {
    ix[a] = (base[0] + a - 1 + N) % N;
    iy[a] = (base[1] + a - 1 + N) % N;
    iz[a] = (base[2] + a - 1 + N) % N;
  }
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double accy = 0.0;
    for (int b = 0; b < 4; ++b) {
      const double* row = &p.v[(std::int64_t(ix[a]) * N + iy[b]) * N];
      double accz = 0.0;
      for (int c = 0; c < 4; ++c) accz += w[2][c] * row[iz[c]];
      accy += w[1][b] * accz;
    }
    acc += w[0][a] * accy;
  }
  return acc;
}

}  // namespace er
