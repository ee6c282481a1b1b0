#include "er/fields.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>

#include "er/error.hpp"

namespace er {

Grid3 Grid3::make(int N) {
  if (N < 8 || N % 2 != 0)
    throw Error("Grid3: N must be even and >= 8, got " + std::to_string(N));
  Grid3 g;
  g.N = N;
  g.K = (N - 1) / 3;
  g.W = 2 * g.K + 1;
  return g;
}

Field::Field(Grid3 g) : g_(g), support_(0), c_(static_cast<size_t>(g.n_ball())) {}

std::int64_t Field::idx(int kx, int ky, int kz) const {
  const int K = g_.K;
  if (kx < -K || kx > K || ky < -K || ky > K || kz < -K || kz > K)
    throw Error("Field: mode (" + std::to_string(kx) + "," +
                std::to_string(ky) + "," + std::to_string(kz) +
                ") outside retained ball K=" + std::to_string(K));
  return (std::int64_t(kx + K) * g_.W + (ky + K)) * g_.W + (kz + K);
}

std::complex<double> Field::get(int kx, int ky, int kz) const {
  return c_[static_cast<size_t>(idx(kx, ky, kz))];
}

void Field::set(int kx, int ky, int kz, std::complex<double> v) {
  c_[static_cast<size_t>(idx(kx, ky, kz))] = v;
  const int a = std::max({std::abs(kx), std::abs(ky), std::abs(kz)});
  if (a > support_) support_ = a;
}

void Field::add(int kx, int ky, int kz, std::complex<double> v) {
  c_[static_cast<size_t>(idx(kx, ky, kz))] += v;
  const int a = std::max({std::abs(kx), std::abs(ky), std::abs(kz)});
  if (a > support_) support_ = a;
}

void Field::set_mode_pair(int kx, int ky, int kz, std::complex<double> v) {
  set(kx, ky, kz, v);
  set(-kx, -ky, -kz, std::conj(v));
}

void Field::set_support(int s) {
  if (s < 0 || s > g_.K)
    throw Error("Field: support " + std::to_string(s) + " outside [0, K]");
  support_ = s;
}

int Field::recompute_support(double abs_tol) {
  int s = 0;
  const int K = g_.K;
  std::int64_t n = 0;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      for (int kz = -K; kz <= K; ++kz, ++n) {
        if (std::abs(c_[static_cast<size_t>(n)]) > abs_tol) {
          const int a = std::max({std::abs(kx), std::abs(ky), std::abs(kz)});
          if (a > s) s = a;
        }
      }
  support_ = s;
  return s;
}

namespace {
void require_same_grid(const Grid3& a, const Grid3& b, const char* op) {
  if (a != b)
    throw Error(std::string(op) + ": grids differ (N=" + std::to_string(a.N) +
                " vs N=" + std::to_string(b.N) + ")");
}
}  // namespace

Field& Field::operator+=(const Field& o) {
  require_same_grid(g_, o.g_, "Field+=");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  support_ = std::max(support_, o.support_);
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(g_, o.g_, "Field-=");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  support_ = std::max(support_, o.support_);
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& z : c_) z *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

Field& SymTensorField::comp(int i, int j) {
  return const_cast<Field&>(static_cast<const SymTensorField*>(this)->comp(i, j));
}

const Field& SymTensorField::comp(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j > 2) throw Error("SymTensorField: component out of range");
  // (0,0)->0 (0,1)->1 (0,2)->2 (1,1)->3 (1,2)->4 (2,2)->5
  static const int map[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return c[static_cast<size_t>(map[i][j])];
}

SymTensorField& SymTensorField::operator+=(const SymTensorField& o) {
  for (size_t i = 0; i < 6; ++i) c[i] += o.c[i];
  return *this;
}
SymTensorField& SymTensorField::operator-=(const SymTensorField& o) {
  for (size_t i = 0; i < 6; ++i) c[i] -= o.c[i];
  return *this;
}
SymTensorField& SymTensorField::operator*=(double s) {
  for (auto& f : c) f *= s;
  return *this;
}

VectorField make_vector(Grid3 g) { return {Field(g), Field(g), Field(g)}; }

SymTensorField make_tensor(Grid3 g) {
  SymTensorField t;
  for (auto& f : t.c) f = Field(g);
  return t;
}

// ---------------------------------------------------------------------------
// FFT engine: one cached plan pair + work buffer per grid size.  Everything
// is single-threaded and planned with FFTW_ESTIMATE, which keeps plan choice
// (and therefore rounding behaviour) deterministic across runs.
// ---------------------------------------------------------------------------
namespace {

struct Engine {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;  // phys -> modes (e^{-ikx})
  fftw_plan bwd = nullptr;  // modes -> phys (e^{+ikx})
};

Engine& engine_for(const Grid3& g) {
  static std::map<int, Engine> cache;
  auto it = cache.find(g.N);
  if (it != cache.end()) return it->second;
  Engine e;
  e.buf = fftw_alloc_complex(static_cast<size_t>(g.n_phys()));
  if (!e.buf) throw Error("fft: allocation failed for N=" + std::to_string(g.N));
  e.fwd = fftw_plan_dft_3d(g.N, g.N, g.N, e.buf, e.buf, FFTW_FORWARD,
                           FFTW_ESTIMATE);
  e.bwd = fftw_plan_dft_3d(g.N, g.N, g.N, e.buf, e.buf, FFTW_BACKWARD,
                           FFTW_ESTIMATE);
  if (!e.fwd || !e.bwd) throw Error("fft: planning failed");
  return cache.emplace(g.N, e).first->second;
}

inline int wrap(int k, int N) { return k >= 0 ? k : k + N; }

}  // namespace

void to_phys_into(const Field& f, PhysicalField& out) {
  if (f.empty()) throw Error("to_phys: empty field");
  const Grid3& g = f.grid();
  Engine& e = engine_for(g);
  const std::int64_t n = g.n_phys();
  std::memset(e.buf, 0, sizeof(fftw_complex) * static_cast<size_t>(n));
  const int K = g.K, N = g.N;
  const std::complex<double>* c = f.data();
  std::int64_t m = 0;
  for (int kx = -K; kx <= K; ++kx) {
    const std::int64_t ox = std::int64_t(wrap(kx, N)) * N;
    for (int ky = -K; ky <= K; ++ky) {
      const std::int64_t oxy = (ox + wrap(ky, N)) * N;
      for (int kz = -K; kz <= K; ++kz, ++m) {
        const std::complex<double>& z = c[m];
        if (z.real() == 0.0 && z.imag() == 0.0) continue;
        fftw_complex& dst = e.buf[oxy + wrap(kz, N)];
        dst[0] = z.real();
        dst[1] = z.imag();
      }
    }
  }
  fftw_execute(e.bwd);
  out.g = g;
  out.v.resize(static_cast<size_t>(n));
  double max_re = 0.0, max_im = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double re = e.buf[i][0], im = e.buf[i][1];
    out.v[static_cast<size_t>(i)] = re;
    const double are = std::abs(re), aim = std::abs(im);
    if (are > max_re) max_re = are;
    if (aim > max_im) max_im = aim;
  }
  if (max_im > 1e-9 * (1.0 + max_re))
    throw Error("to_phys: field is not real (hermitian symmetry violated; "
                "max imag " + std::to_string(max_im) + ")");
}

PhysicalField to_phys(const Field& f) {
  PhysicalField p;
  to_phys_into(f, p);
  return p;
}

Field from_phys(const PhysicalField& p) {
  const Grid3& g = p.g;
  if (p.v.size() != static_cast<size_t>(g.n_phys()))
    throw Error("from_phys: sample count does not match grid");
  Engine& e = engine_for(g);
  const std::int64_t n = g.n_phys();
  for (std::int64_t i = 0; i < n; ++i) {
    e.buf[i][0] = p.v[static_cast<size_t>(i)];
    e.buf[i][1] = 0.0;
  }
  fftw_execute(e.fwd);
  Field f(g);
  const double inv = 1.0 / static_cast<double>(n);
  const int K = g.K, N = g.N;
  std::complex<double>* c = f.data();
  std::int64_t m = 0;
  for (int kx = -K; kx <= K; ++kx) {
    const std::int64_t ox = std::int64_t(wrap(kx, N)) * N;
    for (int ky = -K; ky <= K; ++ky) {
      const std::int64_t oxy = (ox + wrap(ky, N)) * N;
      for (int kz = -K; kz <= K; ++kz, ++m) {
        const fftw_complex& src = e.buf[oxy + wrap(kz, N)];
        c[m] = std::complex<double>(src[0] * inv, src[1] * inv);
      }
    }
  }
  f.set_support(g.K);
  return f;
}

Field resample(const Field& f, Grid3 to) {
  const int Ks = f.grid().K, Kd = to.K;
  const int K = std::min(Ks, Kd);
  Field out(to);
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      for (int kz = -K; kz <= K; ++kz) {
        const std::complex<double> z = f.get(kx, ky, kz);
        if (z.real() != 0.0 || z.imag() != 0.0) out.set(kx, ky, kz, z);
      }
  out.set_support(std::min(f.support(), K));
  return out;
}

}  // namespace er
