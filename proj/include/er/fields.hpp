#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace er {

constexpr double kTwoPi = 6.283185307179586476925287;

// ---------------------------------------------------------------------------
// Uniform periodic grid on [0, 2pi)^3 with N samples per dimension and a
// retained spectral ball |k|_inf <= K, where K = floor((N-1)/3).
//
// That K is the largest radius for which pointwise products are trustworthy:
// the product of two retained fields has true modes up to 2K, and on an
// N-point grid a mode m > N/2 masquerades as m - N.  The wrapped images of
// modes in (N/2, 2K] have magnitude >= N - 2K >= K + 1, so they land outside
// the retained ball and the retained coefficients of a product are exact.
// ---------------------------------------------------------------------------
struct Grid3 {
  int N = 0;
  int K = 0;
  int W = 0;  // ball width, 2K+1

  static Grid3 make(int N);

  std::int64_t n_phys() const { return std::int64_t(N) * N * N; }
  std::int64_t n_ball() const { return std::int64_t(W) * W * W; }
  double h() const { return kTwoPi / N; }
  bool operator==(const Grid3& o) const { return N == o.N; }
  bool operator!=(const Grid3& o) const { return N != o.N; }
};

// ---------------------------------------------------------------------------
// A real scalar field, stored as the complex coefficients of
//     f(x) = sum_{|k|_inf <= K} fhat_k e^{i k.x}
// in row-major k order ((kx+K)*W + ky+K)*W + kz+K.  Realness is a contract,
// not an enforced storage property: writers must keep fhat_{-k} = conj(fhat_k)
// (see set_mode_pair), and the synthesis path verifies it cheaply.
//
// Every field carries a conservative `support` bound: the largest |k|_inf
// that may hold a nonzero coefficient.  Operators propagate it (products add
// supports, derivatives keep them) so that alias risks are detectable.
// ---------------------------------------------------------------------------
class Field {
 public:
  Field() = default;
  explicit Field(Grid3 g);

  const Grid3& grid() const { return g_; }
  bool empty() const { return c_.empty(); }

  std::int64_t idx(int kx, int ky, int kz) const;
  std::complex<double> get(int kx, int ky, int kz) const;
  void set(int kx, int ky, int kz, std::complex<double> v);  // widens support
  void add(int kx, int ky, int kz, std::complex<double> v);
  // Writes v at k and conj(v) at -k, the only way a real field gains a mode.
  void set_mode_pair(int kx, int ky, int kz, std::complex<double> v);

  std::complex<double>* data() { return c_.data(); }
  const std::complex<double>* data() const { return c_.data(); }

  int support() const { return support_; }
  void set_support(int s);
  int recompute_support(double abs_tol = 0.0);

  std::complex<double> mean() const { return get(0, 0, 0); }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);

 private:
  Grid3 g_;
  int support_ = 0;
  std::vector<std::complex<double>> c_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, double s);
Field operator*(double s, Field a);

using VectorField = std::array<Field, 3>;

// Symmetric 3x3 tensor with packed components xx, xy, xz, yy, yz, zz.
struct SymTensorField {
  std::array<Field, 6> c;

  Field& comp(int i, int j);
  const Field& comp(int i, int j) const;

  SymTensorField& operator+=(const SymTensorField& o);
  SymTensorField& operator-=(const SymTensorField& o);
  SymTensorField& operator*=(double s);
};

VectorField make_vector(Grid3 g);
SymTensorField make_tensor(Grid3 g);

// ---------------------------------------------------------------------------
// Physical samples on the same grid, x-major: index (ix*N + iy)*N + iz,
// sample points x = (ix, iy, iz) * 2pi/N.
// ---------------------------------------------------------------------------
struct PhysicalField {
  Grid3 g;
  std::vector<double> v;

  double& at(int ix, int iy, int iz) {
    return v[(std::int64_t(ix) * g.N + iy) * g.N + iz];
  }
  double at(int ix, int iy, int iz) const {
    return v[(std::int64_t(ix) * g.N + iy) * g.N + iz];
  }
};

// Synthesis pads the ball with zeros; analysis truncates to the ball (any
// true content above K of the sampled function aliases per the DFT, which is
// the unavoidable spectral-approximation error of composed fields).
PhysicalField to_phys(const Field& f);
void to_phys_into(const Field& f, PhysicalField& out);
Field from_phys(const PhysicalField& p);

// Move coefficients between grids (pad with zeros or truncate the ball).
Field resample(const Field& f, Grid3 to);

}  // namespace er
