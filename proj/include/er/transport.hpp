#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "er/fields.hpp"

namespace er {

using Vec3 = std::array<double, 3>;

// Time-dependent fields enter this module as providers: closures returning
// the spectral field at an arbitrary time.  Levels with closed-form time
// dependence evaluate exactly; sampled levels wrap cubic time interpolation
// (see sampled_vector_provider).  Velocity providers are treated as constant
// outside [0,1] (they vanish near the endpoints in actual use); stress
// providers are extended by zero outside [0,1].
using ScalarProvider = std::function<Field(double)>;
using VectorProvider = std::function<VectorField(double)>;
using TensorProvider = std::function<SymTensorField(double)>;

// ---------------------------------------------------------------------------
// Exact evaluation of band-limited fields at arbitrary (off-grid) points.
// A field is compressed to its nonzero modes once; evaluation then sums
// c_k e^{ik.x} exactly (trigonometric interpolation), using per-point tables
// of e^{i m x_d} when the mode count warrants them.
// ---------------------------------------------------------------------------
struct SparseModes {
  std::vector<std::array<int, 3>> k;
  std::vector<std::complex<double>> c;
  int max_abs = 0;  // largest |k_d| present

  static SparseModes from(const Field& f);
};

struct SparseVec {
  std::array<SparseModes, 3> comp;
  static SparseVec from(const VectorField& v);
  int max_abs() const;
};

struct SparseTensor {
  std::array<SparseModes, 6> comp;  // xx, xy, xz, yy, yz, zz
  static SparseTensor from(const SymTensorField& t);
  int max_abs() const;
};

class PointEvaluator {
 public:
  explicit PointEvaluator(int max_abs_k);
  void load(const Vec3& x);  // point for subsequent eval calls

  double eval(const SparseModes& f) const;  // real part (fields are real)
  Vec3 eval(const SparseVec& f) const;
  std::array<double, 6> eval(const SparseTensor& f) const;

 private:
  std::complex<double> accumulate(const SparseModes& f) const;
  int maxk_;
  Vec3 x_{};
  bool tables_ready_ = false;
  std::array<std::vector<std::complex<double>>, 3> pow_;  // e^{i m x_d}
  void build_tables();
};

// ---------------------------------------------------------------------------
// Flow maps of a (mollified) velocity: classical RK4 along characteristics
// from every grid point, velocity evaluated by exact trigonometric
// interpolation in space; substep <= c_flow / sup ||v||_1 over the window.
// ---------------------------------------------------------------------------
struct FlowOptions {
  double c_flow = 0.1;  // substep budget, dt = c_flow / sup cnorm(v,1)
  int min_substeps = 2;
  bool toy_mode = false;  // CFL violation: recorded warning instead of error
};

struct FlowMap {
  Grid3 grid;
  double anchor = 0.0;  // map is the identity at this time
  double time = 0.0;    // positions are evaluated at this time
  bool inverse = false; // true: this is Phi_anchor(., time)
  std::array<PhysicalField, 3> disp;  // map(x) - x at grid points (periodic)
  int substeps = 0;
  double cfl = 0.0;  // measured |time-anchor| * sup ||Dv||_0
  std::vector<std::string> warnings;

  Vec3 apply_grid(int ix, int iy, int iz) const;  // exact at grid points
  Vec3 apply(const Vec3& x) const;                // tricubic off the grid
};

// X_anchor(., t): forward transport of grid points from `anchor` to `t`.
FlowMap integrate_flow(const VectorProvider& vl, Grid3 g, double anchor,
                       double t, const FlowOptions& opt = {});

// Phi_anchor(., t): position at time `anchor` of the characteristic through
// (x, t); computed by backward integration.  Phi_anchor(X_anchor(x,t), t) = x.
FlowMap inverse_flow(const VectorProvider& vl, Grid3 g, double anchor,
                     double t, const FlowOptions& opt = {});

// D(map) = Id + spectral gradient of the displacement, per grid point.
struct FlowJacobian {
  Grid3 grid;
  // d[i][j] = d map_i / d x_j sampled on the grid.
  std::array<std::array<PhysicalField, 3>, 3> d;
};
FlowJacobian flow_jacobian(const FlowMap& f);
double max_abs_det_minus_one(const FlowJacobian& j);   // volume preservation
double sup_distance_from_id(const FlowJacobian& j);    // max |D - Id|_F
// max over grid points of |inv(fwd(x)) - x| (wrapped to nearest period).
double composition_error(const FlowMap& fwd, const FlowMap& inv);

// f(map(x)) sampled on the grid by exact trigonometric evaluation at the
// flowed points, then projected back onto the dealiased ball.  The discarded
// (aliased) grid content's L2 norm is reported through *tail if given.
Field compose(const Field& f, const FlowMap& map, double* tail_l2 = nullptr);
SymTensorField compose(const SymTensorField& f, const FlowMap& map,
                       double* tail_l2 = nullptr);

// ---------------------------------------------------------------------------
// Material derivative D_t = d/dt + v.grad: 4th-order central time stencil on
// provider evaluations plus the spectral advection term at the center.
// ---------------------------------------------------------------------------
Field material_derivative(const ScalarProvider& f, const VectorProvider& vl,
                          double t, double dt);
VectorField material_derivative(const VectorProvider& f,
                                const VectorProvider& vl, double t, double dt);
SymTensorField material_derivative(const TensorProvider& f,
                                   const VectorProvider& vl, double t,
                                   double dt);

// ---------------------------------------------------------------------------
// Regularized Reynolds stress: the two nontrivial smoothing cases (the third
// case, endpoint cutoffs, is identically zero).
// ---------------------------------------------------------------------------

// The fixed smooth even probability bump on (-1,1) used as the time kernel;
// rho_tau(s) = time_kernel(s/tau)/tau integrates to 1 over [-tau, tau].
double time_kernel(double s);
double time_kernel_d1(double s);

struct SmoothOptions {
  FlowOptions flow;
  int quad_nodes = 12;  // Gauss-Legendre nodes over [-tau, tau], >= 9
  // Optional sink for toy-mode CFL warnings raised by the averaging window
  // (non-owning; ignored when null).
  std::vector<std::string>* warn_sink = nullptr;
};

// Index-zero plateaus: average of Rl along the flow of vl anchored at t,
//   int Rl(X_t(x, t+s), t+s) rho_tau(s) ds,
// with Rl treated as zero outside [0,1].  Flow positions are advanced
// incrementally across the ordered quadrature nodes.
SymTensorField smooth_reynolds_average(const TensorProvider& Rl,
                                       const VectorProvider& vl, Grid3 g,
                                       double t, double tau,
                                       const SmoothOptions& opt = {});

// Higher-index plateaus: pullback of the anchor-time snapshot along the
// inverse flow, Rl_anchor(Phi(x, t)); its material derivative vanishes.
SymTensorField smooth_reynolds_transport(const SymTensorField& Rl_anchor,
                                         const FlowMap& phi,
                                         double* tail_l2 = nullptr);

// Cubic (Catmull-Rom) time interpolation through uniform samples; clamped
// to the sampled window.
VectorProvider sampled_vector_provider(double t0, double dt,
                                       std::vector<VectorField> samples);

}  // namespace er
