#pragma once

#include "er/fields.hpp"

namespace er {

// ---------------------------------------------------------------------------
// Spectral calculus.  All of these act mode-by-mode and are exact on the
// retained ball; they commute with the ball truncation, which is what makes
// the algebraic identities of the construction survive discretization.
// ---------------------------------------------------------------------------
Field derivative(const Field& f, int axis);
VectorField grad(const Field& f);
Field divergence(const VectorField& v);
VectorField divergence(const SymTensorField& t);
VectorField curl(const VectorField& v);

// Leray projection onto divergence-free fields; the mean (k = 0) is kept.
VectorField leray(const VectorField& v);

// Order -1 right inverse of the divergence: returns the symmetric trace-free
// tensor  (1/4)(grad Pu + (grad Pu)^T) + (3/4)(grad u + (grad u)^T)
// - (1/2)(div u) Id  with  laplace u = v - mean(v),  P = Leray; then
// div(result) = v - mean(v).
SymTensorField inverse_divergence(const VectorField& v);

// ---------------------------------------------------------------------------
// Mollification: exact spectral convolution with psi_ell, where psi is the
// radial C^infty bump  psi(r) = c exp(-1/(1-r^2)) on r < 1, normalized to
// unit mass.  mollifier_hat(kappa) is its radial Fourier transform
// (4pi/kappa) int_0^1 r sin(kappa r) psi(r) dr, so mollification multiplies
// mode k by mollifier_hat(ell |k|).
// ---------------------------------------------------------------------------
double mollifier_hat(double kappa);
Field mollify(const Field& f, double ell);
VectorField mollify(const VectorField& v, double ell);
SymTensorField mollify(const SymTensorField& t, double ell);

// Sharp spectral truncation: keeps the modes with |k|_2 < radius and zeroes
// everything else.  Used to isolate the low-frequency content of a field from
// the carrier-frequency oscillations sitting above it.
Field lowpass(const Field& f, double radius);
SymTensorField lowpass(const SymTensorField& t, double radius);

// ---------------------------------------------------------------------------
// Pointwise products, computed on the physical grid.  Supports add; the
// result's retained coefficients are exact whenever
// support(a) + support(b) <= N - K - 1, which the ball radius K guarantees
// for any two stored fields.  The guard still checks, in case a caller
// manufactures wider supports.
// ---------------------------------------------------------------------------
Field multiply(const Field& a, const Field& b);
Field dot(const VectorField& a, const VectorField& b);
SymTensorField sym_outer(const VectorField& a, const VectorField& b);
VectorField advect(const VectorField& v, const VectorField& w);  // (v.grad) w

// Tensor helpers.
Field trace(const SymTensorField& t);
SymTensorField deviatoric(const SymTensorField& t);             // t - tr/3 Id
SymTensorField add_isotropic(SymTensorField t, const Field& s);  // t + s Id

// ---------------------------------------------------------------------------
// Norms.  Pointwise magnitudes are Euclidean for vectors and Frobenius for
// symmetric tensors; sups are taken over the fine grid.  seminorm(f, m) is
// max_{|b| = m} sup |D^b f|; cnorm(f, m) = sum_{j <= m} seminorm(f, j);
// holder_seminorm(f, m, alpha) estimates
// max_{|b| = m} sup_{x != y} |D^b f(x) - D^b f(y)| / |x-y|^alpha
// by sampled differences along 13 lattice directions with a graded ladder of
// separations.  Sampling can only undershoot the true sup; with the graded
// ladder the bias stays within ~15% for oscillatory fields.
// ---------------------------------------------------------------------------
double sup_norm(const Field& f);
double sup_norm(const VectorField& v);
double sup_norm(const SymTensorField& t);
double seminorm(const Field& f, int m);
double seminorm(const VectorField& v, int m);
double seminorm(const SymTensorField& t, int m);
double cnorm(const Field& f, int m);
double cnorm(const VectorField& v, int m);
double cnorm(const SymTensorField& t, int m);
double holder_seminorm(const Field& f, int m, double alpha);
double holder_seminorm(const VectorField& v, int m, double alpha);

// integral over the torus = (2pi)^3 * mean.
double integral(const Field& f);
// int |v|^2 dx via Parseval.
double l2_squared(const VectorField& v);

// ---------------------------------------------------------------------------
// Periodic tricubic (Catmull-Rom) interpolation of physical samples at an
// arbitrary point, for flow integration.  Positions in radians, any real
// values (wrapped).  Local truncation error O((kh)^4) for content at
// wavenumber k.
// ---------------------------------------------------------------------------
double interp3(const PhysicalField& p, double x, double y, double z);

}  // namespace er
