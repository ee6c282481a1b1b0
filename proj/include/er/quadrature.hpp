#pragma once

#include <vector>

namespace er {

// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
// Legendre polynomial from the Chebyshev initial guess.  Exact (to rounding)
// for polynomials of degree 2n-1; used for mollifier transforms and for
// time averaging along flow trajectories.
struct GaussLegendre {
  std::vector<double> x;  // nodes, ascending
  std::vector<double> w;  // weights, same order
};

GaussLegendre gauss_legendre(int n);

// Affinely mapped copy for integration over [a, b].
GaussLegendre gauss_legendre(int n, double a, double b);

}  // namespace er
