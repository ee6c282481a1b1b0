#include "er/quadrature.hpp"

#include <cmath>

#include "er/error.hpp"

namespace er {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one node");
  GaussLegendre q;
  q.x.resize(static_cast<size_t>(n));
  q.w.resize(static_cast<size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev guess for the i-th root of P_n, then Newton.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.x[static_cast<size_t>(i)] = -x;
    q.x[static_cast<size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.w[static_cast<size_t>(i)] = w;
    q.w[static_cast<size_t>(n - 1 - i)] = w;
  }
  return q;
}

GaussLegendre gauss_legendre(int n, double a, double b) {
  GaussLegendre q = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (size_t i = 0; i < q.x.size(); ++i) {
    q.x[i] = mid + half * q.x[i];
    q.w[i] *= half;
  }
  return q;
}

}  // namespace er
