#pragma once

#include <functional>

namespace comoment {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval. Subdivides until the
// accumulated Kronrod error estimate meets max(abs_tol, rel_tol * |value|);
// throws QuadratureFailure if the subdivision budget is exhausted first.
QuadResult adaptive_gauss_kronrod(const std::function<double(double)>& f,
                                  double a, double b,
                                  double abs_tol = 1e-9, double rel_tol = 1e-8,
                                  int max_intervals = 4096);

// Integral of f over (eps, 1-eps), mapped through u = e^{-t} near 0 and
// u = 1 - e^{-t} near 1 so that integrands with logarithmic endpoint
// singularities become smooth. eps is the smallest cutoff for which the
// complement 1-u stays strictly below 1 in double precision, so integrands
// may reference both tails; the truncated mass O(eps log^k eps) ~ 1e-13
// sits far below the solver tolerance.
double integrate_unit(const std::function<double(double)>& f,
                      double abs_tol = 1e-10, double rel_tol = 1e-9);

inline constexpr double kUnitEps = 4e-16;

}  // namespace comoment
