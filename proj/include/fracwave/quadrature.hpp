#pragma once

#include <functional>
#include <vector>

namespace fracwave::quad {

struct QuadResult {
  double value;
  double error;
  int evaluations;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [lo, hi].
/// Stops when error <= max(abs_tol, rel_tol * |value|); throws AccuracyError
/// when max_intervals is exhausted first.
QuadResult integrate(const std::function<double(double)>& f, double lo, double hi,
                     double rel_tol, double abs_tol = 0.0, int max_intervals = 4000);

/// Integrates over [breaks.front(), breaks.back()], splitting at every break first.
QuadResult integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                     double rel_tol, double abs_tol = 0.0, int max_intervals = 4000);

/// n-point Gauss-Legendre rule on [-1, 1]; nodes ascending, weights sum to 2.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

}  // namespace fracwave::quad
