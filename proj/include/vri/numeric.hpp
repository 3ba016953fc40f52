#pragma once

#include <cstddef>
#include <span>
#include <utility>

namespace vri::num {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y = slope*x + intercept.
// Throws std::invalid_argument if fewer than 2 points or x is constant.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Regularized lower incomplete gamma P(s, x), s > 0, x >= 0.
double regularized_gamma_p(double s, double x);

// Golden-section search for the minimum of f over [lo, hi].
// Deterministic; assumes f is unimodal on the bracket (callers coarse-scan
// first). Returns the abscissa of the minimum to within tol.
template <class F>
double golden_min(double lo, double hi, double tol, F&& f) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace vri::num
