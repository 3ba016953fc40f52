#include "vri/kernels.hpp"

#include <cmath>

namespace vri::kernels {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_sq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void scale_scalar(double* x, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

void abs_div_scalar(const double* x, const double* d, double* out,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = d[i] > 0.0 ? std::fabs(x[i]) / d[i] : 0.0;
  }
}

std::size_t count_ge_scalar(const double* x, std::size_t n, double q) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] >= q) ++c;
  }
  return c;
}

std::size_t collect_ge_scalar(const double* x, std::size_t n, double q,
                              std::size_t base, std::size_t* out) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] >= q) out[c++] = base + i;
  }
  return c;
}

double detrend_sq_scalar(const double* y, const double* b0, const double* b1,
                         const double* b2, double c0, double c1, double c2,
                         std::size_t n) {
  double acc = 0.0;
  if (b2 != nullptr) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - c0 * b0[i] - c1 * b1[i] - c2 * b2[i];
      acc += r * r;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - c0 * b0[i] - c1 * b1[i];
      acc += r * r;
    }
  }
  return acc;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{
      "scalar",        sum_scalar,      sum_sq_scalar,
      dot_scalar,      scale_scalar,    abs_div_scalar,
      count_ge_scalar, collect_ge_scalar, detrend_sq_scalar,
  };
  return backend;
}

}  // namespace vri::kernels
