#include "vri/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vri/kernels.hpp"
#include "vri/numeric.hpp"

namespace vri {
namespace {

// Orthonormal polynomial basis {1, t, t^2} over t = 0..n-1, built by
// modified Gram-Schmidt. Detrend coefficients are then plain dot
// products with the window.
struct WindowBasis {
  std::vector<double> b0, b1, b2;  // b2 empty for order 1

  WindowBasis(std::size_t n, int order) {
    const auto& k = kernels::active();
    b0.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));

    b1.resize(n);
    for (std::size_t i = 0; i < n; ++i) b1[i] = static_cast<double>(i);
    const double p01 = k.dot(b0.data(), b1.data(), n);
    for (std::size_t i = 0; i < n; ++i) b1[i] -= p01 * b0[i];
    const double n1 = std::sqrt(k.sum_sq(b1.data(), n));
    for (auto& v : b1) v /= n1;

    if (order == 2) {
      b2.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        b2[i] = static_cast<double>(i) * static_cast<double>(i);
      }
      const double p02 = k.dot(b0.data(), b2.data(), n);
      for (std::size_t i = 0; i < n; ++i) b2[i] -= p02 * b0[i];
      const double p12 = k.dot(b1.data(), b2.data(), n);
      for (std::size_t i = 0; i < n; ++i) b2[i] -= p12 * b1[i];
      const double n2 = std::sqrt(k.sum_sq(b2.data(), n));
      for (auto& v : b2) v /= n2;
    }
  }
};

double window_residual_sq(const double* y, const WindowBasis& basis,
                          std::size_t n) {
  const auto& k = kernels::active();
  const double c0 = k.dot(basis.b0.data(), y, n);
  const double c1 = k.dot(basis.b1.data(), y, n);
  if (basis.b2.empty()) {
    return k.detrend_sq(y, basis.b0.data(), basis.b1.data(), nullptr, c0, c1,
                        0.0, n);
  }
  const double c2 = k.dot(basis.b2.data(), y, n);
  return k.detrend_sq(y, basis.b0.data(), basis.b1.data(), basis.b2.data(),
                      c0, c1, c2, n);
}

}  // namespace

std::vector<std::size_t> default_scales(std::size_t length, std::size_t count,
                                        std::size_t min_scale) {
  const std::size_t max_scale = std::max(min_scale + 1, length / 8);
  std::vector<std::size_t> scales;
  const double llo = std::log(static_cast<double>(min_scale));
  const double lhi = std::log(static_cast<double>(max_scale));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count > 1
                         ? static_cast<double>(i) / static_cast<double>(count - 1)
                         : 0.0;
    const auto s = static_cast<std::size_t>(
        std::llround(std::exp(llo + t * (lhi - llo))));
    if (scales.empty() || s > scales.back()) scales.push_back(s);
  }
  return scales;
}

DfaResult dfa(std::span<const double> series,
              std::span<const std::size_t> scales, int detrend_order,
              std::size_t fit_min_scale, std::size_t fit_max_scale) {
  if (detrend_order != 1 && detrend_order != 2) {
    throw std::invalid_argument("dfa: detrend_order must be 1 or 2");
  }
  if (scales.empty()) throw std::invalid_argument("dfa: no scales");
  const std::size_t len = series.size();
  const std::size_t max_scale = *std::max_element(scales.begin(), scales.end());
  if (len < 4 * max_scale) {
    throw std::invalid_argument("dfa: series shorter than 4x the max scale");
  }
  const std::size_t min_needed = static_cast<std::size_t>(detrend_order) + 2;

  const auto& k = kernels::active();
  const double mean = k.sum(series.data(), len) / static_cast<double>(len);
  std::vector<double> profile(len);
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    acc += series[i] - mean;
    profile[i] = acc;
  }

  DfaResult res;
  res.detrend_order = detrend_order;
  for (const std::size_t n : scales) {
    if (n < min_needed) {
      throw std::invalid_argument("dfa: scale smaller than detrend_order + 2");
    }
    const WindowBasis basis(n, detrend_order);
    const std::size_t n_windows = len / n;
    double total = 0.0;
    for (std::size_t w = 0; w < n_windows; ++w) {
      total += window_residual_sq(profile.data() + w * n, basis, n);
    }
    for (std::size_t w = 0; w < n_windows; ++w) {
      total += window_residual_sq(profile.data() + (len - (w + 1) * n), basis, n);
    }
    res.scales.push_back(n);
    res.fluctuations.push_back(std::sqrt(
        total / static_cast<double>(2 * n_windows * n)));
  }

  if (fit_min_scale == 0) fit_min_scale = res.scales.front();
  if (fit_max_scale == 0) fit_max_scale = res.scales.back();
  res.fit_min_scale = fit_min_scale;
  res.fit_max_scale = fit_max_scale;

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < res.scales.size(); ++i) {
    if (res.scales[i] >= fit_min_scale && res.scales[i] <= fit_max_scale &&
        res.fluctuations[i] > 0.0) {
      lx.push_back(std::log(static_cast<double>(res.scales[i])));
      ly.push_back(std::log(res.fluctuations[i]));
    }
  }
  if (lx.size() < 2) throw std::invalid_argument("dfa: fit range too narrow");
  res.alpha = num::fit_line(lx, ly).slope;
  return res;
}

DfaResult dfa(std::span<const double> series, int detrend_order) {
  const auto scales = default_scales(series.size());
  return dfa(series, scales, detrend_order);
}

double gamma_from_alpha(double alpha) { return 2.0 * (1.0 - alpha); }

bool alpha_in_correlated_range(double alpha) {
  return alpha > 0.5 && alpha < 1.0;
}

}  // namespace vri
