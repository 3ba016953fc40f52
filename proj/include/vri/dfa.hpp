#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vri {

struct DfaResult {
  double alpha = 0.0;
  std::vector<std::size_t> scales;
  std::vector<double> fluctuations;
  std::size_t fit_min_scale = 0;
  std::size_t fit_max_scale = 0;
  int detrend_order = 2;
};

// ~count log-spaced window sizes between min_scale and length/8.
std::vector<std::size_t> default_scales(std::size_t length,
                                        std::size_t count = 20,
                                        std::size_t min_scale = 10);

// Detrended fluctuation analysis of a series: profile = cumulative sum of
// the mean-subtracted series, split into non-overlapping windows from
// both ends, polynomial detrend of the given order per window, F(n) =
// RMS residual, alpha = log-log slope over [fit_min_scale, fit_max_scale]
// (0, 0 selects the full scale grid).
// Throws std::invalid_argument if the series is shorter than 4x the
// largest scale or the order is not 1 or 2.
DfaResult dfa(std::span<const double> series,
              std::span<const std::size_t> scales, int detrend_order = 2,
              std::size_t fit_min_scale = 0, std::size_t fit_max_scale = 0);

DfaResult dfa(std::span<const double> series, int detrend_order = 2);

// gamma = 2(1 - alpha); the relation is only asserted for alpha in
// (0.5, 1), check alpha_in_correlated_range before trusting it.
double gamma_from_alpha(double alpha);
bool alpha_in_correlated_range(double alpha);

}  // namespace vri
