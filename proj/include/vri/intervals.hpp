#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vri {

// Return intervals for one (symbol, threshold) pair. Intervals are the
// index differences between consecutive exceedances of the concatenated
// series; day boundaries do not reset counting. Fewer than 2 events
// leaves the set flagged insufficient.
struct IntervalSet {
  std::string symbol;
  double q = 0.0;
  std::vector<double> intervals;
  double mean_interval = 0.0;
  std::size_t n_events = 0;
  bool sufficient = false;
};

IntervalSet extract_intervals(std::span<const double> vol, double q);

// Wraps an externally produced interval sample (e.g. the SE sampler) so
// density estimation and moments treat it like extracted intervals.
IntervalSet intervals_from_samples(std::span<const double> tau);

struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& what, std::size_t n)
      : std::runtime_error(what), count(n) {}
  std::size_t count = 0;
};

// Density estimate of the scaled interval x = tau/<tau> on logarithmic
// bins; density = count / (N * bin_width), empty bins omitted.
//
// Interval samples from a sampled series live on a lattice (integer
// multiples of the sampling step divided by <tau>). Bin edges are then
// snapped to half-lattice points so each bin width counts exactly the
// lattice sites it covers and single-site bins reproduce the point mass
// density without inflation. Continuous samples get plain log-spaced
// edges. Detection is automatic from the sample.
struct ScaledPdf {
  std::vector<double> bin_centers;
  std::vector<double> densities;
  std::vector<double> widths;
  std::vector<std::size_t> bin_counts;
  std::size_t n_intervals = 0;
  bool lattice = false;
};

ScaledPdf scaled_pdf(const IntervalSet& iset, int bins_per_decade = 20,
                     std::size_t min_intervals = 50);

}  // namespace vri
