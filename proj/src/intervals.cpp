#include "vri/intervals.hpp"

#include <algorithm>
#include <cmath>

#include "vri/kernels.hpp"

namespace vri {

IntervalSet extract_intervals(std::span<const double> vol, double q) {
  if (q <= 0.0) throw std::invalid_argument("extract_intervals: q must be > 0");
  const auto& k = kernels::active();

  IntervalSet set;
  set.q = q;
  const std::size_t n_events = k.count_ge(vol.data(), vol.size(), q);
  set.n_events = n_events;
  if (n_events < 2) return set;  // insufficient, no intervals

  std::vector<std::size_t> events(n_events);
  k.collect_ge(vol.data(), vol.size(), q, 0, events.data());

  set.intervals.resize(n_events - 1);
  for (std::size_t i = 0; i + 1 < n_events; ++i) {
    set.intervals[i] = static_cast<double>(events[i + 1] - events[i]);
  }
  set.mean_interval = k.sum(set.intervals.data(), set.intervals.size()) /
                      static_cast<double>(set.intervals.size());
  set.sufficient = true;
  return set;
}

IntervalSet intervals_from_samples(std::span<const double> tau) {
  IntervalSet set;
  set.intervals.assign(tau.begin(), tau.end());
  set.n_events = tau.size() + 1;
  if (tau.empty()) return set;
  set.mean_interval =
      kernels::active().sum(tau.data(), tau.size()) /
      static_cast<double>(tau.size());
  set.sufficient = tau.size() >= 1;
  return set;
}

namespace {

// Lattice spacing of the scaled sample, or 0 if the sample is not
// consistent with a lattice. xs must be sorted.
double detect_lattice(const std::vector<double>& xs) {
  double delta = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double gap = xs[i] - xs[i - 1];
    if (gap > 0.0 && (delta == 0.0 || gap < delta)) delta = gap;
  }
  if (delta <= 0.0) return 0.0;
  const double x0 = xs.front();
  for (const double x : xs) {
    const double site = (x - x0) / delta;
    if (std::fabs(site - std::round(site)) > 1e-3) return 0.0;
  }
  return delta;
}

struct Edges {
  std::vector<double> values;  // strictly increasing, covers all samples
};

Edges lattice_edges(double x0, double x_max, double delta,
                    int bins_per_decade) {
  const double ratio = std::pow(10.0, 1.0 / bins_per_decade);
  Edges e;
  double k = -0.5;  // edge position in lattice-site units, half-integers
  e.values.push_back(x0 + k * delta);
  while (x0 + k * delta <= x_max) {
    const double raw = ((x0 + k * delta) * ratio - x0) / delta;
    k = std::max(k + 1.0, std::ceil(raw - 0.5) + 0.5);
    e.values.push_back(x0 + k * delta);
  }
  return e;
}

Edges continuous_edges(double x_min, double x_max, int bins_per_decade) {
  const double lo = x_min * (1.0 - 1e-12);
  const double hi = x_max * (1.0 + 1e-12);
  const double decades = std::log10(hi / lo);
  const std::size_t n_bins = static_cast<std::size_t>(
      std::max(1.0, std::ceil(decades * bins_per_decade)));
  Edges e;
  e.values.resize(n_bins + 1);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i <= n_bins; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_bins);
    e.values[i] = std::exp(llo + t * (lhi - llo));
  }
  e.values.front() = lo;
  e.values.back() = hi;
  return e;
}

}  // namespace

ScaledPdf scaled_pdf(const IntervalSet& iset, int bins_per_decade,
                     std::size_t min_intervals) {
  if (bins_per_decade < 1) {
    throw std::invalid_argument("scaled_pdf: bins_per_decade must be >= 1");
  }
  const std::size_t n = iset.intervals.size();
  if (!iset.sufficient || n < min_intervals) {
    throw InsufficientDataError("scaled_pdf: too few intervals", n);
  }

  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = iset.intervals[i] / iset.mean_interval;
  }
  std::sort(xs.begin(), xs.end());

  ScaledPdf pdf;
  pdf.n_intervals = n;

  if (xs.front() == xs.back()) {
    // Point mass: a single bin of one half log-step either side.
    const double h = std::pow(10.0, 0.5 / bins_per_decade);
    const double x = xs.front();
    const double width = x * h - x / h;
    pdf.bin_centers = {x};
    pdf.widths = {width};
    pdf.bin_counts = {n};
    pdf.densities = {1.0 / width};
    pdf.lattice = true;
    return pdf;
  }

  const double delta = detect_lattice(xs);
  pdf.lattice = delta > 0.0;
  const Edges edges =
      pdf.lattice ? lattice_edges(xs.front(), xs.back(), delta, bins_per_decade)
                  : continuous_edges(xs.front(), xs.back(), bins_per_decade);

  const std::size_t n_bins = edges.values.size() - 1;
  std::vector<std::size_t> counts(n_bins, 0);
  std::vector<double> x_sums(n_bins, 0.0);
  std::size_t bin = 0;
  for (const double x : xs) {
    while (bin + 1 < n_bins && x >= edges.values[bin + 1]) ++bin;
    ++counts[bin];
    x_sums[bin] += x;
  }

  for (std::size_t j = 0; j < n_bins; ++j) {
    if (counts[j] == 0) continue;
    const double width = edges.values[j + 1] - edges.values[j];
    const double center =
        pdf.lattice ? x_sums[j] / static_cast<double>(counts[j])
                    : std::sqrt(edges.values[j] * edges.values[j + 1]);
    pdf.bin_centers.push_back(center);
    pdf.widths.push_back(width);
    pdf.bin_counts.push_back(counts[j]);
    pdf.densities.push_back(static_cast<double>(counts[j]) /
                            (static_cast<double>(n) * width));
  }
  return pdf;
}

}  // namespace vri
