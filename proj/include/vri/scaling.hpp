#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vri/intervals.hpp"

namespace vri {

// Scale and normalization constants of the stretched exponential
//   f(x) = c * exp(-(a*x)^gamma)
// constrained to unit norm and unit mean, so gamma is the only free
// parameter.
struct SeParams {
  double a = 0.0;
  double c = 0.0;
};

// Throws std::domain_error for gamma <= 0.
SeParams se_params(double gamma);

enum class FitStatus { Valid, Outlier, Insufficient };

const char* to_string(FitStatus s);

struct SeFitResult {
  std::string symbol;
  double q = 0.0;
  double gamma = 0.0;
  double a = 0.0;
  double c = 0.0;
  double rms_error = 0.0;
  bool valid = false;
  FitStatus status = FitStatus::Insufficient;
  double mean_interval = 0.0;
  std::size_t n_intervals = 0;
};

struct SeFitOptions {
  double x_min = 0.1;
  double gamma_lo = 0.05;
  double gamma_hi = 2.0;
  double rms_max = 0.10;
  std::size_t min_bins = 4;
  // Bins with fewer samples are kept in the pdf but excluded from the
  // fit; conditioning on occupancy inflates near-empty tail bins.
  std::size_t min_count = 20;
};

// Least-squares fit of gamma on ln(density) over bins with x >= x_min,
// (a, c) slaved to gamma. Throws InsufficientDataError when fewer than
// min_bins usable bins remain.
SeFitResult fit_se(const ScaledPdf& pdf, const SeFitOptions& opt = {});

struct GammaCurveOptions {
  std::vector<double> q_grid;  // empty -> default 1.00..6.00 step 0.25
  SeFitOptions fit;
  int bins_per_decade = 20;
  std::size_t min_intervals = 50;
};

std::vector<double> default_q_grid();

// Density estimate + SE fit for one interval set; insufficient data
// comes back as a status flag instead of an exception.
SeFitResult se_fit_for_intervals(const IntervalSet& iset,
                                 const GammaCurveOptions& opt);

// One SeFitResult per q; failures are carried as status flags, never
// dropped.
std::vector<SeFitResult> gamma_curve(std::span<const double> vol,
                                     const GammaCurveOptions& opt = {});

// mu_m = (mean((tau/<tau>)^m))^(1/m). Throws on an empty set.
double interval_moment(const IntervalSet& iset, double m);

struct MomentPoint {
  double q = 0.0;
  double mean_interval = 0.0;
  double mu = 0.0;
};

struct MomentScalingResult {
  std::string symbol;
  double m = 0.0;
  std::vector<MomentPoint> points;
  double delta = 0.0;
  double rms_error = 0.0;
  bool valid = false;
  FitStatus status = FitStatus::Insufficient;
  std::size_t n_admitted = 0;
};

struct DeltaFitOptions {
  double range_low = 10.0;   // admit points with range_low < <tau>
  double range_high = 100.0; // ... <= range_high
  double rms_max = 0.22;
  std::size_t min_points = 3;
};

// delta = log-log slope of mu_m vs <tau> over admitted points. Throws
// InsufficientDataError when fewer than min_points are admitted.
MomentScalingResult fit_delta(std::vector<MomentPoint> points, double m,
                              const DeltaFitOptions& opt = {});

}  // namespace vri
