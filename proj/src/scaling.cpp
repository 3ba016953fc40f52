#include "vri/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vri/numeric.hpp"

namespace vri {
namespace {

// std::lgamma writes the global signgam on glibc; use the _r variant so
// fits can run on worker threads.
double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

}  // namespace

SeParams se_params(double gamma) {
  if (gamma <= 0.0) {
    throw std::domain_error("se_params: gamma must be > 0");
  }
  const double lg_two = log_gamma(2.0 / gamma);
  const double lg_one = log_gamma(1.0 + 1.0 / gamma);
  SeParams p;
  p.a = std::exp(lg_two - std::log(gamma) - lg_one);
  p.c = std::exp(std::log(p.a) - lg_one);
  return p;
}

const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Valid:
      return "valid";
    case FitStatus::Outlier:
      return "outlier";
    case FitStatus::Insufficient:
      return "insufficient";
  }
  return "insufficient";
}

SeFitResult fit_se(const ScaledPdf& pdf, const SeFitOptions& opt) {
  std::vector<double> xs, log_rho, rho;
  for (std::size_t i = 0; i < pdf.bin_centers.size(); ++i) {
    if (pdf.bin_centers[i] >= opt.x_min && pdf.densities[i] > 0.0 &&
        pdf.bin_counts[i] >= opt.min_count) {
      xs.push_back(pdf.bin_centers[i]);
      rho.push_back(pdf.densities[i]);
      log_rho.push_back(std::log(pdf.densities[i]));
    }
  }
  if (xs.size() < opt.min_bins) {
    throw InsufficientDataError("fit_se: too few usable bins", xs.size());
  }

  const auto objective = [&](double gamma) {
    const SeParams p = se_params(gamma);
    const double log_c = std::log(p.c);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = log_rho[i] - (log_c - std::pow(p.a * xs[i], gamma));
      s += r * r;
    }
    return s;
  };

  // Coarse scan to bracket the minimum, then golden-section refinement.
  constexpr int kScan = 64;
  int best = 0;
  double best_val = objective(opt.gamma_lo);
  for (int i = 1; i < kScan; ++i) {
    const double g = opt.gamma_lo + (opt.gamma_hi - opt.gamma_lo) * i /
                                        static_cast<double>(kScan - 1);
    const double v = objective(g);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = (opt.gamma_hi - opt.gamma_lo) / (kScan - 1);
  const double lo = std::max(opt.gamma_lo, opt.gamma_lo + (best - 1) * step);
  const double hi = std::min(opt.gamma_hi, opt.gamma_lo + (best + 1) * step);
  const double gamma = num::golden_min(lo, hi, 1e-8, objective);

  SeFitResult res;
  res.gamma = gamma;
  const SeParams p = se_params(gamma);
  res.a = p.a;
  res.c = p.c;

  const double log_c = std::log(p.c);
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = std::exp(log_c - std::pow(p.a * xs[i], gamma));
    const double rel = (fit - rho[i]) / rho[i];
    acc += rel * rel;
  }
  res.rms_error = std::sqrt(acc / static_cast<double>(xs.size()));

  const bool converged = gamma > opt.gamma_lo + 2e-6 &&
                         gamma < opt.gamma_hi - 2e-6;
  res.valid = converged && res.rms_error <= opt.rms_max;
  res.status = res.valid ? FitStatus::Valid : FitStatus::Outlier;
  res.n_intervals = pdf.n_intervals;
  return res;
}

std::vector<double> default_q_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(1.0 + 0.25 * i);
  return grid;
}

SeFitResult se_fit_for_intervals(const IntervalSet& iset,
                                 const GammaCurveOptions& opt) {
  SeFitResult res;
  res.symbol = iset.symbol;
  res.q = iset.q;
  res.mean_interval = iset.mean_interval;
  res.n_intervals = iset.intervals.size();
  if (!iset.sufficient) return res;
  try {
    const ScaledPdf pdf =
        scaled_pdf(iset, opt.bins_per_decade, opt.min_intervals);
    SeFitResult fit = fit_se(pdf, opt.fit);
    fit.symbol = iset.symbol;
    fit.q = iset.q;
    fit.mean_interval = iset.mean_interval;
    fit.n_intervals = iset.intervals.size();
    return fit;
  } catch (const InsufficientDataError&) {
    return res;
  }
}

std::vector<SeFitResult> gamma_curve(std::span<const double> vol,
                                     const GammaCurveOptions& opt) {
  const std::vector<double> grid =
      opt.q_grid.empty() ? default_q_grid() : opt.q_grid;
  std::vector<SeFitResult> results;
  results.reserve(grid.size());
  for (const double q : grid) {
    results.push_back(se_fit_for_intervals(extract_intervals(vol, q), opt));
  }
  return results;
}

double interval_moment(const IntervalSet& iset, double m) {
  if (iset.intervals.empty()) {
    throw std::invalid_argument("interval_moment: empty interval set");
  }
  if (m <= 0.0) {
    throw std::invalid_argument("interval_moment: m must be > 0");
  }
  double acc = 0.0;
  for (const double tau : iset.intervals) {
    acc += std::pow(tau / iset.mean_interval, m);
  }
  acc /= static_cast<double>(iset.intervals.size());
  return std::pow(acc, 1.0 / m);
}

MomentScalingResult fit_delta(std::vector<MomentPoint> points, double m,
                              const DeltaFitOptions& opt) {
  MomentScalingResult res;
  res.m = m;
  res.points = std::move(points);

  std::vector<double> lx, ly;
  for (const MomentPoint& p : res.points) {
    if (p.mean_interval > opt.range_low && p.mean_interval <= opt.range_high &&
        p.mu > 0.0 && std::isfinite(p.mu)) {
      lx.push_back(std::log(p.mean_interval));
      ly.push_back(std::log(p.mu));
    }
  }
  res.n_admitted = lx.size();
  if (lx.size() < opt.min_points) {
    throw InsufficientDataError("fit_delta: too few admitted points",
                                lx.size());
  }

  num::LineFit line;
  try {
    line = num::fit_line(lx, ly);
  } catch (const std::invalid_argument&) {
    throw InsufficientDataError("fit_delta: degenerate abscissae", lx.size());
  }
  res.delta = line.slope;

  double acc = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double fit_mu = std::exp(line.intercept + line.slope * lx[i]);
    const double mu = std::exp(ly[i]);
    const double rel = (fit_mu - mu) / mu;
    acc += rel * rel;
  }
  res.rms_error = std::sqrt(acc / static_cast<double>(lx.size()));
  res.valid = res.rms_error <= opt.rms_max;
  res.status = res.valid ? FitStatus::Valid : FitStatus::Outlier;
  return res;
}

}  // namespace vri
