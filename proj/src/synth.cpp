#include "vri/synth.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "vri/fft.hpp"
#include "vri/kernels.hpp"
#include "vri/numeric.hpp"
#include "vri/rng.hpp"
#include "vri/scaling.hpp"

namespace vri {
namespace {

void standardize(std::vector<double>& x) {
  const auto& k = kernels::active();
  const double n = static_cast<double>(x.size());
  const double mean = k.sum(x.data(), x.size()) / n;
  for (auto& v : x) v -= mean;
  const double var = k.sum_sq(x.data(), x.size()) / n;
  if (var <= 0.0) {
    throw std::runtime_error("standardize: series has zero variance");
  }
  k.scale(x.data(), x.size(), 1.0 / std::sqrt(var));
}

std::vector<double> gaussian_series(std::size_t n, std::uint64_t seed) {
  GaussianSource gauss(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = gauss.next();
  return x;
}

void validate_length(std::size_t length) {
  if (!is_power_of_two(length) || length < (1u << 12)) {
    throw std::invalid_argument(
        "synth: length must be a power of two >= 4096");
  }
}

}  // namespace

std::vector<double> white_noise(std::size_t length, std::uint64_t seed) {
  validate_length(length);
  std::vector<double> x = gaussian_series(length, seed);
  standardize(x);
  return x;
}

std::vector<double> generate_correlated(const SynthSpec& spec) {
  validate_length(spec.length);
  if (spec.alpha_target > 1.0) {
    throw std::domain_error("generate_correlated: alpha_target must be <= 1");
  }
  if (spec.kind == SynthKind::WhiteNoise || spec.alpha_target <= 0.5) {
    return white_noise(spec.length, spec.seed);
  }

  const std::size_t n = spec.length;
  const double beta = 2.0 * spec.alpha_target - 1.0;

  std::vector<std::complex<double>> z(n);
  {
    const std::vector<double> g = gaussian_series(n, spec.seed);
    for (std::size_t i = 0; i < n; ++i) z[i] = g[i];
  }
  fft_inplace(z, false);

  z[0] = 0.0;  // no DC component
  for (std::size_t k = 1; k < n; ++k) {
    const double f =
        static_cast<double>(std::min(k, n - k)) / static_cast<double>(n);
    z[k] *= std::pow(f, -0.5 * beta);
  }
  fft_inplace(z, true);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i].real();
  standardize(out);
  return out;
}

void shuffle(std::span<double> series, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  for (std::size_t i = series.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(series[i - 1], series[j]);
  }
}

SeIntervalSampler::SeIntervalSampler(double gamma) : gamma_(gamma) {
  if (gamma < 0.2 || gamma > 2.0) {
    throw std::domain_error("SeIntervalSampler: gamma must be in [0.2, 2]");
  }
  const SeParams p = se_params(gamma);
  a_ = p.a;
  c_ = p.c;
  const double s = 1.0 / gamma;

  constexpr std::size_t kKnots = 8192;
  constexpr double kTLo = 1e-12;
  constexpr double kTHi = 64.0;
  log_t_lo_ = std::log(kTLo);
  log_t_step_ = (std::log(kTHi) - log_t_lo_) / (kKnots - 1);

  t_.resize(kKnots);
  x_.resize(kKnots);
  dxdt_.resize(kKnots);
  for (std::size_t i = 0; i < kKnots; ++i) {
    const double t = std::exp(log_t_lo_ + log_t_step_ * i);
    t_[i] = t;
    const double u = -std::expm1(-t);

    // Solve P(s, y) = u by bisection, then x = y^(1/gamma)/a.
    double lo = 0.0;
    double hi = s + 10.0;
    while (num::regularized_gamma_p(s, hi) < u) hi *= 2.0;
    for (int it = 0; it < 90; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (num::regularized_gamma_p(s, mid) < u) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double y = 0.5 * (lo + hi);
    x_[i] = std::pow(y, s) / a_;
    // dx/dt = e^(y - t)/c with y = (a x)^gamma
    dxdt_[i] = std::exp(y - t) / c_;
  }
}

double SeIntervalSampler::quantile(double u) const {
  const double t = -std::log1p(-u);
  if (t <= t_.front()) {
    return t / c_;  // F(x) -> c*x as x -> 0
  }
  if (t >= t_.back()) {
    return x_.back();  // beyond table range; p < 1e-27
  }
  // Cubic Hermite in s = log t on the uniform knot grid.
  const double s = std::log(t);
  const double pos = (s - log_t_lo_) / log_t_step_;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i >= t_.size() - 1) i = t_.size() - 2;
  const double theta = pos - static_cast<double>(i);
  const double h = log_t_step_;
  // Derivatives with respect to s: dx/ds = t * dx/dt.
  const double m0 = t_[i] * dxdt_[i];
  const double m1 = t_[i + 1] * dxdt_[i + 1];
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  return (2 * t3 - 3 * t2 + 1) * x_[i] + (t3 - 2 * t2 + theta) * h * m0 +
         (-2 * t3 + 3 * t2) * x_[i + 1] + (t3 - t2) * h * m1;
}

std::vector<double> SeIntervalSampler::sample(std::size_t n,
                                              std::uint64_t seed) const {
  Xoshiro256pp rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double u = 1.0 - rng.uniform01();  // [0, 1)
    v = quantile(u);
  }
  return out;
}

std::vector<double> sample_se_intervals(double gamma, std::size_t n,
                                        std::uint64_t seed) {
  return SeIntervalSampler(gamma).sample(n, seed);
}

}  // namespace vri
