#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vri {

enum class SynthKind { CorrelatedGaussian, WhiteNoise, SeIntervals };

struct SynthSpec {
  std::size_t length = 1 << 20;  // power of two, >= 4096
  double alpha_target = 0.5;     // in (0.5, 1] for correlated series
  std::uint64_t seed = 0;
  SynthKind kind = SynthKind::CorrelatedGaussian;
  double gamma = 1.0;  // only for SeIntervals
};

// Long-range correlated Gaussian noise by Fourier filtering: the spectrum
// of an i.i.d. Gaussian draw is shaped by f^(-beta/2) with
// beta = 2*alpha_target - 1, the zero-frequency amplitude set to 0, and
// the result standardized to zero mean and unit variance.
// alpha_target <= 0.5 falls back to the white-noise path; > 1 throws.
std::vector<double> generate_correlated(const SynthSpec& spec);

// Standardized i.i.d. Gaussian series.
std::vector<double> white_noise(std::size_t length, std::uint64_t seed);

// Uniform random permutation in place, deterministic per seed.
void shuffle(std::span<double> series, std::uint64_t seed);

// Draws from the unit-norm unit-mean stretched exponential density by
// numeric inversion of its CDF, P(1/gamma, (a*x)^gamma), tabulated on a
// log grid of exponential deviates with monotone cubic interpolation.
class SeIntervalSampler {
 public:
  explicit SeIntervalSampler(double gamma);

  // Maps a uniform u in (0, 1) to the quantile x with F(x) = u.
  double quantile(double u) const;

  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  double gamma() const { return gamma_; }

 private:
  double gamma_;
  double a_ = 0.0;
  double c_ = 0.0;
  // Knots over t = -log(1-u): abscissae are log-uniform in t.
  std::vector<double> t_;
  std::vector<double> x_;
  std::vector<double> dxdt_;
  double log_t_lo_ = 0.0;
  double log_t_step_ = 0.0;
};

std::vector<double> sample_se_intervals(double gamma, std::size_t n,
                                        std::uint64_t seed);

}  // namespace vri
